#pragma once

#include <array>
#include <cstddef>

#include "adviser/rng.hpp"

namespace adviser {

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double d) { return d * (kPi / 180.0); }
inline constexpr double rad2deg(double r) { return r * (180.0 / kPi); }

/// Row-major 3x3 matrix, just enough linear algebra for SO(3) work.
struct Mat3 {
    std::array<double, 9> a{};

    double& operator()(int r, int c) { return a[static_cast<std::size_t>(3 * r + c)]; }
    double operator()(int r, int c) const { return a[static_cast<std::size_t>(3 * r + c)]; }

    static Mat3 identity();
    Mat3 transposed() const;
    double trace() const { return a[0] + a[4] + a[8]; }
    double det() const;
    double frobenius_norm() const;

    Mat3 operator*(const Mat3& o) const;
    Mat3 operator+(const Mat3& o) const;
    Mat3 operator-(const Mat3& o) const;
    Mat3 operator*(double s) const;
};

/// Camera pose as (azimuth, pitch, roll) in radians.
///
/// Convention (matters for every error value downstream): the matrix form is
/// the intrinsic ZXZ product  R = Rz(roll) * Rx(pitch) * Rz(azimuth).
/// Canonical ranges: azimuth in [0, 2pi), pitch in [-pi/2, pi/2],
/// roll in (-pi, pi].
struct EulerPose {
    double azimuth = 0.0;
    double pitch = 0.0;
    double roll = 0.0;

    // Wraps azimuth and roll to their principal ranges. Pitch is wrapped and
    // then clamped to [-pi/2, pi/2]: elevations beyond that band have no ZXZ
    // representation with in-range pitch (they need R33 < 0) and lie outside
    // this parameterization's domain. Throws on non-finite input.
    static EulerPose canonicalized(double azimuth, double pitch, double roll);
};

/// Orthonormal 3x3 with det +1; construction validates (tol 1e-9).
class RotationMatrix {
public:
    static RotationMatrix from_matrix(const Mat3& m);  // throws invalid-rotation

    const Mat3& matrix() const { return m_; }
    double operator()(int r, int c) const { return m_(r, c); }

private:
    explicit RotationMatrix(const Mat3& m) : m_(m) {}
    Mat3 m_;
};

Mat3 rotation_x(double t);
Mat3 rotation_z(double t);

/// R = Rz(roll) * Rx(pitch) * Rz(azimuth). Throws on non-finite pose.
RotationMatrix pose_to_rotation(const EulerPose& pose);

/// Geodesic distance in radians, range [0, pi]:
/// acos(clamp((trace(a^T b) - 1) / 2, -1, 1)), which equals
/// ||log(a^T b)||_F / sqrt(2). The clamp absorbs floating-point drift at the
/// endpoints.
double geodesic_distance(const RotationMatrix& a, const RotationMatrix& b);

/// Haar-uniform rotation (Shoemake subgroup method), deterministic per stream.
RotationMatrix random_rotation(Rng& rng);

}  // namespace adviser
