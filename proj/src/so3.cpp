#include "adviser/so3.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adviser {

namespace {

constexpr double kOrthoTol = 1e-9;

// wrap into [0, 2pi)
double wrap_two_pi(double x) {
    double y = std::fmod(x, 2.0 * kPi);
    if (y < 0.0) y += 2.0 * kPi;
    if (y >= 2.0 * kPi) y = 0.0;  // fmod can land exactly on 2pi after the add
    return y;
}

// wrap into (-pi, pi]
double wrap_pi(double x) {
    double y = wrap_two_pi(x);
    if (y > kPi) y -= 2.0 * kPi;
    return y;
}

}  // namespace

Mat3 Mat3::identity() {
    Mat3 m;
    m.a = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    return m;
}

Mat3 Mat3::transposed() const {
    Mat3 t;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) t(r, c) = (*this)(c, r);
    return t;
}

double Mat3::det() const {
    const Mat3& m = *this;
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

double Mat3::frobenius_norm() const {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

Mat3 Mat3::operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
            r(i, j) = s;
        }
    return r;
}

Mat3 Mat3::operator+(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.a[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] + o.a[static_cast<std::size_t>(i)];
    return r;
}

Mat3 Mat3::operator-(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.a[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] - o.a[static_cast<std::size_t>(i)];
    return r;
}

Mat3 Mat3::operator*(double s) const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.a[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] * s;
    return r;
}

EulerPose EulerPose::canonicalized(double azimuth, double pitch, double roll) {
    if (!std::isfinite(azimuth) || !std::isfinite(pitch) || !std::isfinite(roll))
        throw std::invalid_argument("invalid pose: non-finite angle");
    EulerPose p;
    p.azimuth = wrap_two_pi(azimuth);
    p.pitch = std::clamp(wrap_pi(pitch), -kPi / 2.0, kPi / 2.0);
    p.roll = wrap_pi(roll);
    return p;
}

RotationMatrix RotationMatrix::from_matrix(const Mat3& m) {
    for (double v : m.a)
        if (!std::isfinite(v)) throw std::invalid_argument("invalid rotation: non-finite entry");
    const Mat3 g = m * m.transposed() - Mat3::identity();
    for (double v : g.a)
        if (std::abs(v) > kOrthoTol)
            throw std::invalid_argument("invalid rotation: matrix is not orthonormal");
    if (std::abs(m.det() - 1.0) > kOrthoTol)
        throw std::invalid_argument("invalid rotation: determinant is not +1");
    return RotationMatrix(m);
}

Mat3 rotation_x(double t) {
    const double c = std::cos(t), s = std::sin(t);
    Mat3 m;
    m.a = {1, 0, 0, 0, c, -s, 0, s, c};
    return m;
}

Mat3 rotation_z(double t) {
    const double c = std::cos(t), s = std::sin(t);
    Mat3 m;
    m.a = {c, -s, 0, s, c, 0, 0, 0, 1};
    return m;
}

RotationMatrix pose_to_rotation(const EulerPose& pose) {
    if (!std::isfinite(pose.azimuth) || !std::isfinite(pose.pitch) || !std::isfinite(pose.roll))
        throw std::invalid_argument("invalid pose: non-finite angle");
    return RotationMatrix::from_matrix(rotation_z(pose.roll) * rotation_x(pose.pitch) *
                                       rotation_z(pose.azimuth));
}

double geodesic_distance(const RotationMatrix& a, const RotationMatrix& b) {
    // trace(a^T b) = sum_ij a_ij * b_ij; summed in fixed index order so the
    // result is bitwise symmetric in (a, b).
    double tr = 0.0;
    for (int i = 0; i < 9; ++i)
        tr += a.matrix().a[static_cast<std::size_t>(i)] * b.matrix().a[static_cast<std::size_t>(i)];
    const double c = std::clamp((tr - 1.0) / 2.0, -1.0, 1.0);
    return std::acos(c);
}

RotationMatrix random_rotation(Rng& rng) {
    // Shoemake: uniform quaternion from three uniforms.
    const double u1 = rng.uniform01();
    const double u2 = rng.uniform01();
    const double u3 = rng.uniform01();
    const double sq1 = std::sqrt(1.0 - u1), sq2 = std::sqrt(u1);
    const double w = sq1 * std::sin(2.0 * kPi * u2);
    const double x = sq1 * std::cos(2.0 * kPi * u2);
    const double y = sq2 * std::sin(2.0 * kPi * u3);
    const double z = sq2 * std::cos(2.0 * kPi * u3);

    Mat3 m;
    m.a = {1 - 2 * (y * y + z * z), 2 * (x * y - w * z),     2 * (x * z + w * y),
           2 * (x * y + w * z),     1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
           2 * (x * z - w * y),     2 * (y * z + w * x),     1 - 2 * (x * x + y * y)};
    return RotationMatrix::from_matrix(m);
}

}  // namespace adviser
