#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adviser/so3.hpp"
#include "adviser/taxonomy.hpp"

namespace adviser {

/// A human-answered query: keypoint identity plus pixel location.
struct KeypointAnnotation {
    int keypoint = 0;  // global index
    double u = 0.0;
    double v = 0.0;
};

struct Instance {
    std::string id;
    ObjectClass cls = ObjectClass::bus;
    std::vector<double> features;
    std::vector<KeypointAnnotation> visible;  // nonempty, ascending keypoint order
    EulerPose truth;
};

/// Per-instance table of per-keypoint geodesic errors. Errors are stored in
/// degrees (the record-file unit); poses everywhere else are radians.
struct AdviseeRecord {
    std::string instance_id;
    ObjectClass cls = ObjectClass::bus;
    std::vector<double> features;   // may be empty for externally ingested records
    std::map<int, double> errors;   // keys = visible keypoint set, values in [0, 180]

    std::vector<int> visible_indices() const;
};

struct SyntheticAdviseeParams {
    double base_noise_deg = 5.0;              // sigma of per-angle gaussian noise
    std::vector<double> informativeness;      // per global keypoint, in [0, 1]; empty = default ramp
    double difficulty_lo = 0.5;               // per-instance flip difficulty range
    double difficulty_hi = 1.0;
    double instance_perturbation = 0.15;      // sigma of per-(instance,keypoint) informativeness jitter
    double feature_noise = 0.1;               // sigma of noise on the informativeness feature block
    double visibility = 0.7;                  // independent per-keypoint visibility probability

    void validate() const;  // throws config error on out-of-range fields
};

/// Default informativeness ramp: within each class slice, evenly spaced values
/// from 0.05 to 0.95 so every class has both good and bad keypoints to learn.
std::vector<double> default_informativeness(const KeypointTaxonomy& tax);

/// Black-box pose estimator consuming one keypoint hint. estimate() enforces
/// the visibility precondition, then defers to the implementation.
class Advisee {
public:
    virtual ~Advisee() = default;

    EulerPose estimate(const Instance& instance, const KeypointAnnotation& query) const;

private:
    virtual EulerPose do_estimate(const Instance& instance,
                                  const KeypointAnnotation& query) const = 0;
};

/// Deterministic stand-in for a real hint-conditioned estimator. The estimate
/// equals the truth except the azimuth flips by pi with probability
/// difficulty * (1 - effective informativeness of the queried keypoint);
/// gaussian noise (sigma = base_noise_deg) is then added to every angle.
/// Each (instance, keypoint) pair draws from its own hashed substream, so
/// estimates are order-independent and parallel-safe.
class SyntheticAdvisee final : public Advisee {
public:
    struct InstanceModel {
        double difficulty = 0.0;
        std::vector<double> informativeness;  // effective, per global keypoint
    };

    SyntheticAdvisee(SyntheticAdviseeParams params, std::uint64_t seed);

    void register_instance(const std::string& id, InstanceModel model);
    const InstanceModel& instance_model(const std::string& id) const;

    const SyntheticAdviseeParams& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }

private:
    EulerPose do_estimate(const Instance& instance,
                          const KeypointAnnotation& query) const override;

    SyntheticAdviseeParams params_;
    std::uint64_t seed_ = 0;
    std::map<std::string, InstanceModel> models_;
};

struct SyntheticDataset {
    std::vector<Instance> instances;
    SyntheticAdvisee advisee;
};

/// n instances with truth poses, visibility sets, features and a bound
/// synthetic advisee; a pure function of (params, n, seed).
SyntheticDataset generate_dataset(const SyntheticAdviseeParams& params, int n, std::uint64_t seed,
                                  const KeypointTaxonomy& tax);

/// Runs the advisee on every visible keypoint; errors in degrees.
AdviseeRecord build_record(const Advisee& advisee, const Instance& instance);

/// Record building is independent per instance; the parallel kernel and the
/// serial reference produce bitwise-identical output.
std::vector<AdviseeRecord> build_records(const Advisee& advisee, std::span<const Instance> instances);
std::vector<AdviseeRecord> build_records_serial(const Advisee& advisee,
                                                std::span<const Instance> instances);

// ---- record files (JSON Lines, degrees on the wire) ------------------------

struct IngestIssue {
    int line = 0;
    std::string message;
};

struct IngestResult {
    std::vector<AdviseeRecord> records;
    std::vector<IngestIssue> issues;  // empty iff every line validated
};

/// Parses and validates a record file; malformed lines are reported with line
/// numbers instead of aborting the scan.
IngestResult ingest_records(const std::string& path, const KeypointTaxonomy& tax);

/// ingest_records that throws (listing the first issues) if anything failed.
std::vector<AdviseeRecord> load_records(const std::string& path, const KeypointTaxonomy& tax);

/// instances, when given, must be aligned with records and supply the optional
/// truth_pose_deg / locations fields.
void save_records(const std::string& path, std::span<const AdviseeRecord> records,
                  const KeypointTaxonomy& tax,
                  std::span<const Instance> instances = {});

std::string records_to_jsonl(std::span<const AdviseeRecord> records, const KeypointTaxonomy& tax,
                             std::span<const Instance> instances = {});

/// Throws if the feature dimension is not constant across records (records
/// without features are ignored; returns 0 if none carry features).
int feature_dimension(std::span<const AdviseeRecord> records);

}  // namespace adviser
