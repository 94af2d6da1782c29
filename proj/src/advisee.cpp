#include "adviser/advisee.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "adviser/rng.hpp"

namespace adviser {

namespace {

// substream tags
constexpr std::uint64_t kTagEstimate = 0x01;
constexpr std::uint64_t kTagInstance = 0x02;

constexpr double kNominalPitchDeg = 10.0;
constexpr double kNominalRollDeg = 0.0;
constexpr double kTruthSigmaDeg = 5.0;
constexpr double kImageSize = 224.0;

}  // namespace

std::vector<int> AdviseeRecord::visible_indices() const {
    std::vector<int> v;
    v.reserve(errors.size());
    for (const auto& [k, e] : errors) v.push_back(k);
    return v;
}

void SyntheticAdviseeParams::validate() const {
    if (!(base_noise_deg >= 0.0)) throw std::runtime_error("config error: base_noise_deg must be >= 0");
    if (!(difficulty_lo >= 0.0 && difficulty_hi <= 1.0 && difficulty_lo <= difficulty_hi))
        throw std::runtime_error("config error: difficulty range must satisfy 0 <= lo <= hi <= 1");
    if (!(instance_perturbation >= 0.0))
        throw std::runtime_error("config error: instance_perturbation must be >= 0");
    if (!(feature_noise >= 0.0)) throw std::runtime_error("config error: feature_noise must be >= 0");
    if (!(visibility > 0.0 && visibility <= 1.0))
        throw std::runtime_error("config error: visibility must be in (0, 1]");
    for (double v : informativeness)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::runtime_error("config error: informativeness values must be in [0, 1]");
    if (!informativeness.empty() && static_cast<int>(informativeness.size()) != kNumKeypoints)
        throw std::runtime_error("config error: informativeness must have one value per keypoint");
}

std::vector<double> default_informativeness(const KeypointTaxonomy& tax) {
    std::vector<double> iota(static_cast<std::size_t>(kNumKeypoints), 0.0);
    for (int c = 0; c < kNumClasses; ++c) {
        const IndexRange r = tax.class_slice(static_cast<ObjectClass>(c));
        const int m = r.size();
        for (int i = 0; i < m; ++i) {
            const double t = (m == 1) ? 0.5 : static_cast<double>(i) / (m - 1);
            iota[static_cast<std::size_t>(r.begin + i)] = 0.05 + 0.9 * t;
        }
    }
    return iota;
}

EulerPose Advisee::estimate(const Instance& instance, const KeypointAnnotation& query) const {
    const bool visible = std::any_of(instance.visible.begin(), instance.visible.end(),
                                     [&](const KeypointAnnotation& a) { return a.keypoint == query.keypoint; });
    if (!visible)
        throw std::invalid_argument("invalid query: keypoint " + std::to_string(query.keypoint) +
                                    " not visible on instance " + instance.id);
    return do_estimate(instance, query);
}

SyntheticAdvisee::SyntheticAdvisee(SyntheticAdviseeParams params, std::uint64_t seed)
    : params_(std::move(params)), seed_(seed) {
    params_.validate();
}

void SyntheticAdvisee::register_instance(const std::string& id, InstanceModel model) {
    models_[id] = std::move(model);
}

const SyntheticAdvisee::InstanceModel& SyntheticAdvisee::instance_model(const std::string& id) const {
    const auto it = models_.find(id);
    if (it == models_.end())
        throw std::invalid_argument("unknown instance for synthetic advisee: " + id);
    return it->second;
}

EulerPose SyntheticAdvisee::do_estimate(const Instance& instance,
                                        const KeypointAnnotation& query) const {
    const InstanceModel& model = instance_model(instance.id);
    Rng rng(substream_seed(seed_, kTagEstimate, instance.id,
                           static_cast<std::uint64_t>(query.keypoint)));

    const double iota = model.informativeness[static_cast<std::size_t>(query.keypoint)];
    const bool flipped = rng.uniform01() < model.difficulty * (1.0 - iota);

    const double sigma = deg2rad(params_.base_noise_deg);
    const double az = instance.truth.azimuth + (flipped ? kPi : 0.0) + rng.gaussian(0.0, sigma);
    const double pitch = instance.truth.pitch + rng.gaussian(0.0, sigma);
    const double roll = instance.truth.roll + rng.gaussian(0.0, sigma);
    return EulerPose::canonicalized(az, pitch, roll);
}

SyntheticDataset generate_dataset(const SyntheticAdviseeParams& params, int n, std::uint64_t seed,
                                  const KeypointTaxonomy& tax) {
    if (n < 1) throw std::runtime_error("config error: dataset size must be >= 1");
    SyntheticAdviseeParams p = params;
    if (p.informativeness.empty()) p.informativeness = default_informativeness(tax);
    p.validate();

    SyntheticDataset ds{{}, SyntheticAdvisee(p, seed)};
    ds.instances.reserve(static_cast<std::size_t>(n));

    for (int i = 0; i < n; ++i) {
        Instance inst;
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "syn-%06d", i);
            inst.id = buf;
        }
        Rng rng(substream_seed(seed, kTagInstance, inst.id));

        inst.cls = static_cast<ObjectClass>(rng.uniform_index(kNumClasses));
        const IndexRange slice = tax.class_slice(inst.cls);

        inst.truth = EulerPose::canonicalized(
            rng.uniform(0.0, 2.0 * kPi),
            deg2rad(kNominalPitchDeg) + rng.gaussian(0.0, deg2rad(kTruthSigmaDeg)),
            deg2rad(kNominalRollDeg) + rng.gaussian(0.0, deg2rad(kTruthSigmaDeg)));

        SyntheticAdvisee::InstanceModel model;
        model.difficulty = rng.uniform(p.difficulty_lo, p.difficulty_hi);
        model.informativeness.resize(static_cast<std::size_t>(kNumKeypoints));
        for (int k = 0; k < kNumKeypoints; ++k)
            model.informativeness[static_cast<std::size_t>(k)] =
                std::clamp(p.informativeness[static_cast<std::size_t>(k)] +
                               rng.gaussian(0.0, p.instance_perturbation),
                           0.0, 1.0);

        // visibility: each slice keypoint independently, resampled while empty
        std::vector<int> vis;
        do {
            vis.clear();
            for (int k = slice.begin; k < slice.end; ++k)
                if (rng.uniform01() < p.visibility) vis.push_back(k);
        } while (vis.empty());
        for (int k : vis)
            inst.visible.push_back({k, rng.uniform(0.0, kImageSize), rng.uniform(0.0, kImageSize)});

        // features: [class one-hot | visibility mask | noisy effective informativeness]
        inst.features.assign(static_cast<std::size_t>(kNumClasses + 2 * kNumKeypoints), 0.0);
        inst.features[static_cast<std::size_t>(inst.cls)] = 1.0;
        for (const KeypointAnnotation& a : inst.visible)
            inst.features[static_cast<std::size_t>(kNumClasses + a.keypoint)] = 1.0;
        for (int k = 0; k < kNumKeypoints; ++k)
            inst.features[static_cast<std::size_t>(kNumClasses + kNumKeypoints + k)] =
                model.informativeness[static_cast<std::size_t>(k)] +
                p.feature_noise * rng.gaussian(0.0, 1.0);

        ds.advisee.register_instance(inst.id, std::move(model));
        ds.instances.push_back(std::move(inst));
    }
    return ds;
}

AdviseeRecord build_record(const Advisee& advisee, const Instance& instance) {
    if (instance.visible.empty())
        throw std::invalid_argument("instance has no visible keypoints: " + instance.id);
    AdviseeRecord rec;
    rec.instance_id = instance.id;
    rec.cls = instance.cls;
    rec.features = instance.features;
    const RotationMatrix truth = pose_to_rotation(instance.truth);
    for (const KeypointAnnotation& q : instance.visible) {
        const EulerPose est = advisee.estimate(instance, q);
        rec.errors[q.keypoint] = rad2deg(geodesic_distance(pose_to_rotation(est), truth));
    }
    return rec;
}

std::vector<AdviseeRecord> build_records_serial(const Advisee& advisee,
                                                std::span<const Instance> instances) {
    std::vector<AdviseeRecord> out(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i)
        out[i] = build_record(advisee, instances[i]);
    return out;
}

std::vector<AdviseeRecord> build_records(const Advisee& advisee,
                                         std::span<const Instance> instances) {
    std::vector<AdviseeRecord> out(instances.size());
    const std::int64_t n = static_cast<std::int64_t>(instances.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = build_record(advisee, instances[static_cast<std::size_t>(i)]);
    return out;
}

}  // namespace adviser
