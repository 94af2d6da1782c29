#include "adviser/selection.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace adviser {

std::string_view to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::adviser_classification: return "adviser";
        case PolicyKind::adviser_regression: return "adviser_regression";
        case PolicyKind::oracle_upper: return "upper_bound";
        case PolicyKind::oracle_lower: return "lower_bound";
        case PolicyKind::expected: return "expected";
        case PolicyKind::frequency_prior: return "frequency_prior";
        case PolicyKind::performance_prior: return "performance_prior";
    }
    throw std::logic_error("unreachable policy kind");
}

Policy make_policy(PolicyKind kind) {
    if (kind == PolicyKind::frequency_prior || kind == PolicyKind::performance_prior)
        throw std::invalid_argument("prior policies need a reference record set");
    return Policy{kind, {}};
}

Policy make_frequency_prior(std::span<const AdviseeRecord> reference, const KeypointTaxonomy& tax) {
    return Policy{PolicyKind::frequency_prior, frequency_prior_ranking(reference, tax)};
}

Policy make_performance_prior(std::span<const AdviseeRecord> reference, const KeypointTaxonomy& tax) {
    return Policy{PolicyKind::performance_prior, performance_prior_ranking(reference, tax)};
}

ClassRankings frequency_prior_ranking(std::span<const AdviseeRecord> records,
                                      const KeypointTaxonomy& tax) {
    if (records.empty()) throw std::invalid_argument("prior ranking needs a nonempty record set");
    std::array<long, kNumKeypoints> counts{};
    for (const AdviseeRecord& r : records)
        for (const auto& [k, e] : r.errors) ++counts[static_cast<std::size_t>(k)];

    ClassRankings rankings;
    for (int c = 0; c < kNumClasses; ++c) {
        const IndexRange slice = tax.class_slice(static_cast<ObjectClass>(c));
        auto& rank = rankings[static_cast<std::size_t>(c)];
        for (int k = slice.begin; k < slice.end; ++k) rank.push_back(k);
        std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) {
            return counts[static_cast<std::size_t>(a)] > counts[static_cast<std::size_t>(b)];
        });
    }
    return rankings;
}

ClassRankings performance_prior_ranking(std::span<const AdviseeRecord> records,
                                        const KeypointTaxonomy& tax) {
    if (records.empty()) throw std::invalid_argument("prior ranking needs a nonempty record set");
    std::array<double, kNumKeypoints> sums{};
    std::array<long, kNumKeypoints> counts{};
    for (const AdviseeRecord& r : records)
        for (const auto& [k, e] : r.errors) {
            sums[static_cast<std::size_t>(k)] += e;
            ++counts[static_cast<std::size_t>(k)];
        }

    ClassRankings rankings;
    for (int c = 0; c < kNumClasses; ++c) {
        const IndexRange slice = tax.class_slice(static_cast<ObjectClass>(c));
        auto& rank = rankings[static_cast<std::size_t>(c)];
        for (int k = slice.begin; k < slice.end; ++k) rank.push_back(k);
        auto key = [&](int k) {
            // never-visible keypoints sort after every observed one
            return counts[static_cast<std::size_t>(k)] == 0
                       ? std::numeric_limits<double>::infinity()
                       : sums[static_cast<std::size_t>(k)] / counts[static_cast<std::size_t>(k)];
        };
        std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) { return key(a) < key(b); });
    }
    return rankings;
}

double expected_error(const AdviseeRecord& record) {
    if (record.errors.empty())
        throw std::invalid_argument("record has no visible errors: " + record.instance_id);
    double s = 0.0;
    for (const auto& [k, e] : record.errors) s += e;
    return s / static_cast<double>(record.errors.size());
}

int select_keypoint(const Policy& policy, const AdviseeRecord& record,
                    const KeypointTaxonomy& tax, const std::vector<double>* scores) {
    if (record.errors.empty())
        throw std::invalid_argument("record has no visible keypoints: " + record.instance_id);

    switch (policy.kind) {
        case PolicyKind::adviser_classification:
        case PolicyKind::adviser_regression: {
            if (!scores || static_cast<int>(scores->size()) != kNumKeypoints)
                throw std::invalid_argument("adviser policy requires a 34-wide score vector");
            const bool maximize = policy.kind == PolicyKind::adviser_classification;
            int best = -1;
            double best_score = 0.0;
            for (const auto& [k, e] : record.errors) {  // ascending index: ties go low
                const double s = (*scores)[static_cast<std::size_t>(k)];
                if (best < 0 || (maximize ? s > best_score : s < best_score)) {
                    best = k;
                    best_score = s;
                }
            }
            return best;
        }
        case PolicyKind::oracle_upper:
        case PolicyKind::oracle_lower: {
            const bool want_min = policy.kind == PolicyKind::oracle_upper;
            int best = -1;
            double best_err = 0.0;
            for (const auto& [k, e] : record.errors) {
                if (best < 0 || (want_min ? e < best_err : e > best_err)) {
                    best = k;
                    best_err = e;
                }
            }
            return best;
        }
        case PolicyKind::frequency_prior:
        case PolicyKind::performance_prior: {
            const auto& rank = policy.rankings[static_cast<std::size_t>(record.cls)];
            const IndexRange slice = tax.class_slice(record.cls);
            if (static_cast<int>(rank.size()) != slice.size())
                throw std::invalid_argument("prior ranking does not cover the class slice");
            for (int k : rank)
                if (record.errors.count(k)) return k;  // highest-ranked applicable
            throw std::logic_error("no visible keypoint found in prior ranking");
        }
        case PolicyKind::expected:
            throw std::invalid_argument("the expected policy does not select a keypoint");
    }
    throw std::logic_error("unreachable policy kind");
}

}  // namespace adviser
