#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adviser/advisee.hpp"

namespace adviser {

enum class PolicyKind {
    adviser_classification,  // argmax of masked probabilities over visible
    adviser_regression,      // argmin of predicted errors over visible
    oracle_upper,            // min true error (friendly oracle)
    oracle_lower,            // max true error (adversarial oracle)
    expected,                // per-record mean over visible (no selection)
    frequency_prior,         // most frequently visible first
    performance_prior,       // best historical mean error first
};

std::string_view to_string(PolicyKind k);

/// Per-class keypoint rankings; each entry is a permutation of its class slice.
using ClassRankings = std::array<std::vector<int>, kNumClasses>;

struct Policy {
    PolicyKind kind = PolicyKind::oracle_upper;
    ClassRankings rankings;  // priors only
};

Policy make_policy(PolicyKind kind);  // non-prior kinds
Policy make_frequency_prior(std::span<const AdviseeRecord> reference, const KeypointTaxonomy& tax);
Policy make_performance_prior(std::span<const AdviseeRecord> reference, const KeypointTaxonomy& tax);

/// Keypoints sorted by descending visibility count within each class slice,
/// ties by ascending index.
ClassRankings frequency_prior_ranking(std::span<const AdviseeRecord> records,
                                      const KeypointTaxonomy& tax);

/// Keypoints sorted by ascending mean error over the records where they are
/// visible; keypoints never seen rank after all observed ones, ties by index.
ClassRankings performance_prior_ranking(std::span<const AdviseeRecord> records,
                                        const KeypointTaxonomy& tax);

/// Arithmetic mean of the record's visible errors, degrees.
double expected_error(const AdviseeRecord& record);

/// The chosen global keypoint index. Adviser policies require scores (masked
/// probabilities, or predicted errors for the regression variant); ties break
/// to the lowest global index. The expected policy selects nothing and is
/// rejected here.
int select_keypoint(const Policy& policy, const AdviseeRecord& record,
                    const KeypointTaxonomy& tax,
                    const std::vector<double>* scores = nullptr);

}  // namespace adviser
