#pragma once

#include <vector>

#include "adviser/advisee.hpp"

namespace adviser {

enum class ErrorUnits { degrees, radians };

ErrorUnits error_units_from_string(std::string_view s);
std::string_view to_string(ErrorUnits u);

struct LabelConfig {
    double temperature = 10.0;                 // must be > 0
    ErrorUnits units = ErrorUnits::degrees;    // units fed to the softmax
};

/// Temperature-softmax distribution over the visible keypoints:
/// y_i = exp(-e_i/T) / sum_{j visible} exp(-e_j/T), exactly 0 off-support.
struct SoftLabel {
    std::vector<double> p;  // size 34
};

SoftLabel soft_label(const AdviseeRecord& record, const LabelConfig& config);

/// Per-keypoint error targets for the regression variant; mask marks the
/// visible entries (only those participate in the loss).
struct RegressionTargets {
    std::vector<double> target;   // size 34, error in requested units on visible entries
    std::vector<std::uint8_t> mask;  // size 34
};

RegressionTargets regression_targets(const AdviseeRecord& record, ErrorUnits units);

}  // namespace adviser
