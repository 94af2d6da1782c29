#include "adviser/labels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace adviser {

ErrorUnits error_units_from_string(std::string_view s) {
    if (s == "degrees") return ErrorUnits::degrees;
    if (s == "radians") return ErrorUnits::radians;
    throw std::invalid_argument("unknown error units: " + std::string(s));
}

std::string_view to_string(ErrorUnits u) {
    return u == ErrorUnits::degrees ? "degrees" : "radians";
}

SoftLabel soft_label(const AdviseeRecord& record, const LabelConfig& config) {
    if (!(config.temperature > 0.0))
        throw std::invalid_argument("label temperature must be > 0");
    if (record.errors.empty())
        throw std::invalid_argument("invalid record: no visible keypoint errors (" +
                                    record.instance_id + ")");

    const double scale = config.units == ErrorUnits::degrees ? 1.0 : kPi / 180.0;

    double min_e = std::numeric_limits<double>::infinity();
    for (const auto& [k, e] : record.errors) min_e = std::min(min_e, e * scale);

    SoftLabel label;
    label.p.assign(static_cast<std::size_t>(kNumKeypoints), 0.0);
    double denom = 0.0;
    for (const auto& [k, e] : record.errors) {
        // max-shift: exp(-(e - e_min)/T) keeps the largest term at 1
        const double w = std::exp(-(e * scale - min_e) / config.temperature);
        label.p[static_cast<std::size_t>(k)] = w;
        denom += w;
    }
    for (const auto& [k, e] : record.errors) label.p[static_cast<std::size_t>(k)] /= denom;
    return label;
}

RegressionTargets regression_targets(const AdviseeRecord& record, ErrorUnits units) {
    if (record.errors.empty())
        throw std::invalid_argument("invalid record: no visible keypoint errors (" +
                                    record.instance_id + ")");
    const double scale = units == ErrorUnits::degrees ? 1.0 : kPi / 180.0;
    RegressionTargets t;
    t.target.assign(static_cast<std::size_t>(kNumKeypoints), 0.0);
    t.mask.assign(static_cast<std::size_t>(kNumKeypoints), 0);
    for (const auto& [k, e] : record.errors) {
        t.target[static_cast<std::size_t>(k)] = e * scale;
        t.mask[static_cast<std::size_t>(k)] = 1;
    }
    return t;
}

}  // namespace adviser
