#include "adviser/taxonomy.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace adviser {

std::string_view to_string(ObjectClass c) {
    switch (c) {
        case ObjectClass::bus: return "bus";
        case ObjectClass::car: return "car";
        case ObjectClass::motorbike: return "motorbike";
    }
    throw std::logic_error("unreachable object class");
}

ObjectClass object_class_from_string(std::string_view s) {
    if (s == "bus") return ObjectClass::bus;
    if (s == "car") return ObjectClass::car;
    if (s == "motorbike") return ObjectClass::motorbike;
    throw std::invalid_argument("unknown object class: " + std::string(s));
}

KeypointTaxonomy KeypointTaxonomy::pascal3d_vehicles() {
    static const std::vector<std::string> lines = {
        "bus,body_back_left_lower",    "bus,body_back_left_upper",
        "bus,body_back_right_lower",   "bus,body_back_right_upper",
        "bus,body_front_left_lower",   "bus,body_front_left_upper",
        "bus,body_front_right_lower",  "bus,body_front_right_upper",
        "bus,left_back_wheel",         "bus,left_front_wheel",
        "bus,right_back_wheel",        "bus,right_front_wheel",
        "car,left_back_trunk",         "car,left_back_wheel",
        "car,left_front_light",        "car,left_front_wheel",
        "car,right_back_trunk",        "car,right_back_wheel",
        "car,right_front_light",       "car,right_front_wheel",
        "car,upper_left_rearwindow",   "car,upper_left_windshield",
        "car,upper_right_rearwindow",  "car,upper_right_windshield",
        "motorbike,back_seat",         "motorbike,front_seat",
        "motorbike,head_center",       "motorbike,headlight_center",
        "motorbike,left_back_wheel",   "motorbike,left_front_wheel",
        "motorbike,left_handle_center","motorbike,right_back_wheel",
        "motorbike,right_front_wheel", "motorbike,right_handle_center",
    };
    return from_lines(lines);
}

KeypointTaxonomy KeypointTaxonomy::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open taxonomy file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        lines.push_back(line);
    }
    return from_lines(lines);
}

KeypointTaxonomy KeypointTaxonomy::from_lines(const std::vector<std::string>& lines) {
    KeypointTaxonomy tax;
    int last_class = -1;
    std::array<bool, kNumClasses> seen{};
    for (const std::string& line : lines) {
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("taxonomy: malformed line (expected class,name): " + line);
        const ObjectClass c = object_class_from_string(line.substr(0, comma));
        const std::string name = line.substr(comma + 1);
        if (name.empty()) throw std::runtime_error("taxonomy: empty keypoint name: " + line);

        const int ci = static_cast<int>(c);
        if (ci < last_class)
            throw std::runtime_error("taxonomy: classes must form contiguous blocks in bus, car, motorbike order");
        if (ci != last_class) {
            if (seen[static_cast<std::size_t>(ci)])
                throw std::runtime_error("taxonomy: class block split: " + std::string(to_string(c)));
            seen[static_cast<std::size_t>(ci)] = true;
            tax.slices_[static_cast<std::size_t>(ci)].begin = static_cast<int>(tax.names_.size());
            last_class = ci;
        }
        for (int i = tax.slices_[static_cast<std::size_t>(ci)].begin; i < static_cast<int>(tax.names_.size()); ++i)
            if (tax.names_[static_cast<std::size_t>(i)] == name)
                throw std::runtime_error("taxonomy: duplicate keypoint name in class: " + line);
        tax.names_.push_back(name);
        tax.slices_[static_cast<std::size_t>(ci)].end = static_cast<int>(tax.names_.size());
    }
    if (static_cast<int>(tax.names_.size()) != kNumKeypoints)
        throw std::runtime_error("taxonomy: expected exactly " + std::to_string(kNumKeypoints) +
                                 " keypoints, got " + std::to_string(tax.names_.size()));
    for (int c = 0; c < kNumClasses; ++c)
        if (!seen[static_cast<std::size_t>(c)])
            throw std::runtime_error("taxonomy: missing class block: " +
                                     std::string(to_string(static_cast<ObjectClass>(c))));
    return tax;
}

void KeypointTaxonomy::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write taxonomy file: " + path);
    for (int i = 0; i < kNumKeypoints; ++i)
        out << to_string(class_of(i)) << ',' << names_[static_cast<std::size_t>(i)] << '\n';
}

int KeypointTaxonomy::keypoint_index(ObjectClass c, std::string_view name) const {
    const IndexRange r = class_slice(c);
    for (int i = r.begin; i < r.end; ++i)
        if (names_[static_cast<std::size_t>(i)] == name) return i;
    throw std::invalid_argument("unknown keypoint '" + std::string(name) + "' for class " +
                                std::string(to_string(c)));
}

const std::string& KeypointTaxonomy::keypoint_name(int global_index) const {
    if (global_index < 0 || global_index >= kNumKeypoints)
        throw std::invalid_argument("keypoint index out of range: " + std::to_string(global_index));
    return names_[static_cast<std::size_t>(global_index)];
}

ObjectClass KeypointTaxonomy::class_of(int global_index) const {
    for (int c = 0; c < kNumClasses; ++c)
        if (slices_[static_cast<std::size_t>(c)].contains(global_index))
            return static_cast<ObjectClass>(c);
    throw std::invalid_argument("keypoint index out of range: " + std::to_string(global_index));
}

}  // namespace adviser
