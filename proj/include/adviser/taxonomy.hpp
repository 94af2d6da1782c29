#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace adviser {

inline constexpr int kNumKeypoints = 34;
inline constexpr int kNumClasses = 3;

enum class ObjectClass { bus = 0, car = 1, motorbike = 2 };

std::string_view to_string(ObjectClass c);
ObjectClass object_class_from_string(std::string_view s);  // throws on unknown class

struct IndexRange {
    int begin = 0;  // inclusive
    int end = 0;    // exclusive

    int size() const { return end - begin; }
    bool contains(int i) const { return i >= begin && i < end; }
};

/// The global 34-keypoint vocabulary: per-class contiguous slices of the
/// global index space 0..33. Immutable after construction.
class KeypointTaxonomy {
public:
    /// Pascal 3D+ vehicle vocabulary (bus 12, car 12, motorbike 10); identical
    /// to the checked-in data/keypoints.txt.
    static KeypointTaxonomy pascal3d_vehicles();

    /// Loads "class,keypoint_name" lines ('#' comments and blanks skipped).
    /// Class blocks must be contiguous, in bus < car < motorbike order, names
    /// unique within a class, 34 entries total.
    static KeypointTaxonomy load(const std::string& path);
    static KeypointTaxonomy from_lines(const std::vector<std::string>& lines);

    void save(const std::string& path) const;

    IndexRange class_slice(ObjectClass c) const { return slices_[static_cast<std::size_t>(c)]; }

    /// Global index of (class, name); throws if the name is not in the class.
    int keypoint_index(ObjectClass c, std::string_view name) const;

    const std::string& keypoint_name(int global_index) const;
    ObjectClass class_of(int global_index) const;

    int size() const { return kNumKeypoints; }

private:
    KeypointTaxonomy() = default;

    std::array<IndexRange, kNumClasses> slices_{};
    std::vector<std::string> names_;  // by global index
};

}  // namespace adviser
