#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "adviser/advisee.hpp"

namespace adviser {

namespace {

using nlohmann::json;

// One wire entry per line:
//   {"id": ..., "class": ..., "errors": {name: deg, ...},
//    "features": [...], "truth_pose_deg": [az,pitch,roll], "locations": {name: [u,v]}}
// The last three fields are optional.
json record_to_json(const AdviseeRecord& rec, const KeypointTaxonomy& tax,
                    const Instance* instance) {
    json j;
    j["id"] = rec.instance_id;
    j["class"] = std::string(to_string(rec.cls));
    json errs = json::object();
    for (const auto& [k, e] : rec.errors) errs[tax.keypoint_name(k)] = e;
    j["errors"] = std::move(errs);
    if (!rec.features.empty()) j["features"] = rec.features;
    if (instance) {
        j["truth_pose_deg"] = {rad2deg(instance->truth.azimuth), rad2deg(instance->truth.pitch),
                               rad2deg(instance->truth.roll)};
        json locs = json::object();
        for (const KeypointAnnotation& a : instance->visible)
            locs[tax.keypoint_name(a.keypoint)] = {a.u, a.v};
        j["locations"] = std::move(locs);
    }
    return j;
}

AdviseeRecord record_from_json(const json& j, const KeypointTaxonomy& tax) {
    AdviseeRecord rec;
    rec.instance_id = j.at("id").get<std::string>();
    rec.cls = object_class_from_string(j.at("class").get<std::string>());
    const IndexRange slice = tax.class_slice(rec.cls);

    const json& errs = j.at("errors");
    if (!errs.is_object() || errs.empty())
        throw std::runtime_error("errors must be a nonempty name->degrees mapping");
    for (const auto& [name, val] : errs.items()) {
        int k;
        try {
            k = tax.keypoint_index(rec.cls, name);
        } catch (const std::invalid_argument&) {
            throw std::runtime_error("taxonomy mismatch: keypoint '" + name +
                                     "' does not belong to class " + std::string(to_string(rec.cls)));
        }
        if (!slice.contains(k))
            throw std::runtime_error("taxonomy mismatch: keypoint index outside class slice");
        const double e = val.get<double>();
        if (!std::isfinite(e) || e < 0.0 || e > 180.0)
            throw std::runtime_error("error value out of range [0, 180]: " + val.dump());
        rec.errors[k] = e;
    }

    if (j.contains("features")) {
        for (const json& v : j.at("features")) rec.features.push_back(v.get<double>());
    }
    if (j.contains("truth_pose_deg")) {
        const json& t = j.at("truth_pose_deg");
        if (!t.is_array() || t.size() != 3)
            throw std::runtime_error("truth_pose_deg must be [azimuth, pitch, roll]");
        for (const json& v : t)
            if (!std::isfinite(v.get<double>()))
                throw std::runtime_error("truth_pose_deg entries must be finite");
    }
    if (j.contains("locations")) {
        for (const auto& [name, uv] : j.at("locations").items()) {
            try {
                (void)tax.keypoint_index(rec.cls, name);
            } catch (const std::invalid_argument&) {
                throw std::runtime_error("taxonomy mismatch: location keypoint '" + name +
                                         "' does not belong to class " +
                                         std::string(to_string(rec.cls)));
            }
            if (!uv.is_array() || uv.size() != 2 || uv[0].get<double>() < 0.0 ||
                uv[1].get<double>() < 0.0)
                throw std::runtime_error("locations entries must be [u, v] with u, v >= 0");
        }
    }
    return rec;
}

}  // namespace

std::string records_to_jsonl(std::span<const AdviseeRecord> records, const KeypointTaxonomy& tax,
                             std::span<const Instance> instances) {
    if (!instances.empty() && instances.size() != records.size())
        throw std::invalid_argument("instances must be empty or aligned with records");
    std::string out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const Instance* inst = instances.empty() ? nullptr : &instances[i];
        out += record_to_json(records[i], tax, inst).dump();
        out += '\n';
    }
    return out;
}

void save_records(const std::string& path, std::span<const AdviseeRecord> records,
                  const KeypointTaxonomy& tax, std::span<const Instance> instances) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write record file: " + path);
    out << records_to_jsonl(records, tax, instances);
}

IngestResult ingest_records(const std::string& path, const KeypointTaxonomy& tax) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open record file: " + path);

    IngestResult result;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            result.records.push_back(record_from_json(json::parse(line), tax));
        } catch (const json::exception& e) {
            result.issues.push_back({line_no, std::string("parse error: ") + e.what()});
        } catch (const std::exception& e) {
            result.issues.push_back({line_no, e.what()});
        }
    }
    return result;
}

std::vector<AdviseeRecord> load_records(const std::string& path, const KeypointTaxonomy& tax) {
    IngestResult r = ingest_records(path, tax);
    if (!r.issues.empty()) {
        std::ostringstream msg;
        msg << path << ": " << r.issues.size() << " invalid record line(s); first: line "
            << r.issues.front().line << ": " << r.issues.front().message;
        throw std::runtime_error(msg.str());
    }
    (void)feature_dimension(r.records);
    return std::move(r.records);
}

int feature_dimension(std::span<const AdviseeRecord> records) {
    int dim = 0;
    for (const AdviseeRecord& r : records) {
        if (r.features.empty()) continue;
        const int d = static_cast<int>(r.features.size());
        if (dim == 0) dim = d;
        if (d != dim)
            throw std::runtime_error("feature dimension not constant across records (" +
                                     std::to_string(dim) + " vs " + std::to_string(d) + " on " +
                                     r.instance_id + ")");
    }
    return dim;
}

}  // namespace adviser
