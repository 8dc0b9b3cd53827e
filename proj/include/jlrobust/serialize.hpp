#pragma once

// JSON views of the pipeline results. Depends on the vendored single-header
// nlohmann/json (vendor/json.hpp), unlike the rest of the library; include
// this header only where that is on the include path.

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "kcenter.hpp"
#include "projection.hpp"
#include "svm.hpp"

namespace jlrobust {

// Maps are stored as {variant, d, dTilde, seed}; the matrix is always
// regenerated from the seed. A custom map has no seed to regenerate from,
// so it refuses to serialize.
inline nlohmann::json descriptor_to_json(const ProjectionDescriptor& desc) {
    if (desc.variant == Variant::custom)
        throw std::invalid_argument("descriptor_to_json: custom maps cannot be serialized");
    return {{"variant", variant_name(desc.variant)},
            {"d", desc.d},
            {"dTilde", desc.d_tilde},
            {"seed", desc.seed}};
}

inline ProjectionDescriptor descriptor_from_json(const nlohmann::json& j) {
    ProjectionDescriptor desc;
    desc.variant = variant_from_name(j.at("variant").get<std::string>());
    if (desc.variant == Variant::custom)
        throw std::invalid_argument("descriptor_from_json: custom maps cannot be deserialized");
    desc.d = j.at("d").get<std::size_t>();
    desc.d_tilde = j.at("dTilde").get<std::size_t>();
    desc.seed = j.at("seed").get<std::uint64_t>();
    return desc;
}

inline nlohmann::json timing_to_json(const PipelineTiming& t) {
    return {{"jl", t.t_jl}, {"blackbox", t.t_blackbox}, {"recover", t.t_recover}};
}

inline nlohmann::json comb_to_json(const ConvexCombination& comb) {
    return {{"indices", comb.indices}, {"weights", comb.weights}};
}

inline nlohmann::json margin_to_json(const MarginResult& r) {
    nlohmann::json j{{"direction", r.direction},
                     {"width", r.width},
                     {"inliers", r.inliers},
                     {"timing", timing_to_json(r.timing)},
                     {"blackbox", r.blackbox_name},
                     {"comb", comb_to_json(r.comb)}};
    if (!r.inliers_second.empty()) {
        j["inliersSecond"] = r.inliers_second;
        j["combSecond"] = comb_to_json(r.comb_second);
    }
    if (r.descriptor.variant != Variant::custom) j["map"] = descriptor_to_json(r.descriptor);
    return j;
}

inline nlohmann::json kcenter_to_json(const KCenterResult& r) {
    nlohmann::json centers = nlohmann::json::array();
    for (std::size_t c = 0; c < r.centers.size(); ++c) {
        const auto row = r.centers.row(c);
        centers.push_back(std::vector<double>(row.begin(), row.end()));
    }
    nlohmann::json combs = nlohmann::json::array();
    for (const ConvexCombination& comb : r.combs) combs.push_back(comb_to_json(comb));
    nlohmann::json j{{"centers", centers},
                     {"radius", r.radius},
                     {"assignment", r.assignment},
                     {"timing", timing_to_json(r.timing)},
                     {"blackbox", r.blackbox_name},
                     {"combs", combs}};
    if (r.descriptor.variant != Variant::custom) j["map"] = descriptor_to_json(r.descriptor);
    return j;
}

}  // namespace jlrobust
