#include "fpd/reports.hpp"

#include <cstdio>

namespace fpd {

nlohmann::ordered_json to_json(const CameraMotionResult& r) {
    nlohmann::ordered_json j;
    j["moving"] = r.moving;
    j["coarse"] = {{"fraction", r.coarse_fraction}, {"moving", r.coarse_moving}};
    auto& clips = j["clips"] = nlohmann::ordered_json::array();
    for (const auto& c : r.clips)
        clips.push_back({{"begin", c.range.begin},
                         {"end", c.range.end},
                         {"fraction", c.fraction},
                         {"moving", c.moving}});
    j["config"] = {{"lambda_coarse", r.config_used.lambda_coarse},
                   {"lambda_fine", r.config_used.lambda_fine},
                   {"eta", r.config_used.eta},
                   {"clip_seconds", r.config_used.clip_seconds}};
    return j;
}

nlohmann::ordered_json to_json(const PointMotionFlags& f) {
    nlohmann::ordered_json j;
    j["computed"] = f.computed;
    j["config"] = {{"rho", f.config_used.rho}, {"min_visible", f.config_used.min_visible}};
    j["num_points"] = f.num_points();
    auto& points = j["points"] = nlohmann::ordered_json::array();
    for (int i = 0; i < f.num_points(); ++i)
        points.push_back({{"index", i},
                          {"sigma_x", f.sigma_x[static_cast<std::size_t>(i)]},
                          {"sigma_y", f.sigma_y[static_cast<std::size_t>(i)]},
                          {"n_visible", f.visible_counts[static_cast<std::size_t>(i)]},
                          {"static", f.static_flags[static_cast<std::size_t>(i)] != 0}});
    return j;
}

nlohmann::ordered_json to_json(const MetricsReport& r) {
    nlohmann::ordered_json j;
    j["average_jaccard"] = r.average_jaccard;
    auto& th = j["thresholds"] = nlohmann::ordered_json::array();
    for (const auto& c : r.per_threshold)
        th.push_back({{"delta", c.delta},
                      {"tp", c.tp},
                      {"fp", c.fp},
                      {"fn", c.fn},
                      {"jaccard", c.jaccard()}});
    j["num_points"] = r.num_points;
    j["num_frames"] = r.num_frames;
    j["num_slots_evaluated"] = r.num_slots_evaluated;
    return j;
}

std::string csv_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

} // namespace fpd
