#pragma once

#include "fpd/mcmd.hpp"
#include "fpd/metrics.hpp"
#include "fpd/mpd.hpp"

#include <json.hpp>

#include <string>

namespace fpd {

// All reports use ordered_json so key order (and therefore output bytes)
// is stable across runs.
nlohmann::ordered_json to_json(const CameraMotionResult& r);
nlohmann::ordered_json to_json(const PointMotionFlags& f);
nlohmann::ordered_json to_json(const MetricsReport& r);

// Fixed "%.9f"-style decimal formatting for CSV cells.
std::string csv_number(double v);

} // namespace fpd
