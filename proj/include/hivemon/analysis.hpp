#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hivemon/physics.hpp"
#include "hivemon/store.hpp"

namespace hivemon {

struct TrajectoryPoint {
    int64_t ts_ms = 0;
    double x_mm = 0.0;
    double y_mm = 0.0;

    friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

/// Time-ordered center-of-mass path across one run.
struct Trajectory {
    std::vector<TrajectoryPoint> points;
    PlatformGeometry geometry;
};

/// Projects records onto (ts, x, y), optionally smoothing x and y with a
/// centered moving average of `smooth_window` points (1 = off). Throws
/// EmptyInputError when no records are given.
Trajectory trajectory(std::span<const Record> records, const PlatformGeometry& geometry,
                      size_t smooth_window = 1);

struct ConsumptionPoint {
    int64_t day_index = 0;
    double grams_per_day = 0.0;
};

/// Daily consumption estimate: for every integer day whose centered
/// window_days span lies inside the data, the least-squares slope of
/// total_g over time, negated to grams consumed per day. Throws
/// InsufficientSpanError when the records cover less than window_days.
std::vector<ConsumptionPoint> consumption_rate(std::span<const Record> records,
                                               int window_days = 7);

/// Standalone SVG: the platform rectangle to scale, the trajectory
/// polyline, start/end markers and mm axis labels. Byte-deterministic for
/// identical input. With relative_to_start the path is drawn as
/// displacement from its first point, re-centred on the platform centre.
/// Throws EmptyInputError for an empty trajectory.
std::string render_svg(const Trajectory& traj, bool relative_to_start = false);

}  // namespace hivemon
