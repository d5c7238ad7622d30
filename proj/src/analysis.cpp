#include "hivemon/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hivemon/errors.hpp"
#include "hivemon/format.hpp"
#include "hivemon/scenario.hpp"

namespace hivemon {

namespace {

std::string fmt(double v) { return format_fixed(v, 3); }

}  // namespace

Trajectory trajectory(std::span<const Record> records, const PlatformGeometry& geometry,
                      size_t smooth_window) {
    if (records.empty()) throw EmptyInputError("trajectory of zero records");
    Trajectory traj;
    traj.geometry = geometry;
    traj.points.reserve(records.size());
    for (const auto& r : records) {
        traj.points.push_back({r.ts_ms, r.x_mm, r.y_mm});
    }
    if (smooth_window <= 1) return traj;

    const size_t half = smooth_window / 2;
    std::vector<TrajectoryPoint> smoothed = traj.points;
    for (size_t i = 0; i < traj.points.size(); ++i) {
        const size_t lo = i >= half ? i - half : 0;
        const size_t hi = std::min(traj.points.size() - 1, i + half);
        double sx = 0.0, sy = 0.0;
        for (size_t k = lo; k <= hi; ++k) {
            sx += traj.points[k].x_mm;
            sy += traj.points[k].y_mm;
        }
        smoothed[i].x_mm = sx / double(hi - lo + 1);
        smoothed[i].y_mm = sy / double(hi - lo + 1);
    }
    traj.points = std::move(smoothed);
    return traj;
}

std::vector<ConsumptionPoint> consumption_rate(std::span<const Record> records, int window_days) {
    if (records.empty()) throw InsufficientSpanError("no records");
    if (window_days < 1) throw std::invalid_argument("window_days must be >= 1");

    const double ms_per_day = double(kMillisPerDay);
    const double t_min = double(records.front().ts_ms) / ms_per_day;
    const double t_max = double(records.back().ts_ms) / ms_per_day;
    const double half = double(window_days) / 2.0;
    if (t_max - t_min < double(window_days)) {
        throw InsufficientSpanError("records span " + std::to_string(t_max - t_min) +
                                    " days, need " + std::to_string(window_days));
    }

    std::vector<ConsumptionPoint> series;
    const int64_t first_day = int64_t(std::ceil(t_min + half));
    const int64_t last_day = int64_t(std::floor(t_max - half));
    for (int64_t day = first_day; day <= last_day; ++day) {
        // Least-squares slope of total_g over the records inside the window.
        double st = 0.0, sy = 0.0;
        size_t n = 0;
        for (const auto& r : records) {
            const double t = double(r.ts_ms) / ms_per_day;
            if (t < double(day) - half || t > double(day) + half) continue;
            st += t;
            sy += r.total_g;
            ++n;
        }
        if (n < 2) continue;
        const double t_bar = st / double(n);
        const double y_bar = sy / double(n);
        double num = 0.0, den = 0.0;
        for (const auto& r : records) {
            const double t = double(r.ts_ms) / ms_per_day;
            if (t < double(day) - half || t > double(day) + half) continue;
            num += (t - t_bar) * (r.total_g - y_bar);
            den += (t - t_bar) * (t - t_bar);
        }
        if (den <= 0.0) continue;
        series.push_back({day, -(num / den)});
    }
    if (series.empty()) {
        throw InsufficientSpanError("no day has a full estimation window");
    }
    return series;
}

std::string render_svg(const Trajectory& traj, bool relative_to_start) {
    if (traj.points.empty()) throw EmptyInputError("render_svg of an empty trajectory");

    const double n = traj.geometry.length_x_mm;
    const double m = traj.geometry.length_y_mm;
    const double margin = 48.0;
    const double width = n + 2 * margin;
    const double height = m + 2 * margin;

    double shift_x = 0.0, shift_y = 0.0;
    if (relative_to_start) {
        shift_x = n / 2.0 - traj.points.front().x_mm;
        shift_y = m / 2.0 - traj.points.front().y_mm;
    }
    // Platform y points up; SVG y points down.
    auto sx = [&](double x) { return margin + x + shift_x; };
    auto sy = [&](double y) { return margin + (m - (y + shift_y)); };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
        << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << " " << fmt(height) << "\">\n"
        << "  <rect x=\"" << fmt(margin) << "\" y=\"" << fmt(margin) << "\" width=\"" << fmt(n)
        << "\" height=\"" << fmt(m)
        << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

    svg << "  <polyline fill=\"none\" stroke=\"#c87a14\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < traj.points.size(); ++i) {
        if (i) svg << " ";
        svg << fmt(sx(traj.points[i].x_mm)) << "," << fmt(sy(traj.points[i].y_mm));
    }
    svg << "\"/>\n";

    const auto& first = traj.points.front();
    const auto& last = traj.points.back();
    svg << "  <circle cx=\"" << fmt(sx(first.x_mm)) << "\" cy=\"" << fmt(sy(first.y_mm))
        << "\" r=\"4\" fill=\"#2e8b57\"/>\n"
        << "  <circle cx=\"" << fmt(sx(last.x_mm)) << "\" cy=\"" << fmt(sy(last.y_mm))
        << "\" r=\"4\" fill=\"#b22222\"/>\n";

    // Axis labels in platform millimetres.
    svg << "  <text x=\"" << fmt(margin) << "\" y=\"" << fmt(margin + m + 16)
        << "\" font-size=\"10\" font-family=\"sans-serif\">0</text>\n"
        << "  <text x=\"" << fmt(margin + n - 12) << "\" y=\"" << fmt(margin + m + 16)
        << "\" font-size=\"10\" font-family=\"sans-serif\">" << fmt(n) << "</text>\n"
        << "  <text x=\"" << fmt(margin + n / 2 - 18) << "\" y=\"" << fmt(margin + m + 32)
        << "\" font-size=\"11\" font-family=\"sans-serif\">x (mm)</text>\n"
        << "  <text x=\"" << fmt(margin - 14) << "\" y=\"" << fmt(margin + m + 4)
        << "\" font-size=\"10\" font-family=\"sans-serif\">0</text>\n"
        << "  <text x=\"" << fmt(margin - 30) << "\" y=\"" << fmt(margin + 8)
        << "\" font-size=\"10\" font-family=\"sans-serif\">" << fmt(m) << "</text>\n"
        << "  <text x=\"" << fmt(margin - 38) << "\" y=\"" << fmt(margin + m / 2)
        << "\" font-size=\"11\" font-family=\"sans-serif\" transform=\"rotate(-90 "
        << fmt(margin - 38) << " " << fmt(margin + m / 2) << ")\">y (mm)</text>\n";

    svg << "</svg>\n";
    return svg.str();
}

}  // namespace hivemon
