#include "hivemon/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hivemon/errors.hpp"

namespace hivemon {

namespace {

// Builtin winter layout. Masses are quarter-gram multiples so every mass
// ledger sum is exact in double arithmetic.
constexpr double kSmallStripG = 26.5;
constexpr int kSmallStripCount = 245;
constexpr double kLongStripG = 268.75;
constexpr int kLongStripCount = 26;
constexpr double kMediumStripG = 140.0;
constexpr int kMediumStripCount = 118;
constexpr double kStripTotalG = 30000.0;
constexpr double kHiveBodyG = 10000.0;
constexpr double kSphereG = 2000.0;

std::string padded_id(const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%03d", prefix, i);
    return buf;
}

double dist2(const Vec2& a, const Vec2& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ValidationError(field + ": " + what);
}

}  // namespace

double Scenario::initial_total_mass_g() const {
    double total = hive_body.mass_g + sphere.mass_g;
    for (const auto& s : strips) total += s.mass_g;
    return total;
}

int64_t Scenario::total_days() const {
    int64_t days = 0;
    for (const auto& step : steps) days += step.days_represented;
    return days;
}

void Scenario::validate() const {
    require(!name.empty(), "name", "must not be empty");
    require(geometry.valid(), "geometry", "side lengths must be positive");
    require(hive_body.mass_g > 0.0, "hive_body.mass_g", "must be positive");
    require(geometry.contains(hive_body.pos), "hive_body.pos", "outside the platform");
    require(sphere.mass_g > 0.0, "sphere.mass_g", "must be positive");
    require(geometry.contains(sphere.pos), "sphere.pos", "outside the platform");

    std::set<std::string> ids{hive_body.id, sphere.id};
    double strip_sum = 0.0;
    for (size_t i = 0; i < strips.size(); ++i) {
        const auto& s = strips[i];
        const std::string field = "strips[" + std::to_string(i) + "]";
        require(s.mass_g > 0.0, field + ".mass_g", "must be positive");
        require(geometry.contains(s.pos), field + ".pos", "outside the platform");
        require(ids.insert(s.id).second, field + ".id", "duplicate id '" + s.id + "'");
        strip_sum += s.mass_g;
    }
    require(std::abs(strip_sum - declared_strip_total_g) <= 1e-6,
            "declared_strip_total_g",
            "strips sum to " + std::to_string(strip_sum) + ", declared " +
                std::to_string(declared_strip_total_g));

    size_t removals = 0;
    Vec2 sphere_pos = sphere.pos;
    for (size_t i = 0; i < steps.size(); ++i) {
        const auto& step = steps[i];
        const std::string field = "steps[" + std::to_string(i) + "]";
        require(step.days_represented >= 1, field + ".days_represented", "must be >= 1");
        sphere_pos.x += step.sphere_move.x;
        sphere_pos.y += step.sphere_move.y;
        require(geometry.contains(sphere_pos), field + ".sphere_move",
                "moves the sphere out of bounds");
        removals += step.strips_removed;
        require(removals <= strips.size(), field + ".strips_removed",
                "total removals exceed the strip inventory");
    }
}

Scenario builtin_winter() {
    Scenario sc;
    sc.name = "winter";
    sc.geometry = {500.0, 400.0};
    sc.hive_body = {"hive-body", kHiveBodyG, {250.0, 200.0}};
    sc.sphere = {"sphere", kSphereG, {150.0, 200.0}};
    sc.declared_strip_total_g = kStripTotalG;

    // Ten frame columns, 50 mm apart. The smallest strips sit in the five
    // columns on the entrance side, along the sphere's path; the heavier
    // strips spread over the whole footprint.
    auto column_x = [](int col) { return 25.0 + 50.0 * col; };

    for (int i = 0; i < kSmallStripCount; ++i) {
        const int col = i / 49;       // 5 columns, 49 rows each
        const int row = i % 49;
        const double y = 400.0 * (row + 1) / 50.0;
        sc.strips.push_back({padded_id("strip-s-", i), kSmallStripG, {column_x(col), y}});
    }
    for (int i = 0; i < kMediumStripCount; ++i) {
        const int col = i % 10;
        const int row = i / 10;
        const double y = 400.0 * (row + 1) / 13.0;
        sc.strips.push_back({padded_id("strip-m-", i), kMediumStripG, {column_x(col), y}});
    }
    for (int i = 0; i < kLongStripCount; ++i) {
        const int col = 5 + i % 5;
        const int row = i / 5;
        const double y = 400.0 * (row + 1) / 7.0;
        sc.strips.push_back({padded_id("strip-l-", i), kLongStripG, {column_x(col), y}});
    }

    for (int i = 0; i < 70; ++i) sc.steps.push_back({{0.0, 0.0}, 1, 1});
    for (int i = 0; i < 25; ++i) sc.steps.push_back({{2.0, 0.0}, 3, 2});
    for (int i = 0; i < 50; ++i) sc.steps.push_back({{1.0, 0.0}, 2, 1});

    sc.validate();
    return sc;
}

ScenarioState::ScenarioState(const Scenario& scenario)
    : geometry_(scenario.geometry),
      hive_body_(scenario.hive_body),
      sphere_(scenario.sphere),
      strips_(scenario.strips) {}

void ScenarioState::apply_step(const ScenarioStep& step) {
    Vec2 moved = sphere_.pos;
    moved.x += step.sphere_move.x;
    moved.y += step.sphere_move.y;
    if (!geometry_.contains(moved)) {
        throw SphereOutOfBoundsError("sphere move lands outside the platform");
    }
    sphere_.pos = moved;

    if (step.strips_removed > strips_.size()) {
        throw InventoryExhaustedError("step removes " + std::to_string(step.strips_removed) +
                                      " strips, only " + std::to_string(strips_.size()) + " left");
    }
    for (uint32_t n = 0; n < step.strips_removed; ++n) {
        auto victim = std::min_element(
            strips_.begin(), strips_.end(), [&](const MassItem& a, const MassItem& b) {
                if (a.mass_g != b.mass_g) return a.mass_g < b.mass_g;
                const double da = dist2(a.pos, sphere_.pos);
                const double db = dist2(b.pos, sphere_.pos);
                if (da != db) return da < db;
                return a.id < b.id;
            });
        removed_mass_g_ += victim->mass_g;
        strips_.erase(victim);
    }
    elapsed_days_ += step.days_represented;
}

std::vector<MassItem> ScenarioState::items() const {
    std::vector<MassItem> out;
    out.reserve(2 + strips_.size());
    out.push_back(hive_body_);
    out.push_back(sphere_);
    out.insert(out.end(), strips_.begin(), strips_.end());
    return out;
}

double ScenarioState::total_mass_g() const {
    double total = hive_body_.mass_g + sphere_.mass_g;
    for (const auto& s : strips_) total += s.mass_g;
    return total;
}

namespace {

MassItem item_from_json(const nlohmann::json& j, const std::string& field) {
    try {
        MassItem item;
        item.id = j.at("id").get<std::string>();
        item.mass_g = j.at("mass_g").get<double>();
        const auto& pos = j.at("pos");
        if (!pos.is_array() || pos.size() != 2) {
            throw ValidationError(field + ".pos: must be [x_mm, y_mm]");
        }
        item.pos = {pos[0].get<double>(), pos[1].get<double>()};
        return item;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(field + ": " + e.what());
    }
}

nlohmann::ordered_json item_to_json(const MassItem& item) {
    nlohmann::ordered_json j;
    j["id"] = item.id;
    j["mass_g"] = item.mass_g;
    j["pos"] = {item.pos.x, item.pos.y};
    return j;
}

}  // namespace

Scenario load_scenario(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioParseError(std::string("bad scenario syntax: ") + e.what());
    }

    Scenario sc;
    try {
        sc.name = j.at("name").get<std::string>();
        const auto& geom = j.at("geometry");
        sc.geometry.length_x_mm = geom.at("length_x_mm").get<double>();
        sc.geometry.length_y_mm = geom.at("length_y_mm").get<double>();
        sc.hive_body = item_from_json(j.at("hive_body"), "hive_body");
        sc.sphere = item_from_json(j.at("sphere"), "sphere");
        sc.declared_strip_total_g = j.at("declared_strip_total_g").get<double>();
        size_t i = 0;
        for (const auto& strip : j.at("strips")) {
            sc.strips.push_back(item_from_json(strip, "strips[" + std::to_string(i++) + "]"));
        }
        i = 0;
        for (const auto& step : j.at("steps")) {
            const std::string field = "steps[" + std::to_string(i++) + "]";
            ScenarioStep s;
            const auto& move = step.at("sphere_move");
            if (!move.is_array() || move.size() != 2) {
                throw ValidationError(field + ".sphere_move: must be [dx_mm, dy_mm]");
            }
            s.sphere_move = {move[0].get<double>(), move[1].get<double>()};
            const int64_t removed = step.at("strips_removed").get<int64_t>();
            if (removed < 0) throw ValidationError(field + ".strips_removed: must be >= 0");
            s.strips_removed = uint32_t(removed);
            const int64_t days = step.at("days_represented").get<int64_t>();
            if (days < 1) throw ValidationError(field + ".days_represented: must be >= 1");
            s.days_represented = uint32_t(days);
            sc.steps.push_back(s);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("scenario document: ") + e.what());
    }

    sc.validate();
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailureError("cannot open scenario file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& scenario) {
    nlohmann::ordered_json j;
    j["name"] = scenario.name;
    j["geometry"] = {{"length_x_mm", scenario.geometry.length_x_mm},
                     {"length_y_mm", scenario.geometry.length_y_mm}};
    j["hive_body"] = item_to_json(scenario.hive_body);
    j["sphere"] = item_to_json(scenario.sphere);
    j["declared_strip_total_g"] = scenario.declared_strip_total_g;
    j["strips"] = nlohmann::ordered_json::array();
    for (const auto& s : scenario.strips) j["strips"].push_back(item_to_json(s));
    j["steps"] = nlohmann::ordered_json::array();
    for (const auto& s : scenario.steps) {
        nlohmann::ordered_json step;
        step["sphere_move"] = {s.sphere_move.x, s.sphere_move.y};
        step["strips_removed"] = s.strips_removed;
        step["days_represented"] = s.days_represented;
        j["steps"].push_back(step);
    }
    return j.dump(2) + "\n";
}

}  // namespace hivemon
