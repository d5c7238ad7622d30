#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hivemon/physics.hpp"

namespace hivemon {

inline constexpr int64_t kMillisPerDay = 86'400'000;

/// One experiment step: translate the cluster sphere, consume the given
/// number of smallest strips, and let the step stand for a number of days.
struct ScenarioStep {
    Vec2 sphere_move;
    uint32_t strips_removed = 0;
    uint32_t days_represented = 1;

    friend bool operator==(const ScenarioStep&, const ScenarioStep&) = default;
};

/// Declarative description of a platform experiment: the initial mass
/// layout plus an ordered step list.
struct Scenario {
    std::string name;
    PlatformGeometry geometry;
    MassItem hive_body;
    MassItem sphere;
    std::vector<MassItem> strips;
    double declared_strip_total_g = 0.0;
    std::vector<ScenarioStep> steps;

    double initial_total_mass_g() const;
    int64_t total_days() const;

    /// Checks every invariant; throws ValidationError naming the first
    /// offending field.
    void validate() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// The stock winter experiment: a 2 kg sphere on a 10-frame hive model
/// loaded with 30 kg of strips; 70 one-day steps consuming one smallest
/// strip, 25 two-day steps moving 2 mm and consuming three, then 50
/// one-day steps moving 1 mm and consuming two. 145 steps, 170 days,
/// 245 strips (6492.5 g) consumed.
Scenario builtin_winter();

/// Mutable replay state for a scenario. Owns the item set; stepping is
/// single-threaded.
class ScenarioState {
public:
    explicit ScenarioState(const Scenario& scenario);

    /// Applies one step: moves the sphere, then deletes the requested count
    /// of smallest-mass strips nearest the sphere (ties broken by id).
    /// Throws SphereOutOfBoundsError or InventoryExhaustedError.
    void apply_step(const ScenarioStep& step);

    /// Current item set: hive body, sphere, then the remaining strips.
    std::vector<MassItem> items() const;

    double total_mass_g() const;
    double removed_mass_g() const { return removed_mass_g_; }
    int64_t elapsed_days() const { return elapsed_days_; }
    const Vec2& sphere_pos() const { return sphere_.pos; }
    size_t strips_left() const { return strips_.size(); }

private:
    PlatformGeometry geometry_;
    MassItem hive_body_;
    MassItem sphere_;
    std::vector<MassItem> strips_;
    double removed_mass_g_ = 0.0;
    int64_t elapsed_days_ = 0;
};

/// Parses a scenario document. Throws ScenarioParseError on bad syntax and
/// ValidationError when an invariant fails.
Scenario load_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

/// Canonical JSON rendering; load_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& scenario);

}  // namespace hivemon
