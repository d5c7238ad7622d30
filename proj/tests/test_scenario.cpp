#include <doctest.h>

#include <set>

#include "hivemon/errors.hpp"
#include "hivemon/physics.hpp"
#include "hivemon/scenario.hpp"

using namespace hivemon;

TEST_CASE("builtin winter scenario shape") {
    const Scenario sc = builtin_winter();
    CHECK(sc.steps.size() == 145);
    CHECK(sc.total_days() == 170);
    CHECK(sc.geometry == PlatformGeometry{500.0, 400.0});
    CHECK(sc.sphere.mass_g == 2000.0);
    CHECK(sc.hive_body.mass_g == 10000.0);

    double strip_total = 0.0;
    size_t smallest = 0;
    for (const auto& s : sc.strips) {
        strip_total += s.mass_g;
        if (s.mass_g == 26.5) ++smallest;
    }
    CHECK(strip_total == 30000.0);  // quarter-gram masses sum exactly
    CHECK(sc.declared_strip_total_g == 30000.0);
    CHECK(smallest >= 245);
    CHECK(sc.initial_total_mass_g() == 42000.0);

    size_t removals = 0;
    for (const auto& step : sc.steps) removals += step.strips_removed;
    CHECK(removals == 245);
    CHECK(removals * 26.5 == 6492.5);
}

TEST_CASE("apply_step semantics") {
    const Scenario sc = builtin_winter();

    SUBCASE("removal shrinks the inventory, sphere stays put") {
        ScenarioState state(sc);
        const size_t before = state.strips_left();
        const Vec2 pos = state.sphere_pos();
        state.apply_step({{0.0, 0.0}, 1, 1});
        CHECK(state.strips_left() == before - 1);
        CHECK(state.sphere_pos() == pos);
        CHECK(state.removed_mass_g() == 26.5);
    }
    SUBCASE("horizontal move with three removals") {
        ScenarioState state(sc);
        const size_t before = state.strips_left();
        const double x_before = state.sphere_pos().x;
        state.apply_step({{2.0, 0.0}, 3, 2});
        CHECK(state.sphere_pos().x == x_before + 2.0);
        CHECK(state.strips_left() == before - 3);
        CHECK(state.elapsed_days() == 2);
    }
    SUBCASE("exhausted inventory is an error") {
        Scenario small = sc;
        small.strips.resize(2);
        small.declared_strip_total_g = small.strips[0].mass_g + small.strips[1].mass_g;
        small.steps.clear();
        ScenarioState state(small);
        state.apply_step({{0.0, 0.0}, 2, 1});
        CHECK_THROWS_AS(state.apply_step({{0.0, 0.0}, 1, 1}), InventoryExhaustedError);
    }
    SUBCASE("sphere cannot leave the platform") {
        ScenarioState state(sc);
        CHECK_THROWS_AS(state.apply_step({{1e5, 0.0}, 0, 1}), SphereOutOfBoundsError);
    }
    SUBCASE("removal picks smallest mass, then nearest, then smallest id") {
        Scenario tiny = sc;
        tiny.steps.clear();
        tiny.strips = {
            {"far-small", 10.0, {400.0, 200.0}},
            {"near-big", 50.0, {150.0, 200.0}},
            {"near-small-b", 10.0, {160.0, 200.0}},
            {"near-small-a", 10.0, {140.0, 200.0}},  // same distance as -b, smaller id
        };
        tiny.declared_strip_total_g = 80.0;
        ScenarioState state(tiny);  // sphere at (150, 200)
        state.apply_step({{0.0, 0.0}, 1, 1});
        std::set<std::string> left;
        for (const auto& item : state.items()) left.insert(item.id);
        CHECK(left.count("near-small-a") == 0);
        state.apply_step({{0.0, 0.0}, 2, 1});
        left.clear();
        for (const auto& item : state.items()) left.insert(item.id);
        CHECK(left.count("near-small-b") == 0);
        CHECK(left.count("far-small") == 0);
        CHECK(left.count("near-big") == 1);
    }
}

TEST_CASE("mass ledger is exact across the whole replay") {
    const Scenario sc = builtin_winter();
    ScenarioState state(sc);
    const double initial = state.total_mass_g();
    double previous_total = initial;
    for (const auto& step : sc.steps) {
        state.apply_step(step);
        // Quarter-gram strip masses make these sums exact, not approximate.
        CHECK(state.total_mass_g() == initial - state.removed_mass_g());
        CHECK(state.total_mass_g() <= previous_total);
        previous_total = state.total_mass_g();
    }
    CHECK(state.removed_mass_g() == 6492.5);
    CHECK(state.total_mass_g() == 35507.5);
    CHECK(state.elapsed_days() == 170);
    CHECK(state.sphere_pos().x == 250.0);
}

TEST_CASE("replay drives a nonincreasing force total") {
    const Scenario sc = builtin_winter();
    ScenarioState state(sc);
    double previous = decompose_forces(state.items(), sc.geometry).total();
    for (const auto& step : sc.steps) {
        state.apply_step(step);
        const double total = decompose_forces(state.items(), sc.geometry).total();
        CHECK(total <= previous + 1e-9);
        previous = total;
    }
}

TEST_CASE("replay is deterministic") {
    const Scenario sc = builtin_winter();
    ScenarioState a(sc), b(sc);
    for (const auto& step : sc.steps) {
        a.apply_step(step);
        b.apply_step(step);
        CHECK(a.items() == b.items());
    }
}

TEST_CASE("scenario serialization round trips") {
    const Scenario sc = builtin_winter();
    const std::string text = serialize_scenario(sc);
    const Scenario loaded = load_scenario(text);
    CHECK(loaded == sc);
    CHECK(serialize_scenario(loaded) == text);
}

TEST_CASE("scenario validation names the offending field") {
    Scenario sc = builtin_winter();

    SUBCASE("wrong declared strip total") {
        sc.declared_strip_total_g = 29000.0;
        try {
            load_scenario(serialize_scenario(sc));
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("declared_strip_total_g") != std::string::npos);
        }
    }
    SUBCASE("removals beyond the inventory") {
        sc.steps.back().strips_removed = 10000;
        try {
            sc.validate();
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("strips_removed") != std::string::npos);
        }
    }
    SUBCASE("sphere walked off the platform") {
        sc.steps.push_back({{10000.0, 0.0}, 0, 1});
        CHECK_THROWS_AS(sc.validate(), ValidationError);
    }
    SUBCASE("strip outside the platform") {
        sc.strips[0].pos.x = -1.0;
        CHECK_THROWS_AS(sc.validate(), ValidationError);
    }
    SUBCASE("zero-day step") {
        sc.steps[0].days_represented = 0;
        CHECK_THROWS_AS(sc.validate(), ValidationError);
    }
    SUBCASE("bad syntax is a parse error") {
        CHECK_THROWS_AS(load_scenario("{ nope"), ScenarioParseError);
    }
    SUBCASE("missing field is a validation error") {
        CHECK_THROWS_AS(load_scenario(R"({"name":"x"})"), ValidationError);
    }
}
