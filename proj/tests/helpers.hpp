#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hivemon/physics.hpp"

namespace hivemon::test {

/// Seeded generator for random in-bounds item sets. Deterministic across
/// runs so failures are reproducible from the seed alone.
class ItemSetGenerator {
public:
    explicit ItemSetGenerator(uint64_t seed, PlatformGeometry geom = {500.0, 400.0})
        : rng_(seed), geom_(geom) {}

    std::vector<MassItem> next(size_t min_items = 1, size_t max_items = 12,
                               double min_mass_g = 1.0, double max_mass_g = 5000.0) {
        std::uniform_int_distribution<size_t> count(min_items, max_items);
        std::uniform_real_distribution<double> mass(min_mass_g, max_mass_g);
        std::uniform_real_distribution<double> px(0.0, geom_.length_x_mm);
        std::uniform_real_distribution<double> py(0.0, geom_.length_y_mm);
        std::vector<MassItem> items;
        const size_t n = count(rng_);
        items.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            items.push_back({"item-" + std::to_string(i), mass(rng_), {px(rng_), py(rng_)}});
        }
        return items;
    }

    std::mt19937_64& rng() { return rng_; }
    const PlatformGeometry& geometry() const { return geom_; }

private:
    std::mt19937_64 rng_;
    PlatformGeometry geom_;
};

inline double rel_diff(double a, double b) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) / scale;
}

}  // namespace hivemon::test
