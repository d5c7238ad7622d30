#include "hivemon/physics.hpp"

#include <cmath>

#include "hivemon/errors.hpp"

namespace hivemon {

Vec2 true_center_of_mass(std::span<const MassItem> items) {
    if (items.empty()) {
        throw EmptySystemError("center of mass of an empty item set");
    }
    double total = 0.0;
    double moment_x = 0.0;
    double moment_y = 0.0;
    for (const auto& item : items) {
        total += item.mass_g;
        moment_x += item.mass_g * item.pos.x;
        moment_y += item.mass_g * item.pos.y;
    }
    if (total <= 0.0) {
        throw EmptySystemError("total mass is not positive");
    }
    return {moment_x / total, moment_y / total};
}

ForceQuad decompose_forces(std::span<const MassItem> items, const PlatformGeometry& geom) {
    ForceQuad q;
    for (const auto& item : items) {
        if (!geom.contains(item.pos)) {
            throw OutOfBoundsError("item '" + item.id + "' lies outside the platform");
        }
        const double u = item.pos.x / geom.length_x_mm;
        const double v = item.pos.y / geom.length_y_mm;
        q.f1 += item.mass_g * (1.0 - u) * (1.0 - v);
        q.f2 += item.mass_g * (1.0 - u) * v;
        q.f3 += item.mass_g * u * v;
        q.f4 += item.mass_g * u * (1.0 - v);
    }
    return q;
}

Vec2 reconstruct_center_of_mass(const ForceQuad& forces, const PlatformGeometry& geom,
                                double epsilon_force_g) {
    const double total = forces.total();
    if (!(total > epsilon_force_g)) {
        throw DegenerateLoadError("total force " + std::to_string(total) +
                                  " g is at or below the degeneracy threshold");
    }
    return {(forces.f3 + forces.f4) * geom.length_x_mm / total,
            (forces.f2 + forces.f3) * geom.length_y_mm / total};
}

}  // namespace hivemon
