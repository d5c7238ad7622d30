#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace hivemon {

/// Planar point, millimetres.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Rectangular measuring platform with one load cell in each corner.
/// The coordinate origin sits at cell 1; cell 2 is at (0, length_y),
/// cell 3 at (length_x, length_y) and cell 4 at (length_x, 0).
struct PlatformGeometry {
    double length_x_mm = 500.0;
    double length_y_mm = 400.0;

    bool valid() const { return length_x_mm > 0.0 && length_y_mm > 0.0; }
    bool contains(const Vec2& p) const {
        return p.x >= 0.0 && p.x <= length_x_mm && p.y >= 0.0 && p.y <= length_y_mm;
    }

    friend bool operator==(const PlatformGeometry&, const PlatformGeometry&) = default;
};

/// A point mass sitting on the platform (cluster sphere part, honey strip,
/// hive body). Mass in grams, position in platform coordinates.
struct MassItem {
    std::string id;
    double mass_g = 0.0;
    Vec2 pos;

    friend bool operator==(const MassItem&, const MassItem&) = default;
};

/// The four corner forces in grams-force, in cell order 1..4.
struct ForceQuad {
    double f1 = 0.0;
    double f2 = 0.0;
    double f3 = 0.0;
    double f4 = 0.0;

    double total() const { return f1 + f2 + f3 + f4; }

    friend bool operator==(const ForceQuad&, const ForceQuad&) = default;
};

/// One reconstructed reading: total weight plus center-of-mass position,
/// stamped with the originating message's time and sequence number.
struct ComputedPoint {
    double total_g = 0.0;
    double x_mm = 0.0;
    double y_mm = 0.0;
    int64_t ts_ms = 0;
    uint64_t seq = 0;
};

/// Total force below this threshold is treated as an empty platform or a
/// sensor fault rather than a reconstructable load.
inline constexpr double kDefaultDegenerateForceG = 1.0;

/// Mass-weighted average position of the item set. Throws EmptySystemError
/// when there are no items or the total mass is not positive.
Vec2 true_center_of_mass(std::span<const MassItem> items);

/// Forward statics: distribute every item's weight onto the four corner
/// cells with bilinear weights (1-x/n)(1-y/m) etc. and sum. This is the
/// unique non-negative per-item split whose inverse is the corner-force
/// center-of-mass reconstruction below. Throws OutOfBoundsError when an
/// item lies outside the platform.
ForceQuad decompose_forces(std::span<const MassItem> items, const PlatformGeometry& geom);

/// Inverse reconstruction from corner forces:
///   x = (f3 + f4) * length_x / F,  y = (f2 + f3) * length_y / F.
/// Throws DegenerateLoadError when F <= epsilon_force_g.
Vec2 reconstruct_center_of_mass(const ForceQuad& forces, const PlatformGeometry& geom,
                                double epsilon_force_g = kDefaultDegenerateForceG);

}  // namespace hivemon
