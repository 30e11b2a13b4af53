#pragma once

#include <vector>

#include "prunetrace/field.hpp"

namespace prunetrace {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Planar rigid motion: rotate about pivot by theta, then translate by t.
struct RigidMotion2D {
    double theta = 0.0;
    Vec2 pivot;
    Vec2 translation;
};

Vec2 apply_motion(const RigidMotion2D& m, Vec2 p);
RigidMotion2D inverse(const RigidMotion2D& m);

// Ordered samples of a one-parametric motion; n >= 1.
struct MotionSet {
    std::vector<RigidMotion2D> samples;

    int n_samples() const { return static_cast<int>(samples.size()); }
};

MotionSet inverse(const MotionSet& m);

// Uniform sampling of a rotation about pivot from theta0 to theta1 inclusive
// (radians); n_samples = 1 picks theta0 alone.
MotionSet make_rotation_sweep(Vec2 pivot, double theta0, double theta1, int n_samples);

// true iff every sampled motion maps x into a material cell of E; points whose
// image rounds off E's grid classify as not contained (conservative)
bool trajectory_contained(Vec2 x, const MotionSet& m, const IndicatorField& envelope);

// cells of grid whose centers stay inside the envelope under every sample,
// then regularized; the largest set that remains within the envelope
IndicatorField unsweep(const MotionSet& m, const IndicatorField& envelope, const Grid& grid);

} // namespace prunetrace
