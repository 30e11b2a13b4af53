#include "prunetrace/motion.hpp"

#include <cmath>

namespace prunetrace {

Vec2 apply_motion(const RigidMotion2D& m, Vec2 p) {
    double c = std::cos(m.theta), s = std::sin(m.theta);
    double dx = p.x - m.pivot.x, dy = p.y - m.pivot.y;
    return {m.pivot.x + c * dx - s * dy + m.translation.x,
            m.pivot.y + s * dx + c * dy + m.translation.y};
}

RigidMotion2D inverse(const RigidMotion2D& m) {
    // (R,t) about pivot inverts to (-theta, -R(-theta) t) about the same pivot
    double c = std::cos(-m.theta), s = std::sin(-m.theta);
    RigidMotion2D inv;
    inv.theta = -m.theta;
    inv.pivot = m.pivot;
    inv.translation = {-(c * m.translation.x - s * m.translation.y),
                       -(s * m.translation.x + c * m.translation.y)};
    return inv;
}

MotionSet inverse(const MotionSet& m) {
    MotionSet r;
    r.samples.reserve(m.samples.size());
    for (const auto& s : m.samples) r.samples.push_back(inverse(s));
    return r;
}

MotionSet make_rotation_sweep(Vec2 pivot, double theta0, double theta1, int n_samples) {
    if (n_samples < 1) throw DegenerateInputError("motion sweep needs n_samples >= 1");
    MotionSet m;
    m.samples.reserve(static_cast<std::size_t>(n_samples));
    for (int k = 0; k < n_samples; ++k) {
        double t = n_samples == 1 ? 0.0 : static_cast<double>(k) / (n_samples - 1);
        RigidMotion2D s;
        s.theta = theta0 + t * (theta1 - theta0);
        s.pivot = pivot;
        m.samples.push_back(s);
    }
    return m;
}

bool trajectory_contained(Vec2 x, const MotionSet& m, const IndicatorField& envelope) {
    for (const auto& s : m.samples) {
        Vec2 y = apply_motion(s, x);
        int i, j;
        if (!envelope.grid.nearest_cell(y.x, y.y, i, j)) return false;
        if (!envelope.at(i, j)) return false;
    }
    return true;
}

IndicatorField unsweep(const MotionSet& m, const IndicatorField& envelope, const Grid& grid) {
    if (m.n_samples() < 1) throw DegenerateInputError("unsweep needs n_samples >= 1");
    IndicatorField raw(grid);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            raw.set(i, j, trajectory_contained({grid.cx(i), grid.cy(j)}, m, envelope));
    return regularize(raw);
}

} // namespace prunetrace
