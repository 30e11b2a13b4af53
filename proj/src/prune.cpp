#include "prunetrace/prune.hpp"

namespace prunetrace {

PointwiseConstraint containment_constraint(std::string name, MotionSet motions,
                                           IndicatorField envelope) {
    PointwiseConstraint c;
    c.name = std::move(name);
    c.kind = PointwiseConstraint::Kind::containment_motion;
    c.build = [motions = std::move(motions), envelope = std::move(envelope)](const Grid& g) {
        return unsweep(motions, envelope, g);
    };
    return c;
}

PointwiseConstraint accessibility_constraint(std::string name, IndicatorField head,
                                             IndicatorField fixtures, OrientationSet head_orients,
                                             double mu0_cells) {
    PointwiseConstraint c;
    c.name = std::move(name);
    c.kind = PointwiseConstraint::Kind::accessibility_2axis;
    c.build = [head = std::move(head), fixtures = std::move(fixtures),
               orients = std::move(head_orients), mu0_cells](const Grid& g) {
        return accessible_maximal_set(head, fixtures, g, orients, mu0_cells);
    };
    return c;
}

PointwiseConstraint custom_constraint(std::string name,
                                      std::function<bool(double, double)> predicate) {
    PointwiseConstraint c;
    c.name = std::move(name);
    c.kind = PointwiseConstraint::Kind::custom_pmc;
    c.build = [predicate = std::move(predicate)](const Grid& g) {
        IndicatorField f(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) f.set(i, j, predicate(g.cx(i), g.cy(j)));
        return f;
    };
    return c;
}

PruneResult prune_pointwise(const std::vector<PointwiseConstraint>& constraints,
                            const Grid& grid) {
    PruneResult r;
    IndicatorField acc(grid, 1);
    const double domain = static_cast<double>(grid.cells());
    for (const auto& c : constraints) {
        IndicatorField m = c.build(grid);
        if (!(m.grid == grid)) throw DimensionError("prune_pointwise: constraint grid mismatch");
        r.per_constraint.emplace_back(c.name, static_cast<double>(m.count()) / domain);
        acc = intersect(acc, m);
    }
    r.pruned = regularize(acc);
    r.empty_warning = r.pruned.empty();
    return r;
}

} // namespace prunetrace
