#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "prunetrace/cspace.hpp"
#include "prunetrace/field.hpp"
#include "prunetrace/motion.hpp"

namespace prunetrace {

// A constraint decidable per cell with no dependence on any candidate design.
// build yields the constraint's maximal set on the given grid.
struct PointwiseConstraint {
    enum class Kind { containment_motion, accessibility_2axis, custom_pmc };
    std::string name;
    Kind kind = Kind::custom_pmc;
    std::function<IndicatorField(const Grid&)> build;
};

// material must stay inside envelope under every sampled motion
PointwiseConstraint containment_constraint(std::string name, MotionSet motions,
                                           IndicatorField envelope);

// material must admit a collision-free tool-head placement reaching it
PointwiseConstraint accessibility_constraint(std::string name, IndicatorField head,
                                             IndicatorField fixtures, OrientationSet head_orients,
                                             double mu0_cells = 0.5);

// arbitrary predicate over cell-center world coordinates
PointwiseConstraint custom_constraint(std::string name,
                                      std::function<bool(double, double)> predicate);

struct PruneResult {
    IndicatorField pruned;
    bool empty_warning = false; // empty pruned space: the problem is infeasible
    // surviving volume fraction of the full domain, per constraint
    std::vector<std::pair<std::string, double>> per_constraint;
};

// Intersect every constraint's maximal set, then regularize once; the result
// is independent of constraint order and a subset of each maximal set.
// Zero constraints keep the full domain.
PruneResult prune_pointwise(const std::vector<PointwiseConstraint>& constraints,
                            const Grid& grid);

} // namespace prunetrace
