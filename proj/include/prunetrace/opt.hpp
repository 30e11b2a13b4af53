#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prunetrace/cspace.hpp"
#include "prunetrace/fea.hpp"
#include "prunetrace/field.hpp"

namespace prunetrace {

// cells that must survive every step (functional surfaces, load/restraint pads)
using FrozenMask = IndicatorField;

// forward-solver outputs for one design iterate
struct SolveContext {
    FeaResult fea;
    std::optional<ScalarField> mu; // inaccessibility, when accessibility is configured
};

struct ConstraintSpec {
    enum class Kind { global, local };
    std::string name;
    Kind kind = Kind::global;
    double bound = 0.0;
    double weight = 0.0;    // lambda (global augmentation) or kappa (local penalty)
    bool hard_stop = false; // violating design halts the outer loop and is not emitted
    // global: scalar evaluation compared against bound (residual = value - bound)
    std::function<double(const IndicatorField&, const SolveContext&)> value;
    // global: augmentation field (optional)
    std::function<ScalarField(const IndicatorField&, const SolveContext&)> tsf;
    // local: field in [0,1]; when absent the accessibility mu from the context is used
    std::function<ScalarField(const IndicatorField&, const SolveContext&)> local_field;
    // optional target-fraction-dependent weight, overrides weight when set
    std::function<double(double)> weight_schedule;

    double weight_at(double vbar) const { return weight_schedule ? weight_schedule(vbar) : weight; }
};

struct OuterLoopConfig {
    double delta = 0.05;
    double v_min = 0.5;
    std::optional<double> deflection_ub; // hard stop on max_displacement (m)
    int max_inner_iters = 50;
    double filter_radius = 0.0;       // length units; 0 disables
    double support_overhang_deg = 45.0;
};

struct ParetoPoint {
    int step = 0;
    double volume_fraction = 1.0;
    double compliance = 0.0;
    double max_disp = 0.0;
    double support_frac = 0.0;
    double inaccess_max = 0.0; // max mu over cells removed from the reference design
    std::vector<std::pair<std::string, double>> residuals;
    int inner_iters = 0;
    std::string status = "ok"; // "ok" | "maxiters"
    IndicatorField design;
    ScalarField tsf;
    std::optional<ScalarField> mu;
};

// problem data + forward solvers shared by every design iterate
struct Problem {
    Material material;
    BoundaryConditions bc;
    FrozenMask frozen;    // subset of every design
    IndicatorField ref;   // volume-fraction reference (the initial design)
    struct Access {
        ToolAssembly tool;
        OrientationSet orientations; // built from the full assembly
        IndicatorField fixtures;
    };
    std::optional<Access> access;

    SolveContext solve(const IndicatorField& design) const;
};

// normalized strain-energy density: max 1 over material cells, frozen cells
// forced to 1, void cells 0
ScalarField compliance_tsf(const IndicatorField& design, const FeaResult& fea,
                           const FrozenMask& frozen);

// sum of lambda-weighted fields, renormalized so the maximum equals 1
ScalarField augment_tsf(const std::vector<std::pair<ScalarField, double>>& fields);

// tsf + sum of kappa-weighted local fields; not renormalized
ScalarField penalize_tsf(const ScalarField& tsf,
                         const std::vector<std::pair<ScalarField, double>>& locals);

// radial mean over cells within radius (length units); with a mask, averages
// run over material cells only and void cells pass through unchanged
ScalarField filter_tsf(const ScalarField& tsf, double radius,
                       const IndicatorField* mask = nullptr);

// Keeps the target cell count by selecting the highest-TSF removable cells
// (ties: ascending cell index); returns the threshold and
// frozen ∪ selected ⊆ design. Achieved fraction is within one cell of target.
std::pair<double, IndicatorField> find_tau(const IndicatorField& design, const ScalarField& tsf,
                                           double target_fraction, const IndicatorField& ref,
                                           const FrozenMask& frozen);

// overhang support volume (build direction +y): each down-facing material cell
// steeper than overhang_deg accumulates the void column beneath it
double support_volume_fraction(const IndicatorField& design, double overhang_deg,
                               const IndicatorField& ref);

// exact single-cell finite difference of the support volume, normalized to
// max |value| = 1 (all-zero field stays zero)
ScalarField support_volume_tsf(const IndicatorField& design, double overhang_deg,
                               const IndicatorField& ref);

// Fixed point at one target fraction: solve forward problems on the iterate,
// rebuild the augmented/penalized/filtered TSF, re-threshold from the
// entering design; stops when consecutive thresholded designs are identical.
std::pair<IndicatorField, ParetoPoint> inner_loop(const IndicatorField& design,
                                                  double target_fraction,
                                                  const std::vector<ConstraintSpec>& specs,
                                                  const OuterLoopConfig& cfg,
                                                  const Problem& problem);

// Pareto tracing from volume fraction 1 downward by delta until v_min or a
// hard stop; the emitted front never contains a violating design.
std::vector<ParetoPoint> outer_loop(const IndicatorField& initial,
                                    const std::vector<ConstraintSpec>& specs,
                                    const OuterLoopConfig& cfg, const Problem& problem);

} // namespace prunetrace
