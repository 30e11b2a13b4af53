#include "prunetrace/opt.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace prunetrace {

SolveContext Problem::solve(const IndicatorField& design) const {
    SolveContext ctx{solve_elasticity(design, material, bc), std::nullopt};
    if (access)
        ctx.mu = inaccessibility_measure(design, access->fixtures, access->tool,
                                         access->orientations);
    return ctx;
}

ScalarField compliance_tsf(const IndicatorField& design, const FeaResult& fea,
                           const FrozenMask& frozen) {
    if (!(design.grid == fea.grid) || !(design.grid == frozen.grid))
        throw DimensionError("compliance_tsf: grid mismatch");
    // normalize by the 99th-percentile removable density, clipping the rest to
    // 1: load and restraint singularities would otherwise set the scale and
    // crush every structural value toward zero
    std::vector<double> pool;
    for (int j = 0; j < design.grid.ny; ++j)
        for (int i = 0; i < design.grid.nx; ++i)
            if (design.at(i, j) && !frozen.at(i, j))
                pool.push_back(fea.energy_density.at(i, j));
    if (pool.empty())
        for (int j = 0; j < design.grid.ny; ++j)
            for (int i = 0; i < design.grid.nx; ++i)
                if (design.at(i, j)) pool.push_back(fea.energy_density.at(i, j));
    double emax = 0.0;
    if (!pool.empty()) {
        const std::size_t k = 99 * (pool.size() - 1) / 100;
        std::nth_element(pool.begin(), pool.begin() + k, pool.end());
        emax = pool[k];
        if (emax <= 0.0) emax = *std::max_element(pool.begin(), pool.end());
    }
    if (emax <= 0.0)
        throw DegenerateInputError("compliance_tsf: strain energy is zero everywhere");
    ScalarField t(design.grid, 0.0);
    for (int j = 0; j < design.grid.ny; ++j)
        for (int i = 0; i < design.grid.nx; ++i) {
            if (!design.at(i, j)) continue;
            t.set(i, j, frozen.at(i, j)
                            ? 1.0
                            : std::min(fea.energy_density.at(i, j) / emax, 1.0));
        }
    return t;
}

ScalarField augment_tsf(const std::vector<std::pair<ScalarField, double>>& fields) {
    if (fields.empty()) throw DegenerateInputError("augment_tsf: no fields");
    const Grid& g = fields.front().first.grid;
    double wsum = 0.0;
    for (const auto& [f, w] : fields) {
        if (!(f.grid == g)) throw DimensionError("augment_tsf: grid mismatch");
        if (w < 0.0) throw DegenerateInputError("augment_tsf: negative weight");
        wsum += w;
    }
    if (wsum <= 0.0) throw DegenerateInputError("augment_tsf: all weights are zero");
    ScalarField out(g, 0.0);
    for (std::size_t c = 0; c < out.cells.size(); ++c) {
        double v = 0.0;
        for (const auto& [f, w] : fields) v += w * f.cells[c];
        out.cells[c] = v;
    }
    const double m = *std::max_element(out.cells.begin(), out.cells.end());
    if (m <= 0.0)
        throw DegenerateInputError("augment_tsf: combined field has no positive values");
    for (double& v : out.cells) v /= m;
    return out;
}

ScalarField penalize_tsf(const ScalarField& tsf,
                         const std::vector<std::pair<ScalarField, double>>& locals) {
    ScalarField out = tsf;
    for (const auto& [f, w] : locals) {
        if (!(f.grid == tsf.grid)) throw DimensionError("penalize_tsf: grid mismatch");
        if (w < 0.0) throw DegenerateInputError("penalize_tsf: negative weight");
        for (std::size_t c = 0; c < out.cells.size(); ++c) out.cells[c] += w * f.cells[c];
    }
    return out;
}

ScalarField filter_tsf(const ScalarField& tsf, double radius, const IndicatorField* mask,
                       const ScalarField* heal) {
    if (radius < 0.0) throw DegenerateInputError("filter_tsf: negative radius");
    if (mask && !(mask->grid == tsf.grid)) throw DimensionError("filter_tsf: grid mismatch");
    if (heal && !(heal->grid == tsf.grid)) throw DimensionError("filter_tsf: grid mismatch");
    const Grid& g = tsf.grid;
    const double rc = radius / g.h;
    const int r = static_cast<int>(std::floor(rc + 1e-9));
    if (r == 0) return tsf;
    std::vector<std::pair<int, int>> offsets;
    for (int dj = -r; dj <= r; ++dj)
        for (int di = -r; di <= r; ++di)
            if (di * di + dj * dj <= rc * rc + 1e-9) offsets.emplace_back(di, dj);
    // every cell averages over the material cells in range, so a cell just
    // outside the current material inherits its neighbors' sensitivity and can
    // re-enter the design; the mean is discounted off-material so boundary
    // near-ties resolve toward the incumbent cell instead of flickering; cells
    // with no material in range keep their value; when a heal field is given,
    // off-material cells average it instead: removal penalties price removing
    // a material cell, and letting them leak into empty cells seals carved
    // channels behind the cutter and traps unreachable pockets
    ScalarField out(g, 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const bool off = mask && !mask->at(i, j);
            const ScalarField& src = off && heal ? *heal : tsf;
            double sum = 0.0;
            long n = 0;
            for (const auto& [di, dj] : offsets) {
                const int ii = i + di, jj = j + dj;
                if (!g.in_bounds(ii, jj)) continue;
                if (mask && !mask->at(ii, jj)) continue;
                sum += src.at(ii, jj);
                ++n;
            }
            if (n == 0) {
                out.set(i, j, tsf.at(i, j));
                continue;
            }
            const double mean = sum / static_cast<double>(n);
            out.set(i, j, off ? 0.95 * mean : mean);
        }
    return out;
}

std::pair<double, IndicatorField> find_tau(const IndicatorField& design, const ScalarField& tsf,
                                           double target_fraction, const IndicatorField& ref,
                                           const FrozenMask& frozen) {
    if (!(design.grid == tsf.grid) || !(design.grid == ref.grid) ||
        !(design.grid == frozen.grid))
        throw DimensionError("find_tau: grid mismatch");
    if (!is_subset(frozen, design)) throw Error("find_tau: frozen mask not a subset of design");
    const long nref = ref.count();
    if (nref == 0) throw DivisionError("find_tau: empty reference");
    const long target_cells = std::lround(target_fraction * static_cast<double>(nref));
    const long nfrozen = frozen.count();
    if (target_cells < nfrozen)
        throw InfeasibleTargetError("find_tau: target volume below the frozen mask");
    if (target_cells > design.count())
        throw InfeasibleTargetError("find_tau: target volume above the current design");

    struct Cand {
        double v;
        int idx;
    };
    std::vector<Cand> removable;
    removable.reserve(design.cells.size());
    for (int c = 0; c < static_cast<int>(design.cells.size()); ++c)
        if (design.cells[c] && !frozen.cells[c])
            removable.push_back({tsf.cells[c], c});
    std::sort(removable.begin(), removable.end(), [](const Cand& a, const Cand& b) {
        if (a.v != b.v) return a.v > b.v;
        return a.idx < b.idx;
    });

    const long keep = target_cells - nfrozen;
    IndicatorField out = frozen;
    for (long k = 0; k < keep; ++k) out.cells[removable[static_cast<std::size_t>(k)].idx] = 1;
    double tau;
    if (keep > 0)
        tau = removable[static_cast<std::size_t>(keep - 1)].v;
    else if (!removable.empty())
        tau = removable.front().v + 1.0;
    else
        tau = 1.0;
    return {tau, out};
}

namespace {

// Column-local support accounting; one cell may be overridden to void so the
// removal sensitivity only needs the three neighboring columns rescanned.
struct SupportScan {
    const IndicatorField& a;
    double overhang_deg;
    int skip_i = -1;
    int skip_j = -1;

    bool mat(int i, int j) const {
        if (!a.grid.in_bounds(i, j)) return false;
        if (i == skip_i && j == skip_j) return false;
        return a.at(i, j) != 0;
    }

    // void cells accumulated beneath down-facing cells of column i
    long column(int i) const {
        long n = 0;
        for (int j = 1; j < a.grid.ny; ++j) {
            if (!mat(i, j) || mat(i, j - 1)) continue;
            const bool diag = mat(i - 1, j - 1) || mat(i + 1, j - 1);
            const double angle = diag ? 45.0 : 90.0;
            if (angle <= overhang_deg + 1e-9) continue;
            for (int jj = j - 1; jj >= 0 && !mat(i, jj); --jj) ++n;
        }
        return n;
    }
};

} // namespace

double support_volume_fraction(const IndicatorField& design, double overhang_deg,
                               const IndicatorField& ref) {
    if (!(design.grid == ref.grid))
        throw DimensionError("support_volume_fraction: grid mismatch");
    const long nref = ref.count();
    if (nref == 0) throw DivisionError("support_volume_fraction: empty reference");
    SupportScan scan{design, overhang_deg};
    long total = 0;
    for (int i = 0; i < design.grid.nx; ++i) total += scan.column(i);
    return static_cast<double>(total) / static_cast<double>(nref);
}

ScalarField support_volume_tsf(const IndicatorField& design, double overhang_deg,
                               const IndicatorField& ref) {
    if (!(design.grid == ref.grid)) throw DimensionError("support_volume_tsf: grid mismatch");
    if (ref.count() == 0) throw DivisionError("support_volume_tsf: empty reference");
    const Grid& g = design.grid;
    SupportScan base{design, overhang_deg};
    std::vector<long> col(static_cast<std::size_t>(g.nx), 0);
    for (int i = 0; i < g.nx; ++i) col[static_cast<std::size_t>(i)] = base.column(i);

    ScalarField t(g, 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!design.at(i, j)) continue;
            SupportScan removed{design, overhang_deg, i, j};
            long delta = 0;
            for (int k = i - 1; k <= i + 1; ++k) {
                if (k < 0 || k >= g.nx) continue;
                delta += removed.column(k) - col[static_cast<std::size_t>(k)];
            }
            // positive when removing this cell would create support volume
            t.set(i, j, static_cast<double>(delta));
        }
    double amax = 0.0;
    for (double v : t.cells) amax = std::max(amax, std::abs(v));
    if (amax > 0.0)
        for (double& v : t.cells) v /= amax;
    return t;
}

namespace {

ScalarField build_tsf(const IndicatorField& design, const SolveContext& ctx,
                      const std::vector<ConstraintSpec>& specs, const OuterLoopConfig& cfg,
                      const Problem& problem, double target_fraction) {
    std::vector<std::pair<ScalarField, double>> fields;
    fields.emplace_back(compliance_tsf(design, ctx.fea, problem.frozen), 1.0);
    for (const auto& s : specs) {
        if (s.kind != ConstraintSpec::Kind::global || !s.tsf) continue;
        const double w = s.weight_at(target_fraction);
        if (w > 0.0) fields.emplace_back(s.tsf(design, ctx), w);
    }
    ScalarField t = augment_tsf(fields);

    std::vector<std::pair<ScalarField, double>> locals;
    for (const auto& s : specs) {
        if (s.kind != ConstraintSpec::Kind::local) continue;
        const double w = s.weight_at(target_fraction);
        if (w <= 0.0) continue;
        if (s.local_field) {
            locals.emplace_back(s.local_field(design, ctx), w);
        } else {
            if (!ctx.mu)
                throw ConfigError("local constraint '" + s.name +
                                  "' needs an accessibility solver");
            locals.emplace_back(*ctx.mu, w);
        }
    }
    if (locals.empty()) return filter_tsf(t, cfg.filter_radius, &design);
    ScalarField base = t;
    t = penalize_tsf(t, locals);
    return filter_tsf(t, cfg.filter_radius, &design, &base);
}

ParetoPoint make_point(const IndicatorField& design, const SolveContext& ctx,
                       const std::vector<ConstraintSpec>& specs, const OuterLoopConfig& cfg,
                       const Problem& problem) {
    ParetoPoint p;
    p.volume_fraction = volume_fraction(design, problem.ref);
    p.compliance = ctx.fea.compliance;
    p.max_disp = ctx.fea.max_deflection;
    p.support_frac = support_volume_fraction(design, cfg.support_overhang_deg, problem.ref);
    p.inaccess_max = 0.0;
    if (ctx.mu) {
        for (int c = 0; c < static_cast<int>(design.cells.size()); ++c)
            if (problem.ref.cells[c] && !design.cells[c])
                p.inaccess_max = std::max(p.inaccess_max, ctx.mu->cells[c]);
        p.mu = ctx.mu;
    }
    for (const auto& s : specs)
        if (s.value) p.residuals.emplace_back(s.name, s.value(design, ctx) - s.bound);
    p.design = design;
    return p;
}

bool violates_hard_stop(const ParetoPoint& p, const OuterLoopConfig& cfg,
                        const std::vector<ConstraintSpec>& specs) {
    if (cfg.deflection_ub && p.max_disp > *cfg.deflection_ub) return true;
    for (const auto& s : specs) {
        if (!s.hard_stop || !s.value) continue;
        for (const auto& [name, res] : p.residuals)
            if (name == s.name && res > 0.0) return true;
    }
    return false;
}

} // namespace

std::pair<IndicatorField, ParetoPoint> inner_loop(const IndicatorField& design,
                                                  double target_fraction,
                                                  const std::vector<ConstraintSpec>& specs,
                                                  const OuterLoopConfig& cfg,
                                                  const Problem& problem) {
    if (cfg.max_inner_iters < 1) throw ConfigError("inner_loop: max_inner_iters must be >= 1");
    IndicatorField current = design;
    SolveContext ctx = problem.solve(current);
    ScalarField tsf;
    bool converged = false;
    int iters = 0;
    for (int m = 1; m <= cfg.max_inner_iters; ++m) {
        iters = m;
        ScalarField t = build_tsf(current, ctx, specs, cfg, problem, target_fraction);
        // running-mean stabilization: thresholding the raw field keeps a wave
        // of near-tied boundary cells circulating forever; averaging over the
        // visited iterates damps the swing as 1/m so the set can settle
        if (m == 1) {
            tsf = std::move(t);
        } else {
            const double w = 1.0 / m;
            for (std::size_t c = 0; c < tsf.cells.size(); ++c)
                tsf.cells[c] += w * (t.cells[c] - tsf.cells[c]);
        }
        // re-threshold the entering design so cells may return within a step;
        // near-tied boundary cells can trade places indefinitely, so relocation
        // closes after half the budget and the pool narrows to the current
        // design, whose thresholded set is stationary at the target volume
        const IndicatorField& pool = m <= cfg.max_inner_iters / 2 ? design : current;
        IndicatorField next =
            find_tau(pool, tsf, target_fraction, problem.ref, problem.frozen).second;
        if (next == current) {
            converged = true;
            break;
        }
        current = std::move(next);
        ctx = problem.solve(current);
    }
    if (!converged) tsf = build_tsf(current, ctx, specs, cfg, problem, target_fraction);

    ParetoPoint p = make_point(current, ctx, specs, cfg, problem);
    p.inner_iters = iters;
    p.status = converged ? "ok" : "maxiters";
    p.tsf = std::move(tsf);
    return {current, p};
}

std::vector<ParetoPoint> outer_loop(const IndicatorField& initial,
                                    const std::vector<ConstraintSpec>& specs,
                                    const OuterLoopConfig& cfg, const Problem& problem) {
    if (initial.empty()) throw DegenerateInputError("outer_loop: empty initial design");
    if (cfg.delta <= 0.0) throw ConfigError("outer_loop: delta must be > 0");
    if (cfg.v_min <= 0.0 || cfg.v_min > 1.0) throw ConfigError("outer_loop: need 0 < v_min <= 1");
    if (!is_subset(problem.frozen, initial))
        throw Error("outer_loop: frozen mask not a subset of the initial design");

    std::vector<ParetoPoint> front;
    {
        SolveContext ctx = problem.solve(initial);
        ParetoPoint p0 = make_point(initial, ctx, specs, cfg, problem);
        p0.step = 0;
        p0.inner_iters = 0;
        p0.tsf = build_tsf(initial, ctx, specs, cfg, problem, 1.0);
        if (violates_hard_stop(p0, cfg, specs)) return front;
        front.push_back(std::move(p0));
    }

    IndicatorField design = initial;
    for (int k = 1;; ++k) {
        const double target = 1.0 - static_cast<double>(k) * cfg.delta;
        if (target < cfg.v_min - 1e-9) break;
        auto [next, p] = inner_loop(design, target, specs, cfg, problem);
        p.step = k;
        if (violates_hard_stop(p, cfg, specs)) break;
        front.push_back(std::move(p));
        design = std::move(next);
    }
    return front;
}

} // namespace prunetrace
