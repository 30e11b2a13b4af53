#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "prunetrace/opt.hpp"

using namespace prunetrace;

namespace {

constexpr double kPi = 3.14159265358979323846;

BoundaryConditions cantilever_bc(const Grid& g, double fy) {
    BoundaryConditions bc;
    for (int j = 0; j <= g.ny; ++j) bc.fixed_nodes.push_back({0, j, true, true});
    bc.loads.push_back({g.nx, g.ny / 2, 0.0, fy});
    return bc;
}

Problem cantilever_problem(const Grid& g, double fy = -1e4) {
    Problem p;
    p.material = Material(1e9, 0.3);
    p.bc = cantilever_bc(g, fy);
    p.frozen = IndicatorField(g);
    p.frozen.set(g.nx - 1, g.ny / 2 - 1, true);
    p.frozen.set(g.nx - 1, g.ny / 2, true);
    p.ref = IndicatorField(g, 1);
    return p;
}

ScalarField naive_filter(const ScalarField& t, double radius, const IndicatorField* mask) {
    const Grid& g = t.grid;
    const double rc = radius / g.h;
    ScalarField out(g, 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double sum = 0.0;
            long n = 0;
            for (int jj = 0; jj < g.ny; ++jj)
                for (int ii = 0; ii < g.nx; ++ii) {
                    double dx = ii - i, dy = jj - j;
                    if (dx * dx + dy * dy > rc * rc + 1e-9) continue;
                    if (mask && !mask->at(ii, jj)) continue;
                    sum += t.at(ii, jj);
                    ++n;
                }
            if (n == 0) {
                out.set(i, j, t.at(i, j));
                continue;
            }
            double mean = sum / static_cast<double>(n);
            out.set(i, j, mask && !mask->at(i, j) ? 0.95 * mean : mean);
        }
    return out;
}

} // namespace

TEST_CASE("compliance_tsf is flat under uniform uniaxial stretch") {
    Grid g(10, 6, 0.01);
    IndicatorField design(g, 1);
    Material mat(1e9, 0.0); // no lateral contraction, the stretch stays uniform
    BoundaryConditions bc;
    for (int j = 0; j <= g.ny; ++j) bc.fixed_nodes.push_back({0, j, true, false});
    bc.fixed_nodes.push_back({0, 0, false, true});
    for (int j = 0; j <= g.ny; ++j) {
        double w = (j == 0 || j == g.ny) ? 0.5 : 1.0;
        bc.loads.push_back({g.nx, j, 1e4 * w / g.ny, 0.0});
    }
    FeaResult r = solve_elasticity(design, mat, bc);
    ScalarField t = compliance_tsf(design, r, IndicatorField(g));
    for (double v : t.cells) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("compliance_tsf pins frozen cells at 1 and voids at 0") {
    Grid g(12, 6, 0.01);
    IndicatorField design(g, 1);
    design.set(3, 3, false);
    IndicatorField frozen(g);
    frozen.set(1, 1, true); // low-energy corner cell, would rank low otherwise
    FeaResult r = solve_elasticity(design, Material(1e9, 0.3), cantilever_bc(g, -1e4));
    ScalarField t = compliance_tsf(design, r, frozen);
    CHECK(t.at(1, 1) == 1.0);
    CHECK(t.at(3, 3) == 0.0);
    double m = *std::max_element(t.cells.begin(), t.cells.end());
    CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : t.cells) CHECK(v >= 0.0);
}

TEST_CASE("compliance_tsf rejects a zero-energy state") {
    Grid g(8, 4, 0.01);
    IndicatorField design(g, 1);
    BoundaryConditions bc;
    for (int j = 0; j <= g.ny; ++j) bc.fixed_nodes.push_back({0, j, true, true});
    bc.loads.push_back({g.nx, 2, 0.0, 0.0});
    FeaResult r = solve_elasticity(design, Material(1e9, 0.3), bc);
    CHECK_THROWS_AS(compliance_tsf(design, r, IndicatorField(g)), DegenerateInputError);
}

TEST_CASE("compliance_tsf ranks cells like the true removal cost") {
    Grid g(16, 8, 0.01);
    IndicatorField design(g, 1);
    Material mat(1e9, 0.3);
    BoundaryConditions bc = cantilever_bc(g, -1e4);
    FeaResult base = solve_elasticity(design, mat, bc);
    ScalarField t = compliance_tsf(design, base, IndicatorField(g));
    std::vector<double> sens, truth;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx - 1; ++i) { // skip clamp and load columns
            IndicatorField punctured = design;
            punctured.set(i, j, false);
            FeaResult r = solve_elasticity(punctured, mat, bc);
            truth.push_back(r.compliance - base.compliance);
            sens.push_back(t.at(i, j));
        }
    CHECK(oracles::spearman(sens, truth) >= 0.9);
}

TEST_CASE("augment_tsf normalization and invariances") {
    Grid g(6, 4, 1.0);
    ScalarField f1(g, 0.0), f2(g, 0.0);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& v : f1.cells) v = u(rng);
    for (double& v : f2.cells) v = u(rng);
    f1.cells[5] = 1.0; // unit max, identity case

    ScalarField same = augment_tsf({{f1, 0.7}});
    for (std::size_t c = 0; c < f1.cells.size(); ++c)
        CHECK(same.cells[c] == doctest::Approx(f1.cells[c]).epsilon(1e-12));

    ScalarField a = augment_tsf({{f1, 1.0}, {f2, 2.0}});
    ScalarField b = augment_tsf({{f1, 3.0}, {f2, 6.0}});
    double amax = 0.0;
    for (std::size_t c = 0; c < a.cells.size(); ++c) {
        CHECK(a.cells[c] == doctest::Approx(b.cells[c]).epsilon(1e-12));
        amax = std::max(amax, a.cells[c]);
    }
    CHECK(amax == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(augment_tsf({}), DegenerateInputError);
    CHECK_THROWS_AS(augment_tsf({{ScalarField(g, 0.0), 1.0}}), DegenerateInputError);
    CHECK_THROWS_AS(augment_tsf({{f1, 0.0}}), DegenerateInputError);
    CHECK_THROWS_AS(augment_tsf({{f1, -1.0}}), DegenerateInputError);
}

TEST_CASE("penalize_tsf adds weighted bumps without renormalizing") {
    Grid g(5, 5, 1.0);
    ScalarField t(g, 0.5);
    ScalarField bump(g, 0.0);
    bump.set(2, 2, 1.0);
    ScalarField same = penalize_tsf(t, {});
    CHECK(same == t);
    ScalarField zero = penalize_tsf(t, {{bump, 0.0}});
    CHECK(zero == t);
    ScalarField p = penalize_tsf(t, {{bump, 0.4}});
    CHECK(p.at(2, 2) == doctest::Approx(0.9));
    CHECK(p.at(0, 0) == doctest::Approx(0.5));
    for (std::size_t c = 0; c < p.cells.size(); ++c) CHECK(p.cells[c] >= t.cells[c]);
    CHECK_THROWS_AS(penalize_tsf(t, {{bump, -0.1}}), DegenerateInputError);
}

TEST_CASE("filter_tsf radial mean against the naive scan") {
    Grid g(14, 9, 0.5);
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    ScalarField t(g, 0.0);
    for (double& v : t.cells) v = u(rng);
    IndicatorField mask = oracles::random_field(g, rng, 0.7);

    CHECK(filter_tsf(t, 0.0) == t);
    CHECK(filter_tsf(t, 0.4) == t); // below one cell, no neighbors in range

    for (double radius : {0.5, 0.75, 1.2}) {
        ScalarField a = filter_tsf(t, radius);
        ScalarField ref = naive_filter(t, radius, nullptr);
        for (std::size_t c = 0; c < a.cells.size(); ++c)
            CHECK(a.cells[c] == doctest::Approx(ref.cells[c]).epsilon(1e-12));
        ScalarField am = filter_tsf(t, radius, &mask);
        ScalarField refm = naive_filter(t, radius, &mask);
        for (std::size_t c = 0; c < am.cells.size(); ++c)
            CHECK(am.cells[c] == doctest::Approx(refm.cells[c]).epsilon(1e-12));
    }

    ScalarField flat(g, 0.75);
    ScalarField ff = filter_tsf(flat, 1.1);
    for (double v : ff.cells) CHECK(v == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("find_tau keeps the target count with deterministic ties") {
    Grid g(10, 10, 1.0);
    IndicatorField design(g, 1);
    IndicatorField ref(g, 1);
    IndicatorField frozen(g);
    frozen.set(9, 9, true);
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ScalarField tsf(g, 0.0);
    for (double& v : tsf.cells) v = u(rng);

    auto [tau_full, full] = find_tau(design, tsf, 1.0, ref, frozen);
    CHECK(full == design);
    CHECK(tau_full <= *std::min_element(tsf.cells.begin(), tsf.cells.end()));

    auto [tau95, d95] = find_tau(design, tsf, 0.95, ref, frozen);
    CHECK(d95.count() == 95);
    CHECK(is_subset(frozen, d95));
    CHECK(is_subset(d95, design));
    for (int c = 0; c < 100; ++c)
        if (d95.cells[c] && !frozen.cells[c]) CHECK(tsf.cells[c] >= tau95);

    // nesting under decreasing targets on one fixed field
    auto d80 = find_tau(design, tsf, 0.80, ref, frozen).second;
    auto d60 = find_tau(design, tsf, 0.60, ref, frozen).second;
    CHECK(is_subset(d60, d80));
    CHECK(is_subset(d80, d95));

    // exactly the frozen mask when the target equals its volume
    auto dmin = find_tau(design, tsf, 0.01, ref, frozen).second;
    CHECK(dmin == frozen);

    // constant field: ties resolve to the lowest cell indices
    ScalarField flat(g, 0.5);
    auto dflat = find_tau(design, flat, 0.5, ref, IndicatorField(g)).second;
    for (int c = 0; c < 50; ++c) CHECK(dflat.cells[c] == 1);
    for (int c = 50; c < 100; ++c) CHECK(dflat.cells[c] == 0);

    CHECK_THROWS_AS(find_tau(design, tsf, 0.004, ref, frozen), InfeasibleTargetError);
    IndicatorField half(g);
    for (int c = 0; c < 50; ++c) half.cells[c] = 1;
    CHECK_THROWS_AS(find_tau(half, tsf, 0.9, ref, IndicatorField(g)), InfeasibleTargetError);
}

TEST_CASE("support volume: slabs, floating strips, staircases") {
    Grid g(12, 8, 1.0);
    IndicatorField ref(g, 1);

    IndicatorField slab(g);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < g.nx; ++i) slab.set(i, j, true);
    CHECK(support_volume_fraction(slab, 45.0, ref) == 0.0);

    IndicatorField strip(g);
    for (int i = 2; i < 7; ++i) strip.set(i, 3, true); // 5 cells floating at height 3
    CHECK(support_volume_fraction(strip, 45.0, ref) ==
          doctest::Approx(5.0 * 3.0 / ref.count()));

    IndicatorField stairs(g);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j <= i && j < g.ny; ++j) stairs.set(i, j, true);
    CHECK(support_volume_fraction(stairs, 45.0, ref) == 0.0);
    // a 90-degree printer tolerates everything except true islands
    CHECK(support_volume_fraction(strip, 90.0, ref) == 0.0);
}

TEST_CASE("support_volume_fraction matches the direct count on random fields") {
    std::mt19937 rng(33);
    for (int t = 0; t < 12; ++t) {
        Grid g(10 + t, 7 + t / 2, 1.0);
        IndicatorField a = oracles::random_field(g, rng, 0.45);
        IndicatorField ref(g, 1);
        double got = support_volume_fraction(a, 45.0, ref);
        double want = static_cast<double>(oracles::direct_support_cells(a, 45.0)) / ref.count();
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("support_volume_tsf equals the exact one-cell finite difference") {
    std::mt19937 rng(37);
    for (int t = 0; t < 6; ++t) {
        Grid g(12, 9, 1.0);
        IndicatorField a = oracles::random_field(g, rng, 0.5);
        IndicatorField ref(g, 1);
        ScalarField got = support_volume_tsf(a, 45.0, ref);
        const long base = oracles::direct_support_cells(a, 45.0);
        ScalarField raw(g, 0.0);
        double amax = 0.0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                if (!a.at(i, j)) continue;
                IndicatorField removed = a;
                removed.set(i, j, false);
                double d = static_cast<double>(oracles::direct_support_cells(removed, 45.0) - base);
                raw.set(i, j, d);
                amax = std::max(amax, std::abs(d));
            }
        for (std::size_t c = 0; c < raw.cells.size(); ++c) {
            double want = amax > 0.0 ? raw.cells[c] / amax : 0.0;
            CHECK(got.cells[c] == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("inner_loop at the current volume converges immediately") {
    Grid g(12, 6, 0.01);
    Problem p = cantilever_problem(g);
    OuterLoopConfig cfg;
    IndicatorField design(g, 1);
    auto [next, point] = inner_loop(design, 1.0, {}, cfg, p);
    CHECK(next == design);
    CHECK(point.inner_iters == 1);
    CHECK(point.status == "ok");
    CHECK(point.volume_fraction == doctest::Approx(1.0));
}

TEST_CASE("inner_loop settles a small beam step within the iteration budget") {
    Grid g(16, 8, 0.01);
    Problem p = cantilever_problem(g);
    OuterLoopConfig cfg;
    auto [next, point] = inner_loop(IndicatorField(g, 1), 0.9, {}, cfg, p);
    CHECK(point.status == "ok");
    CHECK(point.inner_iters <= cfg.max_inner_iters);
    CHECK(std::abs(point.volume_fraction - 0.9) <= 1.0 / g.cells() + 1e-12);
    CHECK(is_subset(p.frozen, next));
}

TEST_CASE("a strongly weighted local penalty field shields its region from removal") {
    Grid g(16, 8, 0.01);
    Problem p = cantilever_problem(g);
    IndicatorField marked(g);
    for (int j = 2; j < 6; ++j)
        for (int i = 2; i < 6; ++i) marked.set(i, j, true);
    ConstraintSpec shield;
    shield.name = "shield";
    shield.kind = ConstraintSpec::Kind::local;
    shield.weight = 10.0;
    shield.local_field = [marked](const IndicatorField&, const SolveContext&) {
        ScalarField f(marked.grid, 0.0);
        for (std::size_t c = 0; c < f.cells.size(); ++c)
            f.cells[c] = marked.cells[c] ? 1.0 : 0.0;
        return f;
    };
    OuterLoopConfig cfg;
    auto [next, point] = inner_loop(IndicatorField(g, 1), 0.8, {shield}, cfg, p);
    (void)point;
    for (std::size_t c = 0; c < next.cells.size(); ++c)
        if (marked.cells[c]) CHECK(next.cells[c] == 1);
}

TEST_CASE("accessibility penalty does not remove harder-to-reach cells than the free run") {
    Grid g(24, 10, 1.0);
    Problem p;
    p.material = Material(1e9, 0.3);
    p.bc = cantilever_bc(g, -1e4);
    p.frozen = IndicatorField(g);
    p.frozen.set(g.nx - 1, 4, true);
    p.ref = IndicatorField(g, 1);
    Grid tg(14, 5, 1.0);
    IndicatorField head(tg), cutter(tg);
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i <= 5; ++i) head.set(i, j, true);
    for (int i = 6; i < 14; ++i) cutter.set(i, 2, true);
    ToolAssembly tool{head, cutter, 13, 2};
    IndicatorField fixtures(g);
    for (int j = 3; j < 7; ++j) fixtures.set(0, j, true);
    p.access = Problem::Access{tool,
                               make_orientation_set(tool.assembly(), 13, 2, {0.0, kPi}),
                               fixtures};

    ConstraintSpec access;
    access.name = "accessibility";
    access.kind = ConstraintSpec::Kind::local;
    access.weight = 5.0;
    OuterLoopConfig cfg;
    auto free_run = inner_loop(IndicatorField(g, 1), 0.85, {}, cfg, p);
    auto pen_run = inner_loop(IndicatorField(g, 1), 0.85, {access}, cfg, p);
    CHECK(pen_run.second.inaccess_max <= free_run.second.inaccess_max + 1e-6);
    CHECK(pen_run.second.mu.has_value());
}

TEST_CASE("local accessibility spec without a solver is a configuration error") {
    Grid g(10, 6, 0.01);
    Problem p = cantilever_problem(g); // no access configured
    ConstraintSpec access;
    access.name = "accessibility";
    access.kind = ConstraintSpec::Kind::local;
    access.weight = 0.1;
    OuterLoopConfig cfg;
    CHECK_THROWS_AS(inner_loop(IndicatorField(g, 1), 0.9, {access}, cfg, p), ConfigError);
}

TEST_CASE("outer_loop traces a strictly tightening front with frozen cells intact") {
    Grid g(16, 8, 0.01);
    Problem p = cantilever_problem(g);
    OuterLoopConfig cfg;
    cfg.delta = 0.1;
    cfg.v_min = 0.7;
    auto front = outer_loop(IndicatorField(g, 1), {}, cfg, p);
    REQUIRE(front.size() == 4);
    for (std::size_t k = 0; k < front.size(); ++k) {
        const auto& pt = front[k];
        CHECK(pt.step == static_cast<int>(k));
        CHECK(is_subset(p.frozen, pt.design));
        double target = 1.0 - 0.1 * static_cast<double>(k);
        CHECK(std::abs(pt.volume_fraction - target) <= 1.0 / g.cells() + 1e-12);
        if (k > 0) CHECK(pt.volume_fraction < front[k - 1].volume_fraction);
        CHECK(pt.status == "ok");
    }
}

TEST_CASE("outer_loop input validation") {
    Grid g(8, 4, 0.01);
    Problem p = cantilever_problem(g);
    OuterLoopConfig cfg;
    CHECK_THROWS_AS(outer_loop(IndicatorField(g), {}, cfg, p), DegenerateInputError);
    OuterLoopConfig bad = cfg;
    bad.delta = 0.0;
    CHECK_THROWS_AS(outer_loop(IndicatorField(g, 1), {}, bad, p), ConfigError);
    bad = cfg;
    bad.v_min = 0.0;
    CHECK_THROWS_AS(outer_loop(IndicatorField(g, 1), {}, bad, p), ConfigError);
    cfg.v_min = 1.0;
    auto front = outer_loop(IndicatorField(g, 1), {}, cfg, p);
    CHECK(front.size() == 1);
    CHECK(front[0].volume_fraction == doctest::Approx(1.0));
}

TEST_CASE("deflection bound stops the trace and keeps the front clean") {
    Grid g(16, 8, 0.01);
    Problem p = cantilever_problem(g);
    OuterLoopConfig open;
    open.delta = 0.1;
    open.v_min = 0.4;
    auto full = outer_loop(IndicatorField(g, 1), {}, open, p);
    REQUIRE(full.size() >= 3);
    // pick a bound the trace crosses partway down
    double cut = full[full.size() / 2].max_disp * 1.0001;
    OuterLoopConfig capped = open;
    capped.deflection_ub = cut;
    auto clipped = outer_loop(IndicatorField(g, 1), {}, capped, p);
    CHECK(clipped.size() < full.size());
    CHECK(clipped.size() >= 1);
    for (const auto& pt : clipped) CHECK(pt.max_disp <= cut);
}

TEST_CASE("an exhausted inner budget is reported, not fatal") {
    Grid g(16, 8, 0.01);
    Problem p = cantilever_problem(g);
    OuterLoopConfig cfg;
    cfg.delta = 0.2;
    cfg.v_min = 0.6;
    cfg.max_inner_iters = 1;
    auto front = outer_loop(IndicatorField(g, 1), {}, cfg, p);
    CHECK(front.size() == 3);
    bool saw_budget = false;
    for (const auto& pt : front)
        if (pt.status == "maxiters") saw_budget = true;
    CHECK(saw_budget);
}

TEST_CASE("outer_loop is deterministic run to run") {
    Grid g(16, 8, 0.01);
    Problem p = cantilever_problem(g);
    OuterLoopConfig cfg;
    cfg.delta = 0.1;
    cfg.v_min = 0.6;
    cfg.filter_radius = 0.015;
    auto a = outer_loop(IndicatorField(g, 1), {}, cfg, p);
    auto b = outer_loop(IndicatorField(g, 1), {}, cfg, p);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].design == b[k].design);
        CHECK(a[k].compliance == b[k].compliance);
        CHECK(a[k].max_disp == b[k].max_disp);
        CHECK(a[k].tsf == b[k].tsf);
    }
}

TEST_CASE("global support constraint augments the field and reports residuals") {
    Grid g(16, 8, 0.01);
    Problem p = cantilever_problem(g);
    ConstraintSpec support;
    support.name = "support";
    support.kind = ConstraintSpec::Kind::global;
    support.bound = 0.05;
    support.weight = 0.5;
    support.value = [](const IndicatorField& d, const SolveContext&) {
        IndicatorField ref(d.grid, 1);
        return support_volume_fraction(d, 45.0, ref);
    };
    support.tsf = [](const IndicatorField& d, const SolveContext&) {
        IndicatorField ref(d.grid, 1);
        ScalarField t = support_volume_tsf(d, 45.0, ref);
        for (double& v : t.cells) v = std::max(0.0, v);
        return t;
    };
    OuterLoopConfig cfg;
    cfg.delta = 0.1;
    cfg.v_min = 0.8;
    auto front = outer_loop(IndicatorField(g, 1), {support}, cfg, p);
    REQUIRE(front.size() == 3);
    for (const auto& pt : front) {
        REQUIRE(pt.residuals.size() == 1);
        CHECK(pt.residuals[0].first == "support");
        CHECK(pt.residuals[0].second ==
              doctest::Approx(support.value(pt.design, SolveContext{FeaResult{}, std::nullopt}) -
                              0.05));
    }
}
