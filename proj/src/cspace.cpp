#include "prunetrace/cspace.hpp"

#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>

namespace prunetrace {

IndicatorField ToolAssembly::assembly() const {
    if (!(head.grid == cutter.grid))
        throw DimensionError("tool head and cutter on different grids");
    return unite(head, cutter);
}

IndicatorField rotate_nearest(const IndicatorField& src, int origin_i, int origin_j,
                              double angle) {
    const Grid& g = src.grid;
    IndicatorField r(g);
    double c = std::cos(-angle), s = std::sin(-angle);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double dx = i - origin_i, dy = j - origin_j;
            int si = origin_i + static_cast<int>(std::lround(c * dx - s * dy));
            int sj = origin_j + static_cast<int>(std::lround(s * dx + c * dy));
            r.set(i, j, g.in_bounds(si, sj) && src.at(si, sj));
        }
    return r;
}

OrientationSet make_orientation_set(const IndicatorField& source, int origin_i, int origin_j,
                                    const std::vector<double>& angles) {
    if (angles.empty()) throw DegenerateInputError("orientation set needs >= 1 angle");
    if (!source.grid.in_bounds(origin_i, origin_j))
        throw DimensionError("tool origin cell outside tool grid");

    // re-embed on a square grid wide enough that no rotation about the origin
    // cell can push a set cell off the edge
    int radius = 0;
    for (int j = 0; j < source.grid.ny; ++j)
        for (int i = 0; i < source.grid.nx; ++i)
            if (source.at(i, j)) {
                double d = std::hypot(static_cast<double>(i - origin_i),
                                      static_cast<double>(j - origin_j));
                radius = std::max(radius, static_cast<int>(std::ceil(d)) + 1);
            }
    Grid big(2 * radius + 1, 2 * radius + 1, source.grid.h);
    IndicatorField centered(big);
    for (int j = 0; j < source.grid.ny; ++j)
        for (int i = 0; i < source.grid.nx; ++i)
            if (source.at(i, j)) centered.set(radius + i - origin_i, radius + j - origin_j, true);

    OrientationSet os;
    os.angles = angles;
    os.origin_i = radius;
    os.origin_j = radius;
    os.rotated.reserve(angles.size());
    for (double a : angles) os.rotated.push_back(rotate_nearest(centered, radius, radius, a));
    return os;
}

// Full linear cross-correlation C(k) = sum_j A(j)·B(j-k) on a zero-padded
// (nxa+nxb-1)×(nya+nyb-1) torus; negative shifts wrap to the top end.
// FFTW planning is serialized and uses FFTW_ESTIMATE so repeated runs take the
// same plan (bit-identical outputs).
namespace {

std::mutex fftw_mutex;

struct Correlation {
    int px, py;
    std::vector<double> c; // index ky*px + kx

    double at(int kx, int ky) const {
        if (kx < 0) kx += px;
        if (ky < 0) ky += py;
        return c[static_cast<std::size_t>(ky) * px + kx];
    }
};

Correlation correlate_full(const IndicatorField& a, const IndicatorField& b) {
    const int px = a.grid.nx + b.grid.nx - 1;
    const int py = a.grid.ny + b.grid.ny - 1;
    const std::size_t nreal = static_cast<std::size_t>(px) * py;
    const std::size_t nspec = static_cast<std::size_t>(py) * (px / 2 + 1);

    std::vector<double> pa(nreal, 0.0), pb(nreal, 0.0);
    for (int j = 0; j < a.grid.ny; ++j)
        for (int i = 0; i < a.grid.nx; ++i)
            pa[static_cast<std::size_t>(j) * px + i] = a.at(i, j) ? 1.0 : 0.0;
    for (int j = 0; j < b.grid.ny; ++j)
        for (int i = 0; i < b.grid.nx; ++i)
            pb[static_cast<std::size_t>(j) * px + i] = b.at(i, j) ? 1.0 : 0.0;

    std::vector<std::complex<double>> fa(nspec), fb(nspec);
    Correlation out{px, py, std::vector<double>(nreal, 0.0)};
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        fftw_plan pf = fftw_plan_dft_r2c_2d(py, px, pa.data(),
                                            reinterpret_cast<fftw_complex*>(fa.data()),
                                            FFTW_ESTIMATE);
        fftw_execute(pf);
        fftw_execute_dft_r2c(pf, pb.data(), reinterpret_cast<fftw_complex*>(fb.data()));
        fftw_destroy_plan(pf);
        for (std::size_t k = 0; k < nspec; ++k) fa[k] *= std::conj(fb[k]);
        fftw_plan pi = fftw_plan_dft_c2r_2d(py, px,
                                            reinterpret_cast<fftw_complex*>(fa.data()),
                                            out.c.data(), FFTW_ESTIMATE);
        fftw_execute(pi);
        fftw_destroy_plan(pi);
    }
    const double scale = 1.0 / (static_cast<double>(px) * py);
    for (double& v : out.c) v *= scale;
    return out;
}

} // namespace

ScalarField convolve(const IndicatorField& a, const IndicatorField& b) {
    if (!(a.grid == b.grid)) throw DimensionError("convolve: fields on different grids");
    Correlation c = correlate_full(a, b);
    const double h2 = a.grid.h * a.grid.h;
    ScalarField r(a.grid);
    for (int j = 0; j < a.grid.ny; ++j)
        for (int i = 0; i < a.grid.nx; ++i) {
            double v = c.at(i, j) * h2;
            r.set(i, j, v > 0.0 ? v : 0.0);
        }
    return r;
}

ScalarField inaccessibility_measure(const IndicatorField& design, const IndicatorField& fixtures,
                                    const ToolAssembly& tool, const OrientationSet& orientations) {
    if (!(design.grid == fixtures.grid))
        throw DimensionError("inaccessibility_measure: design/fixtures grid mismatch");
    if (tool.assembly().empty()) throw DegenerateInputError("inaccessibility_measure: empty tool");
    if (orientations.rotated.empty())
        throw DegenerateInputError("inaccessibility_measure: empty orientation set");

    IndicatorField obstacles = unite(design, fixtures);
    ScalarField mu(design.grid, 2.0); // above any normalized overlap
    for (const auto& rot : orientations.rotated) {
        long tv = rot.count();
        if (tv == 0) throw DegenerateInputError("inaccessibility_measure: rotation lost the tool");
        Correlation c = correlate_full(obstacles, rot);
        for (int j = 0; j < design.grid.ny; ++j)
            for (int i = 0; i < design.grid.nx; ++i) {
                double v = c.at(i - orientations.origin_i, j - orientations.origin_j) / tv;
                if (v < mu.at(i, j)) mu.set(i, j, v);
            }
    }
    for (double& v : mu.cells) v = std::min(1.0, std::max(0.0, v));
    return mu;
}

IndicatorField accessible_maximal_set(const IndicatorField& head, const IndicatorField& fixtures,
                                      const Grid& grid, const OrientationSet& head_orients,
                                      double mu0_cells) {
    if (!(fixtures.grid == grid))
        throw DimensionError("accessible_maximal_set: fixtures grid mismatch");
    if (head_orients.rotated.empty())
        throw DegenerateInputError("accessible_maximal_set: empty orientation set");
    (void)head; // shape data lives in head_orients; parameter kept for the call contract

    std::vector<double> best(static_cast<std::size_t>(grid.cells()), 1e300);
    for (const auto& rot : head_orients.rotated) {
        Correlation c = correlate_full(fixtures, rot);
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                double v = c.at(i - head_orients.origin_i, j - head_orients.origin_j);
                auto k = static_cast<std::size_t>(grid.index(i, j));
                if (v < best[k]) best[k] = v;
            }
    }
    IndicatorField acc(grid);
    const double thresh = mu0_cells + 1e-9; // in cell volumes; absorbs FFT round-off
    for (std::size_t k = 0; k < best.size(); ++k) acc.cells[k] = best[k] <= thresh ? 1 : 0;
    return regularize(acc);
}

} // namespace prunetrace
