#include "prunetrace/fea.hpp"

#include <cmath>
#include <limits>

#include "prunetrace/io.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace prunetrace {

std::array<std::array<double, 8>, 8> element_stiffness(double poisson) {
    // 2x2 Gauss on the unit square; for square elements the size cancels
    const double nu = poisson;
    Eigen::Matrix3d D;
    D << 1.0, nu, 0.0, nu, 1.0, 0.0, 0.0, 0.0, (1.0 - nu) / 2.0;
    D /= (1.0 - nu * nu);

    Eigen::Matrix<double, 8, 8> ke = Eigen::Matrix<double, 8, 8>::Zero();
    const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
    for (double s : gp)
        for (double t : gp) {
            // dN/ds, dN/dt for nodes (0,0),(1,0),(1,1),(0,1)
            const double dns[4] = {-(1 - t), (1 - t), t, -t};
            const double dnt[4] = {-(1 - s), -s, s, (1 - s)};
            Eigen::Matrix<double, 3, 8> B = Eigen::Matrix<double, 3, 8>::Zero();
            for (int a = 0; a < 4; ++a) {
                B(0, 2 * a) = dns[a];
                B(1, 2 * a + 1) = dnt[a];
                B(2, 2 * a) = dnt[a];
                B(2, 2 * a + 1) = dns[a];
            }
            ke += B.transpose() * D * B * 0.25; // quadrature weight on the unit square
        }
    std::array<std::array<double, 8>, 8> out;
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) out[a][b] = ke(a, b);
    return out;
}

FeaResult solve_elasticity(const IndicatorField& design, const Material& mat,
                           const BoundaryConditions& bc) {
    const Grid& g = design.grid;
    if (design.empty()) throw DegenerateInputError("solve_elasticity: empty design");
    const int nnx = g.nx + 1, nny = g.ny + 1;
    const int nnodes = nnx * nny;
    const int ndof = 2 * nnodes;
    auto node = [&](int i, int j) { return j * nnx + i; };

    std::vector<char> fixed(ndof, 0);
    for (const auto& r : bc.fixed_nodes) {
        if (r.i < 0 || r.i >= nnx || r.j < 0 || r.j >= nny)
            throw DimensionError("restraint node outside grid");
        if (r.fix_x) fixed[2 * node(r.i, r.j)] = 1;
        if (r.fix_y) fixed[2 * node(r.i, r.j) + 1] = 1;
    }
    int nfixed = 0;
    for (char c : fixed) nfixed += c;
    if (nfixed == 0) throw SolverError("solve_elasticity: no restrained dofs");

    Eigen::VectorXd f = Eigen::VectorXd::Zero(ndof);
    double fmax = 0.0;
    for (const auto& l : bc.loads) {
        if (l.i < 0 || l.i >= nnx || l.j < 0 || l.j >= nny)
            throw DimensionError("load node outside grid");
        f[2 * node(l.i, l.j)] += l.fx;
        f[2 * node(l.i, l.j) + 1] += l.fy;
        fmax = std::max(fmax, std::hypot(l.fx, l.fy));
    }

    const auto ke = element_stiffness(mat.poisson);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(g.cells()) * 64);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double e = mat.young * (design.at(i, j) ? 1.0 : mat.ersatz);
            const int n0 = node(i, j), n1 = node(i + 1, j), n2 = node(i + 1, j + 1),
                      n3 = node(i, j + 1);
            const int dof[8] = {2 * n0, 2 * n0 + 1, 2 * n1, 2 * n1 + 1,
                                2 * n2, 2 * n2 + 1, 2 * n3, 2 * n3 + 1};
            for (int a = 0; a < 8; ++a)
                for (int b = 0; b < 8; ++b)
                    trips.emplace_back(dof[a], dof[b], e * ke[a][b]);
        }
    Eigen::SparseMatrix<double> kfull(ndof, ndof);
    kfull.setFromTriplets(trips.begin(), trips.end());

    // reduce out fixed dofs
    std::vector<int> remap(ndof, -1);
    int nfree = 0;
    for (int d = 0; d < ndof; ++d)
        if (!fixed[d]) remap[d] = nfree++;
    std::vector<Eigen::Triplet<double>> rt;
    rt.reserve(trips.size());
    for (int col = 0; col < kfull.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(kfull, col); it; ++it)
            if (remap[it.row()] >= 0 && remap[it.col()] >= 0)
                rt.emplace_back(remap[it.row()], remap[it.col()], it.value());
    Eigen::SparseMatrix<double> kred(nfree, nfree);
    kred.setFromTriplets(rt.begin(), rt.end());
    Eigen::VectorXd fred(nfree);
    for (int d = 0; d < ndof; ++d)
        if (remap[d] >= 0) fred[remap[d]] = f[d];

    Eigen::VectorXd ured = Eigen::VectorXd::Zero(nfree);
    double residual = 0.0;
    const double fnorm = fred.norm();
    if (fnorm > 0.0) {
        // Jacobi equilibration: ersatz rows are ~1e6 smaller than material
        // rows, which otherwise destroys the factorization's pivot accuracy
        Eigen::VectorXd dscale(nfree);
        for (int r = 0; r < nfree; ++r) {
            const double kd = kred.coeff(r, r);
            dscale[r] = kd > 0.0 ? 1.0 / std::sqrt(kd) : 1.0;
        }
        Eigen::SparseMatrix<double> keq = kred;
        for (int col = 0; col < keq.outerSize(); ++col)
            for (Eigen::SparseMatrix<double>::InnerIterator it(keq, col); it; ++it)
                it.valueRef() *= dscale[it.row()] * dscale[it.col()];
        const Eigen::VectorXd feq = dscale.cwiseProduct(fred);

        // residual in extended precision: near-disconnected designs push
        // K·u products ~1e7 above the force scale and double-precision
        // cancellation noise alone sits above the 1e-8 contract
        const auto residual_of = [&](const Eigen::VectorXd& u, Eigen::VectorXd& r) {
            std::vector<long double> acc(static_cast<std::size_t>(nfree));
            for (int d = 0; d < nfree; ++d) acc[d] = fred[d];
            for (int col = 0; col < kred.outerSize(); ++col)
                for (Eigen::SparseMatrix<double>::InnerIterator it(kred, col); it; ++it)
                    acc[it.row()] -= static_cast<long double>(it.value()) *
                                     static_cast<long double>(u[it.col()]);
            long double nrm = 0.0L;
            for (int d = 0; d < nfree; ++d) {
                r[d] = static_cast<double>(acc[d]);
                nrm += acc[d] * acc[d];
            }
            return static_cast<double>(std::sqrt(nrm)) / fnorm;
        };
        // iterative refinement against the unscaled system: converging in the
        // equilibrated metric is not enough, the scaling amplifies soft-row
        // residual components right back
        const auto refine = [&](const auto& solver, Eigen::VectorXd& u) {
            Eigen::VectorXd r(nfree), rb(nfree);
            double res = residual_of(u, r);
            for (int pass = 0; pass < 12 && std::isfinite(res) && res > 1e-13; ++pass) {
                Eigen::VectorXd better =
                    u + dscale.cwiseProduct(solver.solve(dscale.cwiseProduct(r)));
                const double rnew = residual_of(better, rb);
                if (!(rnew < res)) break;
                u = std::move(better);
                r.swap(rb);
                res = rnew;
            }
            return res;
        };

        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
        ldlt.compute(keq);
        residual = std::numeric_limits<double>::infinity();
        if (ldlt.info() == Eigen::Success) {
            ured = dscale.cwiseProduct(ldlt.solve(feq));
            residual = refine(ldlt, ured);
        }
        if (!std::isfinite(residual) || residual > 1e-10) {
            // LDLT pivoting can stall near the bound on designs whose load
            // rides on ersatz cells; LU pivots those systems accurately
            Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
            lu.compute(keq);
            if (lu.info() != Eigen::Success) {
                if (ldlt.info() != Eigen::Success)
                    throw SolverError("solve_elasticity: factorization failed (singular system)");
            } else {
                Eigen::VectorXd ulu = dscale.cwiseProduct(lu.solve(feq));
                const double rlu = refine(lu, ulu);
                if (rlu < residual) {
                    ured = std::move(ulu);
                    residual = rlu;
                }
            }
        }
        if (!std::isfinite(residual) || residual > 1e-8)
            throw SolverError("solve_elasticity: residual " + format_double(residual) +
                              " exceeds 1e-8");
    }

    FeaResult res;
    res.grid = g;
    res.displacement.assign(static_cast<std::size_t>(ndof), 0.0);
    for (int d = 0; d < ndof; ++d)
        if (remap[d] >= 0) res.displacement[d] = ured[remap[d]];
    res.residual = residual;

    double fu = 0.0;
    for (int d = 0; d < ndof; ++d) fu += f[d] * res.displacement[d];
    res.compliance = fu;

    res.energy_density = ScalarField(g);
    double etotal = 0.0;
    const double h2 = g.h * g.h;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double e = mat.young * (design.at(i, j) ? 1.0 : mat.ersatz);
            const int n0 = node(i, j), n1 = node(i + 1, j), n2 = node(i + 1, j + 1),
                      n3 = node(i, j + 1);
            const int dof[8] = {2 * n0, 2 * n0 + 1, 2 * n1, 2 * n1 + 1,
                                2 * n2, 2 * n2 + 1, 2 * n3, 2 * n3 + 1};
            double cell = 0.0;
            for (int a = 0; a < 8; ++a) {
                double row = 0.0;
                for (int b = 0; b < 8; ++b) row += ke[a][b] * res.displacement[dof[b]];
                cell += res.displacement[dof[a]] * row;
            }
            cell *= 0.5 * e;
            if (cell < 0.0 && cell > -1e-30) cell = 0.0;
            etotal += cell;
            res.energy_density.set(i, j, design.at(i, j) ? cell / h2 : 0.0);
        }
    res.strain_energy_total = etotal;

    // max |u| over nodes incident to at least one material cell
    double dmax = 0.0;
    for (int j = 0; j < nny; ++j)
        for (int i = 0; i < nnx; ++i) {
            bool mat_node = false;
            for (int dj = -1; dj <= 0 && !mat_node; ++dj)
                for (int di = -1; di <= 0 && !mat_node; ++di) {
                    int ci = i + di, cj = j + dj;
                    if (g.in_bounds(ci, cj) && design.at(ci, cj)) mat_node = true;
                }
            if (!mat_node) continue;
            double u = std::hypot(res.displacement[2 * node(i, j)],
                                  res.displacement[2 * node(i, j) + 1]);
            dmax = std::max(dmax, u);
        }
    res.max_deflection = dmax;

    // a load riding only on ersatz cells deflects ~1/ersatz more than any
    // connected structure; 1% of that ride is far above physical deflections
    if (fmax > 0.0)
        res.deflection_blow_up = dmax * mat.ersatz * mat.young / fmax > 0.01;
    return res;
}

double compliance_of(const FeaResult& r) { return r.compliance; }
double max_displacement(const FeaResult& r) { return r.max_deflection; }

} // namespace prunetrace
