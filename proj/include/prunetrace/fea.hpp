#pragma once

#include <array>
#include <vector>

#include "prunetrace/field.hpp"

namespace prunetrace {

struct Material {
    double young = 1.0;   // Pa
    double poisson = 0.3;
    double ersatz = 1e-6; // void stiffness factor keeping K positive definite

    Material() = default;
    Material(double e, double nu, double ers = 1e-6) : young(e), poisson(nu), ersatz(ers) {
        if (young <= 0.0) throw DegenerateInputError("material: E must be > 0");
        if (poisson < 0.0 || poisson >= 0.5)
            throw DegenerateInputError("material: need 0 <= nu < 0.5");
        if (ersatz <= 0.0 || ersatz >= 1.0)
            throw DegenerateInputError("material: need 0 < ersatz << 1");
    }
};

// Nodes are cell corners: i in [0..nx], j in [0..ny].
struct NodeRestraint {
    int i = 0, j = 0;
    bool fix_x = true, fix_y = true;
};

struct NodeLoad {
    int i = 0, j = 0;
    double fx = 0.0, fy = 0.0;
};

struct BoundaryConditions {
    std::vector<NodeRestraint> fixed_nodes;
    std::vector<NodeLoad> loads;
};

struct FeaResult {
    Grid grid;
    std::vector<double> displacement; // 2 per node, (ux, uy), node id = j*(nx+1)+i
    double compliance = 0.0;          // f·u
    ScalarField energy_density;       // J/m^3 per cell; reported 0 on void cells
    double strain_energy_total = 0.0; // includes ersatz-cell energy; J = 2*this
    double max_deflection = 0.0;      // max |u| over nodes touching material
    double residual = 0.0;            // ||K u - f|| / ||f||
    bool deflection_blow_up = false;  // load likely disconnected from restraints

    double ux(int i, int j) const { return displacement[2 * (j * (grid.nx + 1) + i)]; }
    double uy(int i, int j) const { return displacement[2 * (j * (grid.nx + 1) + i) + 1]; }
};

// 8x8 bilinear quadrilateral stiffness for a square plane-stress element,
// E = 1, unit thickness; node order (bl, br, tr, tl), dofs (ux, uy) each.
std::array<std::array<double, 8>, 8> element_stiffness(double poisson);

// Assembles material/ersatz bilinear quads over the whole grid and solves
// K u = f with a sparse SPD direct factorization; residual checked to 1e-8.
FeaResult solve_elasticity(const IndicatorField& design, const Material& mat,
                           const BoundaryConditions& bc);

double compliance_of(const FeaResult& r);
double max_displacement(const FeaResult& r);

} // namespace prunetrace
