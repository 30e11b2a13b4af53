#pragma once

#include <vector>

#include "prunetrace/field.hpp"

namespace prunetrace {

// Tool assembly on its own local grid; origin_cell is the reference cell that
// gets registered onto the query point (the cutter tip).
struct ToolAssembly {
    IndicatorField head;
    IndicatorField cutter;
    int origin_i = 0;
    int origin_j = 0;

    IndicatorField assembly() const; // head ∪ cutter
};

// Pre-rasterized rotations of one source bitmap about its origin cell.
struct OrientationSet {
    std::vector<double> angles; // radians
    std::vector<IndicatorField> rotated;
    int origin_i = 0;
    int origin_j = 0;
};

// nearest-neighbor resample of src rotated by angle about its origin cell
IndicatorField rotate_nearest(const IndicatorField& src, int origin_i, int origin_j,
                              double angle);

OrientationSet make_orientation_set(const IndicatorField& source, int origin_i, int origin_j,
                                    const std::vector<double>& angles);

// value at x = sum_x' A(x')·B(x'-x)·h^2, the overlap volume of B translated so
// its cell (0,0) lands on x; FFT-backed, clamped at >= 0
ScalarField convolve(const IndicatorField& a, const IndicatorField& b);

// mu(x) = min over orientations of the overlap volume between the translated
// rotated tool (origin registered on x) and design ∪ fixtures, normalized by
// that orientation's tool volume; mu in [0,1]
ScalarField inaccessibility_measure(const IndicatorField& design, const IndicatorField& fixtures,
                                    const ToolAssembly& tool, const OrientationSet& orientations);

// cells whose minimum head-fixture overlap is <= mu0_cells cell volumes for at
// least one orientation, regularized; head_orients must be built from the head
IndicatorField accessible_maximal_set(const IndicatorField& head, const IndicatorField& fixtures,
                                      const Grid& grid, const OrientationSet& head_orients,
                                      double mu0_cells = 0.5);

} // namespace prunetrace
