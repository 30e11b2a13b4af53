#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "prunetrace/errors.hpp"

namespace prunetrace {

// Regular cell grid. origin is the world position of cell (0,0)'s center;
// x grows right, y grows up, storage is row-major with x fastest.
struct Grid {
    int nx = 0;
    int ny = 0;
    double h = 1.0;
    double ox = 0.0;
    double oy = 0.0;

    Grid() = default;
    Grid(int nx_, int ny_, double h_, double ox_ = 0.0, double oy_ = 0.0)
        : nx(nx_), ny(ny_), h(h_), ox(ox_), oy(oy_) {
        if (nx < 1 || ny < 1 || h <= 0.0)
            throw DimensionError("grid requires nx >= 1, ny >= 1, h > 0");
    }

    int cells() const { return nx * ny; }
    int index(int i, int j) const { return j * nx + i; }
    bool in_bounds(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }

    double cx(int i) const { return ox + i * h; }
    double cy(int j) const { return oy + j * h; }

    // nearest cell to a world point; false when it rounds outside the grid
    bool nearest_cell(double x, double y, int& i, int& j) const {
        i = static_cast<int>(std::lround((x - ox) / h));
        j = static_cast<int>(std::lround((y - oy) / h));
        return in_bounds(i, j);
    }

    bool operator==(const Grid& o) const {
        return nx == o.nx && ny == o.ny && h == o.h && ox == o.ox && oy == o.oy;
    }
};

// Binary cell field; 1 = material.
struct IndicatorField {
    Grid grid;
    std::vector<std::uint8_t> cells;

    IndicatorField() = default;
    explicit IndicatorField(const Grid& g, std::uint8_t fill = 0)
        : grid(g), cells(static_cast<std::size_t>(g.cells()), fill ? 1 : 0) {}

    std::uint8_t at(int i, int j) const { return cells[grid.index(i, j)]; }
    void set(int i, int j, bool v) { cells[grid.index(i, j)] = v ? 1 : 0; }

    long count() const {
        long n = 0;
        for (auto c : cells) n += c;
        return n;
    }
    double volume() const { return static_cast<double>(count()) * grid.h * grid.h; }
    bool empty() const { return count() == 0; }

    bool operator==(const IndicatorField& o) const {
        return grid == o.grid && cells == o.cells;
    }
};

// Real-valued cell field; every operation keeps values finite.
struct ScalarField {
    Grid grid;
    std::vector<double> cells;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid(g), cells(static_cast<std::size_t>(g.cells()), fill) {}

    double at(int i, int j) const { return cells[grid.index(i, j)]; }
    void set(int i, int j, double v) { cells[grid.index(i, j)] = v; }

    bool operator==(const ScalarField& o) const { return grid == o.grid && cells == o.cells; }
};

enum class BoolOp { intersect, unite, difference, complement };

// Cellwise Boolean algebra; complement ignores b. No regularization here.
IndicatorField boolean_op(BoolOp op, const IndicatorField& a, const IndicatorField* b = nullptr);

IndicatorField intersect(const IndicatorField& a, const IndicatorField& b);
IndicatorField unite(const IndicatorField& a, const IndicatorField& b);
IndicatorField difference(const IndicatorField& a, const IndicatorField& b);
IndicatorField complement(const IndicatorField& a);

// Morphology helpers (3x3 box element, outside-of-grid cells count as void).
IndicatorField erode_box3(const IndicatorField& a);
IndicatorField dilate_box3(const IndicatorField& a);

// Opening (erode then dilate, 3x3 box) followed by removal of 4-connected
// components smaller than min_component cells. Anti-extensive and idempotent.
IndicatorField regularize(const IndicatorField& a, int min_component = 4);

// vol[a] / vol[ref] by cell counting; empty ref is an error.
double volume_fraction(const IndicatorField& a, const IndicatorField& ref);

// cells where f >= tau
IndicatorField superlevel_set(const ScalarField& f, double tau);

bool is_subset(const IndicatorField& a, const IndicatorField& b);

} // namespace prunetrace
