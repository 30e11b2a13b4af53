#include "prunetrace/field.hpp"

#include <queue>

namespace prunetrace {

static void require_same_grid(const IndicatorField& a, const IndicatorField& b) {
    if (!(a.grid == b.grid))
        throw DimensionError("boolean_op: fields on different grids");
}

IndicatorField boolean_op(BoolOp op, const IndicatorField& a, const IndicatorField* b) {
    IndicatorField r(a.grid);
    const auto n = a.cells.size();
    switch (op) {
    case BoolOp::complement:
        for (std::size_t k = 0; k < n; ++k) r.cells[k] = a.cells[k] ? 0 : 1;
        return r;
    case BoolOp::intersect:
        if (!b) throw DimensionError("boolean_op: intersect needs two fields");
        require_same_grid(a, *b);
        for (std::size_t k = 0; k < n; ++k) r.cells[k] = a.cells[k] & b->cells[k];
        return r;
    case BoolOp::unite:
        if (!b) throw DimensionError("boolean_op: union needs two fields");
        require_same_grid(a, *b);
        for (std::size_t k = 0; k < n; ++k) r.cells[k] = a.cells[k] | b->cells[k];
        return r;
    case BoolOp::difference:
        if (!b) throw DimensionError("boolean_op: difference needs two fields");
        require_same_grid(a, *b);
        for (std::size_t k = 0; k < n; ++k) r.cells[k] = a.cells[k] & (b->cells[k] ? 0 : 1);
        return r;
    }
    throw Error("boolean_op: unknown op");
}

IndicatorField intersect(const IndicatorField& a, const IndicatorField& b) {
    return boolean_op(BoolOp::intersect, a, &b);
}
IndicatorField unite(const IndicatorField& a, const IndicatorField& b) {
    return boolean_op(BoolOp::unite, a, &b);
}
IndicatorField difference(const IndicatorField& a, const IndicatorField& b) {
    return boolean_op(BoolOp::difference, a, &b);
}
IndicatorField complement(const IndicatorField& a) {
    return boolean_op(BoolOp::complement, a);
}

IndicatorField erode_box3(const IndicatorField& a) {
    const Grid& g = a.grid;
    IndicatorField r(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            bool keep = true;
            for (int dj = -1; dj <= 1 && keep; ++dj)
                for (int di = -1; di <= 1 && keep; ++di) {
                    int ii = i + di, jj = j + dj;
                    if (!g.in_bounds(ii, jj) || !a.at(ii, jj)) keep = false;
                }
            r.set(i, j, keep);
        }
    return r;
}

IndicatorField dilate_box3(const IndicatorField& a) {
    const Grid& g = a.grid;
    IndicatorField r(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            bool hit = false;
            for (int dj = -1; dj <= 1 && !hit; ++dj)
                for (int di = -1; di <= 1 && !hit; ++di) {
                    int ii = i + di, jj = j + dj;
                    if (g.in_bounds(ii, jj) && a.at(ii, jj)) hit = true;
                }
            r.set(i, j, hit);
        }
    return r;
}

// drop 4-connected components with fewer than min_component cells
static IndicatorField drop_small_components(const IndicatorField& a, int min_component) {
    const Grid& g = a.grid;
    IndicatorField r(g);
    std::vector<std::uint8_t> seen(a.cells.size(), 0);
    std::vector<int> comp;
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int j0 = 0; j0 < g.ny; ++j0)
        for (int i0 = 0; i0 < g.nx; ++i0) {
            int k0 = g.index(i0, j0);
            if (!a.cells[k0] || seen[k0]) continue;
            comp.clear();
            std::queue<std::pair<int, int>> q;
            q.push({i0, j0});
            seen[k0] = 1;
            while (!q.empty()) {
                auto [i, j] = q.front();
                q.pop();
                comp.push_back(g.index(i, j));
                for (int d = 0; d < 4; ++d) {
                    int ii = i + di[d], jj = j + dj[d];
                    if (!g.in_bounds(ii, jj)) continue;
                    int kk = g.index(ii, jj);
                    if (a.cells[kk] && !seen[kk]) {
                        seen[kk] = 1;
                        q.push({ii, jj});
                    }
                }
            }
            if (static_cast<int>(comp.size()) >= min_component)
                for (int k : comp) r.cells[k] = 1;
        }
    return r;
}

IndicatorField regularize(const IndicatorField& a, int min_component) {
    return drop_small_components(dilate_box3(erode_box3(a)), min_component);
}

double volume_fraction(const IndicatorField& a, const IndicatorField& ref) {
    if (!(a.grid == ref.grid))
        throw DimensionError("volume_fraction: fields on different grids");
    long r = ref.count();
    if (r == 0) throw DivisionError("volume_fraction: empty reference");
    return static_cast<double>(a.count()) / static_cast<double>(r);
}

IndicatorField superlevel_set(const ScalarField& f, double tau) {
    IndicatorField r(f.grid);
    for (std::size_t k = 0; k < f.cells.size(); ++k) r.cells[k] = f.cells[k] >= tau ? 1 : 0;
    return r;
}

bool is_subset(const IndicatorField& a, const IndicatorField& b) {
    if (!(a.grid == b.grid)) return false;
    for (std::size_t k = 0; k < a.cells.size(); ++k)
        if (a.cells[k] && !b.cells[k]) return false;
    return true;
}

} // namespace prunetrace
