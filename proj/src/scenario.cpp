#include "prunetrace/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "prunetrace/io.hpp"

namespace fs = std::filesystem;

namespace prunetrace {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

double to_double(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": bad number '" + s + "'");
    }
}

int to_int(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw ConfigError(where + ": bad integer '" + s + "'");
    }
}

bool to_bool(const std::string& s, const std::string& where) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(where + ": bad boolean '" + s + "'");
}

} // namespace

bool IniDoc::has(const std::string& sec) const { return section(sec) != nullptr; }

const IniDoc::Entries* IniDoc::section(const std::string& sec) const {
    for (const auto& [name, entries] : sections)
        if (name == sec) return &entries;
    return nullptr;
}

std::optional<std::string> IniDoc::get(const std::string& sec, const std::string& key) const {
    const Entries* e = section(sec);
    if (!e) return std::nullopt;
    std::optional<std::string> out;
    for (const auto& [k, v] : *e)
        if (k == key) out = v;
    return out;
}

std::vector<std::string> IniDoc::get_all(const std::string& sec, const std::string& key) const {
    std::vector<std::string> out;
    const Entries* e = section(sec);
    if (!e) return out;
    for (const auto& [k, v] : *e)
        if (k == key) out.push_back(v);
    return out;
}

IniDoc parse_ini(const std::string& text) {
    IniDoc doc;
    IniDoc::Entries* current = nullptr;
    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            doc.sections.emplace_back(name, IniDoc::Entries{});
            current = &doc.sections.back().second;
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (!current)
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        current->emplace_back(key, val);
    }
    return doc;
}

namespace {

const std::vector<std::pair<std::string, std::vector<std::string>>> kSchema = {
    {"grid", {"nx", "ny", "h", "ox", "oy"}},
    {"material", {"young", "poisson", "ersatz"}},
    {"domain", {"shape"}},
    {"frozen", {"shape"}},
    {"envelope", {"shape"}},
    {"fixtures", {"shape"}},
    {"bc", {"fix", "load"}},
    {"motion", {"pivot", "theta0_deg", "theta1_deg", "samples"}},
    {"tool",
     {"head", "cutter", "origin", "angles_deg", "mu0_cells", "prune", "kappa", "kappa_max"}},
    {"support", {"lambda", "overhang_deg"}},
    {"loop",
     {"delta", "v_min", "max_inner_iters", "filter_radius", "deflection_ub"}},
    {"output", {"dir", "snapshot_every"}},
};

void check_schema(const IniDoc& doc) {
    for (const auto& [sec, entries] : doc.sections) {
        const std::vector<std::string>* keys = nullptr;
        for (const auto& [name, ks] : kSchema)
            if (name == sec) keys = &ks;
        if (!keys) throw ConfigError("unknown section [" + sec + "]");
        for (const auto& [k, v] : entries)
            if (std::find(keys->begin(), keys->end(), k) == keys->end())
                throw ConfigError("[" + sec + "]: unknown key '" + k + "'");
    }
}

IndicatorField build_shapes(const IniDoc& doc, const std::string& sec, const Grid& grid,
                            const fs::path& base_dir) {
    IndicatorField acc(grid);
    for (const std::string& line : doc.get_all(sec, "shape")) {
        auto tok = split_ws(line);
        const std::string where = "[" + sec + "] shape";
        if (tok.size() < 2) throw ConfigError(where + ": expected '<add|sub> <shape> ...'");
        const bool add = tok[0] == "add";
        if (!add && tok[0] != "sub")
            throw ConfigError(where + ": op must be add or sub, got '" + tok[0] + "'");
        IndicatorField shape(grid);
        if (tok[1] == "rect" && tok.size() == 6) {
            double x0 = to_double(tok[2], where), y0 = to_double(tok[3], where);
            double x1 = to_double(tok[4], where), y1 = to_double(tok[5], where);
            for (int j = 0; j < grid.ny; ++j)
                for (int i = 0; i < grid.nx; ++i) {
                    double x = grid.cx(i), y = grid.cy(j);
                    shape.set(i, j, x >= x0 && x <= x1 && y >= y0 && y <= y1);
                }
        } else if (tok[1] == "disc" && tok.size() == 5) {
            double cx = to_double(tok[2], where), cy = to_double(tok[3], where);
            double r = to_double(tok[4], where);
            for (int j = 0; j < grid.ny; ++j)
                for (int i = 0; i < grid.nx; ++i) {
                    double dx = grid.cx(i) - cx, dy = grid.cy(j) - cy;
                    shape.set(i, j, dx * dx + dy * dy <= r * r);
                }
        } else if (tok[1] == "halfplane" && tok.size() == 5) {
            double a = to_double(tok[2], where), b = to_double(tok[3], where);
            double c = to_double(tok[4], where);
            for (int j = 0; j < grid.ny; ++j)
                for (int i = 0; i < grid.nx; ++i)
                    shape.set(i, j, a * grid.cx(i) + b * grid.cy(j) <= c);
        } else if (tok[1] == "pgm" && tok.size() == 3) {
            fs::path p = fs::path(tok[2]);
            if (p.is_relative()) p = base_dir / p;
            try {
                shape = read_pgm(p.string(), grid.h, grid.ox, grid.oy);
            } catch (const Error& e) {
                throw ConfigError(where + ": " + e.what());
            }
            if (!(shape.grid == grid))
                throw ConfigError(where + ": bitmap " + tok[2] + " does not match the grid");
        } else {
            throw ConfigError(where + ": bad shape '" + line + "'");
        }
        acc = add ? unite(acc, shape) : difference(acc, shape);
    }
    return acc;
}

void parse_bc(const IniDoc& doc, const Grid& grid, BoundaryConditions& bc) {
    auto dofs = [](const std::string& s, const std::string& where) {
        if (s == "x") return std::pair<bool, bool>{true, false};
        if (s == "y") return std::pair<bool, bool>{false, true};
        if (s == "xy") return std::pair<bool, bool>{true, true};
        throw ConfigError(where + ": dofs must be x, y, or xy, got '" + s + "'");
    };
    // node (i, j) sits at the cell corner (ox + (i - 0.5) h, oy + (j - 0.5) h)
    auto node_x = [&](int i) { return grid.ox + (i - 0.5) * grid.h; };
    auto node_y = [&](int j) { return grid.oy + (j - 0.5) * grid.h; };

    for (const std::string& line : doc.get_all("bc", "fix")) {
        auto tok = split_ws(line);
        const std::string where = "[bc] fix";
        if (tok.size() == 2 &&
            (tok[0] == "left" || tok[0] == "right" || tok[0] == "bottom" || tok[0] == "top")) {
            auto [fx, fy] = dofs(tok[1], where);
            if (tok[0] == "left" || tok[0] == "right") {
                int i = tok[0] == "left" ? 0 : grid.nx;
                for (int j = 0; j <= grid.ny; ++j) bc.fixed_nodes.push_back({i, j, fx, fy});
            } else {
                int j = tok[0] == "bottom" ? 0 : grid.ny;
                for (int i = 0; i <= grid.nx; ++i) bc.fixed_nodes.push_back({i, j, fx, fy});
            }
        } else if (tok.size() == 4 && tok[0] == "node") {
            auto [fx, fy] = dofs(tok[3], where);
            bc.fixed_nodes.push_back(
                {to_int(tok[1], where), to_int(tok[2], where), fx, fy});
        } else if (tok.size() == 6 && tok[0] == "rect") {
            double x0 = to_double(tok[1], where), y0 = to_double(tok[2], where);
            double x1 = to_double(tok[3], where), y1 = to_double(tok[4], where);
            auto [fx, fy] = dofs(tok[5], where);
            for (int j = 0; j <= grid.ny; ++j)
                for (int i = 0; i <= grid.nx; ++i) {
                    double x = node_x(i), y = node_y(j);
                    if (x >= x0 && x <= x1 && y >= y0 && y <= y1)
                        bc.fixed_nodes.push_back({i, j, fx, fy});
                }
        } else {
            throw ConfigError(where + ": bad line '" + line + "'");
        }
    }
    for (const std::string& line : doc.get_all("bc", "load")) {
        auto tok = split_ws(line);
        const std::string where = "[bc] load";
        if (tok.size() == 5 && tok[0] == "node") {
            bc.loads.push_back({to_int(tok[1], where), to_int(tok[2], where),
                                to_double(tok[3], where), to_double(tok[4], where)});
        } else {
            throw ConfigError(where + ": bad line '" + line + "'");
        }
    }
}

} // namespace

Scenario load_scenario(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    IniDoc doc = parse_ini(text);
    check_schema(doc);

    Scenario s;
    s.config_text = text;
    s.config_name = fs::path(path).filename().string();
    const fs::path base_dir = fs::path(path).parent_path();

    if (!doc.has("grid")) throw ConfigError("missing [grid] section");
    auto need = [&](const std::string& sec, const std::string& key) {
        auto v = doc.get(sec, key);
        if (!v) throw ConfigError("[" + sec + "]: missing key '" + key + "'");
        return *v;
    };
    auto opt_d = [&](const std::string& sec, const std::string& key, double dflt) {
        auto v = doc.get(sec, key);
        return v ? to_double(*v, "[" + sec + "] " + key) : dflt;
    };
    try {
        s.grid = Grid(to_int(need("grid", "nx"), "[grid] nx"),
                      to_int(need("grid", "ny"), "[grid] ny"), opt_d("grid", "h", 1.0),
                      opt_d("grid", "ox", 0.0), opt_d("grid", "oy", 0.0));
    } catch (const DimensionError& e) {
        throw ConfigError(std::string("[grid]: ") + e.what());
    }
    try {
        s.material = Material(opt_d("material", "young", 1e9), opt_d("material", "poisson", 0.3),
                              opt_d("material", "ersatz", 1e-6));
    } catch (const Error& e) {
        throw ConfigError(std::string("[material]: ") + e.what());
    }

    if (!doc.has("domain")) throw ConfigError("missing [domain] section");
    s.domain = build_shapes(doc, "domain", s.grid, base_dir);
    s.frozen = doc.has("frozen") ? build_shapes(doc, "frozen", s.grid, base_dir)
                                 : IndicatorField(s.grid);
    if (doc.has("envelope")) s.envelope = build_shapes(doc, "envelope", s.grid, base_dir);
    s.fixtures = doc.has("fixtures") ? build_shapes(doc, "fixtures", s.grid, base_dir)
                                     : IndicatorField(s.grid);
    parse_bc(doc, s.grid, s.bc);

    if (doc.has("motion")) {
        MotionSpec m;
        auto piv = split_ws(need("motion", "pivot"));
        if (piv.size() != 2) throw ConfigError("[motion] pivot: expected 'x y'");
        m.pivot = {to_double(piv[0], "[motion] pivot"), to_double(piv[1], "[motion] pivot")};
        m.theta0 = deg2rad(opt_d("motion", "theta0_deg", 0.0));
        m.theta1 = deg2rad(opt_d("motion", "theta1_deg", 0.0));
        m.samples = to_int(need("motion", "samples"), "[motion] samples");
        s.motion = std::move(m);
    }
    if (doc.has("tool")) {
        ToolSpec t;
        auto load_bitmap = [&](const std::string& key) {
            fs::path p = fs::path(need("tool", key));
            if (p.is_relative()) p = base_dir / p;
            try {
                return read_pgm(p.string(), s.grid.h);
            } catch (const Error& e) {
                throw ConfigError("[tool] " + key + ": " + e.what());
            }
        };
        t.head = load_bitmap("head");
        t.cutter = load_bitmap("cutter");
        if (!(t.head.grid == t.cutter.grid))
            throw ConfigError("[tool]: head and cutter bitmaps differ in size");
        auto org = split_ws(need("tool", "origin"));
        if (org.size() != 2) throw ConfigError("[tool] origin: expected 'i j'");
        t.origin_i = to_int(org[0], "[tool] origin");
        t.origin_j = to_int(org[1], "[tool] origin");
        for (const std::string& a : split_ws(need("tool", "angles_deg")))
            t.angles.push_back(deg2rad(to_double(a, "[tool] angles_deg")));
        t.mu0_cells = opt_d("tool", "mu0_cells", 0.5);
        auto pr = doc.get("tool", "prune");
        t.prune_enabled = pr ? to_bool(*pr, "[tool] prune") : false;
        t.kappa = opt_d("tool", "kappa", 0.0);
        t.kappa_max = opt_d("tool", "kappa_max", 0.0);
        s.tool = std::move(t);
    }
    if (doc.has("support")) {
        SupportSpec sp;
        sp.lambda = opt_d("support", "lambda", 0.0);
        sp.overhang_deg = opt_d("support", "overhang_deg", 45.0);
        s.support = sp;
    }
    s.loop.delta = opt_d("loop", "delta", 0.05);
    s.loop.v_min = opt_d("loop", "v_min", 0.5);
    s.loop.max_inner_iters =
        doc.get("loop", "max_inner_iters")
            ? to_int(*doc.get("loop", "max_inner_iters"), "[loop] max_inner_iters")
            : 50;
    s.loop.filter_radius = opt_d("loop", "filter_radius", 0.0);
    if (auto ub = doc.get("loop", "deflection_ub"))
        s.loop.deflection_ub = to_double(*ub, "[loop] deflection_ub");
    if (s.support) s.loop.support_overhang_deg = s.support->overhang_deg;

    if (auto d = doc.get("output", "dir")) s.out_dir = *d;
    if (auto n = doc.get("output", "snapshot_every"))
        s.snapshot_every = to_int(*n, "[output] snapshot_every");
    return s;
}

ValidationReport validate_scenario(const Scenario& s) {
    ValidationReport r;
    auto err = [&](const std::string& m) { r.errors.push_back(m); };

    if (s.domain.empty()) err("[domain]: design space has no material cells");
    for (int j = 0; j < s.grid.ny && s.frozen.count() > 0; ++j)
        for (int i = 0; i < s.grid.nx; ++i)
            if (s.frozen.at(i, j) && !s.domain.at(i, j)) {
                err("[frozen]: cell (" + std::to_string(i) + "," + std::to_string(j) +
                    ") is frozen but outside the design domain");
                j = s.grid.ny;
                break;
            }
    if (s.motion) {
        if (!s.envelope) err("[motion]: containment needs an [envelope] section");
        if (s.motion->samples < 1) err("[motion] samples: must be >= 1");
    }
    if (s.bc.fixed_nodes.empty()) err("[bc]: no fix lines; the stiffness system would be singular");
    bool any_load = false;
    for (const auto& l : s.bc.loads) {
        if (l.i < 0 || l.i > s.grid.nx || l.j < 0 || l.j > s.grid.ny) {
            err("[bc] load: node (" + std::to_string(l.i) + "," + std::to_string(l.j) +
                ") outside the node grid");
            continue;
        }
        if (l.fx != 0.0 || l.fy != 0.0) any_load = true;
        bool touches = false;
        for (int dj = -1; dj <= 0 && !touches; ++dj)
            for (int di = -1; di <= 0 && !touches; ++di) {
                int ci = l.i + di, cj = l.j + dj;
                if (s.grid.in_bounds(ci, cj) && s.domain.at(ci, cj)) touches = true;
            }
        if (!touches)
            err("[bc] load: node (" + std::to_string(l.i) + "," + std::to_string(l.j) +
                ") rests on void cells only (e.g. cell (" + std::to_string(std::max(0, l.i - 1)) +
                "," + std::to_string(std::max(0, l.j - 1)) + "))");
    }
    for (const auto& f : s.bc.fixed_nodes)
        if (f.i < 0 || f.i > s.grid.nx || f.j < 0 || f.j > s.grid.ny) {
            err("[bc] fix: node (" + std::to_string(f.i) + "," + std::to_string(f.j) +
                ") outside the node grid");
            break;
        }
    if (!any_load) err("[bc]: no nonzero load; the compliance objective is degenerate");
    if (s.tool) {
        const ToolSpec& t = *s.tool;
        if (t.head.empty()) err("[tool] head: bitmap has no material cells");
        if (!t.head.grid.in_bounds(t.origin_i, t.origin_j))
            err("[tool] origin: outside the tool bitmap");
        if (t.angles.empty()) err("[tool] angles_deg: at least one orientation required");
        if (t.mu0_cells < 0.0) err("[tool] mu0_cells: must be >= 0");
        if (t.kappa < 0.0) err("[tool] kappa: must be >= 0");
        if (t.kappa_max != 0.0 && t.kappa_max < t.kappa)
            err("[tool] kappa_max: must be >= kappa");
        if (!t.prune_enabled && t.kappa == 0.0)
            err("[tool]: neither prune nor kappa configured; the tool would be unused");
    }
    if (s.support && s.support->lambda < 0.0) err("[support] lambda: must be >= 0");
    if (s.support && (s.support->overhang_deg < 0.0 || s.support->overhang_deg > 90.0))
        err("[support] overhang_deg: must be in [0, 90]");
    if (s.loop.delta <= 0.0 || s.loop.delta > 1.0) err("[loop] delta: must be in (0, 1]");
    if (s.loop.v_min <= 0.0 || s.loop.v_min > 1.0) err("[loop] v_min: must be in (0, 1]");
    if (s.loop.max_inner_iters < 1) err("[loop] max_inner_iters: must be >= 1");
    if (s.loop.filter_radius < 0.0) err("[loop] filter_radius: must be >= 0");
    if (s.loop.deflection_ub && *s.loop.deflection_ub <= 0.0)
        err("[loop] deflection_ub: must be > 0");
    if (s.snapshot_every < 1) err("[output] snapshot_every: must be >= 1");
    if (!s.domain.empty()) {
        long budget = std::lround(s.loop.v_min * static_cast<double>(s.domain.count()));
        if (budget < s.frozen.count())
            err("[loop] v_min: target volume falls below the frozen mask");
    }
    return r;
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string step_name(int step, const char* kind) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "step_%03d_%s.pgm", step, kind);
    return buf;
}

} // namespace

RunResult run_scenario(const Scenario& s) {
    RunResult r;
    ValidationReport rep = validate_scenario(s);
    if (!rep.ok()) {
        r.exit_code = 3;
        std::string msg;
        for (const auto& e : rep.errors) msg += e + "\n";
        r.message = msg;
        return r;
    }
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<PointwiseConstraint> constraints;
    if (s.motion)
        constraints.push_back(containment_constraint(
            "containment",
            make_rotation_sweep(s.motion->pivot, s.motion->theta0, s.motion->theta1,
                                s.motion->samples),
            *s.envelope));
    if (s.tool && s.tool->prune_enabled)
        constraints.push_back(accessibility_constraint(
            "accessibility", s.tool->head, s.fixtures,
            make_orientation_set(s.tool->head, s.tool->origin_i, s.tool->origin_j,
                                 s.tool->angles),
            s.tool->mu0_cells));

    r.initial = s.domain;
    r.prune_ran = !constraints.empty();
    if (r.prune_ran) {
        // the design domain participates as one more pointwise membership test
        constraints.push_back(custom_constraint("domain", [d = s.domain](double x, double y) {
            int i, j;
            if (!d.grid.nearest_cell(x, y, i, j)) return false;
            return d.at(i, j) != 0;
        }));
        r.prune = prune_pointwise(constraints, s.grid);
        r.initial = r.prune.pruned;
    }

    fs::create_directories(s.out_dir);
    std::vector<std::string> artifacts;
    auto emit_pgm = [&](const std::string& name, const auto& field) {
        write_pgm((fs::path(s.out_dir) / name).string(), field);
        artifacts.push_back(name);
    };
    emit_pgm("initial.pgm", r.initial);
    if (r.prune_ran) emit_pgm("pruned.pgm", r.prune.pruned);

    std::string stop = "v_min";
    bool infeasible = false;
    std::string why;
    if (r.prune_ran && r.prune.empty_warning) {
        infeasible = true;
        why = "pruned design space is empty: every cell violates some pointwise constraint";
    } else if (!is_subset(s.frozen, r.initial)) {
        for (int j = 0; j < s.grid.ny && why.empty(); ++j)
            for (int i = 0; i < s.grid.nx; ++i)
                if (s.frozen.at(i, j) && !r.initial.at(i, j)) {
                    why = "frozen cell (" + std::to_string(i) + "," + std::to_string(j) +
                          ") was eliminated by pruning";
                    break;
                }
        infeasible = true;
    }

    if (!infeasible) {
        Problem problem;
        problem.material = s.material;
        problem.bc = s.bc;
        problem.frozen = s.frozen;
        problem.ref = r.initial;
        if (s.tool)
            problem.access = Problem::Access{
                s.tool->assembly_spec(),
                make_orientation_set(s.tool->assembly_spec().assembly(), s.tool->origin_i,
                                     s.tool->origin_j, s.tool->angles),
                s.fixtures};

        std::vector<ConstraintSpec> specs;
        if (s.support && s.support->lambda > 0.0) {
            ConstraintSpec sp;
            sp.name = "support";
            sp.kind = ConstraintSpec::Kind::global;
            sp.weight = s.support->lambda;
            sp.tsf = [overhang = s.support->overhang_deg, ref = r.initial](
                         const IndicatorField& d, const SolveContext&) {
                return support_volume_tsf(d, overhang, ref);
            };
            sp.value = [overhang = s.support->overhang_deg, ref = r.initial](
                           const IndicatorField& d, const SolveContext&) {
                return support_volume_fraction(d, overhang, ref);
            };
            specs.push_back(std::move(sp));
        }
        if (s.tool && s.tool->kappa > 0.0) {
            ConstraintSpec sp;
            sp.name = "accessibility";
            sp.kind = ConstraintSpec::Kind::local;
            sp.weight = s.tool->kappa;
            if (s.tool->kappa_max > s.tool->kappa) {
                // low-volume ramp: base weight above 0.9, full weight below 0.5
                const double k0 = s.tool->kappa, k1 = s.tool->kappa_max;
                sp.weight_schedule = [k0, k1](double vbar) {
                    if (vbar >= 0.9) return k0;
                    if (vbar <= 0.5) return k1;
                    return k0 + (k1 - k0) * (0.9 - vbar) / 0.4;
                };
            }
            specs.push_back(std::move(sp));
        }

        r.front = outer_loop(r.initial, specs, s.loop, problem);

        std::ostringstream csv;
        csv << "step,volfrac,compliance,max_disp,support_frac,inaccess_max,inner_iters,status\n";
        for (const auto& p : r.front)
            csv << p.step << ',' << format_double(p.volume_fraction) << ','
                << format_double(p.compliance) << ',' << format_double(p.max_disp) << ','
                << format_double(p.support_frac) << ',' << format_double(p.inaccess_max) << ','
                << p.inner_iters << ',' << p.status << '\n';
        write_file((fs::path(s.out_dir) / "pareto.csv").string(), csv.str());
        artifacts.push_back("pareto.csv");

        for (std::size_t n = 0; n < r.front.size(); ++n) {
            const auto& p = r.front[n];
            const bool last = n + 1 == r.front.size();
            if (p.step % s.snapshot_every != 0 && !last) continue;
            emit_pgm(step_name(p.step, "design"), p.design);
            emit_pgm(step_name(p.step, "tsf"), p.tsf);
            if (p.mu) emit_pgm(step_name(p.step, "mu"), *p.mu);
        }

        long expected = 1;
        for (int k = 1; 1.0 - k * s.loop.delta >= s.loop.v_min - 1e-9; ++k) ++expected;
        if (r.front.empty())
            stop = "initial_design_violates_bound";
        else if (static_cast<long>(r.front.size()) < expected)
            stop = "hard_stop";

        for (const auto& p : r.front)
            std::cout << "step " << p.step << ": volfrac=" << format_double(p.volume_fraction)
                      << " compliance=" << format_double(p.compliance)
                      << " max_disp=" << format_double(p.max_disp) << " iters=" << p.inner_iters
                      << " status=" << p.status << "\n";
    }

    const auto t1 = std::chrono::steady_clock::now();
    const long wall_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();

    std::ostringstream man;
    man << "prunetrace_version = " << kVersion << "\n";
    man << "config = " << s.config_name << "\n";
    man << "config_fnv1a = " << hex64(fnv1a(s.config_text)) << "\n";
    man << "grid = " << s.grid.nx << "x" << s.grid.ny << "\n";
    man << "cell_size = " << format_double(s.grid.h) << "\n";
    if (r.prune_ran)
        for (const auto& [name, frac] : r.prune.per_constraint)
            man << "prune_surviving " << name << " = " << format_double(frac) << "\n";
    man << "points = " << r.front.size() << "\n";
    man << "stop = " << (infeasible ? "infeasible" : stop) << "\n";
    man << "wall_ms = " << wall_ms << "\n";
    for (const auto& a : artifacts)
        man << "artifact = " << a << " "
            << hex64(fnv1a(read_file((fs::path(s.out_dir) / a).string()))) << "\n";
    write_file((fs::path(s.out_dir) / "manifest.txt").string(), man.str());

    if (infeasible) {
        r.exit_code = 2;
        r.message = why;
        if (r.prune_ran) {
            std::string detail = "surviving volume per constraint:";
            for (const auto& [name, frac] : r.prune.per_constraint)
                detail += " " + name + "=" + format_double(frac);
            r.message += "\n" + detail;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// built-in scenario generators

namespace {

// T-shaped assembly on a 12x11 local grid: 6x11 holder block, 6-cell shank
// along the middle row, tip (origin) at the right end. Angle 0 approaches
// along +x, so the holder trails on the left of the reached point; pockets
// deeper than the shank need a holder-height corridor.
IndicatorField generator_tool_head() {
    IndicatorField f(Grid(12, 11, 1.0));
    for (int j = 0; j < 11; ++j)
        for (int i = 0; i < 6; ++i) f.set(i, j, true);
    return f;
}

IndicatorField generator_tool_cutter() {
    IndicatorField f(Grid(12, 11, 1.0));
    for (int i = 6; i < 12; ++i) f.set(i, 5, true);
    return f;
}

struct GenOut {
    fs::path dir;
    std::vector<std::string> files;

    void write(const std::string& name, const std::string& content) {
        write_file((dir / name).string(), content);
        files.push_back((dir / name).string());
    }
    void write_bitmap(const std::string& name, const IndicatorField& f) {
        write_pgm((dir / name).string(), f);
        files.push_back((dir / name).string());
    }
    void write_tool() {
        write_bitmap("tool_head.pgm", generator_tool_head());
        write_bitmap("tool_cutter.pgm", generator_tool_cutter());
    }
};

std::string cantilever_base(const std::string& extra_sections, const std::string& loop,
                            const std::string& out_dir) {
    std::ostringstream c;
    c << "# 2:1 cantilever: left edge clamped, unit tip load at mid-right\n"
         "[grid]\n"
         "nx = 64\n"
         "ny = 32\n"
         "h = 1\n"
         "\n"
         "[material]\n"
         "young = 1e9\n"
         "poisson = 0.3\n"
         "\n"
         "[domain]\n"
         "shape = add rect 0 0 63 31\n"
         "\n"
         "[frozen]\n"
         "shape = add rect 0 0 1 31\n"
         "shape = add rect 61 13 63 18\n"
         "\n"
         "[bc]\n"
         "fix = left xy\n"
         "load = node 64 16 0 -1\n"
         "\n"
      << extra_sections
      << "[loop]\n"
      << loop
      << "\n"
         "[output]\n"
         "dir = "
      << out_dir << "\n";
    return c.str();
}

std::string beam_base(const std::string& extra_sections, const std::string& loop,
                      const std::string& out_dir) {
    std::ostringstream c;
    c << "# 3:1 beam: right edge clamped, unit load at mid-left, so the low-moment\n"
         "# region sits on the side a left-approaching tool can reach; no frozen\n"
         "# cells: a thin frozen pad on an approach face costs the sweep almost\n"
         "# nothing to cross, which would open an unmachinable pocket behind it,\n"
         "# and the load neighborhood holds itself through its sensitivity rank\n"
         "[grid]\n"
         "nx = 96\n"
         "ny = 32\n"
         "h = 1\n"
         "\n"
         "[material]\n"
         "young = 1e9\n"
         "poisson = 0.3\n"
         "\n"
         "[domain]\n"
         "shape = add rect 0 0 95 31\n"
         "\n"
         "[bc]\n"
         "fix = right xy\n"
         "load = node 0 16 0 -1\n"
         "\n"
      << extra_sections
      << "[loop]\n"
      << loop
      << "\n"
         "[output]\n"
         "dir = "
      << out_dir << "\n";
    return c.str();
}

std::string tool_section(const std::string& angles, const std::string& rest) {
    std::ostringstream c;
    c << "[tool]\n"
         "head = tool_head.pgm\n"
         "cutter = tool_cutter.pgm\n"
         "origin = 11 5\n"
         "angles_deg = "
      << angles << "\n"
      << rest << "\n";
    return c.str();
}

void gen_cantilever(GenOut& g) {
    g.write("cantilever.ini",
            cantilever_base("",
                            "delta = 0.05\n"
                            "v_min = 0.5\n"
                            "max_inner_iters = 50\n"
                            "filter_radius = 1.5\n",
                            "out_cantilever"));
}

void gen_beam_accessibility(GenOut& g) {
    const std::string loop =
        "delta = 0.05\n"
        "v_min = 0.55\n"
        "max_inner_iters = 50\n"
        "filter_radius = 2.5\n";
    g.write_tool();
    g.write("beam_unconstrained.ini", beam_base("", loop, "out_beam_unconstrained"));
    g.write("beam_one_orientation.ini",
            beam_base(tool_section("0", "kappa = 0.25\nkappa_max = 2.0\n"), loop,
                      "out_beam_one_orientation"));
    g.write("beam_two_orientations.ini",
            beam_base(tool_section("0 180", "kappa = 0.25\nkappa_max = 2.0\n"), loop,
                      "out_beam_two_orientations"));
}

std::string latch_base(const std::string& extra_sections, const std::string& loop,
                       const std::string& out_dir) {
    std::ostringstream c;
    c << "# rotating latch: pinned boss, tip load, 21 degree clearance sweep\n"
         "[grid]\n"
         "nx = 96\n"
         "ny = 96\n"
         "h = 0.001\n"
         "\n"
         "[material]\n"
         "young = 200e9\n"
         "poisson = 0.3\n"
         "\n"
         "[envelope]\n"
         "shape = add rect 0.008 0.008 0.088 0.088\n"
         "\n"
         "[domain]\n"
         "shape = add rect 0.008 0.008 0.088 0.088\n"
         "\n"
         "[frozen]\n"
         "shape = add disc 0.024 0.048 0.006\n"
         "shape = add rect 0.078 0.044 0.086 0.052\n"
         "\n"
         "[bc]\n"
         "fix = rect 0.020 0.044 0.028 0.052 xy\n"
         "load = node 84 48 0 -2e6\n"
         "\n"
         "[motion]\n"
         "pivot = 0.024 0.048\n"
         "theta0_deg = 0\n"
         "theta1_deg = -21\n"
         "samples = 64\n"
         "\n"
      << extra_sections
      << "[loop]\n"
      << loop
      << "\n"
         "[output]\n"
         "dir = "
      << out_dir << "\n";
    return c.str();
}

void gen_latch(GenOut& g) {
    g.write_tool();
    g.write("latch.ini",
            latch_base("",
                       "delta = 0.05\n"
                       "v_min = 0.2\n"
                       "max_inner_iters = 50\n"
                       "filter_radius = 0.0015\n"
                       "deflection_ub = 7.62e-4\n",
                       "out_latch"));
    g.write("latch_free.ini",
            latch_base("",
                       "delta = 0.05\n"
                       "v_min = 0.35\n"
                       "max_inner_iters = 50\n"
                       "filter_radius = 0.0015\n",
                       "out_latch_free"));
    g.write("latch_coupled.ini",
            latch_base(tool_section("0 180", "kappa = 0.05\nkappa_max = 2.0\n"),
                       "delta = 0.05\n"
                       "v_min = 0.35\n"
                       "max_inner_iters = 50\n"
                       "filter_radius = 0.0015\n",
                       "out_latch_coupled"));
}

void gen_fixture2axis(GenOut& g) {
    g.write_tool();
    std::ostringstream c;
    c << "# fixture frame around a clamped workpiece; 4 tool approach axes\n"
         "[grid]\n"
         "nx = 80\n"
         "ny = 80\n"
         "h = 1\n"
         "\n"
         "[material]\n"
         "young = 1e9\n"
         "poisson = 0.3\n"
         "\n"
         "[fixtures]\n"
         "shape = add rect 30 30 49 49\n"
         "shape = add rect 18 34 25 45\n"
         "shape = add rect 54 34 61 45\n"
         "\n"
         "[domain]\n"
         "shape = add rect 4 4 75 75\n"
         "shape = sub rect 30 30 49 49\n"
         "shape = sub rect 18 34 25 45\n"
         "shape = sub rect 54 34 61 45\n"
         "\n"
         "[frozen]\n"
         "shape = add rect 30 27 49 29\n"
         "shape = add rect 4 4 75 5\n"
         "\n"
         "[bc]\n"
         "fix = bottom xy\n"
         "load = node 35 30 0 -1\n"
         "load = node 40 30 0 -1\n"
         "load = node 45 30 0 -1\n"
         "\n"
      << tool_section("0 90 180 270", "mu0_cells = 0.5\nprune = true\nkappa = 0.01\n")
      << "[loop]\n"
         "delta = 0.05\n"
         "v_min = 0.4\n"
         "max_inner_iters = 50\n"
         "filter_radius = 1.5\n"
         "\n"
         "[output]\n"
         "dir = out_fixture2axis\n";
    g.write("fixture2axis.ini", c.str());
}

std::string bridge_base(const std::string& extra_sections, const std::string& out_dir) {
    std::ostringstream c;
    c << "# deck bridge: end pads pinned, center top load, +y build direction\n"
         "[grid]\n"
         "nx = 80\n"
         "ny = 40\n"
         "h = 1\n"
         "\n"
         "[material]\n"
         "young = 1e9\n"
         "poisson = 0.3\n"
         "\n"
         "[domain]\n"
         "shape = add rect 0 0 79 39\n"
         "\n"
         "[frozen]\n"
         "shape = add rect 0 0 3 3\n"
         "shape = add rect 76 0 79 3\n"
         "shape = add rect 37 36 42 39\n"
         "\n"
         "[bc]\n"
         "fix = rect -0.6 -0.6 3.6 -0.4 xy\n"
         "fix = rect 75.4 -0.6 79.6 -0.4 xy\n"
         "load = node 40 40 0 -1\n"
         "\n"
      << extra_sections
      << "[loop]\n"
         "delta = 0.05\n"
         "v_min = 0.35\n"
         "max_inner_iters = 50\n"
         "filter_radius = 1.5\n"
         "\n"
         "[output]\n"
         "dir = "
      << out_dir << "\n";
    return c.str();
}

void gen_bridge(GenOut& g) {
    g.write("bridge.ini",
            bridge_base("[support]\nlambda = 1.5\noverhang_deg = 45\n\n", "out_bridge"));
    g.write("bridge_free.ini", bridge_base("", "out_bridge_free"));
}

} // namespace

std::vector<std::string> generator_names() {
    return {"cantilever", "latch", "fixture2axis", "beam-accessibility", "bridge"};
}

std::vector<std::string> generate_scenario(const std::string& name, const std::string& dir) {
    GenOut g{fs::path(dir), {}};
    fs::create_directories(g.dir);
    if (name == "cantilever")
        gen_cantilever(g);
    else if (name == "latch")
        gen_latch(g);
    else if (name == "fixture2axis")
        gen_fixture2axis(g);
    else if (name == "beam-accessibility")
        gen_beam_accessibility(g);
    else if (name == "bridge")
        gen_bridge(g);
    else
        throw ConfigError("unknown scenario generator '" + name + "'");
    return g.files;
}

} // namespace prunetrace
