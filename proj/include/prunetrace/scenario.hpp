#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prunetrace/opt.hpp"
#include "prunetrace/prune.hpp"

namespace prunetrace {

inline constexpr const char* kVersion = "0.1.0";

// Minimal INI: [section] headers, `key = value` lines, full-line # or ;
// comments. Keys repeat; order is preserved.
struct IniDoc {
    using Entries = std::vector<std::pair<std::string, std::string>>;
    std::vector<std::pair<std::string, Entries>> sections;

    bool has(const std::string& sec) const;
    const Entries* section(const std::string& sec) const;
    std::optional<std::string> get(const std::string& sec, const std::string& key) const;
    std::vector<std::string> get_all(const std::string& sec, const std::string& key) const;
};

IniDoc parse_ini(const std::string& text);

struct MotionSpec {
    Vec2 pivot;
    double theta0 = 0.0; // radians
    double theta1 = 0.0;
    int samples = 1;
};

struct ToolSpec {
    IndicatorField head;   // tool-local grid, same cell size as the domain
    IndicatorField cutter;
    int origin_i = 0; // cutter tip cell, registered on the query point
    int origin_j = 0;
    std::vector<double> angles; // radians
    double mu0_cells = 0.5;
    bool prune_enabled = false; // contributes an accessibility maximal set
    double kappa = 0.0;         // local penalty weight; 0 disables
    double kappa_max = 0.0;     // > kappa enables the low-volume ramp

    ToolAssembly assembly_spec() const { return {head, cutter, origin_i, origin_j}; }
};

struct SupportSpec {
    double lambda = 0.0;
    double overhang_deg = 45.0;
};

struct Scenario {
    Grid grid;
    Material material;
    IndicatorField domain; // initial design space Ω0
    FrozenMask frozen;
    std::optional<IndicatorField> envelope;
    IndicatorField fixtures;
    BoundaryConditions bc;
    std::optional<MotionSpec> motion;
    std::optional<ToolSpec> tool;
    std::optional<SupportSpec> support;
    OuterLoopConfig loop;
    std::string out_dir = "out";
    int snapshot_every = 1;
    std::string config_text; // raw bytes, hashed into the manifest
    std::string config_name;
};

struct ValidationReport {
    std::vector<std::string> errors;
    bool ok() const { return errors.empty(); }
};

// Parses a config file; paths inside it resolve against its directory.
// Structural problems (bad syntax, bad numbers, unreadable bitmaps) throw
// ConfigError; semantic checks live in validate_scenario.
Scenario load_scenario(const std::string& path);

// Schema and cross-reference checks without running any solver.
ValidationReport validate_scenario(const Scenario& s);

struct RunResult {
    int exit_code = 0; // 0 ok, 2 infeasible prune, 3 config error
    std::string message;
    bool prune_ran = false;
    PruneResult prune;
    IndicatorField initial;
    std::vector<ParetoPoint> front;
};

// Full workflow: prune (when pointwise constraints are configured), trace the
// front, and write pareto.csv, PGM snapshots, and the run manifest.
RunResult run_scenario(const Scenario& s);

// Writes the named built-in scenario's configs and bitmap assets into dir.
// Names: cantilever, latch, fixture2axis, beam-accessibility, bridge.
std::vector<std::string> generate_scenario(const std::string& name, const std::string& dir);

std::vector<std::string> generator_names();

} // namespace prunetrace
