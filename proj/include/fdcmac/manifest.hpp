#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fdcmac/montecarlo.hpp"
#include "fdcmac/optimizer.hpp"
#include "fdcmac/types.hpp"

namespace fdcmac::manifest {

/// Raised on malformed manifest text; carries a line/field diagnostic.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Task { Eval, Sweep, Optimize, Simulate, Compare, Verify };

const char* task_name(Task t);
Task task_from_name(const std::string& name);

/// One sweep axis over a numeric manifest field (dotted path, e.g.
/// "access.p_sen_db").  Either an inclusive from/to/step range or an
/// explicit value list.
struct SweepAxis {
    std::string variable;
    double from = 0.0;
    double to = 0.0;
    double step = 0.0;
    std::vector<double> values;  ///< used when non-empty

    std::vector<double> expand() const;
};

/// A parsed experiment description: scenario name, all module configs,
/// sweep axes and output paths.
struct ExperimentManifest {
    std::string scenario = "unnamed";
    Task task = Task::Eval;
    ContentionParams contention;
    PuModel pu;
    SicModel sic;
    AccessConfig access;
    SensingConfig sensing;
    montecarlo::SimConfig sim;
    std::vector<SweepAxis> sweeps;
    std::string csv_path;   ///< relative to the output directory
    std::string json_path;  ///< summary path; defaults to <scenario>.json

    /// Validates configs and sweep axes (fields must exist, ranges non-empty).
    void validate() const;
};

ExperimentManifest parse_manifest(std::istream& in);
ExperimentManifest parse_manifest_file(const std::string& path);

/// Canonical text form; parse(serialize(m)) reproduces m exactly.
std::string serialize_manifest(const ExperimentManifest& m);

/// Set a numeric field by dotted path ("pu.tau_id", "access.p_sen_db", ...).
/// Throws parse_error for unknown paths.
void set_field(ExperimentManifest& m, const std::string& path, double value);

/// FNV-1a 64-bit hash of a byte string, hex-encoded; used to stamp runs.
std::string fnv1a_hex(const std::string& bytes);

/// Three-protocol comparison at one power budget.
struct BaselineComparison {
    optimizer::OptimizationResult fdc;  ///< adaptive two-stage protocol
    double single_stage_p_sen = 0.0;    ///< t_s = T, power swept to its own optimum
    double single_stage_nt = 0.0;
    double hd_t_s = 0.0;                ///< p_sen = 0, sensing time swept
    double hd_nt = 0.0;
};

BaselineComparison compare_baselines(const ExperimentManifest& m,
                                     const optimizer::SweepOptions& opt = {});

struct RunResult {
    int exit_code = 0;      ///< 0 ok, 2 config error, 3 numerical failure
    std::string csv_file;   ///< written table, empty if none
    std::string json_file;  ///< written summary
    std::size_t rows = 0;
    std::size_t failed_rows = 0;
};

/// Executes the manifest task: expands the sweep grid, evaluates every point
/// (rows in deterministic sweep order), writes the CSV table and a JSON
/// summary carrying the manifest hash, seed and the optimum row.
/// `format` is "csv" or "json" for the row table.
RunResult run_manifest(const ExperimentManifest& m, const std::string& manifest_text,
                       const std::string& out_dir, const std::string& format = "csv");

}  // namespace fdcmac::manifest
