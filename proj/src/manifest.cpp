#include "fdcmac/manifest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fdcmac/qmath.hpp"
#include "fdcmac/throughput.hpp"

namespace fdcmac::manifest {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_number(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw parse_error("line " + std::to_string(line) + ": not a number: '" + v + "'");
    }
}

}  // namespace

const char* task_name(Task t) {
    switch (t) {
        case Task::Eval: return "eval";
        case Task::Sweep: return "sweep";
        case Task::Optimize: return "optimize";
        case Task::Simulate: return "simulate";
        case Task::Compare: return "compare";
        case Task::Verify: return "verify";
    }
    return "eval";
}

Task task_from_name(const std::string& name) {
    for (Task t : {Task::Eval, Task::Sweep, Task::Optimize, Task::Simulate, Task::Compare,
                   Task::Verify}) {
        if (name == task_name(t)) return t;
    }
    throw parse_error("unknown task '" + name + "'");
}

std::vector<double> SweepAxis::expand() const {
    if (!values.empty()) return values;
    std::vector<double> out;
    if (step == 0.0 || (to - from) * step < 0.0) {
        throw parse_error("sweep axis '" + variable + "': empty range");
    }
    const double eps = 1e-9 * std::abs(step);
    const auto n = static_cast<std::size_t>(std::floor((to - from) / step + eps));
    out.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        double v = from + static_cast<double>(i) * step;
        if (std::abs(v - to) <= eps) v = to;  // pin the endpoint exactly
        out.push_back(v);
    }
    return out;
}

void set_field(ExperimentManifest& m, const std::string& path, double value) {
    const auto db = [](double v) { return db_to_linear(v); };
    if (path == "contention.n0") m.contention.n0 = static_cast<int>(value);
    else if (path == "contention.p") m.contention.p = value;
    else if (path == "contention.sigma") m.contention.sigma = value;
    else if (path == "contention.difs") m.contention.difs = value;
    else if (path == "contention.sifs") m.contention.sifs = value;
    else if (path == "contention.rts") m.contention.rts = value;
    else if (path == "contention.cts") m.contention.cts = value;
    else if (path == "contention.ack") m.contention.ack = value;
    else if (path == "contention.pd") m.contention.pd = value;
    else if (path == "pu.tau_id") m.pu.tau_id_bar = value;
    else if (path == "pu.tau_ac") m.pu.tau_ac_bar = value;
    else if (path == "pu.t_eva") m.pu.t_eva = value;
    else if (path == "pu.p_pu") m.pu.p_pu = value;
    else if (path == "pu.p_pu_db") m.pu.p_pu = db(value);
    else if (path == "sic.zeta") m.sic.zeta = value;
    else if (path == "sic.xi") m.sic.xi = value;
    else if (path == "access.t_frame") m.access.t_frame = value;
    else if (path == "access.t_s") m.access.t_s = value;
    else if (path == "access.p_sen") m.access.p_sen = value;
    else if (path == "access.p_sen_db") m.access.p_sen = db(value);
    else if (path == "access.p_dat") m.access.p_dat = value;
    else if (path == "access.p_dat_db") m.access.p_dat = db(value);
    else if (path == "access.p_max") m.access.p_max = value;
    else if (path == "access.p_max_db") m.access.p_max = db(value);
    else if (path == "sensing.f_s") m.sensing.f_s = value;
    else if (path == "sensing.n0_noise") m.sensing.n0_noise = value;
    else if (path == "sensing.epsilon") m.sensing.epsilon = value;
    else if (path == "sensing.pd_target") m.sensing.pd_target = value;
    else if (path == "sim.cycles") m.sim.cycles = static_cast<std::uint64_t>(value);
    else if (path == "sim.seed") m.sim.seed = static_cast<std::uint64_t>(value);
    else throw parse_error("unknown field '" + path + "'");
}

void ExperimentManifest::validate() const {
    contention.validate();
    pu.validate();
    sic.validate();
    access.validate_against(pu);
    sensing.validate();
    sim.validate();
    for (const SweepAxis& ax : sweeps) {
        ExperimentManifest probe = *this;
        probe.sweeps.clear();
        set_field(probe, ax.variable, ax.expand().front());  // field must exist, range non-empty
    }
}

ExperimentManifest parse_manifest(std::istream& in) {
    ExperimentManifest m;
    std::string section;
    std::string linebuf;
    int lineno = 0;
    bool have_access_pdat = false;
    while (std::getline(in, linebuf)) {
        ++lineno;
        std::string line = linebuf;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw parse_error("line " + std::to_string(lineno) + ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section == "sweep") m.sweeps.emplace_back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw parse_error("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) {
            throw parse_error("line " + std::to_string(lineno) + ": empty key or value");
        }

        if (section.empty()) {
            if (key == "scenario") m.scenario = val;
            else if (key == "task") m.task = task_from_name(val);
            else throw parse_error("line " + std::to_string(lineno) + ": unknown top-level key '" + key + "'");
        } else if (section == "sweep") {
            SweepAxis& ax = m.sweeps.back();
            if (key == "variable") ax.variable = val;
            else if (key == "from") ax.from = parse_number(val, lineno);
            else if (key == "to") ax.to = parse_number(val, lineno);
            else if (key == "step") ax.step = parse_number(val, lineno);
            else if (key == "values") {
                std::stringstream ss(val);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    ax.values.push_back(parse_number(trim(item), lineno));
                }
            } else {
                throw parse_error("line " + std::to_string(lineno) + ": unknown sweep key '" + key + "'");
            }
        } else if (section == "output") {
            if (key == "csv") m.csv_path = val;
            else if (key == "json") m.json_path = val;
            else throw parse_error("line " + std::to_string(lineno) + ": unknown output key '" + key + "'");
        } else if (section == "access" && key == "mode") {
            if (val == "fdtx") m.access.mode = TxMode::FdTx;
            else if (val == "hdtx") m.access.mode = TxMode::HdTx;
            else throw parse_error("line " + std::to_string(lineno) + ": mode must be fdtx or hdtx");
        } else {
            if (section == "access" && (key == "p_dat" || key == "p_dat_db")) have_access_pdat = true;
            try {
                set_field(m, section + "." + key, parse_number(val, lineno));
            } catch (const parse_error& e) {
                throw parse_error("line " + std::to_string(lineno) + ": " + e.what());
            }
        }
    }
    if (!have_access_pdat && m.access.p_max > 0.0) {
        m.access.p_dat = m.access.p_max;  // transmission stage runs at the power cap
    }
    if (m.csv_path.empty()) m.csv_path = m.scenario + ".csv";
    if (m.json_path.empty()) m.json_path = m.scenario + ".json";
    return m;
}

ExperimentManifest parse_manifest_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open manifest '" + path + "'");
    return parse_manifest(in);
}

std::string serialize_manifest(const ExperimentManifest& m) {
    std::ostringstream out;
    out << "scenario = " << m.scenario << "\n";
    out << "task = " << task_name(m.task) << "\n\n";
    out << "[contention]\n";
    out << "n0 = " << m.contention.n0 << "\n";
    out << "p = " << num(m.contention.p) << "\n";
    out << "sigma = " << num(m.contention.sigma) << "\n";
    out << "difs = " << num(m.contention.difs) << "\n";
    out << "sifs = " << num(m.contention.sifs) << "\n";
    out << "rts = " << num(m.contention.rts) << "\n";
    out << "cts = " << num(m.contention.cts) << "\n";
    out << "ack = " << num(m.contention.ack) << "\n";
    out << "pd = " << num(m.contention.pd) << "\n\n";
    out << "[pu]\n";
    out << "tau_id = " << num(m.pu.tau_id_bar) << "\n";
    out << "tau_ac = " << num(m.pu.tau_ac_bar) << "\n";
    out << "t_eva = " << num(m.pu.t_eva) << "\n";
    out << "p_pu = " << num(m.pu.p_pu) << "\n\n";
    out << "[sic]\n";
    out << "zeta = " << num(m.sic.zeta) << "\n";
    out << "xi = " << num(m.sic.xi) << "\n\n";
    out << "[access]\n";
    out << "t_frame = " << num(m.access.t_frame) << "\n";
    out << "t_s = " << num(m.access.t_s) << "\n";
    out << "p_sen = " << num(m.access.p_sen) << "\n";
    out << "p_dat = " << num(m.access.p_dat) << "\n";
    out << "p_max = " << num(m.access.p_max) << "\n";
    out << "mode = " << mode_name(m.access.mode) << "\n\n";
    out << "[sensing]\n";
    out << "f_s = " << num(m.sensing.f_s) << "\n";
    out << "n0_noise = " << num(m.sensing.n0_noise) << "\n";
    if (m.sensing.epsilon) out << "epsilon = " << num(*m.sensing.epsilon) << "\n";
    out << "pd_target = " << num(m.sensing.pd_target) << "\n\n";
    out << "[sim]\n";
    out << "cycles = " << m.sim.cycles << "\n";
    out << "seed = " << m.sim.seed << "\n";
    for (const SweepAxis& ax : m.sweeps) {
        out << "\n[sweep]\n";
        out << "variable = " << ax.variable << "\n";
        if (!ax.values.empty()) {
            out << "values = ";
            for (std::size_t i = 0; i < ax.values.size(); ++i) {
                out << (i ? "," : "") << num(ax.values[i]);
            }
            out << "\n";
        } else {
            out << "from = " << num(ax.from) << "\n";
            out << "to = " << num(ax.to) << "\n";
            out << "step = " << num(ax.step) << "\n";
        }
    }
    out << "\n[output]\n";
    out << "csv = " << m.csv_path << "\n";
    out << "json = " << m.json_path << "\n";
    return out.str();
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

BaselineComparison compare_baselines(const ExperimentManifest& m,
                                     const optimizer::SweepOptions& opt) {
    BaselineComparison out;
    out.fdc = optimizer::optimize_config(m.access, m.contention, m.pu, m.sensing, m.sic, opt);

    // Single-stage protocol: sensing spans the whole frame, power swept.
    {
        AccessConfig cfg = m.access;
        cfg.t_s = cfg.t_frame;
        std::vector<double> grid;
        const double max_db = linear_to_db(cfg.p_max);
        for (double d = opt.p_sen_min_db; d <= max_db + 1e-9; d += opt.step_db) {
            grid.push_back(std::min(db_to_linear(d), cfg.p_max));
        }
        grid.push_back(cfg.p_max);
        double best_nt = -1.0;
        for (double p : grid) {
            cfg.p_sen = p;
            try {
                const double nt =
                    throughput::normalized_throughput(cfg, m.contention, m.pu, m.sensing, m.sic).nt;
                if (nt > best_nt) {
                    best_nt = nt;
                    out.single_stage_p_sen = p;
                }
            } catch (const std::exception&) {
            }
        }
        if (best_nt < 0.0) throw numerical_error("compare_baselines: single-stage sweep failed");
        out.single_stage_nt = best_nt;
    }

    // Two-stage half-duplex protocol: silent sensing, full power afterwards.
    {
        AccessConfig cfg = m.access;
        cfg.mode = TxMode::HdTx;
        cfg.p_sen = 0.0;
        cfg.p_dat = cfg.p_max;
        const optimizer::TsOptimum ts =
            optimizer::optimize_ts(0.0, cfg, m.contention, m.pu, m.sensing, m.sic);
        out.hd_t_s = ts.t_s_opt;
        out.hd_nt = ts.nt_opt;
    }
    return out;
}

namespace {

struct Row {
    std::vector<double> axis_values;
    std::vector<std::pair<std::string, double>> fields;
    bool failed = false;
    std::string error;
};

void eval_row(const ExperimentManifest& m, Row& row) {
    const ThroughputReport r =
        throughput::normalized_throughput(m.access, m.contention, m.pu, m.sensing, m.sic);
    row.fields = {
        {"t_s", m.access.t_s},
        {"p_sen", m.access.p_sen},
        {"t_ove", r.t_ove},
        {"t_cont_bar", r.t_cont_bar},
        {"b1", r.b1},
        {"b2", r.b2},
        {"b3", r.b3},
        {"nt", r.nt},
        {"gamma_s1", r.gamma_s1},
        {"gamma_s2", r.gamma_s2},
        {"gamma_d1", r.gamma_d1},
        {"gamma_d2", r.gamma_d2},
        {"gamma_ps", r.gamma_ps},
        {"pf00", r.pf00},
        {"k_e", r.k_e},
        {"delta_tau_inv", r.delta_tau_inv},
        {"epsilon_star", r.epsilon_star},
        {"pd_avg", r.pd_avg},
    };
}

void simulate_row(const ExperimentManifest& m, Row& row) {
    montecarlo::SimConfig sim = m.sim;
    sim.multi_transition_policy = montecarlo::MultiTransitionPolicy::CountAndFlag;
    const ThroughputReport r =
        throughput::normalized_throughput(m.access, m.contention, m.pu, m.sensing, m.sic);
    const montecarlo::SimReport s =
        montecarlo::simulate(m.access, m.contention, m.pu, m.sensing, m.sic, sim);
    row.fields = {
        {"t_s", m.access.t_s},
        {"p_sen", m.access.p_sen},
        {"nt_closed", r.nt},
        {"nt_estimate", s.nt_estimate},
        {"nt_std_error", s.nt_std_error},
        {"total_bits", s.total_bits},
        {"total_time", s.total_time},
        {"case1_freq", s.case1.frequency},
        {"case1_bits_per_cycle", s.case1.mean_bits_per_cycle},
        {"case2_freq", s.case2.frequency},
        {"case2_bits_per_cycle", s.case2.mean_bits_per_cycle},
        {"case3_freq", s.case3.frequency},
        {"case3_bits_per_cycle", s.case3.mean_bits_per_cycle},
        {"busy_at_start_fraction", s.busy_at_start_fraction},
        {"mean_collisions", s.mean_collisions},
        {"mean_idle_slots", s.mean_idle_slots},
        {"mean_t_ove", s.mean_t_ove},
        {"multi_transition_fraction", s.multi_transition_fraction},
        {"evacuation_violation_fraction", s.evacuation_violation_fraction},
    };
}

void compare_row(const ExperimentManifest& m, Row& row) {
    ExperimentManifest mm = m;
    mm.access.p_dat = mm.access.p_max;  // every protocol transmits at the budget
    const BaselineComparison c = compare_baselines(mm);
    row.fields = {
        {"p_max", mm.access.p_max},
        {"fdc_nt", c.fdc.nt_star},
        {"fdc_t_s", c.fdc.t_s_star},
        {"fdc_p_sen", c.fdc.p_sen_star},
        {"single_stage_nt", c.single_stage_nt},
        {"single_stage_p_sen", c.single_stage_p_sen},
        {"hd_nt", c.hd_nt},
        {"hd_t_s", c.hd_t_s},
    };
}

void verify_row(const ExperimentManifest& m, Row& row) {
    const optimizer::StructureDiagnostics d = optimizer::verify_structure(
        m.access, m.contention, m.pu, m.sensing, m.sic, m.access.p_sen);
    row.fields = {
        {"p_sen", m.access.p_sen},
        {"p_sen_critical", d.p_sen_critical},
        {"left_derivative_sign", static_cast<double>(d.left_derivative_sign)},
        {"right_derivative_sign", static_cast<double>(d.right_derivative_sign)},
        {"concavity_violations", static_cast<double>(d.concavity_violations)},
        {"probe_points", static_cast<double>(d.probe_points)},
    };
}

void optimize_row(const ExperimentManifest& m, Row& row) {
    const optimizer::OptimizationResult r =
        optimizer::optimize_config(m.access, m.contention, m.pu, m.sensing, m.sic);
    row.fields = {
        {"t_s_star", r.t_s_star},
        {"p_sen_star", r.p_sen_star},
        {"nt_star", r.nt_star},
        {"boundary_flag", r.boundary_flag ? 1.0 : 0.0},
        {"trace_points", static_cast<double>(r.trace.size())},
    };
}

}  // namespace

RunResult run_manifest(const ExperimentManifest& m, const std::string& manifest_text,
                       const std::string& out_dir, const std::string& format) {
    RunResult res;
    try {
        m.validate();
    } catch (const std::exception& e) {
        res.exit_code = 2;
        res.json_file = e.what();
        return res;
    }

    // Cartesian sweep grid (first axis outermost), deterministic row order.
    std::vector<std::vector<double>> axes;
    std::vector<std::string> axis_names;
    if (m.task != Task::Eval) {
        for (const SweepAxis& ax : m.sweeps) {
            axes.push_back(ax.expand());
            axis_names.push_back(ax.variable);
        }
    }
    if ((m.task == Task::Sweep) && axes.empty()) {
        res.exit_code = 2;
        res.json_file = "sweep task requires at least one [sweep] axis";
        return res;
    }
    std::size_t n_rows = 1;
    for (const auto& a : axes) n_rows *= a.size();

    std::vector<Row> rows(n_rows);
    const auto eval_point = [&](std::size_t idx) {
        Row& row = rows[idx];
        ExperimentManifest point = m;
        std::size_t rem = idx;
        row.axis_values.resize(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            const std::size_t k = rem % axes[a].size();
            rem /= axes[a].size();
            row.axis_values[a] = axes[a][k];
        }
        try {
            for (std::size_t a = 0; a < axes.size(); ++a) {
                set_field(point, axis_names[a], row.axis_values[a]);
            }
            switch (m.task) {
                case Task::Eval:
                case Task::Sweep: eval_row(point, row); break;
                case Task::Simulate: simulate_row(point, row); break;
                case Task::Compare: compare_row(point, row); break;
                case Task::Verify: verify_row(point, row); break;
                case Task::Optimize: optimize_row(point, row); break;
            }
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
    };

    // Simulate/compare/optimize rows parallelize internally; the plain
    // analytic rows are dispatched to a worker pool here.
    const bool parallel_rows = m.task == Task::Eval || m.task == Task::Sweep || m.task == Task::Verify;
    if (parallel_rows && n_rows > 1) {
        unsigned workers = std::max(1u, std::thread::hardware_concurrency());
        workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_rows));
        std::atomic<std::size_t> next{0};
        const auto worker = [&]() {
            for (std::size_t i = next.fetch_add(1); i < n_rows; i = next.fetch_add(1)) {
                eval_point(i);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
    } else {
        for (std::size_t i = 0; i < n_rows; ++i) eval_point(i);
    }

    res.rows = n_rows;
    for (const Row& r : rows) {
        if (r.failed) ++res.failed_rows;
    }

    std::filesystem::create_directories(out_dir);
    const Row* first_ok = nullptr;
    for (const Row& r : rows) {
        if (!r.failed) {
            first_ok = &r;
            break;
        }
    }

    // Row table.
    nlohmann::json jrows = nlohmann::json::array();
    const std::string csv_file = (std::filesystem::path(out_dir) / m.csv_path).string();
    if (format == "csv") {
        std::ofstream csv(csv_file);
        for (std::size_t a = 0; a < axis_names.size(); ++a) csv << axis_names[a] << ",";
        if (first_ok) {
            for (const auto& [k, v] : first_ok->fields) csv << k << ",";
        }
        csv << "status\n";
        for (const Row& r : rows) {
            for (double v : r.axis_values) csv << num(v) << ",";
            if (r.failed) {
                if (first_ok) {
                    for (std::size_t i = 0; i < first_ok->fields.size(); ++i) csv << ",";
                }
                csv << "failed\n";
            } else {
                for (const auto& [k, v] : r.fields) csv << num(v) << ",";
                csv << "ok\n";
            }
        }
        res.csv_file = csv_file;
    } else {
        for (const Row& r : rows) {
            nlohmann::json jr;
            for (std::size_t a = 0; a < axis_names.size(); ++a) jr[axis_names[a]] = r.axis_values[a];
            for (const auto& [k, v] : r.fields) jr[k] = v;
            jr["status"] = r.failed ? "failed" : "ok";
            if (r.failed) jr["error"] = r.error;
            jrows.push_back(jr);
        }
        std::ofstream jf(csv_file + ".rows.json");
        jf << jrows.dump(1) << "\n";
        res.csv_file = csv_file + ".rows.json";
    }

    // Summary with the argmax row (by nt-like columns) for reproducibility audits.
    const char* score_key = nullptr;
    switch (m.task) {
        case Task::Eval:
        case Task::Sweep: score_key = "nt"; break;
        case Task::Simulate: score_key = "nt_estimate"; break;
        case Task::Compare: score_key = "fdc_nt"; break;
        case Task::Optimize: score_key = "nt_star"; break;
        case Task::Verify: break;
    }
    nlohmann::json summary;
    summary["scenario"] = m.scenario;
    summary["task"] = task_name(m.task);
    summary["manifest_hash"] = fnv1a_hex(manifest_text);
    summary["seed"] = m.sim.seed;
    summary["rows"] = res.rows;
    summary["failed_rows"] = res.failed_rows;
    summary["table"] = res.csv_file;
    if (score_key) {
        const Row* best = nullptr;
        double best_v = 0.0;
        for (const Row& r : rows) {
            if (r.failed) continue;
            for (const auto& [k, v] : r.fields) {
                if (k == score_key && (!best || v > best_v)) {
                    best = &r;
                    best_v = v;
                }
            }
        }
        if (best) {
            nlohmann::json opt;
            for (std::size_t a = 0; a < axis_names.size(); ++a) {
                opt[axis_names[a]] = best->axis_values[a];
            }
            for (const auto& [k, v] : best->fields) opt[k] = v;
            summary["optimum"] = opt;
        }
    }
    const std::string json_file = (std::filesystem::path(out_dir) / m.json_path).string();
    std::ofstream jf(json_file);
    jf << summary.dump(1) << "\n";
    res.json_file = json_file;

    if (res.failed_rows == res.rows && res.rows > 0) res.exit_code = 3;
    return res;
}

}  // namespace fdcmac::manifest
