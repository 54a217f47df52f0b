#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fdcmac/manifest.hpp"

namespace {

struct CommonOpts {
    std::string manifest_path;
    std::string out_dir = ".";
    std::string format = "csv";
    std::uint64_t seed = 0;
    std::uint64_t cycles = 0;
    bool have_seed = false;
    bool have_cycles = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--manifest", o.manifest_path, "experiment manifest file")->required();
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--format", o.format, "row table format: csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", o.seed, "override [sim] seed")->each([&](const std::string&) {
        o.have_seed = true;
    });
    cmd->add_option("--cycles", o.cycles, "override [sim] cycles")->each([&](const std::string&) {
        o.have_cycles = true;
    });
}

int run(const CommonOpts& o, fdcmac::manifest::Task task) {
    std::ifstream in(o.manifest_path);
    if (!in) {
        std::cerr << "error: cannot open manifest '" << o.manifest_path << "'\n";
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    fdcmac::manifest::ExperimentManifest m;
    try {
        std::istringstream is(text);
        m = fdcmac::manifest::parse_manifest(is);
        m.task = task;
        if (o.have_seed) m.sim.seed = o.seed;
        if (o.have_cycles) m.sim.cycles = o.cycles;
        m.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << o.manifest_path << ": " << e.what() << "\n";
        return 2;
    }

    const fdcmac::manifest::RunResult res =
        fdcmac::manifest::run_manifest(m, text, o.out_dir, o.format);
    if (res.exit_code == 2) {
        std::cerr << "error: " << res.json_file << "\n";
        return 2;
    }
    std::cout << "scenario " << m.scenario << ": " << res.rows - res.failed_rows << "/"
              << res.rows << " points ok\n";
    if (!res.csv_file.empty()) std::cout << "  table:   " << res.csv_file << "\n";
    std::cout << "  summary: " << res.json_file << "\n";
    if (res.exit_code == 3) std::cerr << "error: every sweep point failed\n";
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FDC-MAC throughput model, optimizer and Monte-Carlo validator"};
    app.require_subcommand(1);

    using fdcmac::manifest::Task;
    struct Sub {
        const char* name;
        const char* help;
        Task task;
    };
    const Sub subs[] = {
        {"eval", "evaluate one configuration", Task::Eval},
        {"sweep", "run the manifest sweep grid", Task::Sweep},
        {"optimize", "run the configuration search", Task::Optimize},
        {"simulate", "Monte-Carlo cycle simulation", Task::Simulate},
        {"compare", "compare against the single-stage and half-duplex baselines", Task::Compare},
        {"verify", "throughput-structure diagnostics", Task::Verify},
    };

    CommonOpts opts[std::size(subs)];
    Task chosen{};
    bool any = false;
    for (std::size_t i = 0; i < std::size(subs); ++i) {
        CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
        add_common(cmd, opts[i]);
        cmd->callback([&, i]() {
            chosen = subs[i].task;
            any = true;
        });
    }

    CLI11_PARSE(app, argc, argv);
    if (!any) return 2;
    for (std::size_t i = 0; i < std::size(subs); ++i) {
        if (subs[i].task == chosen) return run(opts[i], chosen);
    }
    return 2;
}
