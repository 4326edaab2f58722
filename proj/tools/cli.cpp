#include "cli.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "owfsim/metrics.hpp"
#include "owfsim/sim.hpp"

namespace owfsim::cli {

namespace fs = std::filesystem;

namespace {

struct RunOptions {
    std::vector<std::string> targets;
    std::string out_dir = ".";
    std::optional<double> dt;
    std::optional<double> ts;
    std::optional<double> t_end;
    int decimation = 1;
    int jobs = 1;
};

/// Usage problems: unknown preset, unreadable or invalid config.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

bool is_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return true;
    return false;
}

ScenarioSpec load_target(const std::string& target) {
    if (is_preset(target)) return build_preset(target);
    const fs::path path(target);
    if (!fs::exists(path)) throw UsageError("'" + target + "' is neither a preset nor an existing file");
    try {
        ScenarioSpec spec = scenario_from_json(read_file(path));
        if (spec.name.empty()) spec.name = path.stem().string();
        return spec;
    } catch (const std::invalid_argument& e) {
        throw UsageError(target + ": " + e.what());
    }
}

struct RunOutcome {
    std::string summary;
    std::string error;
    int code = kExitOk;
};

RunOutcome run_one(const ScenarioSpec& spec, const RunOptions& opt) {
    RunOutcome outcome;
    try {
        SimConfig config = SimConfig::for_scenario(spec);
        if (opt.dt) config.dt_plant = *opt.dt;
        if (opt.ts) config.ts_control = *opt.ts;
        if (opt.t_end) config.t_end = *opt.t_end;
        config.record_decimation = opt.decimation;
        try {
            config.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }

        const RunRecord record = run(spec, config);
        const Metrics metrics = compute_metrics(record);

        const fs::path dir(opt.out_dir);
        fs::create_directories(dir);
        {
            std::ofstream csv(dir / (spec.name + ".csv"), std::ios::binary);
            if (!csv) throw std::runtime_error("cannot write CSV into '" + dir.string() + "'");
            write_csv(record, csv);
        }
        write_file(dir / (spec.name + ".header.json"), header_to_json(record) + "\n");
        write_file(dir / (spec.name + ".metrics.json"), metrics_to_json(metrics) + "\n");

        std::ostringstream s;
        s << spec.name << ": status=" << (record.diverged() ? "diverged" : "converged")
          << " los=" << (metrics.los.detected ? "true" : "false");
        if (metrics.los.detected) s << "@" << metrics.los.time << "s";
        s << " ramp_completed=" << (metrics.ramp_completed ? "true" : "false")
          << " voltage_settled=" << (metrics.voltage_settled ? "true" : "false")
          << " reactive_imbalance=" << metrics.reactive_imbalance;
        for (std::size_t k = 0; k < metrics.strings.size(); ++k)
            s << " max_i" << k + 1 << "=" << metrics.strings[k].max_current;
        outcome.summary = s.str();
    } catch (const UsageError& e) {
        outcome.error = e.what();
        outcome.code = kExitUsage;
    } catch (const std::invalid_argument& e) {
        outcome.error = e.what();
        outcome.code = kExitUsage;
    } catch (const std::exception& e) {
        outcome.error = std::string("numeric failure: ") + e.what();
        outcome.code = kExitNumeric;
    }
    return outcome;
}

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
    std::vector<ScenarioSpec> specs;
    try {
        for (const auto& t : opt.targets) specs.push_back(load_target(t));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    std::vector<RunOutcome> outcomes(specs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < specs.size(); i = next++) outcomes[i] = run_one(specs[i], opt);
    };
    const std::size_t n_threads = std::min<std::size_t>(std::max(opt.jobs, 1), specs.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    int code = kExitOk;
    for (const auto& o : outcomes) {
        if (o.code == kExitOk) {
            out << o.summary << "\n";
        } else {
            err << "error: " << o.error << "\n";
            code = std::max(code, o.code);
        }
    }
    return code;
}

int cmd_metrics(const std::string& csv_path, std::ostream& out, std::ostream& err) {
    try {
        const fs::path path(csv_path);
        std::ifstream in(path, std::ios::binary);
        if (!in) throw UsageError("cannot read '" + csv_path + "'");
        RunRecord record = read_csv(in);
        fs::path header = path;
        header.replace_extension(".header.json");
        apply_header_json(record, read_file(header));
        if (record.columns != record_columns(record.scenario.strings.size()))
            throw UsageError("columns of '" + csv_path + "' do not match its header");
        out << metrics_to_json(compute_metrics(record)) << "\n";
        return kExitOk;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Offshore wind farm black start and power ramp simulator"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run_cmd = app.add_subcommand("run", "Run presets or scenario files, write CSV and metrics");
    run_cmd->add_option("targets", run_opt.targets, "Preset names or scenario JSON files")->required();
    run_cmd->add_option("--out", run_opt.out_dir, "Output directory");
    run_cmd->add_option("--dt", run_opt.dt, "Plant integration step in s")->check(CLI::PositiveNumber);
    run_cmd->add_option("--ts", run_opt.ts, "Control sample period in s")->check(CLI::PositiveNumber);
    run_cmd->add_option("--t-end", run_opt.t_end, "Simulated horizon in s")->check(CLI::PositiveNumber);
    run_cmd->add_option("--decimation", run_opt.decimation, "Record every n-th control sample")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--jobs", run_opt.jobs, "Independent runs executed concurrently")->check(CLI::PositiveNumber);

    auto* list_cmd = app.add_subcommand("list-presets", "List the built-in scenarios");

    std::string preset_name;
    auto* show_cmd = app.add_subcommand("show-preset", "Print a preset as a scenario JSON document");
    show_cmd->add_option("name", preset_name, "Preset name")->required();

    std::string csv_path;
    auto* metrics_cmd = app.add_subcommand("metrics", "Recompute metrics from a recorded CSV and its header");
    metrics_cmd->add_option("record", csv_path, "Path to <name>.csv; <name>.header.json must sit next to it")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    if (*run_cmd) return cmd_run(run_opt, out, err);
    if (*list_cmd) {
        for (const auto& p : presets()) out << p.name << "\t" << p.summary << "\n";
        return kExitOk;
    }
    if (*show_cmd) {
        if (!is_preset(preset_name)) {
            err << "error: unknown preset '" << preset_name << "'\n";
            return kExitUsage;
        }
        out << scenario_to_json(build_preset(preset_name)) << "\n";
        return kExitOk;
    }
    if (*metrics_cmd) return cmd_metrics(csv_path, out, err);
    return kExitUsage;
}

}  // namespace owfsim::cli
