// uds: dataset generation, classifier training, racing experiments and
// trajectory export.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error. Every failure
// prints one line starting with "error[<kind>]:" on stderr.

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uds/dataset.hpp"
#include "uds/experiment.hpp"
#include "uds/io.hpp"
#include "uds/planners.hpp"
#include "uds/simulator.hpp"

namespace {

namespace fs = std::filesystem;
using uds::io::json;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::uint64_t seed = 0;
    std::string config;
    std::string out = "out";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--seed", o.seed, "Random seed (required)")->required();
    cmd->add_option("--config", o.config, "JSON config file; flags override its values");
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
}

uds::io::RunConfig load_config(const CommonOptions& o) {
    uds::io::RunConfig c;
    if (!o.config.empty()) {
        uds::io::apply_config_json(c, uds::io::parse_json(uds::io::read_file(o.config), o.config));
    }
    c.train.seed = o.seed;
    return c;
}

fs::path prepare_out(const CommonOptions& o) {
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) throw uds::Error(uds::ErrorCode::Io, "cannot create " + o.out + ": " + ec.message());
    return fs::path(o.out);
}

void write_config_echo(const fs::path& dir, const char* command, const CommonOptions& o,
                       const uds::io::RunConfig& c) {
    json j = uds::io::config_to_json(c);
    j["command"] = command;
    j["seed"] = o.seed;
    uds::io::write_file((dir / "config.json").string(), j.dump(2) + '\n');
}

std::string valid_planner_names() {
    std::string s;
    for (auto k : uds::kAllPlanners) s += (s.empty() ? "" : ", ") + std::string(uds::to_string(k));
    return s;
}

// ---------------------------------------------------------------- gen-dataset

struct GenOptions {
    CommonOptions common;
    std::size_t episodes = 0;
    CLI::Option* episodes_flag = nullptr;
};

int cmd_gen_dataset(const GenOptions& g) {
    auto c = load_config(g.common);
    if (g.episodes_flag->count() > 0) {
        if (g.episodes == 0) throw UsageError("--episodes must be >= 1");
        c.dataset.episodes = g.episodes;
    }
    uds::io::validate(c);

    const auto ds = uds::generate_dataset(c.dataset, c.sim, g.common.seed);

    const auto dir = prepare_out(g.common);
    std::ostringstream csv;
    uds::io::write_dataset_csv(csv, ds.samples);
    uds::io::write_file((dir / "dataset.csv").string(), csv.str());
    uds::io::write_file((dir / "dataset_summary.json").string(), uds::io::dataset_summary_json(ds.summary).dump(2) + '\n');
    write_config_echo(dir, "gen-dataset", g.common, c);

    std::cout << "samples   " << ds.summary.samples << '\n' << "discarded " << ds.summary.discarded << '\n';
    for (auto k : uds::kAllPlanners) {
        std::cout << "  " << std::left << std::setw(20) << uds::to_string(k) << ds.summary.label_counts[uds::index_of(k)]
                  << '\n';
    }
    std::cout << "wrote " << (dir / "dataset.csv").string() << '\n';
    return 0;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
    CommonOptions common;
    std::string dataset;
    std::size_t epochs = 0;
    CLI::Option* epochs_flag = nullptr;
    bool no_weighting = false;
};

int cmd_train(const TrainOptions& t) {
    auto c = load_config(t.common);
    if (t.epochs_flag->count() > 0) c.train.epochs = t.epochs;
    if (t.no_weighting) c.train.class_weighting = false;
    uds::io::validate(c);

    const std::string path = t.dataset.empty() ? (fs::path(t.common.out) / "dataset.csv").string() : t.dataset;
    std::istringstream in(uds::io::read_file(path));
    const auto samples = uds::io::read_dataset_csv(in);
    const auto result = uds::train_switcher(samples, c.train);

    const auto dir = prepare_out(t.common);
    uds::io::write_file((dir / "model.json").string(), uds::io::model_to_json(result.model).dump() + '\n');
    json report = json::object();
    for (const auto& [name, m] : {std::pair{"train", result.report.train},
                                  std::pair{"validation", result.report.validation},
                                  std::pair{"test", result.report.test}}) {
        report[name] = {{"samples", m.size}, {"accuracy", m.accuracy}, {"loss", m.loss}};
    }
    uds::io::write_file((dir / "train_report.json").string(), report.dump(2) + '\n');
    write_config_echo(dir, "train", t.common, c);

    std::cout << std::left << std::setw(12) << "split" << std::right << std::setw(9) << "samples" << std::setw(10)
              << "accuracy" << std::setw(9) << "loss" << '\n'
              << std::fixed << std::setprecision(3);
    for (const auto& [name, m] : {std::pair{"train", result.report.train},
                                  std::pair{"validation", result.report.validation},
                                  std::pair{"test", result.report.test}}) {
        std::cout << std::left << std::setw(12) << name << std::right << std::setw(9) << m.size << std::setw(10)
                  << m.accuracy << std::setw(9) << m.loss << '\n';
    }
    std::cout << "wrote " << (dir / "model.json").string() << '\n';
    return 0;
}

// ---------------------------------------------------------------- race

struct RaceOptions {
    CommonOptions common;
    std::string policy = "all";
    std::string model;
    std::string scenario;
    std::string track;
    std::string schedule;
    std::size_t episodes = 0;
    CLI::Option* episodes_flag = nullptr;
    bool step_logs = false;
};

int cmd_race(const RaceOptions& r) {
    auto c = load_config(r.common);
    if (r.episodes_flag->count() > 0) {
        if (r.episodes == 0) throw UsageError("--episodes must be >= 1");
        c.race_episodes = r.episodes;
    }
    if (!r.scenario.empty()) {
        const auto sc = uds::io::parse_scenario(r.scenario);
        if (!sc) throw UsageError("unknown scenario '" + r.scenario + "'; valid: clean, mixed, heavy");
        c.scenario = *sc;
    }
    if (!r.track.empty()) c.track_path = r.track;
    if (!r.schedule.empty()) c.schedule_path = r.schedule;
    uds::io::validate(c);

    const bool want_uds = r.policy == "uds" || r.policy == "all";
    if (r.policy == "uds" && r.model.empty()) throw UsageError("--policy uds requires --model");
    std::vector<uds::Policy> policies;
    if (r.policy == "all") {
        for (auto k : uds::kAllPlanners) policies.push_back(uds::FixedPolicy{k});
    } else if (r.policy != "uds") {
        const auto k = uds::parse_planner(r.policy);
        if (!k) throw UsageError("unknown policy '" + r.policy + "'; valid: all, uds, " + valid_planner_names());
        policies.push_back(uds::FixedPolicy{*k});
    }

    uds::ClassifierModel model;
    if (want_uds && !r.model.empty()) {
        model = uds::io::model_from_json(uds::io::parse_json(uds::io::read_file(r.model), r.model));
        policies.push_back(uds::UdsPolicy{&model});
    } else if (want_uds) {
        std::cerr << "note: no --model given, uds row skipped\n";
    }

    uds::ExperimentConfig exp;
    exp.episodes = c.race_episodes;
    exp.scenario = c.scenario;
    exp.tracks = c.tracks;
    exp.schedules = c.schedules;
    exp.sim = c.sim;
    if (!c.track_path.empty()) {
        exp.fixed_track = uds::io::track_from_json(uds::io::parse_json(uds::io::read_file(c.track_path), c.track_path));
    }
    if (!c.schedule_path.empty()) {
        exp.fixed_schedule =
            uds::io::schedule_from_json(uds::io::parse_json(uds::io::read_file(c.schedule_path), c.schedule_path));
    }

    const auto metrics = uds::run_experiment(exp, policies, r.common.seed);

    const auto dir = prepare_out(r.common);
    std::ostringstream csv, episodes;
    uds::io::write_metrics_csv(csv, metrics);
    uds::io::write_episodes_csv(episodes, metrics);
    uds::io::write_file((dir / "metrics.csv").string(), csv.str());
    uds::io::write_file((dir / "metrics.json").string(), uds::io::metrics_to_json(metrics).dump(2) + '\n');
    uds::io::write_file((dir / "episodes.csv").string(), episodes.str());
    if (r.step_logs) {
        const auto setup = uds::episode_setup(exp, r.common.seed, 0);
        for (const auto& p : policies) {
            std::vector<uds::StepLog> log;
            uds::EpisodeOptions opts;
            opts.step_log = &log;
            (void)uds::run_episode(setup.track, p, setup.schedule, setup.noise_seed, exp.sim, opts);
            std::ostringstream os;
            uds::io::write_step_log_csv(os, log);
            uds::io::write_file((dir / ("steps_" + uds::policy_name(p) + ".csv")).string(), os.str());
        }
    }
    write_config_echo(dir, "race", r.common, c);

    std::cout << std::left << std::setw(20) << "policy" << std::right << std::setw(9) << "success%" << std::setw(10)
              << "lap_mean" << std::setw(9) << "lap_std";
    for (auto k : uds::kAllPlanners) std::cout << "  " << uds::to_string(k);
    std::cout << '\n' << std::fixed << std::setprecision(1);
    for (const auto& m : metrics) {
        std::cout << std::left << std::setw(20) << m.policy << std::right << std::setw(9) << m.success_rate;
        if (m.lap_mean) {
            std::cout << std::setw(10) << std::setprecision(2) << *m.lap_mean << std::setw(9) << *m.lap_std;
        } else {
            std::cout << std::setw(10) << "-" << std::setw(9) << "-";
        }
        std::cout << std::setprecision(1);
        for (auto k : uds::kAllPlanners) {
            std::cout << "  " << std::setw(static_cast<int>(uds::to_string(k).size()))
                      << m.usage_percent[uds::index_of(k)];
        }
        std::cout << '\n';
    }
    std::cout << "wrote " << (dir / "metrics.csv").string() << '\n';
    return 0;
}

// ---------------------------------------------------------------- export-traj

struct ExportOptions {
    CommonOptions common;
    std::string planner;
    double duration = 1.0;
    int samples = 100;
    std::vector<double> p0{0, 0, 0}, p1{1, 0, 0}, v0{0, 0, 0}, v1{0, 0, 0}, a0{0, 0, 0}, a1{0, 0, 0};
    double yaw0 = 0.0, yaw1 = 0.0;
};

uds::Vec3 vec3(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

int cmd_export_traj(const ExportOptions& e) {
    const auto kind = uds::parse_planner(e.planner);
    if (!kind) throw UsageError("unknown planner '" + e.planner + "'; valid: " + valid_planner_names());
    if (!(e.duration > 0.0) || !std::isfinite(e.duration)) throw UsageError("--duration must be > 0");
    if (e.samples < 2) throw UsageError("--samples must be >= 2");
    const auto c = load_config(e.common);
    uds::io::validate(c);

    uds::BoundaryConditions bc;
    bc.t_i = 0.0;
    bc.t_f = e.duration;
    bc.p_i = vec3(e.p0);
    bc.p_f = vec3(e.p1);
    bc.v_i = vec3(e.v0);
    bc.v_f = vec3(e.v1);
    bc.a_i = vec3(e.a0);
    bc.a_f = vec3(e.a1);
    bc.yaw_i = e.yaw0;
    bc.yaw_f = e.yaw1;
    uds::PolynomialTrajectory traj;
    try {
        traj = uds::plan(*kind, bc);
    } catch (const uds::Error& err) {
        if (err.code() == uds::ErrorCode::InvalidInput) throw UsageError(err.what());
        throw;
    }

    const auto dir = prepare_out(e.common);
    std::ostringstream os;
    uds::write_trajectory_csv(os, traj, e.samples);
    const auto path = dir / ("trajectory_" + e.planner + ".csv");
    uds::io::write_file(path.string(), os.str());
    write_config_echo(dir, "export-traj", e.common, c);
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int fail(const char* kind, const std::string& message, int code) {
    std::cerr << "error[" << kind << "]: " << message << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Uncertainty-driven motion-planner switching for drone gate racing"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen-dataset", "Generate a labelled planner-switching dataset");
    add_common(gen_cmd, gen.common);
    gen.episodes_flag = gen_cmd->add_option("--episodes", gen.episodes, "Number of samples to collect");

    TrainOptions train;
    auto* train_cmd = app.add_subcommand("train", "Train the planner-switching classifier");
    add_common(train_cmd, train.common);
    train_cmd->add_option("--dataset", train.dataset, "Dataset CSV (default <out>/dataset.csv)");
    train.epochs_flag = train_cmd->add_option("--epochs", train.epochs, "Training epochs");
    train_cmd->add_flag("--no-class-weighting", train.no_weighting, "Disable inverse-frequency class weights");

    RaceOptions race;
    auto* race_cmd = app.add_subcommand("race", "Race policies over seeded tracks and disturbance schedules");
    add_common(race_cmd, race.common);
    race_cmd->add_option("--policy", race.policy, "all, uds or a planner name")->capture_default_str();
    race_cmd->add_option("--model", race.model, "Trained model JSON (needed for uds)");
    race_cmd->add_option("--scenario", race.scenario, "Disturbance preset: clean, mixed or heavy");
    race_cmd->add_option("--track", race.track, "Track JSON; every episode flies it");
    race_cmd->add_option("--schedule", race.schedule, "Disturbance schedule JSON; overrides the preset");
    race.episodes_flag = race_cmd->add_option("--episodes", race.episodes, "Episodes per policy");
    race_cmd->add_flag("--step-logs", race.step_logs, "Write per-step logs of episode 0 for every policy");

    ExportOptions ex;
    auto* ex_cmd = app.add_subcommand("export-traj", "Sample one planner trajectory to CSV");
    add_common(ex_cmd, ex.common);
    ex_cmd->add_option("--planner", ex.planner, "Planner name")->required();
    ex_cmd->add_option("--duration", ex.duration, "Segment duration [s]")->capture_default_str();
    ex_cmd->add_option("--samples", ex.samples, "Rows to write")->capture_default_str();
    for (auto [name, target] : {std::pair{"--p0", &ex.p0}, std::pair{"--p1", &ex.p1}, std::pair{"--v0", &ex.v0},
                                std::pair{"--v1", &ex.v1}, std::pair{"--a0", &ex.a0}, std::pair{"--a1", &ex.a1}}) {
        ex_cmd->add_option(name, *target, "x y z")->expected(3)->delimiter(',');
    }
    ex_cmd->add_option("--yaw0", ex.yaw0, "Initial yaw [rad]");
    ex_cmd->add_option("--yaw1", ex.yaw1, "Final yaw [rad]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), kExitUsage);
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen_dataset(gen);
        if (train_cmd->parsed()) return cmd_train(train);
        if (race_cmd->parsed()) return cmd_race(race);
        return cmd_export_traj(ex);
    } catch (const UsageError& e) {
        return fail("usage", e.what(), kExitUsage);
    } catch (const uds::Error& e) {
        const auto kind = std::string(uds::to_string(e.code()));
        return fail(kind.c_str(), e.what(), e.code() == uds::ErrorCode::Config ? kExitUsage : kExitRuntime);
    } catch (const std::exception& e) {
        return fail("runtime", e.what(), kExitRuntime);
    }
}
