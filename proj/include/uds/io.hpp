#pragma once

// File formats: dataset and log CSVs, model / track / schedule / config JSON,
// and experiment metrics. All writers are byte-deterministic for identical
// inputs; all readers report failures as Error(Parse | Io | Config).

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "uds/classifier.hpp"
#include "uds/dataset.hpp"
#include "uds/error.hpp"
#include "uds/experiment.hpp"
#include "uds/format.hpp"
#include "uds/scenarios.hpp"
#include "uds/simulator.hpp"
#include "uds/switcher.hpp"

namespace uds::io {

using json = nlohmann::json;

inline constexpr std::string_view kModelFormat = "uds-classifier/1";

// ---------------------------------------------------------------- files

[[nodiscard]] inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

[[nodiscard]] inline json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, what + ": " + e.what());
    }
}

// ---------------------------------------------------------------- csv helpers

[[nodiscard]] inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

[[nodiscard]] inline double parse_double(std::string_view s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw Error(ErrorCode::Parse, "not a number: '" + std::string(s) + "'");
    }
    return v;
}

// ---------------------------------------------------------------- dataset

[[nodiscard]] inline std::string dataset_header() {
    std::string h;
    for (auto name : kFeatureNames) h += std::string(name) + ',';
    for (auto k : kAllPlanners) h += "cost_" + std::string(to_string(k)) + ',';
    return h + "label";
}

inline void write_dataset_csv(std::ostream& os, const std::vector<SwitchSample>& samples) {
    os << dataset_header() << '\n';
    for (const auto& s : samples) {
        for (double f : s.features) os << format_double(f) << ',';
        for (double c : s.cost) os << format_double(c) << ',';
        os << to_string(s.label) << '\n';
    }
}

[[nodiscard]] inline std::vector<SwitchSample> read_dataset_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorCode::Parse, "dataset: empty file");
    if (line != dataset_header()) throw Error(ErrorCode::Parse, "dataset: unexpected header");
    std::vector<SwitchSample> out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != kNumFeatures + kNumPlanners + 1) {
            throw Error(ErrorCode::Parse, "dataset line " + std::to_string(lineno) + ": wrong column count");
        }
        SwitchSample s;
        try {
            for (std::size_t i = 0; i < kNumFeatures; ++i) s.features[i] = parse_double(fields[i]);
            for (std::size_t i = 0; i < kNumPlanners; ++i) s.cost[i] = parse_double(fields[kNumFeatures + i]);
        } catch (const Error& e) {
            throw Error(ErrorCode::Parse, "dataset line " + std::to_string(lineno) + ": " + e.what());
        }
        const auto label = parse_planner(fields.back());
        if (!label) throw Error(ErrorCode::Parse, "dataset line " + std::to_string(lineno) + ": unknown label");
        s.label = *label;
        out.push_back(s);
    }
    return out;
}

[[nodiscard]] inline json dataset_summary_json(const DatasetSummary& s) {
    json labels = json::object();
    for (auto k : kAllPlanners) labels[std::string(to_string(k))] = s.label_counts[index_of(k)];
    return {{"samples", s.samples}, {"discarded", s.discarded}, {"label_counts", labels}};
}

// ---------------------------------------------------------------- model

[[nodiscard]] inline json model_to_json(const ClassifierModel& m) {
    json layers = json::array();
    for (const auto& l : m.network.layers()) layers.push_back({{"weights", l.weights}, {"bias", l.bias}});
    json classes = json::array();
    for (auto k : kAllPlanners) classes.push_back(std::string(to_string(k)));
    json features = json::array();
    for (auto f : kFeatureNames) features.push_back(std::string(f));
    return {{"format", std::string(kModelFormat)},
            {"activation", "tanh"},
            {"layer_sizes", m.network.sizes()},
            {"features", features},
            {"classes", classes},
            {"layers", layers},
            {"normalization", {{"mean", m.normalization.mean}, {"stddev", m.normalization.stddev}}}};
}

[[nodiscard]] inline ClassifierModel model_from_json(const json& j) {
    try {
        if (j.at("format").get<std::string>() != kModelFormat) {
            throw Error(ErrorCode::Parse, "model: unsupported format tag");
        }
        const auto sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
        const auto& jl = j.at("layers");
        if (sizes.size() < 2 || jl.size() + 1 != sizes.size()) throw Error(ErrorCode::Parse, "model: layer count");
        if (sizes.front() != kNumFeatures || sizes.back() != kNumPlanners) {
            throw Error(ErrorCode::Parse, "model: expected 17 inputs and 5 outputs");
        }
        std::vector<DenseLayer> layers;
        for (std::size_t l = 0; l < jl.size(); ++l) {
            DenseLayer layer(sizes[l], sizes[l + 1]);
            layer.weights = jl[l].at("weights").get<std::vector<double>>();
            layer.bias = jl[l].at("bias").get<std::vector<double>>();
            layers.push_back(std::move(layer));
        }
        ClassifierModel m;
        m.network = Mlp(std::move(layers));
        m.normalization.mean = j.at("normalization").at("mean").get<std::vector<double>>();
        m.normalization.stddev = j.at("normalization").at("stddev").get<std::vector<double>>();
        if (m.normalization.mean.size() != kNumFeatures || m.normalization.stddev.size() != kNumFeatures) {
            throw Error(ErrorCode::Parse, "model: normalization length");
        }
        for (double s : m.normalization.stddev) {
            if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorCode::Parse, "model: non-positive stddev");
        }
        return m;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("model: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Parse) throw;
        throw Error(ErrorCode::Parse, std::string("model: ") + e.what());
    }
}

// ---------------------------------------------------------------- track / schedule

[[nodiscard]] inline json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

[[nodiscard]] inline Vec3 vec_from(const json& j) {
    if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::Parse, "expected [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

[[nodiscard]] inline json track_to_json(const Track& t) {
    json gates = json::array();
    for (const auto& g : t.gates) gates.push_back({{"position", vec_json(g.position)}, {"yaw", g.yaw}});
    return {{"gates", gates},
            {"gate_side", t.gate_side},
            {"margin", t.margin},
            {"clearance", t.clearance},
            {"bounds_min", vec_json(t.bounds_min)},
            {"bounds_max", vec_json(t.bounds_max)},
            {"start", {{"position", vec_json(t.start.position)}, {"yaw", t.start.yaw}}}};
}

[[nodiscard]] inline Track track_from_json(const json& j) {
    try {
        Track t;
        for (const auto& g : j.at("gates")) t.gates.push_back({vec_from(g.at("position")), g.at("yaw").get<double>()});
        if (j.contains("gate_side")) t.gate_side = j["gate_side"].get<double>();
        if (j.contains("margin")) t.margin = j["margin"].get<double>();
        if (j.contains("clearance")) t.clearance = j["clearance"].get<double>();
        if (j.contains("bounds_min")) t.bounds_min = vec_from(j["bounds_min"]);
        if (j.contains("bounds_max")) t.bounds_max = vec_from(j["bounds_max"]);
        if (j.contains("start")) t.start = {vec_from(j["start"].at("position")), j["start"].at("yaw").get<double>()};
        t.validate();
        return t;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("track: ") + e.what());
    }
}

[[nodiscard]] inline json schedule_to_json(const DisturbanceSchedule& s) {
    json iv = json::array();
    for (const auto& i : s.intervals()) {
        iv.push_back({{"start", i.start_s},
                      {"end", i.end_s},
                      {"brightness", i.level.brightness},
                      {"contrast", i.level.contrast},
                      {"saturation", i.level.saturation}});
    }
    return {{"intervals", iv}};
}

[[nodiscard]] inline DisturbanceSchedule schedule_from_json(const json& j) {
    try {
        std::vector<DisturbanceInterval> iv;
        for (const auto& i : j.at("intervals")) {
            iv.push_back({i.at("start").get<double>(), i.at("end").get<double>(),
                          {i.value("brightness", 0.0), i.value("contrast", 0.0), i.value("saturation", 0.0)}});
        }
        return DisturbanceSchedule(std::move(iv));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("schedule: ") + e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::Parse, std::string("schedule: ") + e.what());
    }
}

[[nodiscard]] inline std::optional<NoiseScenario> parse_scenario(std::string_view s) {
    for (auto sc : {NoiseScenario::Clean, NoiseScenario::Mixed, NoiseScenario::Heavy}) {
        if (s == to_string(sc)) return sc;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- logs and metrics

[[nodiscard]] inline std::string optional_field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string{};
}

inline void write_step_log_csv(std::ostream& os, const std::vector<StepLog>& log) {
    os << "t,x,y,z,yaw,vx,vy,vz,planner,obs_r,obs_psi,obs_theta,obs_phi,"
          "sigma2_r,sigma2_phi,sigma2_theta,sigma2_psi,brightness,contrast,saturation\n";
    for (const auto& s : log) {
        const auto& p = s.state.position;
        const auto& v = s.state.velocity;
        os << format_double(s.t) << ',' << format_double(p.x) << ',' << format_double(p.y) << ','
           << format_double(p.z) << ',' << format_double(s.state.yaw) << ',' << format_double(v.x) << ','
           << format_double(v.y) << ',' << format_double(v.z) << ',' << to_string(s.planner) << ','
           << format_double(s.observed.r) << ',' << format_double(s.observed.psi) << ','
           << format_double(s.observed.theta) << ',' << format_double(s.observed.phi);
        if (s.covariance) {
            os << ',' << format_double(s.covariance->sigma2_r) << ',' << format_double(s.covariance->sigma2_phi)
               << ',' << format_double(s.covariance->sigma2_theta) << ','
               << format_double(s.covariance->sigma2_psi);
        } else {
            os << ",,,,";
        }
        os << ',' << format_double(s.disturbance.brightness) << ',' << format_double(s.disturbance.contrast) << ','
           << format_double(s.disturbance.saturation) << '\n';
    }
}

inline void write_metrics_csv(std::ostream& os, const std::vector<PolicyMetrics>& metrics) {
    os << "policy,episodes,success_rate,lap_mean,lap_std";
    for (auto k : kAllPlanners) os << ",usage_" << to_string(k);
    os << '\n';
    for (const auto& m : metrics) {
        os << m.policy << ',' << m.episodes << ',' << format_double(m.success_rate) << ','
           << optional_field(m.lap_mean) << ',' << optional_field(m.lap_std);
        for (double u : m.usage_percent) os << ',' << format_double(u);
        os << '\n';
    }
}

[[nodiscard]] inline json metrics_to_json(const std::vector<PolicyMetrics>& metrics) {
    json rows = json::array();
    for (const auto& m : metrics) {
        json usage = json::object();
        for (auto k : kAllPlanners) usage[std::string(to_string(k))] = m.usage_percent[index_of(k)];
        rows.push_back({{"policy", m.policy},
                        {"episodes", m.episodes},
                        {"successes", m.successes},
                        {"success_rate", m.success_rate},
                        {"lap_mean", m.lap_mean ? json(*m.lap_mean) : json(nullptr)},
                        {"lap_std", m.lap_std ? json(*m.lap_std) : json(nullptr)},
                        {"usage_percent", usage}});
    }
    return rows;
}

inline void write_episodes_csv(std::ostream& os, const std::vector<PolicyMetrics>& metrics) {
    os << "policy,episode,success,lap_time,crash_cause,gates_passed\n";
    for (const auto& m : metrics) {
        for (std::size_t k = 0; k < m.outcomes.size(); ++k) {
            const auto& o = m.outcomes[k];
            os << m.policy << ',' << k << ',' << (o.success ? 1 : 0) << ',' << optional_field(o.lap_time) << ','
               << to_string(o.crash_cause) << ',' << o.gates_passed << '\n';
        }
    }
}

// ---------------------------------------------------------------- run config

/// Everything a CLI run can be configured with. The seed is not part of it:
/// it always comes from the command line.
struct RunConfig {
    SimConfig sim;
    DatasetConfig dataset;
    TrainConfig train;
    TrackDistribution tracks;
    ScheduleDistribution schedules;
    std::size_t race_episodes = 40;
    NoiseScenario scenario = NoiseScenario::Mixed;
    std::string track_path;     // empty: sample tracks
    std::string schedule_path;  // empty: use the scenario preset
};

namespace detail {

// Reads known keys of one JSON object and rejects anything else.
class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw Error(ErrorCode::Config, name_ + ": expected an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw Error(ErrorCode::Config, name_ + "." + key + ": wrong type");
        }
    }

    [[nodiscard]] const json* sub(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!seen_.count(item.key())) throw Error(ErrorCode::Config, name_ + ": unknown key '" + item.key() + "'");
        }
    }

private:
    const json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

}  // namespace detail

[[nodiscard]] inline json config_to_json(const RunConfig& c) {
    const auto& s = c.sim;
    const auto& d = c.dataset;
    const auto& t = c.train;
    return {
        {"planner",
         {{"cruise_speed", s.planner.cruise_speed},
          {"min_duration", s.planner.min_duration},
          {"safe_hold", s.planner.safe_hold}}},
        {"noise", {{"base", s.noise.base}, {"gain", s.noise.gain}, {"range_scale", s.noise.range_scale}}},
        {"tracking",
         {{"k_p", s.tracking.k_p},
          {"k_yaw", s.tracking.k_yaw},
          {"v_max", s.tracking.v_max},
          {"a_max", s.tracking.a_max},
          {"yaw_rate_max", s.tracking.yaw_rate_max}}},
        {"simulation",
         {{"dt", s.dt},
          {"replan_period", s.replan_period},
          {"gate_timeout", s.gate_timeout},
          {"full_stop_overshoot", s.full_stop_overshoot},
          {"estimator_floor", s.estimator_floor},
          {"motion_blur", s.motion_blur},
          {"cost_yaw_offset", s.cost.yaw_offset}}},
        {"dataset",
         {{"episodes", d.episodes},
          {"clean_fraction", d.clean_fraction},
          {"magnitude_min", d.magnitude_min},
          {"magnitude_max", d.magnitude_max},
          {"distance_min", d.distance_min},
          {"distance_max", d.distance_max},
          {"approach_angle", d.approach_angle},
          {"height_offset", d.height_offset},
          {"speed_max", d.speed_max},
          {"heading_jitter", d.heading_jitter},
          {"yaw_jitter", d.yaw_jitter},
          {"next_gate_spacing", d.next_gate_spacing},
          {"next_gate_turn", d.next_gate_turn},
          {"safe_hover", d.safe_hover},
          {"rollouts", d.rollouts},
          {"crash_tolerance", d.crash_tolerance}}},
        {"classifier",
         {{"hidden", t.hidden},
          {"learning_rate", t.learning_rate},
          {"momentum", t.momentum},
          {"batch_size", t.batch_size},
          {"epochs", t.epochs},
          {"class_weighting", t.class_weighting},
          {"train_fraction", t.train_fraction},
          {"validation_fraction", t.validation_fraction}}},
        {"tracks",
         {{"gates", c.tracks.gates},
          {"spacing_min", c.tracks.spacing_min},
          {"spacing_max", c.tracks.spacing_max},
          {"max_turn", c.tracks.max_turn},
          {"height", c.tracks.height},
          {"height_jitter", c.tracks.height_jitter},
          {"start_distance", c.tracks.start_distance},
          {"bounds_padding", c.tracks.bounds_padding}}},
        {"schedules",
         {{"horizon", c.schedules.horizon},
          {"clean_min", c.schedules.clean_min},
          {"clean_max", c.schedules.clean_max},
          {"burst_min", c.schedules.burst_min},
          {"burst_max", c.schedules.burst_max},
          {"magnitude_min", c.schedules.magnitude_min},
          {"magnitude_max", c.schedules.magnitude_max}}},
        {"race",
         {{"episodes", c.race_episodes},
          {"scenario", std::string(to_string(c.scenario))},
          {"track", c.track_path},
          {"schedule", c.schedule_path}}},
    };
}

/// Overlay the keys present in `j` onto `c`. Unknown keys are errors.
/// The provenance keys "command" and "seed" written by the config echo are
/// accepted and ignored, so an echoed config can be fed back in.
inline void apply_config_json(RunConfig& c, const json& j) {
    detail::Section root(j, "config");
    (void)root.sub("command");
    (void)root.sub("seed");
    auto& s = c.sim;
    if (const json* p = root.sub("planner")) {
        detail::Section sec(*p, "planner");
        sec.get("cruise_speed", s.planner.cruise_speed);
        sec.get("min_duration", s.planner.min_duration);
        sec.get("safe_hold", s.planner.safe_hold);
        sec.finish();
    }
    if (const json* p = root.sub("noise")) {
        detail::Section sec(*p, "noise");
        sec.get("base", s.noise.base);
        sec.get("gain", s.noise.gain);
        sec.get("range_scale", s.noise.range_scale);
        sec.finish();
    }
    if (const json* p = root.sub("tracking")) {
        detail::Section sec(*p, "tracking");
        sec.get("k_p", s.tracking.k_p);
        sec.get("k_yaw", s.tracking.k_yaw);
        sec.get("v_max", s.tracking.v_max);
        sec.get("a_max", s.tracking.a_max);
        sec.get("yaw_rate_max", s.tracking.yaw_rate_max);
        sec.finish();
    }
    if (const json* p = root.sub("simulation")) {
        detail::Section sec(*p, "simulation");
        sec.get("dt", s.dt);
        sec.get("replan_period", s.replan_period);
        sec.get("gate_timeout", s.gate_timeout);
        sec.get("full_stop_overshoot", s.full_stop_overshoot);
        sec.get("estimator_floor", s.estimator_floor);
        sec.get("motion_blur", s.motion_blur);
        sec.get("cost_yaw_offset", s.cost.yaw_offset);
        sec.finish();
    }
    if (const json* p = root.sub("dataset")) {
        auto& d = c.dataset;
        detail::Section sec(*p, "dataset");
        sec.get("episodes", d.episodes);
        sec.get("clean_fraction", d.clean_fraction);
        sec.get("magnitude_min", d.magnitude_min);
        sec.get("magnitude_max", d.magnitude_max);
        sec.get("distance_min", d.distance_min);
        sec.get("distance_max", d.distance_max);
        sec.get("approach_angle", d.approach_angle);
        sec.get("height_offset", d.height_offset);
        sec.get("speed_max", d.speed_max);
        sec.get("heading_jitter", d.heading_jitter);
        sec.get("yaw_jitter", d.yaw_jitter);
        sec.get("next_gate_spacing", d.next_gate_spacing);
        sec.get("next_gate_turn", d.next_gate_turn);
        sec.get("safe_hover", d.safe_hover);
        sec.get("rollouts", d.rollouts);
        sec.get("crash_tolerance", d.crash_tolerance);
        sec.finish();
    }
    if (const json* p = root.sub("classifier")) {
        auto& t = c.train;
        detail::Section sec(*p, "classifier");
        sec.get("hidden", t.hidden);
        sec.get("learning_rate", t.learning_rate);
        sec.get("momentum", t.momentum);
        sec.get("batch_size", t.batch_size);
        sec.get("epochs", t.epochs);
        sec.get("class_weighting", t.class_weighting);
        sec.get("train_fraction", t.train_fraction);
        sec.get("validation_fraction", t.validation_fraction);
        sec.finish();
    }
    if (const json* p = root.sub("tracks")) {
        auto& t = c.tracks;
        detail::Section sec(*p, "tracks");
        sec.get("gates", t.gates);
        sec.get("spacing_min", t.spacing_min);
        sec.get("spacing_max", t.spacing_max);
        sec.get("max_turn", t.max_turn);
        sec.get("height", t.height);
        sec.get("height_jitter", t.height_jitter);
        sec.get("start_distance", t.start_distance);
        sec.get("bounds_padding", t.bounds_padding);
        sec.finish();
    }
    if (const json* p = root.sub("schedules")) {
        auto& t = c.schedules;
        detail::Section sec(*p, "schedules");
        sec.get("horizon", t.horizon);
        sec.get("clean_min", t.clean_min);
        sec.get("clean_max", t.clean_max);
        sec.get("burst_min", t.burst_min);
        sec.get("burst_max", t.burst_max);
        sec.get("magnitude_min", t.magnitude_min);
        sec.get("magnitude_max", t.magnitude_max);
        sec.finish();
    }
    if (const json* p = root.sub("race")) {
        detail::Section sec(*p, "race");
        sec.get("episodes", c.race_episodes);
        std::string scenario(to_string(c.scenario));
        sec.get("scenario", scenario);
        const auto parsed = parse_scenario(scenario);
        if (!parsed) throw Error(ErrorCode::Config, "race.scenario: expected clean, mixed or heavy");
        c.scenario = *parsed;
        sec.get("track", c.track_path);
        sec.get("schedule", c.schedule_path);
        sec.finish();
    }
    root.finish();
}

/// Range checks that cannot be expressed by the JSON types alone.
inline void validate(const RunConfig& c) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::Config, what);
    };
    const auto& s = c.sim;
    for (double v : s.planner.cruise_speed) require(v > 0.0 && std::isfinite(v), "planner.cruise_speed must be > 0");
    require(s.planner.min_duration > 0.0, "planner.min_duration must be > 0");
    require(s.planner.safe_hold > 0.0, "planner.safe_hold must be > 0");
    for (double v : s.noise.base) require(v >= 0.0, "noise.base must be >= 0");
    for (double v : s.noise.gain) require(v >= 0.0, "noise.gain must be >= 0");
    require(s.noise.range_scale >= 0.0, "noise.range_scale must be >= 0");
    require(s.tracking.k_p >= 0.0 && s.tracking.k_yaw >= 0.0, "tracking gains must be >= 0");
    require(s.tracking.v_max > 0.0 && s.tracking.a_max > 0.0 && s.tracking.yaw_rate_max > 0.0,
            "tracking limits must be > 0");
    require(s.dt > 0.0 && s.dt <= 0.1, "simulation.dt must be in (0, 0.1]");
    require(s.replan_period > 0.0, "simulation.replan_period must be > 0");
    require(s.gate_timeout > 0.0, "simulation.gate_timeout must be > 0");
    require(s.motion_blur >= 0.0, "simulation.motion_blur must be >= 0");
    require(s.estimator_floor >= 0.0, "simulation.estimator_floor must be >= 0");
    const auto& d = c.dataset;
    require(d.clean_fraction >= 0.0 && d.clean_fraction <= 1.0, "dataset.clean_fraction must be in [0, 1]");
    require(d.magnitude_min >= 0.0 && d.magnitude_max >= d.magnitude_min, "dataset magnitude range");
    require(d.distance_min > 0.0 && d.distance_max >= d.distance_min, "dataset distance range");
    require(d.episodes >= 1, "dataset.episodes must be >= 1");
    require(d.rollouts >= 1, "dataset.rollouts must be >= 1");
    require(d.crash_tolerance >= 0.0 && d.crash_tolerance < 1.0, "dataset.crash_tolerance must be in [0, 1)");
    const auto& t = c.train;
    require(t.learning_rate > 0.0, "classifier.learning_rate must be > 0");
    require(t.momentum >= 0.0 && t.momentum < 1.0, "classifier.momentum must be in [0, 1)");
    require(t.batch_size >= 1, "classifier.batch_size must be >= 1");
    require(t.train_fraction > 0.0 && t.validation_fraction >= 0.0 &&
                t.train_fraction + t.validation_fraction < 1.0,
            "classifier split fractions");
    for (auto h : t.hidden) require(h >= 1, "classifier.hidden sizes must be >= 1");
    require(c.tracks.gates >= 1, "tracks.gates must be >= 1");
    require(c.tracks.spacing_min > 0.0 && c.tracks.spacing_max >= c.tracks.spacing_min, "tracks spacing range");
    const auto& sd = c.schedules;
    require(sd.horizon > 0.0, "schedules.horizon must be > 0");
    require(sd.clean_min > 0.0 && sd.clean_max >= sd.clean_min, "schedules clean range");
    require(sd.burst_min > 0.0 && sd.burst_max >= sd.burst_min, "schedules burst range");
    require(sd.magnitude_min >= 0.0 && sd.magnitude_max >= sd.magnitude_min, "schedules magnitude range");
    require(c.race_episodes >= 1, "race.episodes must be >= 1");
}

}  // namespace uds::io
