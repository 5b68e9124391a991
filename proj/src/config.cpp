#include "ssloc/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace ssloc {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> keys,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : keys)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw validation_error("config: unknown key '" + it.key() + "' in " + where);
    }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void get_angle_deg(const json& j, const char* key, double& out_rad) {
    if (j.contains(key)) out_rad = deg_to_rad(j.at(key).get<double>());
}

void parse_room(const json& j, RoomConfig& room) {
    reject_unknown(j,
                   {"dimensions_m", "wall_reflection", "floor_reflection",
                    "ceiling_reflection", "sound_speed_mps", "max_image_order"},
                   "room");
    if (j.contains("dimensions_m")) {
        auto v = j.at("dimensions_m").get<std::vector<double>>();
        if (v.size() != 3) throw validation_error("config: room.dimensions_m needs 3 values");
        room.dimensions_m = {v[0], v[1], v[2]};
    }
    get_if(j, "wall_reflection", room.wall_reflection);
    get_if(j, "floor_reflection", room.floor_reflection);
    get_if(j, "ceiling_reflection", room.ceiling_reflection);
    get_if(j, "sound_speed_mps", room.sound_speed_mps);
    get_if(j, "max_image_order", room.max_image_order);
}

void parse_array(const json& j, ExperimentSpec& spec) {
    reject_unknown(j,
                   {"baseline_m", "omega_rad_per_s", "itd_cadence_deg", "revolutions",
                    "translation_step_m", "translation_steps", "translation_step_period_s"},
                   "array");
    get_if(j, "baseline_m", spec.baseline_m);
    get_if(j, "omega_rad_per_s", spec.schedule.omega_rad_s);
    if (j.contains("itd_cadence_deg"))
        spec.schedule.cadence_rad = deg_to_rad(j.at("itd_cadence_deg").get<double>());
    get_if(j, "revolutions", spec.schedule.revolutions);
    get_if(j, "translation_step_m", spec.translation.step_m);
    get_if(j, "translation_steps", spec.translation.steps);
    get_if(j, "translation_step_period_s", spec.translation.step_period_s);
}

void parse_signal(const json& j, ExperimentSpec& spec) {
    reject_unknown(j,
                   {"sample_rate_hz", "source", "source_file", "tone_hz",
                    "sensor_noise_sigma", "sinc_interpolation", "ideal_noise_sigma_m",
                    "distance_noise_sigma_m"},
                   "signal");
    get_if(j, "sample_rate_hz", spec.signal.sample_rate_hz);
    if (j.contains("source")) {
        const std::string s = j.at("source").get<std::string>();
        if (s == "white_noise")
            spec.signal.source_kind = SourceKind::white_noise;
        else if (s == "tone")
            spec.signal.source_kind = SourceKind::tone;
        else if (s == "speech_file")
            spec.signal.source_kind = SourceKind::speech_file;
        else
            throw validation_error("config: signal.source must be white_noise, tone, or "
                                   "speech_file");
    }
    get_if(j, "source_file", spec.signal.source_file);
    get_if(j, "tone_hz", spec.signal.tone_hz);
    get_if(j, "sensor_noise_sigma", spec.signal.sensor_noise_sigma);
    get_if(j, "sinc_interpolation", spec.signal.sinc_interpolation);
    get_if(j, "ideal_noise_sigma_m", spec.ideal_noise_sigma_m);
    get_if(j, "distance_noise_sigma_m", spec.distance_noise_sigma_m);
}

void parse_gcc(const json& j, GccConfig& gcc) {
    reject_unknown(j, {"weighting", "max_lag_s", "parabolic", "energy_floor_rms"}, "gcc");
    if (j.contains("weighting")) {
        const std::string w = j.at("weighting").get<std::string>();
        if (w == "none")
            gcc.weighting = GccWeighting::none;
        else if (w == "phat")
            gcc.weighting = GccWeighting::phat;
        else
            throw validation_error("config: gcc.weighting must be none or phat");
    }
    get_if(j, "max_lag_s", gcc.max_lag_s);
    get_if(j, "parabolic", gcc.parabolic);
    get_if(j, "energy_floor_rms", gcc.energy_floor_rms);
}

void parse_ekf_block(const json& j, const char* where, EkfConfig& cfg, bool distance) {
    reject_unknown(j,
                   {"process_sigma", "sensor_sigma", "substeps", "init_azimuth_deg",
                    "init_elevation_deg", "init_angle_sigma_deg", "init_distance_m",
                    "init_distance_sigma_m"},
                   where);
    if (j.contains("process_sigma")) {
        const double s = j.at("process_sigma").get<double>();
        cfg.process_sigma.setConstant(s);
    }
    get_if(j, "sensor_sigma", cfg.sensor_sigma);
    get_if(j, "substeps", cfg.substeps);
    if (distance) {
        if (j.contains("init_distance_m"))
            cfg.initial_state(0) = j.at("init_distance_m").get<double>();
        if (j.contains("init_distance_sigma_m")) {
            const double s = j.at("init_distance_sigma_m").get<double>();
            cfg.initial_covariance(0, 0) = s * s;
        }
    } else {
        if (j.contains("init_elevation_deg") && cfg.initial_state.size() == 2)
            cfg.initial_state(0) = deg_to_rad(j.at("init_elevation_deg").get<double>());
        if (j.contains("init_azimuth_deg"))
            cfg.initial_state(cfg.initial_state.size() - 1) =
                deg_to_rad(j.at("init_azimuth_deg").get<double>());
        if (j.contains("init_angle_sigma_deg")) {
            const double s = deg_to_rad(j.at("init_angle_sigma_deg").get<double>());
            cfg.initial_covariance.setIdentity();
            cfg.initial_covariance *= s * s;
        }
    }
}

void parse_thresholds(const json& j, Thresholds& t) {
    reject_unknown(j, {"d_threshold_m", "rmse_threshold_deg", "reference_baseline_m"},
                   "thresholds");
    get_if(j, "d_threshold_m", t.d_threshold_m);
    get_if(j, "rmse_threshold_deg", t.rmse_threshold_deg);
    get_if(j, "reference_baseline_m", t.reference_baseline_m);
}

void parse_source(const json& j, SourceTruth& s) {
    reject_unknown(j, {"distance_m", "azimuth_deg", "elevation_deg"}, "source");
    get_if(j, "distance_m", s.distance_m);
    get_angle_deg(j, "azimuth_deg", s.azimuth_rad);
    get_angle_deg(j, "elevation_deg", s.elevation_rad);
}

}  // namespace

void RunConfig::validate() const {
    spec.validate();
    source.validate();
    if (workers < 0) throw validation_error("config: workers must be >= 0");
    if (output_dir.empty()) throw validation_error("config: output_dir must not be empty");
}

RunConfig default_run_config() { return RunConfig{}; }

RunConfig parse_run_config(const std::string& json_text, const std::string& path) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw validation_error("config: cannot parse " + path + ": " + e.what());
    }

    RunConfig cfg;
    reject_unknown(j,
                   {"room", "array", "signal", "gcc", "ekf", "thresholds", "source", "mode",
                    "seed", "output_dir", "calibration_file", "workers",
                    "distance_frame_samples", "convergence_gate_deg"},
                   "top level");
    if (j.contains("room")) parse_room(j.at("room"), cfg.spec.room);
    if (j.contains("array")) parse_array(j.at("array"), cfg.spec);
    if (j.contains("signal")) parse_signal(j.at("signal"), cfg.spec);
    if (j.contains("gcc")) parse_gcc(j.at("gcc"), cfg.spec.gcc);
    if (j.contains("ekf")) {
        const json& e = j.at("ekf");
        reject_unknown(e, {"orientation", "distance"}, "ekf");
        if (e.contains("orientation")) {
            parse_ekf_block(e.at("orientation"), "ekf.orientation", cfg.spec.ekf_2d, false);
            parse_ekf_block(e.at("orientation"), "ekf.orientation", cfg.spec.ekf_3d, false);
        }
        if (e.contains("distance"))
            parse_ekf_block(e.at("distance"), "ekf.distance", cfg.spec.ekf_distance, true);
    }
    if (j.contains("thresholds")) parse_thresholds(j.at("thresholds"), cfg.spec.thresholds);
    if (j.contains("source")) parse_source(j.at("source"), cfg.source);
    if (j.contains("mode")) {
        const std::string m = j.at("mode").get<std::string>();
        if (m == "ideal_itd")
            cfg.spec.mode = RunMode::ideal_itd;
        else if (m == "audio")
            cfg.spec.mode = RunMode::audio;
        else
            throw validation_error("config: mode must be ideal_itd or audio");
    }
    if (j.contains("seed")) cfg.spec.seed = j.at("seed").get<std::uint64_t>();
    get_if(j, "output_dir", cfg.output_dir);
    get_if(j, "calibration_file", cfg.calibration_file);
    get_if(j, "workers", cfg.workers);
    get_if(j, "distance_frame_samples", cfg.spec.distance_frame_samples);
    get_if(j, "convergence_gate_deg", cfg.spec.convergence_gate_deg);

    // the lag window follows the baseline unless set explicitly
    if (!j.contains("gcc") || !j.at("gcc").contains("max_lag_s"))
        cfg.spec.gcc.max_lag_s = 1.25 * cfg.spec.baseline_m / cfg.spec.room.sound_speed_mps;

    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw validation_error("config: cannot open " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return parse_run_config(os.str(), path);
}

std::string dump_run_config(const RunConfig& cfg) {
    json j;
    j["room"] = {{"dimensions_m", cfg.spec.room.dimensions_m},
                 {"wall_reflection", cfg.spec.room.wall_reflection},
                 {"floor_reflection", cfg.spec.room.floor_reflection},
                 {"ceiling_reflection", cfg.spec.room.ceiling_reflection},
                 {"sound_speed_mps", cfg.spec.room.sound_speed_mps},
                 {"max_image_order", cfg.spec.room.max_image_order}};
    j["array"] = {{"baseline_m", cfg.spec.baseline_m},
                  {"omega_rad_per_s", cfg.spec.schedule.omega_rad_s},
                  {"itd_cadence_deg", rad_to_deg(cfg.spec.schedule.cadence_rad)},
                  {"revolutions", cfg.spec.schedule.revolutions},
                  {"translation_step_m", cfg.spec.translation.step_m},
                  {"translation_steps", cfg.spec.translation.steps},
                  {"translation_step_period_s", cfg.spec.translation.step_period_s}};
    const char* kind = cfg.spec.signal.source_kind == SourceKind::white_noise ? "white_noise"
                       : cfg.spec.signal.source_kind == SourceKind::tone     ? "tone"
                                                                             : "speech_file";
    j["signal"] = {{"sample_rate_hz", cfg.spec.signal.sample_rate_hz},
                   {"source", kind},
                   {"source_file", cfg.spec.signal.source_file},
                   {"tone_hz", cfg.spec.signal.tone_hz},
                   {"sensor_noise_sigma", cfg.spec.signal.sensor_noise_sigma},
                   {"sinc_interpolation", cfg.spec.signal.sinc_interpolation},
                   {"ideal_noise_sigma_m", cfg.spec.ideal_noise_sigma_m},
                   {"distance_noise_sigma_m", cfg.spec.distance_noise_sigma_m}};
    j["gcc"] = {{"weighting", cfg.spec.gcc.weighting == GccWeighting::phat ? "phat" : "none"},
                {"max_lag_s", cfg.spec.gcc.max_lag_s},
                {"parabolic", cfg.spec.gcc.parabolic},
                {"energy_floor_rms", cfg.spec.gcc.energy_floor_rms}};
    j["ekf"] = {
        {"orientation",
         {{"process_sigma", cfg.spec.ekf_3d.process_sigma(0)},
          {"sensor_sigma", cfg.spec.ekf_3d.sensor_sigma},
          {"substeps", cfg.spec.ekf_3d.substeps},
          {"init_azimuth_deg", rad_to_deg(cfg.spec.ekf_3d.initial_state(1))},
          {"init_elevation_deg", rad_to_deg(cfg.spec.ekf_3d.initial_state(0))},
          {"init_angle_sigma_deg",
           rad_to_deg(std::sqrt(cfg.spec.ekf_3d.initial_covariance(0, 0)))}}},
        {"distance",
         {{"process_sigma", cfg.spec.ekf_distance.process_sigma(0)},
          {"sensor_sigma", cfg.spec.ekf_distance.sensor_sigma},
          {"substeps", cfg.spec.ekf_distance.substeps},
          {"init_distance_m", cfg.spec.ekf_distance.initial_state(0)},
          {"init_distance_sigma_m",
           std::sqrt(cfg.spec.ekf_distance.initial_covariance(0, 0))}}}};
    j["thresholds"] = {{"d_threshold_m", cfg.spec.thresholds.d_threshold_m},
                       {"rmse_threshold_deg", cfg.spec.thresholds.rmse_threshold_deg},
                       {"reference_baseline_m", cfg.spec.thresholds.reference_baseline_m}};
    j["source"] = {{"distance_m", cfg.source.distance_m},
                   {"azimuth_deg", rad_to_deg(cfg.source.azimuth_rad)},
                   {"elevation_deg", rad_to_deg(cfg.source.elevation_rad)}};
    j["mode"] = cfg.spec.mode == RunMode::audio ? "audio" : "ideal_itd";
    j["seed"] = cfg.spec.seed;
    j["output_dir"] = cfg.output_dir;
    j["calibration_file"] = cfg.calibration_file;
    j["workers"] = cfg.workers;
    j["distance_frame_samples"] = cfg.spec.distance_frame_samples;
    j["convergence_gate_deg"] = cfg.spec.convergence_gate_deg;
    return j.dump(2);
}

std::string config_hash(const RunConfig& cfg) {
    const std::string dump = dump_run_config(cfg);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

void write_manifest(const std::string& path, const RunConfig& cfg,
                    const std::string& command) {
    json j;
    j["command"] = command;
    j["config_hash"] = config_hash(cfg);
    j["seed"] = cfg.spec.seed;
    j["config"] = json::parse(dump_run_config(cfg));
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write manifest: " + path);
    f << j.dump(2) << "\n";
}

void write_series_csv(const std::string& path, const ItdSeries& series) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write series CSV: " + path);
    f.precision(17);
    f << "# kind " << (series.kind == SeriesKind::orientation ? "orientation" : "distance")
      << "\n";
    f << "# omega_rad_per_s " << series.omega_rad_s << "\n";
    f << "# sample_period_s " << series.sample_period_s << "\n";
    f << "# baseline_m " << series.baseline_m << "\n";
    f << "beta_deg,offset_m,d_measured_m\n";
    for (const auto& s : series.samples)
        f << rad_to_deg(s.beta_rad) << ',' << s.offset_m << ',' << s.d_measured_m << "\n";
}

ItdSeries read_series_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw validation_error("cannot open series file: " + path);
    ItdSeries series;
    std::string line;
    bool header_seen = false;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream is(line.substr(1));
            std::string key;
            is >> key;
            if (key == "kind") {
                std::string kind;
                is >> kind;
                if (kind == "orientation")
                    series.kind = SeriesKind::orientation;
                else if (kind == "distance")
                    series.kind = SeriesKind::distance;
                else
                    throw validation_error("series file: unknown kind '" + kind + "'");
            } else if (key == "omega_rad_per_s") {
                is >> series.omega_rad_s;
            } else if (key == "sample_period_s") {
                is >> series.sample_period_s;
            } else if (key == "baseline_m") {
                is >> series.baseline_m;
            } else {
                throw validation_error("series file: unknown metadata '" + key + "'");
            }
            continue;
        }
        if (!header_seen) {
            if (line != "beta_deg,offset_m,d_measured_m")
                throw validation_error("series file: unexpected header in " + path);
            header_seen = true;
            continue;
        }
        std::istringstream is(line);
        double beta_deg, offset, d;
        char c1, c2;
        if (!(is >> beta_deg >> c1 >> offset >> c2 >> d) || c1 != ',' || c2 != ',')
            throw validation_error("series file: malformed row in " + path);
        series.samples.push_back({deg_to_rad(beta_deg), offset, d});
    }
    series.validate();
    return series;
}

}  // namespace ssloc
