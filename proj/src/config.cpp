#include "mlog/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mlog {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw std::runtime_error("config: " + path + ": " + what);
}

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) field_error(path_, "expected an object");
  }

  template <typename T>
  void get(const char* key, T* out) {
    known_.push_back(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      *out = it->get<T>();
    } catch (const json::exception&) {
      field_error(path_ + "." + key, "wrong type");
    }
  }

  void get_angle_deg(const char* key, double* out_rad) {
    double deg = rad2deg(*out_rad);
    get(key, &deg);
    *out_rad = deg2rad(deg);
  }

  bool has_object(const char* key) {
    known_.push_back(key);
    return j_.contains(key) && j_[key].is_object();
  }
  const json& object(const char* key) const { return j_.at(key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool ok = false;
      for (const auto& k : known_)
        if (it.key() == k) {
          ok = true;
          break;
        }
      if (!ok) field_error(path_ + "." + it.key(), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string> known_;
};

void parse_pipeline(const json& j, PipelineConfig* cfg) {
  Reader r(j, "pipeline");
  r.get("ransac_width_d", &cfg->ransac_width_d);
  r.get("ransac_min_inliers_t", &cfg->ransac_min_inliers_t);
  r.get("kde_bandwidth_b", &cfg->kde_bandwidth_b);
  r.get("cluster_threshold_fraction", &cfg->cluster_threshold_fraction);
  r.get("energy_ratio_eps_e", &cfg->energy_ratio_eps_e);
  r.get("speed_factor_eps_s", &cfg->speed_factor_eps_s);
  r.get("ransac_iterations", &cfg->ransac_iterations);
  r.get("ransac_early_exit_ratio", &cfg->ransac_early_exit_ratio);
  std::string mode = cfg->drift_mode == DriftMode::Shift ? "shift" : "homography";
  r.get("drift_mode", &mode);
  if (mode == "shift")
    cfg->drift_mode = DriftMode::Shift;
  else if (mode == "homography")
    cfg->drift_mode = DriftMode::Homography;
  else
    field_error("pipeline.drift_mode", "must be 'shift' or 'homography'");
  r.get("fit_slopes_on_clusters", &cfg->fit_slopes_on_clusters);
  r.get("consecutive_drop_limit", &cfg->consecutive_drop_limit);
  r.get("nominal_height", &cfg->nominal_height);
  r.get("min_height", &cfg->min_height);
  r.get("max_height", &cfg->max_height);
  r.finish();
  if (!cfg->valid()) field_error("pipeline", "invalid values (check positivity and eps_s >= 3)");
}

void parse_camera(const json& j, CameraModel* cam) {
  Reader r(j, "camera");
  r.get("f", &cam->f);
  bool cx_set = j.contains("cx"), cy_set = j.contains("cy");
  r.get("width", &cam->width);
  r.get("height", &cam->height);
  if (!cx_set) cam->cx = cam->width / 2.0;
  if (!cy_set) cam->cy = cam->height / 2.0;
  r.get("cx", &cam->cx);
  r.get("cy", &cam->cy);
  r.get("eps_alpha", &cam->eps_alpha);
  r.get("eps_beta", &cam->eps_beta);
  r.get("eps_c_alpha", &cam->eps_c_alpha);
  r.get("eps_c_beta", &cam->eps_c_beta);
  r.finish();
  if (!cam->valid()) field_error("camera", "invalid values");
}

void parse_grid(const json& j, GridSpec* grid) {
  Reader r(j, "grid");
  r.get("m_x", &grid->m_x);
  r.get("m_y", &grid->m_y);
  r.finish();
  if (!grid->valid()) field_error("grid", "cell sizes must be > 0");
}

void parse_noise(const json& j, NoiseSpec* n) {
  Reader r(j, "simulation.noise");
  r.get("sigma_rho", &n->sigma_rho);
  r.get("sigma_theta", &n->sigma_theta);
  r.get("duplicates_min", &n->duplicates_min);
  r.get("duplicates_max", &n->duplicates_max);
  r.get("outliers_min", &n->outliers_min);
  r.get("outliers_max", &n->outliers_max);
  r.finish();
}

void parse_trajectory(const json& j, TrajectoryOptions* t) {
  Reader r(j, "simulation.trajectory");
  r.get("speed", &t->speed);
  r.get_angle_deg("max_tilt_deg", &t->max_tilt);
  r.get_angle_deg("spike_tilt_deg", &t->spike_tilt);
  r.get("spike_prob", &t->spike_prob);
  r.get("start_height", &t->start_height);
  r.get("height_amplitude", &t->height_amplitude);
  r.get("height_period", &t->height_period);
  r.get_angle_deg("yaw_amplitude_deg", &t->yaw_amplitude);
  r.get("force_overspeed", &t->force_overspeed);
  r.get("eps_s", &t->eps_s);
  r.finish();
}

void parse_simulation(const json& j, SimulationConfig* sim) {
  Reader r(j, "simulation");
  r.get("fps", &sim->fps);
  r.get("seed", &sim->seed);
  r.get("arena", &sim->arena);
  r.get("target_length", &sim->target_length);
  r.get("auto_calibrate", &sim->auto_calibrate);
  if (r.has_object("noise")) parse_noise(r.object("noise"), &sim->noise);
  if (r.has_object("trajectory")) parse_trajectory(r.object("trajectory"), &sim->trajectory);
  if (r.has_object("mount")) {
    Reader rm(r.object("mount"), "simulation.mount");
    rm.get_angle_deg("toward_x_deg", &sim->mount.toward_x);
    rm.get_angle_deg("toward_y_deg", &sim->mount.toward_y);
    rm.finish();
  }
  std::vector<std::vector<double>> wps;
  r.get("waypoints", &wps);
  if (!wps.empty()) {
    sim->waypoints.clear();
    for (const auto& w : wps) {
      if (w.size() != 2) field_error("simulation.waypoints", "each waypoint is [x, y]");
      sim->waypoints.push_back({w[0], w[1]});
    }
  }
  r.finish();
}

} // namespace

Config parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config: top level must be an object");

  Config cfg;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "pipeline")
      parse_pipeline(it.value(), &cfg.pipeline);
    else if (it.key() == "camera")
      parse_camera(it.value(), &cfg.camera);
    else if (it.key() == "grid")
      parse_grid(it.value(), &cfg.grid);
    else if (it.key() == "simulation")
      parse_simulation(it.value(), &cfg.simulation);
    else
      field_error(it.key(), "unknown section");
  }
  // The trajectory reuses the top-level fps/seed.
  cfg.simulation.trajectory.fps = cfg.simulation.fps;
  cfg.simulation.trajectory.seed = cfg.simulation.seed;
  cfg.simulation.noise.seed = cfg.simulation.seed;
  return cfg;
}

Config load_config(const std::string& path) {
  if (path.empty()) return Config{};
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const Config& cfg) {
  nlohmann::ordered_json j;
  auto& p = j["pipeline"];
  p["ransac_width_d"] = cfg.pipeline.ransac_width_d;
  p["ransac_min_inliers_t"] = cfg.pipeline.ransac_min_inliers_t;
  p["kde_bandwidth_b"] = cfg.pipeline.kde_bandwidth_b;
  p["cluster_threshold_fraction"] = cfg.pipeline.cluster_threshold_fraction;
  p["energy_ratio_eps_e"] = cfg.pipeline.energy_ratio_eps_e;
  p["speed_factor_eps_s"] = cfg.pipeline.speed_factor_eps_s;
  p["ransac_iterations"] = cfg.pipeline.ransac_iterations;
  p["ransac_early_exit_ratio"] = cfg.pipeline.ransac_early_exit_ratio;
  p["drift_mode"] = cfg.pipeline.drift_mode == DriftMode::Shift ? "shift" : "homography";
  p["fit_slopes_on_clusters"] = cfg.pipeline.fit_slopes_on_clusters;
  p["consecutive_drop_limit"] = cfg.pipeline.consecutive_drop_limit;
  p["nominal_height"] = cfg.pipeline.nominal_height;
  p["min_height"] = cfg.pipeline.min_height;
  p["max_height"] = cfg.pipeline.max_height;
  auto& c = j["camera"];
  c["f"] = cfg.camera.f;
  c["width"] = cfg.camera.width;
  c["height"] = cfg.camera.height;
  c["cx"] = cfg.camera.cx;
  c["cy"] = cfg.camera.cy;
  c["eps_alpha"] = cfg.camera.eps_alpha;
  c["eps_beta"] = cfg.camera.eps_beta;
  c["eps_c_alpha"] = cfg.camera.eps_c_alpha;
  c["eps_c_beta"] = cfg.camera.eps_c_beta;
  auto& g = j["grid"];
  g["m_x"] = cfg.grid.m_x;
  g["m_y"] = cfg.grid.m_y;
  auto& s = j["simulation"];
  s["fps"] = cfg.simulation.fps;
  s["seed"] = cfg.simulation.seed;
  s["arena"] = cfg.simulation.arena;
  s["target_length"] = cfg.simulation.target_length;
  s["auto_calibrate"] = cfg.simulation.auto_calibrate;
  auto& n = s["noise"];
  n["sigma_rho"] = cfg.simulation.noise.sigma_rho;
  n["sigma_theta"] = cfg.simulation.noise.sigma_theta;
  n["duplicates_min"] = cfg.simulation.noise.duplicates_min;
  n["duplicates_max"] = cfg.simulation.noise.duplicates_max;
  n["outliers_min"] = cfg.simulation.noise.outliers_min;
  n["outliers_max"] = cfg.simulation.noise.outliers_max;
  auto& m = s["mount"];
  m["toward_x_deg"] = rad2deg(cfg.simulation.mount.toward_x);
  m["toward_y_deg"] = rad2deg(cfg.simulation.mount.toward_y);
  auto& t = s["trajectory"];
  t["speed"] = cfg.simulation.trajectory.speed;
  t["max_tilt_deg"] = rad2deg(cfg.simulation.trajectory.max_tilt);
  t["spike_tilt_deg"] = rad2deg(cfg.simulation.trajectory.spike_tilt);
  t["spike_prob"] = cfg.simulation.trajectory.spike_prob;
  t["start_height"] = cfg.simulation.trajectory.start_height;
  t["height_amplitude"] = cfg.simulation.trajectory.height_amplitude;
  t["height_period"] = cfg.simulation.trajectory.height_period;
  t["yaw_amplitude_deg"] = rad2deg(cfg.simulation.trajectory.yaw_amplitude);
  t["force_overspeed"] = cfg.simulation.trajectory.force_overspeed;
  t["eps_s"] = cfg.simulation.trajectory.eps_s;
  if (!cfg.simulation.waypoints.empty()) {
    auto wp = nlohmann::ordered_json::array();
    for (const auto& w : cfg.simulation.waypoints) wp.push_back({w[0], w[1]});
    s["waypoints"] = std::move(wp);
  }
  return j.dump(2);
}

Config preset_config(const std::string& name) {
  Config cfg;
  cfg.simulation.seed = 42;
  cfg.simulation.fps = 30.0;

  auto noisy = [&](double length) {
    cfg.simulation.target_length = length;
    cfg.simulation.noise.sigma_rho = 2.0;
    cfg.simulation.noise.sigma_theta = 0.01;
    cfg.simulation.noise.duplicates_min = 2;
    cfg.simulation.noise.duplicates_max = 4;
    cfg.simulation.noise.outliers_min = 3;
    cfg.simulation.noise.outliers_max = 7;
    cfg.simulation.trajectory.speed = 2.5;
    cfg.simulation.trajectory.max_tilt = deg2rad(8.0);
    cfg.simulation.trajectory.spike_prob = 0.002;
    cfg.simulation.trajectory.start_height = 2.2;
    cfg.simulation.trajectory.height_amplitude = 0.15;
    cfg.pipeline.ransac_min_inliers_t = 4;
  };

  if (name == "paper-trial-1") {
    noisy(264.60);
  } else if (name == "paper-trial-2") {
    noisy(639.34);
  } else if (name == "paper-trial-3") {
    noisy(1020.73);
  } else if (name == "noiseless-500") {
    // 500 frames of clean input at modest attitude excursions.
    cfg.simulation.target_length = 16.7;
    cfg.simulation.trajectory.speed = 1.0;
    cfg.simulation.trajectory.max_tilt = deg2rad(0.5);
    cfg.simulation.trajectory.start_height = 2.0;
    cfg.simulation.trajectory.height_amplitude = 0.1;
    cfg.pipeline.ransac_min_inliers_t = 2;
  } else if (name == "noiseless-1020") {
    cfg.simulation.target_length = 1020.73;
    cfg.simulation.trajectory.speed = 2.5;
    cfg.simulation.trajectory.max_tilt = deg2rad(0.5);
    cfg.simulation.trajectory.start_height = 2.0;
    cfg.simulation.trajectory.height_amplitude = 0.1;
    cfg.pipeline.ransac_min_inliers_t = 2;
  } else if (name == "overspeed") {
    // Speed factor 2: one cell in two frames; documents the WTA failure.
    noisy(200.0);
    cfg.simulation.trajectory.eps_s = 2;
    cfg.simulation.trajectory.speed = 15.0;
    cfg.simulation.trajectory.force_overspeed = true;
  } else {
    throw std::runtime_error("unknown preset '" + name + "'");
  }
  cfg.simulation.trajectory.fps = cfg.simulation.fps;
  cfg.simulation.trajectory.seed = cfg.simulation.seed;
  cfg.simulation.noise.seed = cfg.simulation.seed;
  return cfg;
}

std::vector<std::string> preset_names() {
  return {"paper-trial-1", "paper-trial-2", "paper-trial-3",
          "noiseless-500", "noiseless-1020", "overspeed"};
}

} // namespace mlog
