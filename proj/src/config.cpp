#include "vic/config.hpp"

#include <cstdio>
#include <set>

#include <json.hpp>

#include "vic/demo_io.hpp"
#include "vic/errors.hpp"

namespace vic {

namespace {

using nlohmann::json;

// Reads keys from one JSON object and rejects any key nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    known_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  const json* sub(const char* key) {
    known_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!known_.count(k)) throw ConfigError(path_ + ": unknown key '" + k + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

// A per-axis quantity: a scalar for every axis or an [x, y, z] triple.
void get_axes(Section& s, const char* key, const std::vector<std::string>& axes, TaskVec& out) {
  const json* j = s.sub(key);
  if (!j) return;
  try {
    if (j->is_number()) {
      out = TaskVec::Constant(static_cast<Eigen::Index>(axes.size()), j->get<double>());
    } else {
      const auto v = j->get<std::vector<double>>();
      if (v.size() != 3) throw ConfigError(s.where(key) + ": expected a number or [x, y, z]");
      out = project_axes({v[0], v[1], v[2]}, axes);
    }
  } catch (const json::exception& e) {
    throw ConfigError(s.where(key) + ": " + e.what());
  }
}

Point3 get_point(Section& s, const char* key, Point3 fallback) {
  std::vector<double> v;
  s.get(key, v);
  if (v.empty()) return fallback;
  if (v.size() != 3) throw ConfigError(s.where(key) + ": expected [x, y, z]");
  return {v[0], v[1], v[2]};
}

json read_json_file(const std::filesystem::path& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const IoError& e) {
    throw ConfigError(std::string("referenced file missing: ") + e.what());
  }
}

// Inline object or the name of a JSON file relative to base_dir.
json resolve_include(const json& j, const std::filesystem::path& base_dir) {
  if (j.is_string()) {
    std::filesystem::path p = j.get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    return read_json_file(p);
  }
  return j;
}

void read_robot(const json& j, RobotModel& robot) {
  Section s(j, "robot");
  double base_inertia = robot.n_b ? robot.base_inertia(0) : 0.0;
  double base_damping = robot.n_b ? robot.base_damping(0) : 0.0;
  s.get("base_inertia", base_inertia);
  s.get("base_damping", base_damping);
  s.get("mount_height", robot.mount_height);
  s.get("gravity", robot.gravity);
  if (robot.n_b) {
    robot.base_inertia(0) = base_inertia;
    robot.base_damping(0) = base_damping;
  }
  if (const json* links = s.sub("links")) {
    if (!links->is_array()) throw ConfigError("robot.links: expected an array");
    robot.links.clear();
    for (std::size_t i = 0; i < links->size(); ++i) {
      Section ls((*links)[i], "robot.links[" + std::to_string(i) + "]");
      Link l;
      ls.get("length", l.length);
      ls.get("mass", l.mass);
      ls.get("inertia", l.inertia);
      ls.get("com_fraction", l.com_fraction);
      ls.finish();
      robot.links.push_back(l);
    }
  }
  if (robot.kind == PlantKind::Point3D) get_axes(s, "point_inertia", {"x", "y", "z"}, robot.point_inertia);
  s.finish();
}

void read_mode_gains(const json& j, const std::string& path, const RobotModel& robot, ModeGains& g) {
  Section s(j, path);
  const int nb = robot.n_b, n = robot.dof();
  double h_base = nb ? g.H(0) : 0.0, h_arm = g.H(n - 1), k0 = g.K0(0), d0 = g.D0(0);
  s.get("H_base", h_base);
  s.get("H_arm", h_arm);
  s.get("K0", k0);
  s.get("D0", d0);
  s.finish();
  g.H = Vec::Constant(n, h_arm);
  g.H.head(nb).setConstant(h_base);
  g.K0 = Vec::Constant(n, k0);
  g.D0 = Vec::Constant(n, d0);
}

void read_table(const json& j, TableModel& t) {
  Section s(j, "table");
  s.get("height", t.height);
  s.get("stiffness", t.stiffness);
  s.get("damping", t.damping);
  s.get("friction", t.friction);
  s.get("viscous", t.viscous);
  s.finish();
}

MotionMode mode_from_string(const std::string& name, const std::string& where) {
  if (name == "locomotion") return MotionMode::Locomotion;
  if (name == "manipulation") return MotionMode::Manipulation;
  throw ConfigError(where + ": unknown mode '" + name + "'");
}

TeacherScript read_script(const json& j) {
  Section s(j, "script");
  if (const json* pat = s.sub("pattern")) {
    Section ps(*pat, "script.pattern");
    CleaningPattern p;
    double table_height = 0.0;
    ps.get("strokes", p.strokes);
    p.start = get_point(ps, "start", p.start);
    ps.get("stroke_length", p.stroke_length);
    ps.get("tool_width", p.tool_width);
    ps.get("hover", p.hover);
    ps.get("clearance", p.clearance);
    ps.get("force", p.force);
    ps.get("stroke_speed", p.stroke_speed);
    ps.get("return_speed", p.return_speed);
    ps.get("approach_speed", p.approach_speed);
    ps.get("table_height", table_height);
    ps.finish();
    s.finish();
    return TeacherScript::cleaning(p, table_height);
  }
  TeacherScript script;
  script.start = get_point(s, "start", script.start);
  const json* phases = s.sub("phases");
  s.finish();
  if (!phases || !phases->is_array()) throw ConfigError("script: needs either 'pattern' or a 'phases' array");
  for (std::size_t i = 0; i < phases->size(); ++i) {
    const std::string path = "script.phases[" + std::to_string(i) + "]";
    Section ps((*phases)[i], path);
    TeacherPhase p;
    std::string mode = "manipulation", level = "high";
    std::vector<bool> active;
    ps.get("name", p.name);
    ps.get("mode", mode);
    ps.get("admittance", level);
    ps.get("active", active);
    p.target = get_point(ps, "target", p.target);
    ps.get("force", p.force);
    ps.get("speed", p.speed);
    ps.get("max_duration", p.max_duration);
    ps.get("settle", p.settle);
    ps.finish();
    p.mode = mode_from_string(mode, path);
    try {
      p.level = admittance_level_from_string(level);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ": " + e.what());
    }
    if (!active.empty()) {
      if (active.size() != 3) throw ConfigError(path + ".active: expected [x, y, z]");
      p.active = {active[0], active[1], active[2]};
    }
    script.phases.push_back(p);
  }
  return script;
}

DisturbanceSettings read_disturbances(const json& j, DisturbanceSettings settings) {
  Section s(j, "disturbances");
  for (auto& tpl : settings.templates) {
    const std::string name = to_string(tpl.event.type);
    const json* e = s.sub(name.c_str());
    if (!e) continue;
    Section es(*e, "disturbances." + name);
    int stroke = 0, free = 0;
    es.get("stroke", stroke);
    es.get("free", free);
    if (stroke != 0 && free != 0) throw ConfigError(es.where("stroke") + ": give either 'stroke' or 'free'");
    if (stroke != 0) {
      tpl.in_contact = true;
      tpl.index = stroke;
    } else if (free != 0) {
      tpl.in_contact = false;
      tpl.index = free;
    }
    es.get("delay", tpl.delay);
    es.get("amplitude", tpl.event.amplitude);
    es.get("velocity", tpl.event.velocity);
    es.get("frequency", tpl.event.frequency);
    es.get("cycles", tpl.event.cycles);
    es.get("duration", tpl.event.duration);
    es.get("peak", tpl.event.peak);
    es.get("axis", tpl.event.axis);
    es.finish();
  }
  s.finish();
  return settings;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

EpisodeSetup ExperimentConfig::episode_setup() const {
  EpisodeSetup s{robot, gains, cond_max, vic, sim};
  s.sim.table = table;
  return s;
}

void ExperimentConfig::validate() const {
  robot.validate();
  vic.validate();
  if (vic.envelope.dim() != robot.task_dim()) throw ConfigError("stiffness envelope does not match the plant");
  table.validate();
  script.validate();
  teacher.validate();
  sim.validate();
  if (demos < 2) throw ConfigError("at least two demonstrations are needed for training");
  if (components < 1) throw ConfigError("gmm.K must be >= 1");
  if (em.max_iters < 1 || !(em.tol > 0.0) || !(em.reg_floor > 0.0)) throw ConfigError("invalid EM settings");
  if (log_every < 1) throw ConfigError("sim.log_every must be >= 1");
  if (!(cond_max > 1.0)) throw ConfigError("controller.cond_max must exceed 1");
  if (compare_disturbance != "none") {
    bool known = compare_disturbance == "all";
    for (const auto t : all_disturbance_types()) known = known || compare_disturbance == to_string(t);
    if (!known) throw ConfigError("compare.disturbance: unknown scenario '" + compare_disturbance + "'");
  }
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.hash = fnv1a_hex("{}");
  return c;
}

ExperimentConfig config_from_json(const std::string& text, const std::filesystem::path& base_dir,
                                  const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
  ExperimentConfig c;
  json resolved = root;
  try {
    Section s(root, "config");
    std::string plant = "planar-xz";
    s.get("plant", plant);
    c.robot = plant_kind_from_string(plant) == PlantKind::PlanarXZ ? RobotModel::planar_xz() : RobotModel::point_3d();
    if (const json* j = s.sub("robot")) read_robot(*j, c.robot);
    c.robot.validate();
    const auto axes = c.robot.axes();
    const int m = c.robot.task_dim();

    c.gains = WholeBodyGains::defaults(c.robot);
    if (const json* j = s.sub("controller")) {
      Section cs(*j, "controller");
      cs.get("cond_max", c.cond_max);
      if (const json* g = cs.sub("locomotion")) read_mode_gains(*g, "controller.locomotion", c.robot, c.gains.locomotion);
      if (const json* g = cs.sub("manipulation"))
        read_mode_gains(*g, "controller.manipulation", c.robot, c.gains.manipulation);
      cs.finish();
    }

    c.vic = VicConfig::defaults(m);
    if (const json* j = s.sub("stiffness")) {
      Section ss(*j, "stiffness");
      get_axes(ss, "k_min", axes, c.vic.envelope.k_min);
      get_axes(ss, "k_max", axes, c.vic.envelope.k_max);
      get_axes(ss, "f_max", axes, c.vic.envelope.f_max);
      get_axes(ss, "Q", axes, c.vic.weights.Q);
      get_axes(ss, "R", axes, c.vic.weights.R);
      ss.get("use_coriolis", c.vic.use_coriolis);
      ss.finish();
    }
    if (const json* j = s.sub("tank")) {
      Section ts(*j, "tank");
      ts.get("epsilon", c.vic.tank.epsilon);
      ts.get("x0", c.vic.tank.x0);
      ts.get("T_max", c.vic.tank.T_max);
      ts.get("margin", c.vic.tank_margin);
      ts.finish();
    }
    if (const json* j = s.sub("table")) read_table(*j, c.table);

    if (const json* j = s.sub("teacher")) {
      Section ts(*j, "teacher");
      if (const json* sj = ts.sub("script")) {
        const json script = resolve_include(*sj, base_dir);
        resolved["teacher"]["script"] = script;
        c.script = read_script(script);
      }
      ts.get("demos", c.demos);
      ts.get("dt", c.teacher.dt);
      ts.get("base_dt", c.teacher.base_dt);
      ts.get("record_dt", c.teacher.record_dt);
      ts.get("stiffness", c.teacher.stiffness);
      ts.get("position_gain", c.teacher.position_gain);
      ts.get("force_gain", c.teacher.force_gain);
      ts.get("force_speed", c.teacher.force_speed);
      ts.get("noise_force", c.teacher.noise_force);
      ts.get("noise_bandwidth", c.teacher.noise_bandwidth);
      ts.get("measurement_sigma", c.teacher.measurement_sigma);
      ts.get("position_tol", c.teacher.position_tol);
      ts.get("force_tol", c.teacher.force_tol);
      ts.finish();
    }
    c.teacher.table = c.table;

    if (const json* j = s.sub("gmm")) {
      Section gs(*j, "gmm");
      gs.get("K", c.components);
      gs.get("max_iters", c.em.max_iters);
      gs.get("tol", c.em.tol);
      gs.get("reg_floor", c.em.reg_floor);
      gs.get("seed", c.em.seed);
      gs.get("jitter", c.em.jitter);
      gs.finish();
    }

    if (const json* j = s.sub("sim")) {
      Section ss(*j, "sim");
      std::string motion = to_string(c.sim.motion);
      ss.get("dt", c.sim.dt);
      ss.get("base_dt", c.sim.base_dt);
      ss.get("safety_window", c.sim.safety_window);
      ss.get("state_bound", c.sim.state_bound);
      ss.get("measurement_sigma", c.sim.measurement_sigma);
      ss.get("motion", motion);
      ss.get("manipulation_on", c.sim.manipulation_on);
      ss.get("manipulation_off", c.sim.manipulation_off);
      ss.get("log_every", c.log_every);
      ss.finish();
      c.sim.motion = motion_policy_from_string(motion);
    }
    c.sim.table = c.table;

    if (const json* j = s.sub("metrics")) {
      Section ms(*j, "metrics");
      ms.get("contact_threshold", c.metrics.contact_threshold);
      ms.get("free_threshold", c.metrics.free_threshold);
      ms.finish();
    }
    if (const json* j = s.sub("disturbances")) {
      const json d = resolve_include(*j, base_dir);
      resolved["disturbances"] = d;
      c.disturbances = read_disturbances(d, c.disturbances);
    }
    if (const json* j = s.sub("compare")) {
      Section cs(*j, "compare");
      cs.get("disturbance", c.compare_disturbance);
      cs.finish();
    }
    s.get("seed", c.seed);
    std::string out_dir;
    s.get("output_dir", out_dir);
    if (!out_dir.empty()) c.output_dir = out_dir;
    s.finish();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  resolved.erase("output_dir");
  c.hash = fnv1a_hex(resolved.dump());
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return config_from_json(text, path.parent_path(), path.string());
}

}  // namespace vic
