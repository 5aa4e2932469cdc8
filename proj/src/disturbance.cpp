#include "vic/disturbance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vic/errors.hpp"

namespace vic {

namespace {

constexpr double kPi = std::numbers::pi;

struct NamedType {
  DisturbanceType type;
  const char* name;
};

constexpr NamedType kNames[] = {
    {DisturbanceType::LiftSlow, "lift-slow"},           {DisturbanceType::LiftFast, "lift-fast"},
    {DisturbanceType::SineLow, "sine-low"},             {DisturbanceType::SineHigh, "sine-high"},
    {DisturbanceType::CollideContact, "collide-contact"}, {DisturbanceType::CollideFree, "collide-free"},
};

bool is_lift(DisturbanceType t) { return t == DisturbanceType::LiftSlow || t == DisturbanceType::LiftFast; }
bool is_sine(DisturbanceType t) { return t == DisturbanceType::SineLow || t == DisturbanceType::SineHigh; }

}  // namespace

std::string to_string(DisturbanceType type) {
  for (const auto& n : kNames)
    if (n.type == type) return n.name;
  return "?";
}

DisturbanceType disturbance_type_from_string(const std::string& name) {
  for (const auto& n : kNames)
    if (name == n.name) return n.type;
  throw ConfigError("unknown disturbance '" + name + "'");
}

const std::vector<DisturbanceType>& all_disturbance_types() {
  static const std::vector<DisturbanceType> types = [] {
    std::vector<DisturbanceType> v;
    for (const auto& n : kNames) v.push_back(n.type);
    return v;
  }();
  return types;
}

bool DisturbanceEvent::moves_table() const { return is_lift(type) || is_sine(type); }

double DisturbanceEvent::end() const {
  if (is_lift(type)) return start + 2.0 * amplitude / velocity;
  if (is_sine(type)) return start + cycles / frequency;
  return start + duration;
}

void DisturbanceScript::validate() const {
  for (const auto& e : events) {
    const std::string what = "disturbance " + to_string(e.type);
    if (!std::isfinite(e.start)) throw ConfigError(what + ": start must be finite");
    if (is_lift(e.type) && (!(e.amplitude > 0.0) || !(e.velocity > 0.0)))
      throw ConfigError(what + ": amplitude and velocity must be positive");
    if (is_sine(e.type) && (!(e.amplitude > 0.0) || !(e.frequency > 0.0) || !(e.cycles > 0.0)))
      throw ConfigError(what + ": amplitude, frequency and cycles must be positive");
    if (!e.moves_table() && (!(e.duration > 0.0) || e.peak == 0.0))
      throw ConfigError(what + ": duration must be positive and peak non-zero");
  }
  for (std::size_t i = 0; i < events.size(); ++i)
    for (std::size_t j = i + 1; j < events.size(); ++j) {
      const auto& a = events[i];
      const auto& b = events[j];
      if (a.moves_table() != b.moves_table()) continue;
      if (a.start < b.end() && b.start < a.end())
        throw ConfigError("disturbances " + to_string(a.type) + " and " + to_string(b.type) + " overlap in time");
    }
}

DisturbanceSample apply_disturbance(const DisturbanceScript& script, double t, const std::vector<std::string>& axes) {
  DisturbanceSample s;
  s.force = TaskVec::Zero(static_cast<Eigen::Index>(axes.size()));
  for (const auto& e : script.events) {
    if (t < e.start || t >= e.end()) continue;
    const double tau = t - e.start;
    if (is_lift(e.type)) {
      const double t_top = e.amplitude / e.velocity;
      if (tau < t_top) {
        s.offset += e.velocity * tau;
        s.rate += e.velocity;
      } else {
        s.offset += std::max(0.0, e.amplitude - e.velocity * (tau - t_top));
        s.rate -= e.velocity;
      }
    } else if (is_sine(e.type)) {
      const double w = 2.0 * kPi * e.frequency;
      s.offset += e.amplitude * std::sin(w * tau);
      s.rate += e.amplitude * w * std::cos(w * tau);
    } else {
      const auto it = std::find(axes.begin(), axes.end(), e.axis);
      if (it == axes.end()) continue;
      s.force(it - axes.begin()) += e.peak * std::sin(kPi * tau / e.duration);
    }
  }
  return s;
}

const EventTemplate& DisturbanceSettings::find(DisturbanceType type) const {
  for (const auto& t : templates)
    if (t.event.type == type) return t;
  throw ConfigError("no settings for disturbance " + to_string(type));
}

DisturbanceSettings DisturbanceSettings::defaults() {
  auto lift = [](DisturbanceType type, double a, double v) {
    DisturbanceEvent e;
    e.type = type;
    e.amplitude = a;
    e.velocity = v;
    return e;
  };
  auto sine = [](DisturbanceType type, double a, double f, double cycles) {
    DisturbanceEvent e;
    e.type = type;
    e.amplitude = a;
    e.frequency = f;
    e.cycles = cycles;
    return e;
  };
  auto pulse = [](DisturbanceType type, double peak) {
    DisturbanceEvent e;
    e.type = type;
    e.duration = 0.3;
    e.peak = peak;
    e.axis = "x";
    return e;
  };
  DisturbanceSettings s;
  s.templates = {
      {lift(DisturbanceType::LiftSlow, 0.1246, 0.0417), true, 1, 1.0},
      {lift(DisturbanceType::LiftFast, 0.1163, 0.1256), true, 2, 1.0},
      {sine(DisturbanceType::SineLow, 0.0758, 0.8645, 3.0), true, 3, 1.0},
      {sine(DisturbanceType::SineHigh, 0.0435, 2.0024, 6.0), true, 4, 1.0},
      {pulse(DisturbanceType::CollideContact, -40.0), true, 5, 3.0},
      {pulse(DisturbanceType::CollideFree, 40.0), false, -1, 1.0},
  };
  return s;
}

std::vector<Segment> reference_segments(const std::vector<double>& t, const std::vector<double>& normal_demand,
                                        double threshold, double min_length) {
  if (t.size() != normal_demand.size()) throw DataError("reference_segments: size mismatch");
  std::vector<Segment> contact;
  for (std::size_t i = 0; i < t.size();) {
    if (normal_demand[i] < threshold) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < t.size() && normal_demand[j + 1] >= threshold) ++j;
    if (t[j] - t[i] >= min_length) contact.push_back({t[i], t[j], true});
    i = j + 1;
  }
  std::vector<Segment> out;
  for (std::size_t k = 0; k < contact.size(); ++k) {
    if (k > 0) out.push_back({contact[k - 1].end, contact[k].start, false});
    out.push_back(contact[k]);
  }
  return out;
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> names{"none"};
  for (const auto t : all_disturbance_types()) names.push_back(to_string(t));
  names.push_back("all");
  return names;
}

DisturbanceScript build_scenario(const std::string& name, const DisturbanceSettings& settings,
                                 const std::vector<Segment>& segments) {
  DisturbanceScript script;
  if (name == "none") return script;
  std::vector<DisturbanceType> types;
  if (name == "all")
    types = all_disturbance_types();
  else
    types = {disturbance_type_from_string(name)};
  for (const auto type : types) {
    const auto& tpl = settings.find(type);
    std::vector<const Segment*> pool;
    for (const auto& s : segments)
      if (s.contact == tpl.in_contact) pool.push_back(&s);
    const int n = static_cast<int>(pool.size());
    const int idx = tpl.index < 0 ? n + tpl.index : tpl.index - 1;
    if (idx < 0 || idx >= n)
      throw ConfigError("disturbance " + to_string(type) + " refers to " + (tpl.in_contact ? "stroke " : "free motion ") +
                        std::to_string(tpl.index) + " but the reference has " + std::to_string(n));
    DisturbanceEvent e = tpl.event;
    e.start = pool[idx]->start + tpl.delay;
    script.events.push_back(e);
  }
  script.validate();
  return script;
}

}  // namespace vic
