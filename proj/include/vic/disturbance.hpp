#pragma once

#include <string>
#include <vector>

#include "vic/linalg.hpp"

namespace vic {

enum class DisturbanceType { LiftSlow, LiftFast, SineLow, SineHigh, CollideContact, CollideFree };

std::string to_string(DisturbanceType type);
DisturbanceType disturbance_type_from_string(const std::string& name);
const std::vector<DisturbanceType>& all_disturbance_types();

struct DisturbanceEvent {
  DisturbanceType type = DisturbanceType::LiftSlow;
  double start = 0.0;      // s
  double amplitude = 0.0;  // m, lifts and sines
  double velocity = 0.0;   // m/s, lifts
  double frequency = 0.0;  // Hz, sines
  double cycles = 0.0;     // sines
  double duration = 0.0;   // s, collisions
  double peak = 0.0;       // N, signed, collisions
  std::string axis = "x";  // collision direction

  bool moves_table() const;
  double end() const;
};

struct DisturbanceScript {
  std::vector<DisturbanceEvent> events;

  /// Parameters positive and events non-overlapping per channel (table height, collision force).
  void validate() const;
};

struct DisturbanceSample {
  double offset = 0.0;  // table height offset, m
  double rate = 0.0;    // its time derivative, m/s
  TaskVec force;        // force on the end effector, N
};

/// Lifts rise at V to A and come straight back down; sines give A sin(2 pi f tau);
/// collisions are half-sine force pulses.
DisturbanceSample apply_disturbance(const DisturbanceScript& script, double t, const std::vector<std::string>& axes);

/// Where an event sits relative to the reference: the index-th contact stroke
/// or free return (1-based, -1 for the last), plus a delay into that segment.
struct EventTemplate {
  DisturbanceEvent event;  // start is ignored
  bool in_contact = true;
  int index = 1;
  double delay = 1.0;
};

struct DisturbanceSettings {
  std::vector<EventTemplate> templates;

  const EventTemplate& find(DisturbanceType type) const;
  /// Strokes 1 to 5 carry lift-slow, lift-fast, sine-low, sine-high and the
  /// in-contact collision; the last free return carries the free collision.
  static DisturbanceSettings defaults();
};

struct Segment {
  double start = 0.0;
  double end = 0.0;
  bool contact = false;
};

/// Splits a reference into contact strokes (demanded normal push >= threshold)
/// and the free returns between them. Segments shorter than min_length are dropped.
std::vector<Segment> reference_segments(const std::vector<double>& t, const std::vector<double>& normal_demand,
                                        double threshold = 5.0, double min_length = 0.5);

/// "none", one disturbance name, or "all".
std::vector<std::string> scenario_names();
DisturbanceScript build_scenario(const std::string& name, const DisturbanceSettings& settings,
                                 const std::vector<Segment>& segments);

}  // namespace vic
