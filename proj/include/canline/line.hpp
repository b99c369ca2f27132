#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "canline/core.hpp"
#include "canline/synthetic.hpp"
#include "canline/telemetry.hpp"

namespace canline {

// ---------------------------------------------------------------------------
// Sensors
// ---------------------------------------------------------------------------

enum class LogicLevel { low, high };

/// Active-low photoelectric sensor: output LOW exactly while detecting.
struct SensorState {
  bool detecting = false;
  LogicLevel output_level = LogicLevel::high;
};

/// Advance the sensor with the current presence reading. The trigger fires
/// exactly on the HIGH -> LOW transition.
[[nodiscard]] std::pair<SensorState, bool> sensor_edge(
    bool present, const SensorState& previous);

// ---------------------------------------------------------------------------
// Arm
// ---------------------------------------------------------------------------

enum class ServoId : int {
  base = 0,
  shoulder,
  elbow,
  wrist_pitch,
  wrist_roll,
  gripper
};

inline constexpr int kServoCount = 6;
inline constexpr double kServoMinDeg = 0.0;
inline constexpr double kServoMaxDeg = 180.0;
inline constexpr double kServoHomeDeg = 90.0;

/// Six named servo angles in degrees; the home pose is all-90.
struct ServoState {
  std::array<double, kServoCount> angles_deg{90, 90, 90, 90, 90, 90};

  [[nodiscard]] double angle(ServoId id) const {
    return angles_deg[static_cast<std::size_t>(id)];
  }
  void set_angle(ServoId id, double deg) {
    angles_deg[static_cast<std::size_t>(id)] = deg;
  }
  [[nodiscard]] bool valid() const;
  [[nodiscard]] bool is_home(double eps = 1e-9) const;
  [[nodiscard]] static ServoState home() { return ServoState{}; }

  friend bool operator==(const ServoState&, const ServoState&) = default;
};

/// One step of an arm sequence.
struct ArmCommand {
  enum class Kind { move, suction_on, suction_off, dwell };

  Kind kind = Kind::dwell;
  ServoId servo = ServoId::base;  // move only
  double target_deg = 0.0;        // move only
  double dwell_s = 0.0;           // dwell only

  [[nodiscard]] static ArmCommand move(ServoId servo, double target_deg);
  [[nodiscard]] static ArmCommand suction(bool on);
  [[nodiscard]] static ArmCommand pause(double seconds);
};

// ---------------------------------------------------------------------------
// Decision
// ---------------------------------------------------------------------------

enum class BinSide { left, right };
enum class Decision { accept, reject };

[[nodiscard]] std::string to_string(BinSide side);
[[nodiscard]] std::string to_string(Decision decision);

/// Accept/reject outcome for one can. Reject iff reasons is non-empty.
struct InspectionVerdict {
  std::uint64_t can_id = 0;
  Decision decision = Decision::accept;
  std::vector<std::string> reasons;
  std::vector<Detection> triggering;  // detections that caused fault reasons
};

enum class ClassRole { ok, fault, ignore };

/// Maps class names to a feature and a role. Features are the distinct
/// stems of non-ignored classes; every feature must show evidence (an ok or
/// fault detection at or above the threshold) or the can is rejected.
struct DecisionPolicy {
  struct ClassRule {
    std::string class_name;
    std::string feature;
    ClassRole role = ClassRole::ignore;
  };

  std::vector<ClassRule> rules;  // class-list order

  /// Derive rules by suffix: `<feature>_ok` -> ok, `<feature>_fault` ->
  /// fault, anything else -> ignore.
  [[nodiscard]] static DecisionPolicy from_class_names(
      const std::vector<std::string>& names);

  [[nodiscard]] const ClassRule* find(const std::string& class_name) const;
  [[nodiscard]] std::vector<std::string> required_features() const;
};

/// Apply the policy at confidence threshold tau. Throws ConfigError when a
/// detection's class is absent from the policy.
[[nodiscard]] InspectionVerdict decide(const std::vector<Detection>& dets,
                                       const DecisionPolicy& policy,
                                       double confidence_threshold,
                                       std::uint64_t can_id = 0);

// ---------------------------------------------------------------------------
// Line configuration
// ---------------------------------------------------------------------------

struct LineConfig {
  double belt_segment_time_s = 1.0;   // one belt advance between stations
  double confidence_threshold = 0.25; // decision threshold tau
  BinSide accept_bin_side = BinSide::right;
  double servo_speed_deg_s = 180.0;
  double suction_dwell_s = 0.3;
  double arrival_spacing_s = 2.0;
  std::string line_id = "L1";
  bool label_check = true;  // OCR verdict contribution on/off

  [[nodiscard]] bool valid() const;
};

/// Pick-and-place plan: lower, grab, lift, swing to the verdict's bin,
/// release, and return to the all-90 home pose.
[[nodiscard]] std::vector<ArmCommand> plan_arm_sequence(
    const InspectionVerdict& verdict, const LineConfig& config);

/// Replay metrics for a command sequence starting from `start`.
struct SequenceStats {
  double duration_s = 0.0;
  ServoState final_pose;
  bool within_bounds = true;
};

[[nodiscard]] SequenceStats simulate_sequence(
    const std::vector<ArmCommand>& commands, const LineConfig& config,
    ServoState start = ServoState::home());

/// Total time: |angle delta| / servo speed for moves, the dwell time for
/// dwells, zero for suction toggles.
[[nodiscard]] double sequence_duration(const std::vector<ArmCommand>& commands,
                                       const LineConfig& config);

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

/// One event-log record. Kinds: arrival, capture, detection, verdict,
/// arm_start, arm_done, binned.
struct SimEvent {
  std::uint64_t seq = 0;
  double t_sim_s = 0.0;
  std::string kind;
  std::uint64_t can_id = 0;
  nlohmann::ordered_json payload = nlohmann::ordered_json::object();
};

/// JSONL rendering: {"v":1,"seq":..,"t_sim_s":..,"kind":..,"can_id":..,...}.
[[nodiscard]] std::string event_to_jsonl(const SimEvent& event);

struct BinCounts {
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
};

struct RunSummary {
  std::uint64_t n_cans = 0;
  BinCounts bins;
  // Verdict vs ground truth: a "true reject" can really had a fault.
  std::uint64_t true_accept = 0;
  std::uint64_t false_accept = 0;
  std::uint64_t true_reject = 0;
  std::uint64_t false_reject = 0;
  double sim_duration_s = 0.0;
  double throughput_cans_per_min = 0.0;
  std::uint64_t telemetry_published = 0;
  std::uint64_t telemetry_dropped = 0;
  std::string telemetry_error;

  [[nodiscard]] nlohmann::ordered_json to_json() const;
};

struct SimulationConfig {
  LineConfig line;
  DetectorProfile detector;
  OcrNoiseProfile ocr;
  FaultRates fault_rates{0.2, 0.2, 0.2};
  std::vector<std::string> class_names = default_class_names();
};

struct SimulationResult {
  std::vector<SimEvent> events;
  RunSummary summary;
  std::vector<CanInstance> cans;
  std::vector<InspectionVerdict> verdicts;
  std::vector<EvalScene> scenes;  // per-can detections vs pixel truths
};

/// Deterministic stop-and-go run: per can, arrival -> belt advance ->
/// camera edge -> capture/detect/decide -> belt advance -> arm edge ->
/// arm sequence (belt halted) -> bin. Per-can randomness comes from
/// Rng::substream(seed, can_id). `telemetry` may be null.
[[nodiscard]] SimulationResult run_simulation(const SimulationConfig& config,
                                              std::uint64_t n_cans,
                                              std::uint64_t seed,
                                              TelemetryPublisher* telemetry = nullptr);

}  // namespace canline
