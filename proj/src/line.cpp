#include "canline/line.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "canline/errors.hpp"
#include "canline/ocr.hpp"
#include "canline/rng.hpp"

namespace canline {

std::pair<SensorState, bool> sensor_edge(bool present,
                                         const SensorState& previous) {
  SensorState next;
  next.detecting = present;
  next.output_level = present ? LogicLevel::low : LogicLevel::high;
  const bool trigger =
      previous.output_level == LogicLevel::high && next.output_level == LogicLevel::low;
  return {next, trigger};
}

bool ServoState::valid() const {
  return std::all_of(angles_deg.begin(), angles_deg.end(), [](double a) {
    return std::isfinite(a) && a >= kServoMinDeg && a <= kServoMaxDeg;
  });
}

bool ServoState::is_home(double eps) const {
  return std::all_of(angles_deg.begin(), angles_deg.end(), [eps](double a) {
    return std::abs(a - kServoHomeDeg) <= eps;
  });
}

ArmCommand ArmCommand::move(ServoId servo, double target_deg) {
  ArmCommand c;
  c.kind = Kind::move;
  c.servo = servo;
  c.target_deg = target_deg;
  return c;
}

ArmCommand ArmCommand::suction(bool on) {
  ArmCommand c;
  c.kind = on ? Kind::suction_on : Kind::suction_off;
  return c;
}

ArmCommand ArmCommand::pause(double seconds) {
  ArmCommand c;
  c.kind = Kind::dwell;
  c.dwell_s = seconds;
  return c;
}

std::string to_string(BinSide side) {
  return side == BinSide::left ? "left" : "right";
}

std::string to_string(Decision decision) {
  return decision == Decision::accept ? "accept" : "reject";
}

DecisionPolicy DecisionPolicy::from_class_names(
    const std::vector<std::string>& names) {
  DecisionPolicy policy;
  for (const auto& name : names) {
    ClassRule rule;
    rule.class_name = name;
    if (name.ends_with("_ok")) {
      rule.feature = name.substr(0, name.size() - 3);
      rule.role = ClassRole::ok;
    } else if (name.ends_with("_fault")) {
      rule.feature = name.substr(0, name.size() - 6);
      rule.role = ClassRole::fault;
    } else {
      rule.role = ClassRole::ignore;
    }
    policy.rules.push_back(std::move(rule));
  }
  return policy;
}

const DecisionPolicy::ClassRule* DecisionPolicy::find(
    const std::string& class_name) const {
  for (const auto& rule : rules) {
    if (rule.class_name == class_name) return &rule;
  }
  return nullptr;
}

std::vector<std::string> DecisionPolicy::required_features() const {
  std::vector<std::string> features;
  for (const auto& rule : rules) {
    if (rule.role == ClassRole::ignore) continue;
    if (std::find(features.begin(), features.end(), rule.feature) ==
        features.end()) {
      features.push_back(rule.feature);
    }
  }
  return features;
}

InspectionVerdict decide(const std::vector<Detection>& dets,
                         const DecisionPolicy& policy,
                         double confidence_threshold, std::uint64_t can_id) {
  InspectionVerdict verdict;
  verdict.can_id = can_id;

  std::set<std::string> fault_classes_hit;
  std::set<std::string> features_seen;
  for (const auto& det : dets) {
    const auto* rule = policy.find(det.label.name);
    if (rule == nullptr) {
      throw ConfigError("detection class '" + det.label.name +
                        "' is absent from the decision policy");
    }
    if (det.confidence < confidence_threshold || rule->role == ClassRole::ignore) {
      continue;
    }
    features_seen.insert(rule->feature);
    if (rule->role == ClassRole::fault) {
      fault_classes_hit.insert(rule->class_name);
      verdict.triggering.push_back(det);
    }
  }

  // Fault reasons in class-list order, then missing features in list order.
  for (const auto& rule : policy.rules) {
    if (fault_classes_hit.count(rule.class_name)) {
      verdict.reasons.push_back(rule.class_name);
    }
  }
  for (const auto& feature : policy.required_features()) {
    if (!features_seen.count(feature)) {
      verdict.reasons.push_back("missing:" + feature);
    }
  }

  verdict.decision = verdict.reasons.empty() ? Decision::accept : Decision::reject;
  return verdict;
}

bool LineConfig::valid() const {
  return belt_segment_time_s > 0.0 && servo_speed_deg_s > 0.0 &&
         suction_dwell_s > 0.0 && arrival_spacing_s > 0.0 &&
         confidence_threshold > 0.0 && confidence_threshold < 1.0 &&
         !line_id.empty();
}

std::vector<ArmCommand> plan_arm_sequence(const InspectionVerdict& verdict,
                                          const LineConfig& config) {
  const BinSide bin =
      verdict.decision == Decision::accept
          ? config.accept_bin_side
          : (config.accept_bin_side == BinSide::right ? BinSide::left
                                                      : BinSide::right);
  // Base geometry: 0 deg points at the right bin, 180 deg at the left.
  const double base_target = bin == BinSide::right ? 0.0 : 180.0;
  const double pick_deg = 0.0;  // shoulder lowered onto the can

  std::vector<ArmCommand> seq;
  seq.push_back(ArmCommand::move(ServoId::shoulder, pick_deg));
  seq.push_back(ArmCommand::suction(true));
  seq.push_back(ArmCommand::pause(config.suction_dwell_s));
  seq.push_back(ArmCommand::move(ServoId::shoulder, kServoHomeDeg));
  seq.push_back(ArmCommand::move(ServoId::base, base_target));
  seq.push_back(ArmCommand::move(ServoId::shoulder, pick_deg));
  seq.push_back(ArmCommand::suction(false));
  seq.push_back(ArmCommand::pause(config.suction_dwell_s));
  seq.push_back(ArmCommand::move(ServoId::shoulder, kServoHomeDeg));
  seq.push_back(ArmCommand::move(ServoId::base, kServoHomeDeg));

  // Send any servo still away from 90 home; a no-op for the plan above.
  ServoState pose = ServoState::home();
  for (const auto& cmd : seq) {
    if (cmd.kind == ArmCommand::Kind::move) pose.set_angle(cmd.servo, cmd.target_deg);
  }
  for (int s = 0; s < kServoCount; ++s) {
    const auto id = static_cast<ServoId>(s);
    if (pose.angle(id) != kServoHomeDeg) {
      seq.push_back(ArmCommand::move(id, kServoHomeDeg));
    }
  }
  return seq;
}

SequenceStats simulate_sequence(const std::vector<ArmCommand>& commands,
                                const LineConfig& config, ServoState start) {
  SequenceStats stats;
  stats.final_pose = start;
  stats.within_bounds = start.valid();
  for (const auto& cmd : commands) {
    switch (cmd.kind) {
      case ArmCommand::Kind::move: {
        if (cmd.target_deg < kServoMinDeg || cmd.target_deg > kServoMaxDeg) {
          stats.within_bounds = false;
        }
        const double delta =
            std::abs(cmd.target_deg - stats.final_pose.angle(cmd.servo));
        stats.duration_s += delta / config.servo_speed_deg_s;
        stats.final_pose.set_angle(cmd.servo, cmd.target_deg);
        break;
      }
      case ArmCommand::Kind::dwell:
        stats.duration_s += cmd.dwell_s;
        break;
      case ArmCommand::Kind::suction_on:
      case ArmCommand::Kind::suction_off:
        break;  // instantaneous valve toggle
    }
  }
  return stats;
}

double sequence_duration(const std::vector<ArmCommand>& commands,
                         const LineConfig& config) {
  return simulate_sequence(commands, config).duration_s;
}

std::string event_to_jsonl(const SimEvent& event) {
  nlohmann::ordered_json j;
  j["v"] = 1;
  j["seq"] = event.seq;
  j["t_sim_s"] = event.t_sim_s;
  j["kind"] = event.kind;
  j["can_id"] = event.can_id;
  for (const auto& [key, value] : event.payload.items()) {
    j[key] = value;
  }
  return j.dump();
}

nlohmann::ordered_json RunSummary::to_json() const {
  nlohmann::ordered_json j;
  j["v"] = 1;
  j["n_cans"] = n_cans;
  j["accepted"] = bins.accepted;
  j["rejected"] = bins.rejected;
  j["true_accept"] = true_accept;
  j["false_accept"] = false_accept;
  j["true_reject"] = true_reject;
  j["false_reject"] = false_reject;
  j["sim_duration_s"] = sim_duration_s;
  j["throughput_cans_per_min"] = throughput_cans_per_min;
  nlohmann::ordered_json t;
  t["published"] = telemetry_published;
  t["dropped"] = telemetry_dropped;
  t["error"] = telemetry_error;
  j["telemetry"] = std::move(t);
  return j;
}

namespace {

nlohmann::ordered_json detections_payload(const std::vector<Detection>& dets) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& det : dets) {
    nlohmann::ordered_json d;
    d["cls"] = det.label.name;
    d["conf"] = det.confidence;
    d["box"] = {det.box.x_min, det.box.y_min, det.box.x_max, det.box.y_max};
    arr.push_back(std::move(d));
  }
  nlohmann::ordered_json payload;
  payload["dets"] = std::move(arr);
  return payload;
}

nlohmann::ordered_json verdict_payload(const InspectionVerdict& verdict,
                                       const std::vector<Detection>& dets,
                                       const DecisionPolicy& policy) {
  nlohmann::ordered_json payload;
  payload["decision"] = to_string(verdict.decision);
  payload["reasons"] = verdict.reasons;
  // Per-class max confidence over the observed detections, class-list order.
  std::map<std::string, double> max_conf;
  for (const auto& det : dets) {
    auto [it, inserted] = max_conf.emplace(det.label.name, det.confidence);
    if (!inserted) it->second = std::max(it->second, det.confidence);
  }
  auto conf = nlohmann::ordered_json::object();
  for (const auto& rule : policy.rules) {
    const auto it = max_conf.find(rule.class_name);
    if (it != max_conf.end()) conf[rule.class_name] = it->second;
  }
  payload["class_conf"] = std::move(conf);
  return payload;
}

}  // namespace

SimulationResult run_simulation(const SimulationConfig& config,
                                std::uint64_t n_cans, std::uint64_t seed,
                                TelemetryPublisher* telemetry) {
  if (!config.line.valid()) throw ConfigError("invalid line configuration");
  if (!config.detector.valid()) throw ConfigError("invalid detector profile");
  if (!config.ocr.valid()) throw ConfigError("invalid OCR noise profile");
  if (!config.fault_rates.valid()) throw ConfigError("invalid fault rates");

  const DecisionPolicy policy = DecisionPolicy::from_class_names(config.class_names);

  SimulationResult result;
  result.summary.n_cans = n_cans;

  std::uint64_t seq = 0;
  double t = 0.0;
  double line_free_at = 0.0;
  SensorState camera_sensor;
  SensorState arm_sensor;

  const auto emit = [&](double at, const std::string& kind, std::uint64_t can_id,
                        nlohmann::ordered_json payload) {
    SimEvent event;
    event.seq = ++seq;
    event.t_sim_s = at;
    event.kind = kind;
    event.can_id = can_id;
    event.payload = std::move(payload);
    if (telemetry != nullptr && is_telemetry_kind(kind)) {
      telemetry->publish(kind, at, can_id, event.payload);
    }
    result.events.push_back(std::move(event));
  };

  for (std::uint64_t i = 0; i < n_cans; ++i) {
    const std::uint64_t can_id = i + 1;
    Rng can_rng = Rng::substream(seed, can_id);
    CanInstance can = generate_can(can_id, config.fault_rates, can_rng);

    // Arrival honors the feed spacing but waits for the single-can line.
    const double scheduled = static_cast<double>(i) * config.line.arrival_spacing_s;
    t = std::max(scheduled, line_free_at);
    emit(t, "arrival", can_id, nlohmann::ordered_json::object());

    // Belt advance to the camera station; falling edge triggers the capture.
    t += config.line.belt_segment_time_s;
    auto [cam_on, cam_trigger] = sensor_edge(true, camera_sensor);
    camera_sensor = cam_on;
    if (cam_trigger) {
      emit(t, "capture", can_id, nlohmann::ordered_json::object());
    }

    const std::vector<Detection> dets =
        mock_detect(can, config.detector, can_rng);
    emit(t, "detection", can_id, detections_payload(dets));

    InspectionVerdict verdict =
        decide(dets, policy, config.line.confidence_threshold, can_id);
    if (config.line.label_check) {
      const auto ocr_lines = mock_read_text(can.label_text_truth, config.ocr, can_rng);
      const LabelParse parsed = parse_label(assemble_lines(ocr_lines));
      const auto reason = verify_label(parsed, can.label_text_truth);
      if (reason && std::find(verdict.reasons.begin(), verdict.reasons.end(),
                              *reason) == verdict.reasons.end()) {
        verdict.reasons.push_back(*reason);
        verdict.decision = Decision::reject;
      }
    }
    emit(t, "verdict", can_id, verdict_payload(verdict, dets, policy));
    camera_sensor = sensor_edge(false, camera_sensor).first;

    // Belt advance to the arm station.
    t += config.line.belt_segment_time_s;
    auto [arm_on, arm_trigger] = sensor_edge(true, arm_sensor);
    arm_sensor = arm_on;

    const BinSide bin =
        verdict.decision == Decision::accept
            ? config.line.accept_bin_side
            : (config.line.accept_bin_side == BinSide::right ? BinSide::left
                                                             : BinSide::right);
    nlohmann::ordered_json bin_payload;
    bin_payload["bin"] = to_string(bin);
    if (arm_trigger) {
      emit(t, "arm_start", can_id, bin_payload);
    }

    const auto commands = plan_arm_sequence(verdict, config.line);
    const double arm_duration = sequence_duration(commands, config.line);
    t += arm_duration;  // belt halted while the arm runs

    nlohmann::ordered_json done_payload;
    done_payload["bin"] = to_string(bin);
    done_payload["duration_s"] = arm_duration;
    emit(t, "arm_done", can_id, done_payload);
    emit(t, "binned", can_id, bin_payload);
    arm_sensor = sensor_edge(false, arm_sensor).first;

    if (verdict.decision == Decision::accept) {
      ++result.summary.bins.accepted;
      if (can.has_fault()) ++result.summary.false_accept;
      else ++result.summary.true_accept;
    } else {
      ++result.summary.bins.rejected;
      if (can.has_fault()) ++result.summary.true_reject;
      else ++result.summary.false_reject;
    }
    line_free_at = t;

    result.scenes.push_back(EvalScene{dets, truth_boxes_px(can)});
    result.cans.push_back(std::move(can));
    result.verdicts.push_back(std::move(verdict));
  }

  result.summary.sim_duration_s = t;
  result.summary.throughput_cans_per_min =
      t > 0.0 ? static_cast<double>(n_cans) / (t / 60.0) : 0.0;
  if (telemetry != nullptr) {
    result.summary.telemetry_published = telemetry->published();
    result.summary.telemetry_dropped = telemetry->dropped();
    result.summary.telemetry_error = telemetry->last_error();
  }
  return result;
}

}  // namespace canline
