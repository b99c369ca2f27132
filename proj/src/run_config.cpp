#include "canline/run_config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "canline/errors.hpp"
#include "canline/eval.hpp"

namespace canline {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": '" + value + "' is not a finite number");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

BinSide parse_bin_side(const std::string& key, const std::string& value) {
  if (value == "left") return BinSide::left;
  if (value == "right") return BinSide::right;
  throw ConfigError(key + ": expected left or right, got '" + value + "'");
}

std::vector<std::string> parse_inline_names(const std::string& value) {
  if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
    throw ConfigError("names: expected a [..] list");
  }
  std::vector<std::string> names;
  std::istringstream in(value.substr(1, value.size() - 2));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) names.push_back(item);
  }
  return names;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  RunConfig config;
  auto& line = config.sim.line;
  auto& det = config.sim.detector;
  auto& ocr = config.sim.ocr;
  auto& rates = config.sim.fault_rates;

  const std::map<std::string, std::function<void(const std::string&, const std::string&)>>
      setters = {
          {"line_id", [&](const std::string&, const std::string& v) { line.line_id = v; }},
          {"belt_segment_time_s",
           [&](const std::string& k, const std::string& v) { line.belt_segment_time_s = parse_double(k, v); }},
          {"confidence_threshold",
           [&](const std::string& k, const std::string& v) { line.confidence_threshold = parse_double(k, v); }},
          {"accept_bin_side",
           [&](const std::string& k, const std::string& v) { line.accept_bin_side = parse_bin_side(k, v); }},
          {"servo_speed_deg_s",
           [&](const std::string& k, const std::string& v) { line.servo_speed_deg_s = parse_double(k, v); }},
          {"suction_dwell_s",
           [&](const std::string& k, const std::string& v) { line.suction_dwell_s = parse_double(k, v); }},
          {"arrival_spacing_s",
           [&](const std::string& k, const std::string& v) { line.arrival_spacing_s = parse_double(k, v); }},
          {"label_check",
           [&](const std::string& k, const std::string& v) { line.label_check = parse_bool(k, v); }},
          {"miss_rate",
           [&](const std::string& k, const std::string& v) { det.miss_rate = parse_double(k, v); }},
          {"false_positive_rate",
           [&](const std::string& k, const std::string& v) { det.false_positive_rate = parse_double(k, v); }},
          {"confusion_rate",
           [&](const std::string& k, const std::string& v) { det.confusion_rate = parse_double(k, v); }},
          {"localization_jitter",
           [&](const std::string& k, const std::string& v) { det.localization_jitter = parse_double(k, v); }},
          {"tp_confidence_mean",
           [&](const std::string& k, const std::string& v) { det.tp_confidence_mean = parse_double(k, v); }},
          {"tp_confidence_spread",
           [&](const std::string& k, const std::string& v) { det.tp_confidence_spread = parse_double(k, v); }},
          {"fp_confidence_mean",
           [&](const std::string& k, const std::string& v) { det.fp_confidence_mean = parse_double(k, v); }},
          {"fp_confidence_spread",
           [&](const std::string& k, const std::string& v) { det.fp_confidence_spread = parse_double(k, v); }},
          {"nms_iou",
           [&](const std::string& k, const std::string& v) { det.nms_iou = parse_double(k, v); }},
          {"fault_rate_easy_open",
           [&](const std::string& k, const std::string& v) { rates.easy_open = parse_double(k, v); }},
          {"fault_rate_contour",
           [&](const std::string& k, const std::string& v) { rates.contour = parse_double(k, v); }},
          {"fault_rate_label",
           [&](const std::string& k, const std::string& v) { rates.label = parse_double(k, v); }},
          {"ocr_substitution_rate",
           [&](const std::string& k, const std::string& v) { ocr.substitution_rate = parse_double(k, v); }},
          {"ocr_deletion_rate",
           [&](const std::string& k, const std::string& v) { ocr.deletion_rate = parse_double(k, v); }},
      };

  std::istringstream in(text);
  std::string raw;
  bool in_names_list = false;
  bool names_seen = false;
  std::vector<std::string> names;
  while (std::getline(in, raw)) {
    const std::string l = trim(raw);
    if (l.empty() || l.front() == '#') continue;

    if (in_names_list) {
      if (l.front() == '-') {
        const std::string name = trim(l.substr(1));
        if (name.empty()) throw ConfigError("names: empty class name");
        names.push_back(name);
        continue;
      }
      in_names_list = false;
    }

    const auto colon = l.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("expected 'key: value', got '" + l + "'");
    }
    const std::string key = trim(l.substr(0, colon));
    const std::string value = trim(l.substr(colon + 1));

    if (key == "names") {
      names_seen = true;
      if (value.empty()) {
        in_names_list = true;
      } else {
        names = parse_inline_names(value);
      }
      continue;
    }
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key: " + key);
    it->second(key, value);
  }

  if (names_seen) {
    if (names.empty()) throw ConfigError("names: empty class list");
    config.sim.class_names = std::move(names);
  }

  if (!line.valid()) throw ConfigError("invalid line configuration values");
  if (!det.valid()) throw ConfigError("invalid detector profile values");
  if (!ocr.valid()) throw ConfigError("invalid OCR noise values");
  if (!rates.valid()) throw ConfigError("fault rates must lie in [0, 1]");
  return config;
}

std::string write_run_config(const RunConfig& config) {
  const auto& line = config.sim.line;
  const auto& det = config.sim.detector;
  const auto& ocr = config.sim.ocr;
  const auto& rates = config.sim.fault_rates;

  std::ostringstream out;
  out << "# canline run configuration\n";
  out << "line_id: " << line.line_id << "\n";
  out << "belt_segment_time_s: " << format_number(line.belt_segment_time_s) << "\n";
  out << "confidence_threshold: " << format_number(line.confidence_threshold) << "\n";
  out << "accept_bin_side: " << to_string(line.accept_bin_side) << "\n";
  out << "servo_speed_deg_s: " << format_number(line.servo_speed_deg_s) << "\n";
  out << "suction_dwell_s: " << format_number(line.suction_dwell_s) << "\n";
  out << "arrival_spacing_s: " << format_number(line.arrival_spacing_s) << "\n";
  out << "label_check: " << (line.label_check ? "true" : "false") << "\n";
  out << "\n";
  out << "miss_rate: " << format_number(det.miss_rate) << "\n";
  out << "false_positive_rate: " << format_number(det.false_positive_rate) << "\n";
  out << "confusion_rate: " << format_number(det.confusion_rate) << "\n";
  out << "localization_jitter: " << format_number(det.localization_jitter) << "\n";
  out << "tp_confidence_mean: " << format_number(det.tp_confidence_mean) << "\n";
  out << "tp_confidence_spread: " << format_number(det.tp_confidence_spread) << "\n";
  out << "fp_confidence_mean: " << format_number(det.fp_confidence_mean) << "\n";
  out << "fp_confidence_spread: " << format_number(det.fp_confidence_spread) << "\n";
  out << "nms_iou: " << format_number(det.nms_iou) << "\n";
  out << "\n";
  out << "fault_rate_easy_open: " << format_number(rates.easy_open) << "\n";
  out << "fault_rate_contour: " << format_number(rates.contour) << "\n";
  out << "fault_rate_label: " << format_number(rates.label) << "\n";
  out << "\n";
  out << "ocr_substitution_rate: " << format_number(ocr.substitution_rate) << "\n";
  out << "ocr_deletion_rate: " << format_number(ocr.deletion_rate) << "\n";
  out << "\n";
  out << "names: [";
  for (std::size_t i = 0; i < config.sim.class_names.size(); ++i) {
    if (i > 0) out << ", ";
    out << config.sim.class_names[i];
  }
  out << "]\n";
  return out.str();
}

}  // namespace canline
