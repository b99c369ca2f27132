#include "canline/telemetry.hpp"

#include <array>
#include <stdexcept>

#include "canline/errors.hpp"

namespace canline {

namespace {

const std::array<const char*, 5> kTelemetryKinds = {"arrival", "capture",
                                                    "verdict", "arm_done",
                                                    "binned"};

}  // namespace

bool is_telemetry_kind(const std::string& kind) {
  for (const char* k : kTelemetryKinds) {
    if (kind == k) return true;
  }
  return false;
}

std::string encode_event(const InspectionEvent& event) {
  nlohmann::ordered_json j;
  j["v"] = event.v;
  j["seq"] = event.seq;
  j["line"] = event.line_id;
  j["t"] = event.t_sim_s;
  j["kind"] = event.kind;
  j["can"] = event.can_id;
  for (const auto& [key, value] : event.payload.items()) {
    j[key] = value;
  }
  return j.dump();
}

InspectionEvent decode_event(const std::string& bytes) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("invalid event JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(1, "event is not a JSON object");

  InspectionEvent event;
  try {
    event.v = j.at("v").get<int>();
    event.seq = j.at("seq").get<std::uint64_t>();
    event.line_id = j.at("line").get<std::string>();
    event.t_sim_s = j.at("t").get<double>();
    event.kind = j.at("kind").get<std::string>();
    event.can_id = j.at("can").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("missing or mistyped event field: ") + e.what());
  }
  if (event.v != 1) {
    throw ParseError(1, "unsupported event schema version " + std::to_string(event.v));
  }
  for (const auto& [key, value] : j.items()) {
    if (key == "v" || key == "seq" || key == "line" || key == "t" ||
        key == "kind" || key == "can") {
      continue;
    }
    event.payload[key] = value;
  }
  return event;
}

std::string topic_for(const std::string& line_id, const std::string& kind) {
  if (line_id.empty() ||
      line_id.find_first_of("/+#") != std::string::npos) {
    throw std::invalid_argument("line_id must be non-empty and free of '/', '+', '#'");
  }
  return "canline/v1/" + line_id + "/" + kind;
}

void MemorySink::publish(const std::string& topic, const std::string& payload) {
  if (closed_) throw TransportError("sink closed");
  records_.emplace_back(topic, payload);
}

FileSink::FileSink(const std::string& path) : out_(path, std::ios::app) {
  if (!out_) throw IoError("cannot open telemetry sink file: " + path);
}

void FileSink::publish(const std::string& topic, const std::string& payload) {
  if (!out_) throw TransportError("telemetry sink file is not writable");
  out_ << topic << '\t' << payload << '\n';
  out_.flush();
  if (!out_) throw TransportError("telemetry sink write failed");
}

std::vector<std::pair<std::string, std::string>> read_sink_file(
    const std::string& text) {
  std::vector<std::pair<std::string, std::string>> records;
  std::size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    const std::string line = text.substr(start, end - start);
    if (!line.empty()) {
      const auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw ParseError(line_no, "sink line has no topic separator");
      }
      records.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    start = end + 1;
  }
  return records;
}

TelemetryPublisher::TelemetryPublisher(std::string line_id, TelemetrySink* sink)
    : line_id_(std::move(line_id)), sink_(sink) {
  (void)topic_for(line_id_, "verdict");  // validates the id eagerly
}

void TelemetryPublisher::publish(const std::string& kind, double t_sim_s,
                                 std::uint64_t can_id,
                                 nlohmann::ordered_json payload) {
  InspectionEvent event;
  event.seq = next_seq_++;
  event.line_id = line_id_;
  event.t_sim_s = t_sim_s;
  event.kind = kind;
  event.can_id = can_id;
  event.payload = std::move(payload);
  history_.push_back(event);

  if (sink_ == nullptr) {
    undelivered_.push_back(std::move(event));
    last_error_ = "no sink attached";
    return;
  }
  try {
    sink_->publish(topic_for(line_id_, kind), encode_event(event));
    ++published_;
  } catch (const TransportError& e) {
    last_error_ = e.what();
    undelivered_.push_back(std::move(event));
  }
}

std::size_t TelemetryPublisher::republish_undelivered() {
  if (sink_ == nullptr) return 0;
  std::size_t delivered = 0;
  std::vector<InspectionEvent> still_pending;
  for (const auto& event : undelivered_) {
    try {
      sink_->publish(topic_for(line_id_, event.kind), encode_event(event));
      ++published_;
      ++delivered;
    } catch (const TransportError& e) {
      last_error_ = e.what();
      still_pending.push_back(event);
    }
  }
  undelivered_ = std::move(still_pending);
  return delivered;
}

}  // namespace canline
