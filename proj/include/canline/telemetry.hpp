#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace canline {

/// One inspection event on the wire. `seq` is per line_id and strictly
/// increasing; `payload` holds the kind-specific fields in a fixed order.
struct InspectionEvent {
  int v = 1;
  std::uint64_t seq = 0;
  std::string line_id;
  double t_sim_s = 0.0;
  std::string kind;  // arrival | capture | verdict | arm_done | binned
  std::uint64_t can_id = 0;
  nlohmann::ordered_json payload = nlohmann::ordered_json::object();

  friend bool operator==(const InspectionEvent&, const InspectionEvent&) = default;
};

[[nodiscard]] bool is_telemetry_kind(const std::string& kind);

/// Canonical encoding: keys v, seq, line, t, kind, can followed by the
/// payload fields, no insignificant whitespace, shortest number
/// representations. Two encodings of equal events are byte-identical.
[[nodiscard]] std::string encode_event(const InspectionEvent& event);

/// Inverse of encode_event. Throws ParseError on malformed input.
[[nodiscard]] InspectionEvent decode_event(const std::string& bytes);

/// `canline/v1/<line_id>/<kind>`. Throws std::invalid_argument when line_id
/// is empty or contains '/', '+' or '#'.
[[nodiscard]] std::string topic_for(const std::string& line_id,
                                    const std::string& kind);

/// Consumer of encoded events. Delivery is at-least-once; per-topic ordering
/// follows submission order. publish throws TransportError on failure.
class TelemetrySink {
 public:
  virtual ~TelemetrySink() = default;
  virtual void publish(const std::string& topic, const std::string& payload) = 0;
};

/// Test sink: records (topic, payload) pairs; can simulate a closed broker.
class MemorySink : public TelemetrySink {
 public:
  void publish(const std::string& topic, const std::string& payload) override;
  void close() { closed_ = true; }
  void reopen() { closed_ = false; }
  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& records()
      const {
    return records_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> records_;
  bool closed_ = false;
};

/// Append-only file sink, one `<topic>\t<payload>` line per event.
class FileSink : public TelemetrySink {
 public:
  explicit FileSink(const std::string& path);
  void publish(const std::string& topic, const std::string& payload) override;

 private:
  std::ofstream out_;
};

/// Read a file-sink capture back into (topic, payload) pairs.
[[nodiscard]] std::vector<std::pair<std::string, std::string>> read_sink_file(
    const std::string& text);

/// Per-line publisher: assigns seq numbers, encodes, and routes to a sink.
/// A sink failure never propagates; the event is buffered and the condition
/// surfaces through dropped()/last_error().
class TelemetryPublisher {
 public:
  TelemetryPublisher(std::string line_id, TelemetrySink* sink);

  void publish(const std::string& kind, double t_sim_s, std::uint64_t can_id,
               nlohmann::ordered_json payload);

  /// Retry buffered events in order; returns how many were delivered.
  /// Delivery stays at-least-once: consumers dedupe by (line_id, seq).
  std::size_t republish_undelivered();

  [[nodiscard]] const std::string& line_id() const { return line_id_; }
  [[nodiscard]] std::uint64_t published() const { return published_; }
  [[nodiscard]] std::uint64_t dropped() const { return undelivered_.size(); }
  [[nodiscard]] const std::string& last_error() const { return last_error_; }
  [[nodiscard]] const std::vector<InspectionEvent>& undelivered() const {
    return undelivered_;
  }
  [[nodiscard]] const std::vector<InspectionEvent>& history() const {
    return history_;
  }

 private:
  std::string line_id_;
  TelemetrySink* sink_;
  std::uint64_t next_seq_ = 1;
  std::uint64_t published_ = 0;
  std::string last_error_;
  std::vector<InspectionEvent> undelivered_;
  std::vector<InspectionEvent> history_;  // every event, delivered or not
};

}  // namespace canline
