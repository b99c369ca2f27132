#include "canline/annotations.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "canline/errors.hpp"
#include "canline/rng.hpp"

namespace canline {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int parse_class_id(const std::string& tok, int line_no) {
  int id = -1;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || id < 0) {
    throw ParseError(line_no, "class id '" + tok + "' is not a non-negative integer");
  }
  return id;
}

double parse_number(const std::string& tok, const char* field, int line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError(line_no, std::string(field) + " '" + tok + "' is not a finite number");
  }
  return v;
}

double parse_unit_fraction(const std::string& tok, const char* field, int line_no) {
  const double v = parse_number(tok, field, line_no);
  if (v < -kNormalizedTolerance || v > 1.0 + kNormalizedTolerance) {
    throw ParseError(line_no, std::string(field) + " out of range: " + tok);
  }
  return std::clamp(v, 0.0, 1.0);
}

NormalizedBox parse_box_fields(const std::vector<std::string>& fields,
                               std::size_t first, int line_no) {
  NormalizedBox box;
  box.cx = parse_unit_fraction(fields[first + 0], "cx", line_no);
  box.cy = parse_unit_fraction(fields[first + 1], "cy", line_no);
  box.w = parse_unit_fraction(fields[first + 2], "w", line_no);
  box.h = parse_unit_fraction(fields[first + 3], "h", line_no);
  if (!box.valid()) {
    throw ParseError(line_no, "box extends outside the unit image frame");
  }
  return box;
}

template <typename T, typename ParseLine>
std::vector<T> parse_lines(const std::string& text, ParseLine parse_line) {
  std::vector<T> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    out.push_back(parse_line(line, line_no));
  }
  return out;
}

}  // namespace

GroundTruthAnnotation parse_annotation_line(const std::string& line,
                                            int line_no) {
  const auto fields = split_ws(line);
  if (fields.size() != 5) {
    throw ParseError(line_no, "expected 5 fields, got " +
                                  std::to_string(fields.size()));
  }
  GroundTruthAnnotation a;
  a.label.id = parse_class_id(fields[0], line_no);
  a.box = parse_box_fields(fields, 1, line_no);
  return a;
}

std::vector<GroundTruthAnnotation> parse_annotation_text(
    const std::string& text) {
  return parse_lines<GroundTruthAnnotation>(text, parse_annotation_line);
}

std::string write_annotation_file(
    const std::vector<GroundTruthAnnotation>& annotations) {
  std::string out;
  char buf[128];
  for (const auto& a : annotations) {
    std::snprintf(buf, sizeof(buf), "%d %.6f %.6f %.6f %.6f\n", a.label.id,
                  a.box.cx, a.box.cy, a.box.w, a.box.h);
    out += buf;
  }
  return out;
}

NormalizedDetection parse_detection_line(const std::string& line,
                                         int line_no) {
  const auto fields = split_ws(line);
  if (fields.size() != 6) {
    throw ParseError(line_no, "expected 6 fields, got " +
                                  std::to_string(fields.size()));
  }
  NormalizedDetection d;
  d.label.id = parse_class_id(fields[0], line_no);
  d.box = parse_box_fields(fields, 1, line_no);
  d.confidence = parse_unit_fraction(fields[5], "confidence", line_no);
  return d;
}

std::vector<NormalizedDetection> parse_detection_text(const std::string& text) {
  return parse_lines<NormalizedDetection>(text, parse_detection_line);
}

std::string write_detection_file(
    const std::vector<NormalizedDetection>& detections) {
  std::string out;
  char buf[160];
  for (const auto& d : detections) {
    std::snprintf(buf, sizeof(buf), "%d %.6f %.6f %.6f %.6f %.6f\n", d.label.id,
                  d.box.cx, d.box.cy, d.box.w, d.box.h, d.confidence);
    out += buf;
  }
  return out;
}

namespace {

template <typename T>
void bind_names(std::vector<T>& items, const std::vector<std::string>& names) {
  for (auto& item : items) {
    item.label = make_label(item.label.id, names);
  }
}

}  // namespace

void bind_class_names(std::vector<GroundTruthAnnotation>& annotations,
                      const std::vector<std::string>& names) {
  bind_names(annotations, names);
}

void bind_class_names(std::vector<NormalizedDetection>& detections,
                      const std::vector<std::string>& names) {
  bind_names(detections, names);
}

DatasetSplit split_dataset(const std::vector<std::string>& item_ids,
                           double ratio, std::uint64_t seed) {
  if (item_ids.empty()) {
    throw std::invalid_argument("split_dataset: empty item list");
  }
  if (!(ratio > 0.0) || !(ratio < 1.0)) {
    throw std::invalid_argument("split_dataset: ratio must be in (0, 1)");
  }
  const std::set<std::string> unique(item_ids.begin(), item_ids.end());
  if (unique.size() != item_ids.size()) {
    throw std::invalid_argument("split_dataset: duplicate item ids");
  }

  std::vector<std::string> shuffled = item_ids;
  Rng rng(seed);
  rng.shuffle(shuffled);

  const auto n_train = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(shuffled.size())));
  DatasetSplit split;
  split.ratio = ratio;
  split.train.assign(shuffled.begin(), shuffled.begin() + n_train);
  split.val.assign(shuffled.begin() + n_train, shuffled.end());
  return split;
}

namespace {

// Shared scanner for the flat `key: value` + `names:` list layout.
struct FlatDatasetDoc {
  bool has_train = false, has_val = false, has_names = false;
  std::string train, val;
  std::vector<std::string> names;
};

std::vector<std::string> parse_inline_list(const std::string& value,
                                           int line_no) {
  // [a, b, c]
  if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
    throw ParseError(line_no, "expected a [..] list");
  }
  std::vector<std::string> out;
  std::string body = value.substr(1, value.size() - 2);
  std::istringstream in(body);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

FlatDatasetDoc scan_dataset_doc(const std::string& text) {
  FlatDatasetDoc doc;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool in_names_list = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (in_names_list) {
      if (line.front() == '-') {
        const std::string name = trim(line.substr(1));
        if (name.empty()) throw ParseError(line_no, "empty class name");
        doc.names.push_back(name);
        continue;
      }
      in_names_list = false;
    }

    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw ParseError(line_no, "expected 'key: value'");
    }
    const std::string key = trim(line.substr(0, colon));
    const std::string value = trim(line.substr(colon + 1));
    if (key == "train") {
      doc.has_train = true;
      doc.train = value;
    } else if (key == "val") {
      doc.has_val = true;
      doc.val = value;
    } else if (key == "names") {
      doc.has_names = true;
      if (value.empty()) {
        in_names_list = true;  // dash list on the following lines
      } else {
        doc.names = parse_inline_list(value, line_no);
      }
    }
    // Unknown keys are ignored so real-world dataset configs still parse.
  }
  return doc;
}

void check_names(const std::vector<std::string>& names) {
  if (names.empty()) throw ConfigError("names missing");
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) throw ConfigError("duplicate class: " + n);
  }
}

}  // namespace

DatasetConfig parse_dataset_config(const std::string& text) {
  const FlatDatasetDoc doc = scan_dataset_doc(text);
  if (!doc.has_train) throw ConfigError("train missing");
  if (!doc.has_val) throw ConfigError("val missing");
  if (!doc.has_names) throw ConfigError("names missing");
  check_names(doc.names);
  return DatasetConfig{doc.train, doc.val, doc.names};
}

std::vector<std::string> parse_names_config(const std::string& text) {
  const FlatDatasetDoc doc = scan_dataset_doc(text);
  if (!doc.has_names) throw ConfigError("names missing");
  check_names(doc.names);
  return doc.names;
}

std::string write_dataset_config(const DatasetConfig& config) {
  std::string out;
  out += "train: " + config.train_path + "\n";
  out += "val: " + config.val_path + "\n";
  out += "names:\n";
  for (const auto& n : config.class_names) {
    out += "  - " + n + "\n";
  }
  return out;
}

}  // namespace canline
