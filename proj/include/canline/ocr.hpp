#pragma once

#include <optional>
#include <string>
#include <vector>

#include "canline/core.hpp"

namespace canline {

/// One recognized text line with its box and a confidence in [0, 1].
struct OcrLine {
  std::string text;
  BoundingBox box;
  double confidence = 1.0;
};

/// Structured traceability fields printed on a can label.
struct LabelFields {
  std::string lot_code;     // [A-Z0-9]{6}
  int expiry_day = 0;       // valid calendar date, dd/mm/yyyy
  int expiry_month = 0;
  int expiry_year = 0;
  std::string product_code;  // [0-9]{4}

  friend bool operator==(const LabelFields&, const LabelFields&) = default;
};

/// Result of parse_label: fields on success, a reason otherwise.
struct LabelParse {
  std::optional<LabelFields> fields;
  std::string error;  // empty on success

  [[nodiscard]] bool ok() const { return fields.has_value(); }
};

/// Sort recognized lines into reading order: vertical box center ascending,
/// ties by horizontal center ascending. Returns the texts in that order.
[[nodiscard]] std::vector<std::string> assemble_lines(
    const std::vector<OcrLine>& lines);

/// Scan assembled lines for `LOT <code>`, `EXP <dd>/<mm>/<yyyy>` and
/// `PROD <nnnn>`. Input is normalized first (uppercased, repeated spaces
/// collapsed). Errors: "field absent: <name>" / "field invalid: <name>"
/// for names lot, expiry, product.
[[nodiscard]] LabelParse parse_label(const std::vector<std::string>& lines);

/// Canonical three-line rendering: `LOT XXXXXX`, `EXP DD/MM/YYYY`,
/// `PROD NNNN`, joined by '\n'. parse_label inverts it.
[[nodiscard]] std::string render_label(const LabelFields& fields);

/// Leap-aware calendar check.
[[nodiscard]] bool is_valid_date(int day, int month, int year);

/// Compare a parse result against the can's true label text. A parse failure
/// or a field mismatch contributes the reason "label_unreadable"; agreement
/// contributes nothing.
[[nodiscard]] std::optional<std::string> verify_label(
    const LabelParse& parsed, const std::string& label_text_truth);

/// Split on '\n'. An empty string yields no lines.
[[nodiscard]] std::vector<std::string> split_text_lines(const std::string& text);

}  // namespace canline
