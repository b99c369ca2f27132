#include "canline/ocr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <numeric>

namespace canline {

std::vector<std::string> assemble_lines(const std::vector<OcrLine>& lines) {
  std::vector<std::size_t> order(lines.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ya = lines[a].box.center_y();
    const double yb = lines[b].box.center_y();
    if (ya != yb) return ya < yb;
    return lines[a].box.center_x() < lines[b].box.center_x();
  });
  std::vector<std::string> texts;
  texts.reserve(lines.size());
  for (const std::size_t i : order) texts.push_back(lines[i].text);
  return texts;
}

namespace {

std::string normalize(const std::string& line) {
  std::string out;
  out.reserve(line.size());
  bool pending_space = false;
  for (const char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

bool is_lot_code(const std::string& s) {
  if (s.size() != 6) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
  });
}

bool is_digits(const std::string& s, std::size_t n) {
  if (s.size() != n) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

bool parse_int(const std::string& s, int& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// dd/mm/yyyy with strict 2/2/4 digit groups.
bool parse_expiry(const std::string& s, LabelFields& fields) {
  if (s.size() != 10 || s[2] != '/' || s[5] != '/') return false;
  const std::string dd = s.substr(0, 2), mm = s.substr(3, 2), yyyy = s.substr(6, 4);
  if (!is_digits(dd, 2) || !is_digits(mm, 2) || !is_digits(yyyy, 4)) return false;
  int d = 0, m = 0, y = 0;
  if (!parse_int(dd, d) || !parse_int(mm, m) || !parse_int(yyyy, y)) return false;
  if (!is_valid_date(d, m, y)) return false;
  fields.expiry_day = d;
  fields.expiry_month = m;
  fields.expiry_year = y;
  return true;
}

}  // namespace

bool is_valid_date(int day, int month, int year) {
  if (month < 1 || month > 12 || day < 1 || day > 31) return false;
  const std::chrono::year_month_day ymd{
      std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
      std::chrono::day{static_cast<unsigned>(day)}};
  return ymd.ok();
}

LabelParse parse_label(const std::vector<std::string>& lines) {
  LabelFields fields;
  bool have_lot = false, have_expiry = false, have_product = false;

  for (const auto& raw : lines) {
    const std::string line = normalize(raw);
    const auto space = line.find(' ');
    const std::string keyword = line.substr(0, space);
    const std::string rest = space == std::string::npos ? "" : line.substr(space + 1);

    if (keyword == "LOT" && !have_lot) {
      if (!is_lot_code(rest)) return {std::nullopt, "field invalid: lot"};
      fields.lot_code = rest;
      have_lot = true;
    } else if (keyword == "EXP" && !have_expiry) {
      if (!parse_expiry(rest, fields)) return {std::nullopt, "field invalid: expiry"};
      have_expiry = true;
    } else if (keyword == "PROD" && !have_product) {
      if (!is_digits(rest, 4)) return {std::nullopt, "field invalid: product"};
      fields.product_code = rest;
      have_product = true;
    }
  }

  if (!have_lot) return {std::nullopt, "field absent: lot"};
  if (!have_expiry) return {std::nullopt, "field absent: expiry"};
  if (!have_product) return {std::nullopt, "field absent: product"};
  return {fields, ""};
}

std::string render_label(const LabelFields& fields) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "EXP %02d/%02d/%04d", fields.expiry_day,
                fields.expiry_month, fields.expiry_year);
  return "LOT " + fields.lot_code + "\n" + buf + "\nPROD " + fields.product_code;
}

std::optional<std::string> verify_label(const LabelParse& parsed,
                                        const std::string& label_text_truth) {
  static const std::string kUnreadable = "label_unreadable";
  if (!parsed.ok()) return kUnreadable;
  const LabelParse truth = parse_label(split_text_lines(label_text_truth));
  if (!truth.ok()) return kUnreadable;  // nothing legible to agree with
  if (*parsed.fields != *truth.fields) return kUnreadable;
  return std::nullopt;
}

std::vector<std::string> split_text_lines(const std::string& text) {
  std::vector<std::string> lines;
  if (text.empty()) return lines;
  std::size_t start = 0;
  while (true) {
    const auto nl = text.find('\n', start);
    if (nl == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

}  // namespace canline
