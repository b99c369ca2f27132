#pragma once

#include <string>
#include <vector>

namespace canline {

// Canonical synthetic image frame. Square, 640 px: a common detector input
// size. Only relative geometry matters downstream.
inline constexpr double kImageWidth = 640.0;
inline constexpr double kImageHeight = 640.0;

/// Axis-aligned box in image pixels, origin top-left, real-valued coordinates.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  [[nodiscard]] bool valid() const;
  [[nodiscard]] double width() const { return x_max - x_min; }
  [[nodiscard]] double height() const { return y_max - y_min; }
  [[nodiscard]] double center_x() const { return 0.5 * (x_min + x_max); }
  [[nodiscard]] double center_y() const { return 0.5 * (y_min + y_max); }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Box area in square pixels. Zero for degenerate boxes.
[[nodiscard]] double area(const BoundingBox& b);

/// Box in YOLO-normalized form: center and size as fractions of the image.
struct NormalizedBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  [[nodiscard]] bool valid() const;

  friend bool operator==(const NormalizedBox&, const NormalizedBox&) = default;
};

// Extent slack tolerated on normalized boxes (float round-trip noise).
inline constexpr double kNormalizedTolerance = 1e-6;

/// Convert a normalized box to pixel corner form. The result is clamped to
/// the image rectangle. Throws std::invalid_argument for non-positive image
/// dimensions or an invalid box.
[[nodiscard]] BoundingBox to_corner_form(const NormalizedBox& n, double img_w,
                                         double img_h);

/// Inverse of to_corner_form. Throws std::invalid_argument for non-positive
/// image dimensions or an invalid box.
[[nodiscard]] NormalizedBox to_normalized_form(const BoundingBox& b,
                                               double img_w, double img_h);

/// Class identity: index into the active class-name list plus the name.
struct ClassLabel {
  int id = -1;
  std::string name;

  friend bool operator==(const ClassLabel&, const ClassLabel&) = default;
};

/// One detector output: box, class and confidence in [0, 1].
struct Detection {
  BoundingBox box;
  ClassLabel label;
  double confidence = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// The six per-feature classes (<feature>_ok / <feature>_fault for easy_open,
/// contour and label). Ids are list positions.
[[nodiscard]] const std::vector<std::string>& default_class_names();

/// Bounds-checked label construction from a class-name list.
/// Throws canline::ConfigError when id is out of range.
[[nodiscard]] ClassLabel make_label(int id,
                                    const std::vector<std::string>& names);

}  // namespace canline
