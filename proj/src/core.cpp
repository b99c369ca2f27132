#include "canline/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "canline/errors.hpp"

namespace canline {

bool BoundingBox::valid() const {
  return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
         std::isfinite(y_max) && x_min <= x_max && y_min <= y_max;
}

double area(const BoundingBox& b) {
  return (b.x_max - b.x_min) * (b.y_max - b.y_min);
}

bool NormalizedBox::valid() const {
  const auto unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!unit(cx) || !unit(cy) || !unit(w) || !unit(h)) return false;
  return cx - w / 2 >= -kNormalizedTolerance &&
         cx + w / 2 <= 1.0 + kNormalizedTolerance &&
         cy - h / 2 >= -kNormalizedTolerance &&
         cy + h / 2 <= 1.0 + kNormalizedTolerance;
}

BoundingBox to_corner_form(const NormalizedBox& n, double img_w, double img_h) {
  if (!(img_w > 0.0) || !(img_h > 0.0)) {
    throw std::invalid_argument("image dimensions must be positive");
  }
  if (!n.valid()) {
    throw std::invalid_argument("normalized box violates its invariants");
  }
  BoundingBox b;
  b.x_min = std::clamp((n.cx - n.w / 2) * img_w, 0.0, img_w);
  b.y_min = std::clamp((n.cy - n.h / 2) * img_h, 0.0, img_h);
  b.x_max = std::clamp((n.cx + n.w / 2) * img_w, 0.0, img_w);
  b.y_max = std::clamp((n.cy + n.h / 2) * img_h, 0.0, img_h);
  return b;
}

NormalizedBox to_normalized_form(const BoundingBox& b, double img_w,
                                 double img_h) {
  if (!(img_w > 0.0) || !(img_h > 0.0)) {
    throw std::invalid_argument("image dimensions must be positive");
  }
  if (!b.valid()) {
    throw std::invalid_argument("bounding box violates its invariants");
  }
  NormalizedBox n;
  n.cx = b.center_x() / img_w;
  n.cy = b.center_y() / img_h;
  n.w = b.width() / img_w;
  n.h = b.height() / img_h;
  return n;
}

const std::vector<std::string>& default_class_names() {
  static const std::vector<std::string> names = {
      "easy_open_ok", "easy_open_fault", "contour_ok",
      "contour_fault", "label_ok",       "label_fault"};
  return names;
}

ClassLabel make_label(int id, const std::vector<std::string>& names) {
  if (id < 0 || static_cast<std::size_t>(id) >= names.size()) {
    throw ConfigError("class id " + std::to_string(id) +
                      " out of range for class list of size " +
                      std::to_string(names.size()));
  }
  return ClassLabel{id, names[static_cast<std::size_t>(id)]};
}

}  // namespace canline
