#pragma once

// Shared test fixtures and small helpers.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "canline/annotations.hpp"
#include "canline/core.hpp"
#include "canline/eval.hpp"
#include "canline/rng.hpp"

namespace testsupport {

// Training-metrics table used by the report fixtures (epochs 190-199).
inline const char* kTrainingMetricsCsv =
    "epoch,precision,recall,map50,map50_95\n"
    "190,0.95869,0.93715,0.98006,0.76361\n"
    "191,0.95992,0.93761,0.98025,0.76555\n"
    "192,0.96057,0.9319,0.98032,0.76698\n"
    "193,0.95859,0.93525,0.97954,0.76375\n"
    "194,0.95499,0.94051,0.97913,0.76153\n"
    "195,0.95687,0.94146,0.97906,0.76425\n"
    "196,0.95982,0.93792,0.97891,0.76249\n"
    "197,0.95965,0.93861,0.97891,0.76291\n"
    "198,0.95935,0.93749,0.97921,0.76414\n"
    "199,0.95917,0.94134,0.979,0.76313\n";

struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("canline_" + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << body;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CoutCapture {
  std::ostringstream captured;
  std::streambuf* previous;

  CoutCapture() : previous(std::cout.rdbuf(captured.rdbuf())) {}
  ~CoutCapture() { std::cout.rdbuf(previous); }
  std::string text() const { return captured.str(); }
};

inline canline::NormalizedBox random_normalized_box(canline::Rng& rng) {
  canline::NormalizedBox box;
  box.w = rng.uniform(0.0, 1.0);
  box.h = rng.uniform(0.0, 1.0);
  box.cx = rng.uniform(box.w / 2, 1.0 - box.w / 2);
  box.cy = rng.uniform(box.h / 2, 1.0 - box.h / 2);
  return box;
}

inline std::vector<canline::GroundTruthAnnotation> random_annotations(
    canline::Rng& rng, std::size_t max_count = 12) {
  std::vector<canline::GroundTruthAnnotation> annos;
  const std::size_t n = rng.below(max_count + 1);
  for (std::size_t i = 0; i < n; ++i) {
    canline::GroundTruthAnnotation a;
    a.label.id = static_cast<int>(rng.below(6));
    a.box = random_normalized_box(rng);
    annos.push_back(a);
  }
  return annos;
}

// Random single-image scene for the matcher/AP oracle comparisons:
// small, with deliberate confidence ties and duplicated truths.
inline canline::EvalScene random_eval_scene(canline::Rng& rng,
                                            int max_classes = 3,
                                            int max_gt = 6, int max_det = 8) {
  using namespace canline;
  EvalScene scene;
  const int n_classes = 1 + static_cast<int>(rng.below(max_classes));
  const int n_gt = 1 + static_cast<int>(rng.below(max_gt));

  const auto random_box = [&rng] {
    BoundingBox b;
    const double cx = rng.uniform(80.0, 560.0);
    const double cy = rng.uniform(80.0, 560.0);
    const double w = rng.uniform(40.0, 200.0);
    const double h = rng.uniform(40.0, 200.0);
    b.x_min = cx - w / 2;
    b.x_max = cx + w / 2;
    b.y_min = cy - h / 2;
    b.y_max = cy + h / 2;
    return b;
  };

  for (int g = 0; g < n_gt; ++g) {
    GroundTruthBox gt;
    gt.label.id = static_cast<int>(rng.below(n_classes));
    gt.label.name = "c" + std::to_string(gt.label.id);
    gt.box = random_box();
    scene.ground_truths.push_back(gt);
  }
  if (rng.bernoulli(0.15)) {  // exact duplicate forces IoU ties
    scene.ground_truths.push_back(scene.ground_truths[rng.below(
        scene.ground_truths.size())]);
  }

  const int n_det = static_cast<int>(rng.below(max_det + 1));
  for (int d = 0; d < n_det; ++d) {
    Detection det;
    if (rng.bernoulli(0.75)) {
      const auto& gt = scene.ground_truths[rng.below(scene.ground_truths.size())];
      det.box = gt.box;
      det.box.x_min += rng.uniform(-50.0, 50.0);
      det.box.x_max += rng.uniform(-50.0, 50.0);
      det.box.y_min += rng.uniform(-50.0, 50.0);
      det.box.y_max += rng.uniform(-50.0, 50.0);
      if (det.box.x_min > det.box.x_max) std::swap(det.box.x_min, det.box.x_max);
      if (det.box.y_min > det.box.y_max) std::swap(det.box.y_min, det.box.y_max);
      det.label.id = rng.bernoulli(0.85)
                         ? gt.label.id
                         : static_cast<int>(rng.below(n_classes));
    } else {
      det.box = random_box();
      det.label.id = static_cast<int>(rng.below(n_classes));
    }
    det.label.name = "c" + std::to_string(det.label.id);
    if (!scene.detections.empty() && rng.bernoulli(0.2)) {
      det.confidence = scene.detections[rng.below(scene.detections.size())]
                           .confidence;  // deliberate tie
    } else {
      det.confidence = rng.uniform(0.05, 1.0);
    }
    scene.detections.push_back(det);
  }
  return scene;
}

}  // namespace testsupport
