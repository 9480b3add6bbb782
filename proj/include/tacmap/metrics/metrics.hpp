#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "tacmap/contact/signals.hpp"
#include "tacmap/error.hpp"
#include "tacmap/render/deform_map.hpp"

namespace tacmap {

namespace detail {
inline void require_same_shape(const DeformMap& a, const DeformMap& b) {
  if (!a.same_shape(b)) {
    throw InputError("deform map shapes differ: " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}
}  // namespace detail

// Median with the even-count convention of averaging the two middle values.
inline double median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of an empty sequence");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

// Intersection over union of thresholded contact masks. Two empty masks agree.
inline double deform_iou(const DeformMap& a, const DeformMap& b, double threshold) {
  detail::require_same_shape(a, b);
  if (!(threshold >= 0.0)) throw InputError("contact threshold must be >= 0");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool in_a = a[i] > threshold, in_b = b[i] > threshold;
    inter += (in_a && in_b) ? 1 : 0;
    uni += (in_a || in_b) ? 1 : 0;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace detail {
inline std::optional<double> depth_error_if_defined(const DeformMap& a, const DeformMap& ref,
                                                    double threshold) {
  require_same_shape(a, ref);
  if (!(threshold >= 0.0)) throw InputError("contact threshold must be >= 0");
  std::vector<double> rel;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > threshold && ref[i] > threshold) rel.push_back(std::abs(a[i] - ref[i]) / ref[i]);
  }
  if (rel.empty()) return std::nullopt;
  return median(std::move(rel));
}
}  // namespace detail

// Median relative depth error |a - ref| / ref over pixels active in both maps.
inline double depth_error(const DeformMap& a, const DeformMap& ref, double threshold) {
  auto err = detail::depth_error_if_defined(a, ref, threshold);
  if (!err) throw InputError("depth error undefined: contact masks do not intersect");
  return *err;
}

// Metric distance between contact centroids (m).
inline double position_error(const ContactSignals& a, const ContactSignals& b) {
  if (!a.centroid_point || !b.centroid_point) {
    throw InputError("position error undefined: a contact centroid is absent");
  }
  return (*a.centroid_point - *b.centroid_point).norm();
}

// Pixel-plane distance between contact centroids.
inline double position_error_px(const ContactSignals& a, const ContactSignals& b) {
  if (!a.centroid_pixel || !b.centroid_pixel) {
    throw InputError("position error undefined: a contact centroid is absent");
  }
  return (*a.centroid_pixel - *b.centroid_pixel).norm();
}

inline double force_l2(const ContactSignals& a, const ContactSignals& b) {
  return (a.net_force - b.net_force).norm();
}

// Unweighted mean (u, v) of pixels deeper than the threshold.
inline std::optional<Eigen::Vector2d> mask_centroid(const DeformMap& map, double threshold) {
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  std::size_t n = 0;
  for (int u = 0; u < map.rows(); ++u) {
    for (int v = 0; v < map.cols(); ++v) {
      if (map(u, v) > threshold) {
        sum += Eigen::Vector2d(u, v);
        ++n;
      }
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

struct FrameComparison {
  double iou = 1.0;
  std::optional<double> depth_error;     // absent when masks do not intersect
  std::optional<double> position_error;  // m; needs both centroids and signals
  std::optional<double> position_error_px;
  std::optional<double> force_l2;        // N; absent without a grid
};

struct ComparisonReport {
  std::vector<FrameComparison> frames;
  double iou = 1.0;
  std::optional<double> depth_error;
  std::optional<double> position_error;
  std::optional<double> position_error_px;
  std::optional<double> force_l2;
};

// Per-frame metrics with median aggregates. Signals are optional; without
// them the metric-space fields stay empty.
inline ComparisonReport compare_sequences(std::span<const DeformMap> a,
                                          std::span<const DeformMap> ref, double threshold,
                                          std::span<const ContactSignals> a_signals = {},
                                          std::span<const ContactSignals> ref_signals = {}) {
  if (a.size() != ref.size()) {
    throw InputError("sequence lengths differ: " + std::to_string(a.size()) + " vs " +
                     std::to_string(ref.size()));
  }
  if (a.empty()) throw InputError("nothing to compare");
  const bool with_signals = !a_signals.empty() && !ref_signals.empty();
  if (with_signals && (a_signals.size() != a.size() || ref_signals.size() != ref.size())) {
    throw InputError("signal count does not match frame count");
  }
  ComparisonReport report;
  std::vector<double> ious, depths, positions, positions_px, forces;
  for (std::size_t f = 0; f < a.size(); ++f) {
    FrameComparison fc;
    fc.iou = deform_iou(a[f], ref[f], threshold);
    fc.depth_error = detail::depth_error_if_defined(a[f], ref[f], threshold);
    if (with_signals) {
      const auto& sa = a_signals[f];
      const auto& sb = ref_signals[f];
      if (sa.centroid_point && sb.centroid_point) {
        fc.position_error = position_error(sa, sb);
        fc.position_error_px = position_error_px(sa, sb);
      }
      fc.force_l2 = force_l2(sa, sb);
    } else {
      const auto ca = mask_centroid(a[f], threshold), cb = mask_centroid(ref[f], threshold);
      if (ca && cb) fc.position_error_px = (*ca - *cb).norm();
    }
    ious.push_back(fc.iou);
    if (fc.depth_error) depths.push_back(*fc.depth_error);
    if (fc.position_error) positions.push_back(*fc.position_error);
    if (fc.position_error_px) positions_px.push_back(*fc.position_error_px);
    if (fc.force_l2) forces.push_back(*fc.force_l2);
    report.frames.push_back(fc);
  }
  auto med = [](std::vector<double>& v) -> std::optional<double> {
    if (v.empty()) return std::nullopt;
    return median(v);
  };
  report.iou = median(ious);
  report.depth_error = med(depths);
  report.position_error = med(positions);
  report.position_error_px = med(positions_px);
  report.force_l2 = med(forces);
  return report;
}

}  // namespace tacmap
