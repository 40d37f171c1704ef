#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ptroad/core.hpp"

namespace ptroad {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

struct PointMetrics {
  double pre = 0.0;
  double rec = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
  double f1 = 0.0;
};

/// Counts over pixels where `valid` is set (all pixels when null). Throws
/// Shape on mismatched dimensions.
ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt,
                          const BinaryMask* valid = nullptr);

/// 0/0 ratios are 0, except that fnr is defined as 1 - rec so the pair always
/// sums to one.
PointMetrics point_metrics(const ConfusionCounts& c);

struct SweepPoint {
  double threshold = 0.0;
  ConfusionCounts counts;
  PointMetrics metrics;
};

inline constexpr int kApPoints = 101;
inline constexpr int kDefaultThresholds = 256;

struct MetricReport {
  double maxf = 0.0;
  double ap = 0.0;
  double pre = 0.0;
  double rec = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
  double threshold_at_maxf = 0.0;
  int n_thresholds = 0;
  std::vector<SweepPoint> sweep;
};

/// Mean over r in {0.00, 0.01, ..., 1.00} of the best precision among points
/// with recall >= r (0 where none qualifies). Recall comparisons are done on
/// the integer counts, so they are exact.
double interpolated_ap(const std::vector<SweepPoint>& points);

/// Thresholds t_k = k / (n - 1) with strict `prob > t_k` masks. MaxF keeps the
/// smallest threshold on ties. Throws Parameter for n < 2, Shape on mismatched
/// inputs, UndefinedRecall if no valid pixel is road.
MetricReport sweep(const ProbabilityMap& prob, const BinaryMask& gt,
                   const BinaryMask* valid = nullptr, int n_thresholds = kDefaultThresholds);

std::string report_to_json(const MetricReport& report);
/// Header "threshold,pre,rec,f1", one line per threshold.
std::string sweep_to_csv(const MetricReport& report);

}  // namespace ptroad
