#include "ptroad/eval_road.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <string>

namespace ptroad {

namespace {

void check_same_shape(const BinaryMask& a, int width, int height, const char* what) {
  if (a.width() != width || a.height() != height) {
    throw Error(ErrorKind::Shape, std::string(what) + " dimensions differ from the prediction");
  }
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask* valid) {
  check_same_shape(gt, pred.width(), pred.height(), "ground truth");
  if (valid) check_same_shape(*valid, pred.width(), pred.height(), "validity mask");
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (valid && !valid->at_index(i)) continue;
    const bool p = pred.at_index(i);
    const bool g = gt.at_index(i);
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

PointMetrics point_metrics(const ConfusionCounts& c) {
  PointMetrics m;
  m.pre = ratio(c.tp, c.tp + c.fp);
  m.rec = ratio(c.tp, c.tp + c.fn);
  m.fpr = ratio(c.fp, c.fp + c.tn);
  m.fnr = 1.0 - m.rec;
  m.f1 = (m.pre + m.rec) > 0.0 ? 2.0 * m.pre * m.rec / (m.pre + m.rec) : 0.0;
  return m;
}

double interpolated_ap(const std::vector<SweepPoint>& points) {
  double total = 0.0;
  for (int j = 0; j < kApPoints; ++j) {
    double best = 0.0;
    for (const SweepPoint& p : points) {
      const std::uint64_t positives = p.counts.tp + p.counts.fn;
      // rec >= j / 100  <=>  100 * tp >= j * positives
      if (positives > 0 && 100 * p.counts.tp >= static_cast<std::uint64_t>(j) * positives) {
        best = std::max(best, p.metrics.pre);
      }
    }
    total += best;
  }
  return total / kApPoints;
}

MetricReport sweep(const ProbabilityMap& prob, const BinaryMask& gt, const BinaryMask* valid,
                   int n_thresholds) {
  if (n_thresholds < 2) throw Error(ErrorKind::Parameter, "n_thresholds must be >= 2");
  check_same_shape(gt, prob.width(), prob.height(), "ground truth");
  if (valid) check_same_shape(*valid, prob.width(), prob.height(), "validity mask");

  std::vector<double> thresholds(n_thresholds);
  for (int k = 0; k < n_thresholds; ++k) {
    thresholds[k] = static_cast<double>(k) / static_cast<double>(n_thresholds - 1);
  }

  // Bucket each pixel by how many thresholds lie strictly below its
  // probability; it is predicted road for every t_i with i < bucket.
  std::vector<std::uint64_t> pos(n_thresholds + 1, 0), neg(n_thresholds + 1, 0);
  const auto probs = prob.probs();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (valid && !valid->at_index(i)) continue;
    const auto above = static_cast<std::size_t>(
        std::lower_bound(thresholds.begin(), thresholds.end(), probs[i]) - thresholds.begin());
    (gt.at_index(i) ? pos : neg)[above] += 1;
  }
  std::uint64_t positives = 0, negatives = 0;
  for (int i = 0; i <= n_thresholds; ++i) {
    positives += pos[i];
    negatives += neg[i];
  }
  if (positives == 0) {
    throw Error(ErrorKind::UndefinedRecall, "ground truth has no road pixels among valid pixels");
  }

  MetricReport report;
  report.n_thresholds = n_thresholds;
  report.sweep.resize(n_thresholds);
  // Walk k downward, growing the predicted set.
  std::uint64_t tp = 0, fp = 0;
  for (int k = n_thresholds - 1; k >= 0; --k) {
    tp += pos[k + 1];
    fp += neg[k + 1];
    SweepPoint& p = report.sweep[k];
    p.threshold = thresholds[k];
    p.counts = {tp, fp, negatives - fp, positives - tp};
    p.metrics = point_metrics(p.counts);
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < report.sweep.size(); ++k) {
    if (report.sweep[k].metrics.f1 > report.sweep[best].metrics.f1) best = k;
  }
  const SweepPoint& at = report.sweep[best];
  report.maxf = at.metrics.f1;
  report.pre = at.metrics.pre;
  report.rec = at.metrics.rec;
  report.fpr = at.metrics.fpr;
  report.fnr = at.metrics.fnr;
  report.threshold_at_maxf = at.threshold;
  report.ap = interpolated_ap(report.sweep);
  return report;
}

std::string report_to_json(const MetricReport& r) {
  nlohmann::ordered_json j;
  j["maxf"] = r.maxf;
  j["ap"] = r.ap;
  j["pre"] = r.pre;
  j["rec"] = r.rec;
  j["fpr"] = r.fpr;
  j["fnr"] = r.fnr;
  j["threshold_at_maxf"] = r.threshold_at_maxf;
  j["n_thresholds"] = r.n_thresholds;
  j["ap_points"] = kApPoints;
  return j.dump(2);
}

std::string sweep_to_csv(const MetricReport& r) {
  std::string out = "threshold,pre,rec,f1\n";
  for (const SweepPoint& p : r.sweep) {
    out += format_double(p.threshold) + ',' + format_double(p.metrics.pre) + ',' +
           format_double(p.metrics.rec) + ',' + format_double(p.metrics.f1) + '\n';
  }
  return out;
}

}  // namespace ptroad
