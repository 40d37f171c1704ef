#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <random>

#include "ptroad/eval_road.hpp"
#include "test_support.hpp"

using namespace ptroad;
using ptroad::testing::cutpoint_oracle;
using ptroad::testing::random_mask;

namespace {

BinaryMask mask_from(const char* rows, int w, int h) {
  std::vector<bool> bits(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = rows[i] == '1';
  return BinaryMask(w, h, bits);
}

BinaryMask negate(const BinaryMask& m) {
  std::vector<bool> bits(m.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = !m.at_index(i);
  return BinaryMask(m.width(), m.height(), bits);
}

}  // namespace

TEST_CASE("confusion: agreement and total disagreement") {
  std::mt19937_64 rng(1);
  const BinaryMask gt = random_mask(rng, 7, 5, 0.4);
  const ConfusionCounts same = confusion(gt, gt);
  CHECK(same.fp == 0);
  CHECK(same.fn == 0);
  CHECK(same.tp == gt.count());
  const ConfusionCounts flip = confusion(negate(gt), gt);
  CHECK(flip.tp == 0);
  CHECK(flip.tn == 0);
  CHECK(flip.total() == 35);
}

TEST_CASE("confusion: hand-counted 4 x 4 pair") {
  // Row by row: pred / gt pairs give 5 TP, 2 FP, 6 TN, 3 FN.
  const BinaryMask pred = mask_from("1111" "1110" "0000" "0000", 4, 4);
  const BinaryMask gt   = mask_from("1111" "1000" "1110" "0000", 4, 4);
  const ConfusionCounts c = confusion(pred, gt);
  CHECK(c == ConfusionCounts{5, 2, 6, 3});
}

TEST_CASE("confusion: validity mask excludes pixels; mismatched shapes are rejected") {
  const BinaryMask pred = mask_from("1100", 4, 1);
  const BinaryMask gt = mask_from("1010", 4, 1);
  const BinaryMask valid = mask_from("0111", 4, 1);
  CHECK(confusion(pred, gt, &valid) == ConfusionCounts{0, 1, 1, 1});
  try {
    confusion(pred, BinaryMask(2, 2));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Shape);
  }
}

TEST_CASE("property: confusion is invariant under a shared pixel permutation") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 10), h = 1 + static_cast<int>(rng() % 10);
    const BinaryMask p = random_mask(rng, w, h, 0.5), g = random_mask(rng, w, h, 0.5),
                     v = random_mask(rng, w, h, 0.7);
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> pp, gg, vv;
    for (std::size_t i : order) {
      pp.push_back(p.at_index(i));
      gg.push_back(g.at_index(i));
      vv.push_back(v.at_index(i));
    }
    const BinaryMask P(w, h, pp), G(w, h, gg), V(w, h, vv);
    CHECK(confusion(p, g, &v) == confusion(P, G, &V));
  }
}

TEST_CASE("point metrics: (5, 2, 6, 3)") {
  const PointMetrics m = point_metrics({5, 2, 6, 3});
  const double pre = 5.0 / 7.0, rec = 5.0 / 8.0;
  CHECK(m.pre == doctest::Approx(pre).epsilon(1e-15));
  CHECK(m.rec == doctest::Approx(rec).epsilon(1e-15));
  CHECK(m.fpr == doctest::Approx(2.0 / 8.0).epsilon(1e-15));
  CHECK(m.fnr == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
  CHECK(m.f1 == doctest::Approx(2 * pre * rec / (pre + rec)).epsilon(1e-15));
}

TEST_CASE("point metrics: perfect prediction and empty denominators") {
  const PointMetrics m = point_metrics({10, 0, 5, 0});
  CHECK(m.pre == 1.0);
  CHECK(m.rec == 1.0);
  CHECK(m.f1 == 1.0);
  CHECK(m.fpr == 0.0);
  CHECK(m.fnr == 0.0);
  const PointMetrics none = point_metrics({0, 0, 4, 0});
  CHECK(none.pre == 0.0);
  CHECK(none.rec == 0.0);
  CHECK(none.fnr == 1.0);  // fnr + rec = 1 even without positives
  CHECK(none.f1 == 0.0);
}

TEST_CASE("reported recall 91.60% gives fnr 8.40%") {
  const PointMetrics m = point_metrics({9160, 500, 9000, 840});
  CHECK(m.rec == 0.916);
  CHECK(std::abs(m.fnr - 0.084) <= 1e-12);
  CHECK(m.fnr + m.rec == 1.0);
}

TEST_CASE("property: fnr + rec = 1 exactly") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20000; ++trial) {
    const ConfusionCounts c{rng() % 100000, rng() % 1000, rng() % 1000, rng() % 100000};
    const PointMetrics m = point_metrics(c);
    CHECK(m.fnr + m.rec == 1.0);
  }
}

TEST_CASE("sweep: a perfect 0/1 map scores 1") {
  std::mt19937_64 rng(4);
  const BinaryMask gt = random_mask(rng, 8, 8, 0.5);
  std::vector<double> p(64);
  for (std::size_t i = 0; i < 64; ++i) p[i] = gt.at_index(i) ? 1.0 : 0.0;
  const MetricReport r = sweep(ProbabilityMap(8, 8, p), gt);
  CHECK(r.maxf == 1.0);
  CHECK(r.ap == 1.0);
  CHECK(r.threshold_at_maxf == 0.0);
  CHECK(r.n_thresholds == 256);
  CHECK(r.sweep.size() == 256);
}

TEST_CASE("sweep: uniform 0.5 with half the pixels road") {
  std::vector<bool> bits(16, false);
  for (int i = 0; i < 8; ++i) bits[static_cast<std::size_t>(i)] = true;
  const BinaryMask gt(4, 4, bits);
  const MetricReport r = sweep(ProbabilityMap(4, 4, std::vector<double>(16, 0.5)), gt);
  // t < 0.5: everything predicted, pre 0.5, rec 1; t >= 0.5: nothing.
  CHECK(r.maxf == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.threshold_at_maxf == 0.0);  // smallest of the tied thresholds
  CHECK(r.pre == 0.5);
  CHECK(r.rec == 1.0);
  // Recall 1 is reached with precision 0.5 at every level.
  CHECK(r.ap == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("sweep: random 8 x 8 maps on the threshold grid match the cutpoint oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> levels(64);
    const int spread = trial % 3 == 0 ? 8 : 256;  // few distinct values in some trials
    for (int& l : levels) l = static_cast<int>(rng() % spread) * (256 / spread);
    for (int& l : levels) l = std::min(l, 255);
    BinaryMask gt = random_mask(rng, 8, 8, 0.4);
    if (gt.count() == 0) gt.set(0, 0, true);
    std::vector<bool> g(64);
    std::vector<double> p(64);
    for (std::size_t i = 0; i < 64; ++i) {
      g[i] = gt.at_index(i);
      p[i] = levels[i] / 255.0;
    }
    const MetricReport r = sweep(ProbabilityMap(8, 8, p), gt, nullptr, 256);
    const auto o = cutpoint_oracle(levels, g);
    CHECK(std::abs(r.maxf - o.maxf) <= 1e-12);
    CHECK(r.ap == o.ap);
  }
}

TEST_CASE("sweep: arbitrary probabilities match a per-threshold recount") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 40);
    std::vector<double> p(36);
    for (double& x : p) x = uni(rng);
    p[0] = 0.0;
    p[1] = 1.0;
    p[2] = 1.0 / (n - 1);  // lands exactly on a threshold
    BinaryMask gt = random_mask(rng, 6, 6, 0.5);
    gt.set(5, 5, true);
    const BinaryMask valid = random_mask(rng, 6, 6, 0.8);
    BinaryMask v2 = valid;
    v2.set(5, 5, true);
    const MetricReport r = sweep(ProbabilityMap(6, 6, p), gt, &v2, n);
    for (int k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / (n - 1);
      ConfusionCounts c;
      for (std::size_t i = 0; i < 36; ++i) {
        if (!v2.at_index(i)) continue;
        const bool pr = p[i] > t, g = gt.at_index(i);
        pr ? (g ? ++c.tp : ++c.fp) : (g ? ++c.fn : ++c.tn);
      }
      CHECK(r.sweep[static_cast<std::size_t>(k)].counts == c);
    }
  }
}

TEST_CASE("property: maxf never drops on a nested finer sweep") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> p(64);
    for (double& x : p) x = uni(rng);
    BinaryMask gt = random_mask(rng, 8, 8, 0.4);
    gt.set(0, 0, true);
    const ProbabilityMap prob(8, 8, p);
    double prev = -1.0;
    for (int n : {2, 3, 5, 9, 17, 86, 256}) {  // n - 1 divides the next n - 1
      const double f = sweep(prob, gt, nullptr, n).maxf;
      CHECK(f >= prev);
      prev = f;
    }
  }
}

TEST_CASE("property: ap lies in [0, 1]") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(25);
    for (double& x : p) x = uni(rng);
    BinaryMask gt = random_mask(rng, 5, 5, 0.3);
    gt.set(2, 2, true);
    const MetricReport r = sweep(ProbabilityMap(5, 5, p), gt);
    CHECK(r.ap >= 0.0);
    CHECK(r.ap <= 1.0);
    CHECK(r.maxf >= 0.0);
    CHECK(r.maxf <= 1.0);
  }
}

TEST_CASE("sweep: no road among valid pixels, and too few thresholds") {
  const ProbabilityMap p(2, 2, {0.1, 0.2, 0.3, 0.4});
  try {
    sweep(p, BinaryMask(2, 2, false));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UndefinedRecall);
  }
  const BinaryMask gt = mask_from("1000", 2, 2);
  const BinaryMask valid = mask_from("0111", 2, 2);
  CHECK_THROWS_AS(sweep(p, gt, &valid), Error);
  try {
    sweep(p, gt, nullptr, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parameter);
  }
}

TEST_CASE("report JSON and sweep CSV") {
  const BinaryMask gt = mask_from("1100", 2, 2);
  const MetricReport r = sweep(ProbabilityMap(2, 2, {0.9, 0.6, 0.3, 0.1}), gt, nullptr, 11);
  const auto j = nlohmann::json::parse(report_to_json(r));
  for (const char* key : {"maxf", "ap", "pre", "rec", "fpr", "fnr", "threshold_at_maxf", "n_thresholds", "ap_points"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["ap_points"] == 101);
  CHECK(j["n_thresholds"] == 11);
  CHECK(j["maxf"].get<double>() == r.maxf);
  const std::string csv = sweep_to_csv(r);
  CHECK(csv.rfind("threshold,pre,rec,f1\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
}
