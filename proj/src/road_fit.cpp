#include "ptroad/road_fit.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ptroad {

void DPConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::Parameter, "lambda must be a finite value >= 0");
  }
  if (tau_max < 0) throw Error(ErrorKind::Parameter, "tau_max must be >= 0");
  if (smoothness_sign != 1 && smoothness_sign != -1) {
    throw Error(ErrorKind::Parameter, "smoothness_sign must be +1 or -1");
  }
  if (!(min_support >= 0.0 && min_support < 1.0)) {
    throw Error(ErrorKind::Parameter, "min_support must lie in [0, 1)");
  }
}

DPEnergyTable dp_solve(const VDisparityMap& vd, const DPConfig& cfg) {
  cfg.validate();
  if (vd.d_bins() <= 0 || vd.height() <= 0) {
    throw Error(ErrorKind::EmptyInput, "v-disparity map has no cells");
  }
  if (!vd.normalized()) {
    throw Error(ErrorKind::Parameter, "dp_solve expects a width-normalized v-disparity map");
  }

  const int height = vd.height();
  const int bins = vd.d_bins();
  const int step = static_cast<int>(cfg.direction);
  const double jump_cost = cfg.smoothness_sign * cfg.lambda;

  DPEnergyTable table;
  table.height = height;
  table.d_bins = bins;
  table.direction = cfg.direction;
  table.energies.assign(static_cast<std::size_t>(height) * bins, 0.0);
  table.argmin_tau.assign(table.energies.size(), 0);

  auto cell = [bins](int d, int v) {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(bins) + static_cast<std::size_t>(d);
  };

  const int top = bins - 1;
  for (int v = 0; v < height; ++v) table.energies[cell(top, v)] = -vd.at(top, v);

  for (int d = top - 1; d >= 0; --d) {
    for (int v = 0; v < height; ++v) {
      double best = std::numeric_limits<double>::infinity();
      int best_tau = 0;
      for (int tau = 0; tau <= cfg.tau_max; ++tau) {
        const int next = v + step * tau;
        if (next < 0 || next >= height) break;
        const double candidate = table.energies[cell(d + 1, next)] + jump_cost * tau;
        if (candidate < best) {
          best = candidate;
          best_tau = tau;
        }
      }
      table.energies[cell(d, v)] = -vd.at(d, v) + best;
      table.argmin_tau[cell(d, v)] = best_tau;
    }
  }
  return table;
}

RoadPath extract_path(const DPEnergyTable& table, const VDisparityMap& vd) {
  if (table.height != vd.height() || table.d_bins != vd.d_bins()) {
    throw Error(ErrorKind::Shape, "energy table does not match the v-disparity map");
  }
  RoadPath path;
  if (table.d_bins == 0 || table.height == 0) return path;

  int v = 0;
  for (int r = 1; r < table.height; ++r) {
    if (table.energy(0, r) < table.energy(0, v)) v = r;
  }

  const int step = static_cast<int>(table.direction);
  path.points.reserve(table.d_bins);
  for (int d = 0; d < table.d_bins; ++d) {
    path.points.push_back({d, v, vd.at(d, v)});
    if (d + 1 < table.d_bins) v += step * table.tau(d, v);
  }
  std::reverse(path.points.begin(), path.points.end());
  return path;
}

double path_energy(const RoadPath& path, const VDisparityMap& vd, const DPConfig& cfg) {
  double energy = 0.0;
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    const PathPoint& p = path.points[i];
    energy -= vd.at(p.d, p.v);
    if (i > 0) {
      energy += cfg.smoothness_sign * cfg.lambda * std::abs(path.points[i - 1].v - p.v);
    }
  }
  return energy;
}

std::vector<FitSample> supported_samples(const RoadPath& path, const DPConfig& cfg) {
  std::vector<FitSample> samples;
  for (const PathPoint& p : path.points) {
    if (p.weight >= cfg.min_support && p.weight > 0.0) {
      samples.push_back({static_cast<double>(p.v), static_cast<double>(p.d), p.weight});
    }
  }
  return samples;
}

std::vector<FitSample> refine_path_rows(const RoadPath& path, const VDisparityMap& vd,
                                        const DPConfig& cfg) {
  std::vector<FitSample> samples;
  const auto& pts = path.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const PathPoint& p = pts[i];
    if (!(p.weight >= cfg.min_support && p.weight > 0.0)) continue;

    // The run stays inside the band spanned by the neighbouring path rows.
    int lo = 0;
    int hi = vd.height() - 1;
    for (std::size_t j : {i - 1, i + 1}) {
      if (j >= pts.size()) continue;  // i - 1 wraps for i == 0
      if (pts[j].v < p.v) lo = std::max(lo, pts[j].v);
      if (pts[j].v > p.v) hi = std::min(hi, pts[j].v);
    }

    const double floor_weight = std::max(cfg.min_support, 0.5 * p.weight);
    double sum_w = 0.0;
    double sum_wv = 0.0;
    auto take = [&](int r) {
      const double w = vd.at(p.d, r);
      if (w < floor_weight || w <= 0.0) return false;
      sum_w += w;
      sum_wv += w * r;
      return true;
    };
    take(p.v);
    for (int r = p.v - 1; r >= lo && take(r); --r) {}
    for (int r = p.v + 1; r <= hi && take(r); ++r) {}

    samples.push_back({sum_wv / sum_w, static_cast<double>(p.d), p.weight});
  }
  return samples;
}

LineFit fit_linear(std::span<const FitSample> samples, double min_support) {
  double sw = 0.0, sv = 0.0, sd = 0.0;
  std::size_t used = 0;
  double first_v = 0.0;
  bool distinct_v = false;
  for (const FitSample& s : samples) {
    if (!(s.weight >= min_support) || s.weight <= 0.0) continue;
    if (used == 0) first_v = s.v;
    else if (s.v != first_v) distinct_v = true;
    ++used;
    sw += s.weight;
    sv += s.weight * s.v;
    sd += s.weight * s.d;
  }
  if (used < 2) {
    throw Error(ErrorKind::DegenerateFit, "line fit needs at least 2 supported points, got " +
                                              std::to_string(used));
  }
  if (!distinct_v) {
    throw Error(ErrorKind::DegenerateFit, "all supported points share the same row");
  }

  // Centered normal equations; better conditioned than the raw 2x2 system.
  const double mean_v = sv / sw;
  const double mean_d = sd / sw;
  double var_v = 0.0, cross = 0.0;
  for (const FitSample& s : samples) {
    if (!(s.weight >= min_support) || s.weight <= 0.0) continue;
    var_v += s.weight * (s.v - mean_v) * (s.v - mean_v);
    cross += s.weight * (s.v - mean_v) * (s.d - mean_d);
  }
  if (!(var_v > 0.0)) {
    throw Error(ErrorKind::DegenerateFit, "supported rows have zero spread");
  }

  LineFit fit;
  fit.alpha1 = cross / var_v;
  fit.alpha0 = mean_d - fit.alpha1 * mean_v;

  double sq = 0.0;
  for (const FitSample& s : samples) {
    if (!(s.weight >= min_support) || s.weight <= 0.0) continue;
    const double r = s.d - (fit.alpha0 + fit.alpha1 * s.v);
    sq += s.weight * r * r;
  }
  fit.residual = std::sqrt(sq / sw);

  if (!(fit.alpha1 > 0.0)) {
    throw Error(ErrorKind::NonRoadGeometry,
                "fitted alpha1 = " + std::to_string(fit.alpha1) +
                    " is not positive; disparity must grow toward the image bottom");
  }
  return fit;
}

LineFit fit_linear(const RoadPath& path, const DPConfig& cfg) {
  const std::vector<FitSample> samples = supported_samples(path, cfg);
  return fit_linear(samples, cfg.min_support);
}

int vanishing_row(double alpha0, double alpha1, int height) {
  if (!(alpha1 > 0.0)) {
    throw Error(ErrorKind::Parameter, "vanishing_row requires alpha1 > 0");
  }
  if (height < 1) throw Error(ErrorKind::Parameter, "vanishing_row requires height >= 1");
  const double row = std::round(-alpha0 / alpha1);
  return static_cast<int>(std::clamp(row, 0.0, static_cast<double>(height - 1)));
}

RoadModel fit_road(const DisparityMap& disp, const DPConfig& cfg, std::optional<int> d_max) {
  cfg.validate();
  const VDisparityMap vd = build_vdisparity(disp, d_max, true);
  const DPEnergyTable table = dp_solve(vd, cfg);
  const RoadPath path = extract_path(table, vd);
  const std::vector<FitSample> samples =
      cfg.refine_rows ? refine_path_rows(path, vd, cfg) : supported_samples(path, cfg);
  const LineFit fit = fit_linear(samples, cfg.min_support);

  RoadModel model;
  model.alpha0 = fit.alpha0;
  model.alpha1 = fit.alpha1;
  model.v_py = vanishing_row(fit.alpha0, fit.alpha1, disp.height());
  model.fit_residual = fit.residual;
  model.lambda = cfg.lambda;
  model.tau_max = cfg.tau_max;
  model.smoothness_sign = cfg.smoothness_sign;
  return model;
}

std::string road_model_to_json(const RoadModel& model) {
  nlohmann::ordered_json j;
  j["alpha0"] = model.alpha0;
  j["alpha1"] = model.alpha1;
  j["v_py"] = model.v_py;
  j["fit_residual"] = model.fit_residual;
  j["lambda"] = model.lambda;
  j["tau_max"] = model.tau_max;
  j["smoothness_sign"] = model.smoothness_sign;
  return j.dump();
}

RoadModel road_model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Format, std::string("road model JSON: ") + e.what());
  }
  RoadModel m;
  try {
    m.alpha0 = j.at("alpha0").get<double>();
    m.alpha1 = j.at("alpha1").get<double>();
    m.v_py = j.at("v_py").get<int>();
    m.fit_residual = j.at("fit_residual").get<double>();
    m.lambda = j.at("lambda").get<double>();
    m.tau_max = j.at("tau_max").get<int>();
    m.smoothness_sign = j.at("smoothness_sign").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("road model JSON: ") + e.what());
  }
  return m;
}

}  // namespace ptroad
