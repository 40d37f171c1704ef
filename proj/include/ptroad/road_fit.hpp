#pragma once

#include <span>
#include <string>
#include <vector>

#include "ptroad/core.hpp"
#include "ptroad/vdisparity.hpp"

namespace ptroad {

/// Which neighbouring row a path may move to when the disparity bin grows by
/// one. `Downward` (v + tau) follows a ground plane, whose disparity grows
/// toward the image bottom; `Upward` (v - tau) is the literal recurrence
/// E(d, v) <- E(d + 1, v - tau).
enum class JumpDirection { Downward = 1, Upward = -1 };

struct DPConfig {
  double lambda = 0.02;   // jump penalty per row, on width-normalized histograms
  int tau_max = 12;       // largest row jump per disparity bin
  int smoothness_sign = 1;  // +1 penalizes jumps, -1 rewards them
  double min_support = 0.02;  // path cells below this weight are left out of the fit
  JumpDirection direction = JumpDirection::Downward;
  // Replace each supported path row by the weighted centroid of the histogram
  // run it sits in before fitting (see refine_path_rows).
  bool refine_rows = true;

  /// Throws Parameter on lambda < 0, tau_max < 0, a sign other than +1/-1 or
  /// min_support outside [0, 1).
  void validate() const;
};

/// E(d, v) and the tau chosen at every cell; cells are indexed [v * d_bins + d].
struct DPEnergyTable {
  int height = 0;
  int d_bins = 0;
  JumpDirection direction = JumpDirection::Downward;
  std::vector<double> energies;
  std::vector<int> argmin_tau;

  double energy(int d, int v) const noexcept {
    return energies[static_cast<std::size_t>(v) * d_bins + d];
  }
  int tau(int d, int v) const noexcept {
    return argmin_tau[static_cast<std::size_t>(v) * d_bins + d];
  }
};

struct PathPoint {
  int d = 0;
  int v = 0;
  double weight = 0.0;
};

/// One point per disparity bin, listed from d_max down to 0.
struct RoadPath {
  std::vector<PathPoint> points;
};

/// Weighted observation for the line fit: disparity `d` seen at row `v`.
struct FitSample {
  double v = 0.0;
  double d = 0.0;
  double weight = 0.0;
};

struct LineFit {
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double residual = 0.0;  // weighted RMS of d - f(v)
};

/// Fills E(d, v) = -p(d, v) + min_tau [E(d + 1, v +/- tau) + sign * lambda * tau]
/// from d_max - 1 down to 0; rows outside the map are infeasible, ties go to
/// the smallest tau.
DPEnergyTable dp_solve(const VDisparityMap& vd, const DPConfig& cfg);

/// Starts at argmin_v E(0, v) (smallest v on ties) and follows argmin_tau up
/// to d_max.
RoadPath extract_path(const DPEnergyTable& table, const VDisparityMap& vd);

/// Sum of -p + sign * lambda * tau along `path`; equals E at the path's d = 0
/// cell when the path came from extract_path.
double path_energy(const RoadPath& path, const VDisparityMap& vd, const DPConfig& cfg);

/// Path cells weigh one row of a histogram column; a road bin spans 1/alpha1
/// rows, so an integer path row sits anywhere inside that span. For every
/// path cell with weight >= min_support this takes the contiguous run of
/// column cells around it whose weight is at least half the cell's, bounded by
/// the neighbouring path rows, and returns its weighted centroid row.
std::vector<FitSample> refine_path_rows(const RoadPath& path, const VDisparityMap& vd,
                                        const DPConfig& cfg);

/// Path cells with weight >= min_support, unrefined.
std::vector<FitSample> supported_samples(const RoadPath& path, const DPConfig& cfg);

/// Weighted least squares of d = alpha0 + alpha1 * v over samples with
/// weight >= min_support. Throws DegenerateFit (fewer than 2 samples, or a
/// single distinct v) and NonRoadGeometry (alpha1 <= 0).
LineFit fit_linear(std::span<const FitSample> samples, double min_support);
LineFit fit_linear(const RoadPath& path, const DPConfig& cfg);

/// clamp(round(-alpha0 / alpha1), 0, height - 1); throws Parameter if
/// alpha1 <= 0.
int vanishing_row(double alpha0, double alpha1, int height);

/// build_vdisparity -> dp_solve -> extract_path -> [refine_path_rows] ->
/// fit_linear -> vanishing_row.
RoadModel fit_road(const DisparityMap& disp, const DPConfig& cfg,
                   std::optional<int> d_max = std::nullopt);

std::string road_model_to_json(const RoadModel& model);
/// Throws Format on malformed or incomplete documents.
RoadModel road_model_from_json(const std::string& text);

}  // namespace ptroad
