#pragma once

#include "dualrep/currents.hpp"
#include "dualrep/grid.hpp"

#include <vector>

namespace dualrep {

using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// dq/dt = j/P sampled like the current field; samples with P below the
/// node threshold are masked.
struct VelocityField {
  Grid1D grid;
  std::vector<double> times;
  ArrayXXd v;      // [time x grid]
  BoolGrid masked;  // [time x grid]
};

VelocityField velocity_field(const CurrentField& current, const RealField& density);

enum class TrajectoryStatus { ok, rejected_seed, terminated_node, left_domain };

/// Ensemble of integrated curves q(t); a terminated path keeps its last
/// position and records the sample index where integration stopped.
struct TrajectoryBundle {
  Rep representation = Rep::position;
  std::vector<double> seeds;
  std::vector<double> times;
  ArrayXXd paths;  // [seed x time]
  std::vector<TrajectoryStatus> status;
  std::vector<int> terminated_at;  // time index, or n_times for completed paths
};

/// Classic one-step 4th-order integration of dq/dt = v(q, t) with cubic
/// interpolation in q and linear interpolation in t. Seeds on masked
/// samples are rejected per seed; paths entering a masked neighbourhood or
/// leaving the grid are terminated and flagged.
TrajectoryBundle integrate(const VelocityField& vfield, const std::vector<double>& seeds,
                           double dt);

/// Conjugate-beable values along each path: (q(t), beable(q(t), t)) pairs.
/// Masked samples along a path are recorded as NaN gaps.
struct ShadowPhaseSpace {
  ArrayXXd beable;  // [seed x time], NaN across gaps
  std::vector<bool> has_gap;
};
ShadowPhaseSpace shadow_phase_space(const TrajectoryBundle& bundle,
                                    const RealField& beable_field);

/// Deterministic low-discrepancy seeds: inverse CDF of a density slice at
/// equally spaced quantiles covering the central `mass_span` of probability.
std::vector<double> quantile_seeds(const ArrayXd& density, const Grid1D& grid,
                                   int count, double mass_span = 0.999);

/// Bin-integrated probabilities of a density slice on `n_bins` equal bins
/// spanning [lo, hi], and the matching empirical histogram of transported
/// sample positions (each carrying probability mass_span/n_samples).
struct TransportComparison {
  ArrayXd bin_prob_expected;
  ArrayXd bin_prob_transported;
  double rms_relative_error = 0.0;
};
TransportComparison compare_transported_density(const ArrayXd& positions,
                                                double mass_span,
                                                const ArrayXd& density,
                                                const Grid1D& grid, double lo,
                                                double hi, int n_bins);

}  // namespace dualrep
