#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "dte/so3.hpp"

namespace dte {

struct AveragingOptions {
  double tol = 1e-9;       // tangent step norm at which iteration stops (rad)
  int max_iter = 1000;
  double epsilon = 1e-9;   // distance floor in the L1 weights (rad)
  bool record_trace = false;
  /// L1 only: give up as soon as a lower bound proves that the minimum cost is
  /// at least this value. The bound at an iterate R with distances d_i is
  /// sum_i |d_i - median(d)|, from d(S_i, X) >= |d(S_i, R) - d(R, X)|.
  double abort_above = std::numeric_limits<double>::infinity();
};

struct AveragingResult {
  RotationMatrix rotation = RotationMatrix::Identity();
  double cost = 0.0;       // objective at `rotation`
  int iterations = 0;
  bool converged = false;
  bool aborted = false;  // stopped by abort_above; `cost` is then only an upper bound
  std::vector<double> cost_trace;  // objective after every accepted step
};

/// Geodesic L1 median on SO(3): argmin_R sum_i d(R_i, R). Weiszfeld iteration
/// in the tangent space, R <- Exp(delta) R, with step halving so the
/// objective never increases.
AveragingResult geodesic_l1_median(std::span<const RotationMatrix> samples,
                                   const AveragingOptions& options = {},
                                   const std::optional<RotationMatrix>& init = std::nullopt);

/// Karcher mean: argmin_R sum_i d(R_i, R)^2.
AveragingResult geodesic_l2_mean(std::span<const RotationMatrix> samples,
                                 const AveragingOptions& options = {},
                                 const std::optional<RotationMatrix>& init = std::nullopt);

/// Projection of the entrywise mean onto SO(3); the first sample when the
/// mean is singular.
RotationMatrix chordal_initializer(std::span<const RotationMatrix> samples);

/// sum_i d(R_i, R)
double l1_rotation_cost(std::span<const RotationMatrix> samples, const RotationMatrix& R);
/// sum_i d(R_i, R)^2
double l2_rotation_cost(std::span<const RotationMatrix> samples, const RotationMatrix& R);

}  // namespace dte
