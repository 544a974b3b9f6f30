#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace dataplan {

using Objective = std::function<double(double)>;

struct Argmax {
  double arg;
  double value;
};

/// Golden-section search for the maximum of a unimodal function on
/// [lo, hi]. Stops when the bracket is narrower than rel_tol * (hi - lo).
/// Both endpoints are compared against the interior result, so monotone
/// objectives return the exact boundary.
Argmax golden_section_max(const Objective& f, double lo, double hi, double rel_tol = 1e-10);

/// Maximizes an objective that must be concave on [lo, hi]. Before searching
/// it runs a three-point midpoint test on consecutive triples of a
/// log-spaced probe grid and throws ConcavityError if any midpoint falls
/// below its chord by more than a roundoff allowance.
Argmax maximize_concave(const Objective& f, double lo, double hi);

/// Maximizes a unimodal objective by golden-section search.
Argmax maximize_unimodal(const Objective& f, double lo, double hi);

/// Fallback for objectives whose unimodality is not guaranteed: scans
/// `grid_points` equispaced points, then refines by golden-section search
/// between the neighbours of the best grid point.
Argmax maximize_by_scan(const Objective& f, double lo, double hi, std::size_t grid_points = 2000);

/// Objective of block k evaluated at x. The repair sums these over pooled
/// runs.
using BlockObjective = std::function<double(std::size_t k, double x)>;

/// Maximizer applied to a pooled run's summed objective on the search
/// domain; typically maximize_concave or maximize_unimodal bound to it.
using BlockMaximizer = std::function<Argmax(const Objective&)>;

struct MonotoneRepair {
  std::vector<double> values;
  /// Inclusive index ranges [first, last] that were pooled to one value.
  std::vector<std::pair<std::size_t, std::size_t>> pooled_blocks;
};

/// Turns per-block argmaxes into a nondecreasing sequence that maximizes the
/// summed objective subject to ordering, by repeatedly finding the leftmost
/// run x_i >= ... >= x_j with x_i > x_j, replacing it by the argmax of the
/// run's summed objective, and rescanning (pool-adjacent-violators).
MonotoneRepair repair_monotone(std::span<const double> candidates, const BlockObjective& objective,
                               const BlockMaximizer& maximize);

}  // namespace dataplan
