#include "dataplan/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dataplan/error.hpp"

namespace dataplan {
namespace {

void check_interval(double lo, double hi, const char* what) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw PreconditionError(std::string(what) + ": need finite lo < hi");
  }
}

Argmax best_of(const Argmax& a, const Argmax& b) { return b.value > a.value ? b : a; }

}  // namespace

Argmax golden_section_max(const Objective& f, double lo, double hi, double rel_tol) {
  check_interval(lo, hi, "golden_section_max");
  const double inv_phi = std::numbers::phi - 1.0;
  const double tol = rel_tol * (hi - lo);
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int iter = 0; iter < 500 && b - a > tol; ++iter) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    }
  }
  Argmax best = fc >= fd ? Argmax{c, fc} : Argmax{d, fd};
  best = best_of(best, {lo, f(lo)});
  best = best_of(best, {hi, f(hi)});
  return best;
}

Argmax maximize_concave(const Objective& f, double lo, double hi) {
  check_interval(lo, hi, "maximize_concave");
  // Probe nodes are log-spaced when the interval is far from the origin
  // relative to its length, which puts resolution near lo where the
  // objectives used here curve the most.
  constexpr int kNodes = 17;
  std::vector<double> x(kNodes);
  const bool log_spaced = lo > 0.0 && hi / lo > 100.0;
  for (int i = 0; i < kNodes; ++i) {
    const double s = static_cast<double>(i) / (kNodes - 1);
    x[i] = log_spaced ? lo * std::pow(hi / lo, s) : lo + s * (hi - lo);
  }
  x.front() = lo;
  x.back() = hi;
  std::vector<double> fx(kNodes);
  for (int i = 0; i < kNodes; ++i) fx[i] = f(x[i]);
  for (int i = 0; i + 2 < kNodes; ++i) {
    const double mid = 0.5 * (x[i] + x[i + 2]);
    const double fmid = f(mid);
    const double chord = 0.5 * (fx[i] + fx[i + 2]);
    const double allowance = 1e-9 * (1.0 + std::abs(fx[i]) + std::abs(fx[i + 2]));
    if (fmid < chord - allowance) {
      std::ostringstream msg;
      msg << "maximize_concave: midpoint test failed on [" << x[i] << ", " << x[i + 2] << "]: f(mid) = " << fmid
          << " < chord " << chord;
      throw ConcavityError(msg.str());
    }
  }
  return golden_section_max(f, lo, hi);
}

Argmax maximize_unimodal(const Objective& f, double lo, double hi) {
  check_interval(lo, hi, "maximize_unimodal");
  return golden_section_max(f, lo, hi);
}

Argmax maximize_by_scan(const Objective& f, double lo, double hi, std::size_t grid_points) {
  check_interval(lo, hi, "maximize_by_scan");
  grid_points = std::max<std::size_t>(grid_points, 3);
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  std::size_t best_i = 0;
  double best_v = f(lo);
  for (std::size_t i = 1; i < grid_points; ++i) {
    const double v = f(i + 1 == grid_points ? hi : lo + step * static_cast<double>(i));
    if (v > best_v) {
      best_v = v;
      best_i = i;
    }
  }
  const double a = lo + step * static_cast<double>(best_i == 0 ? 0 : best_i - 1);
  const double b = std::min(hi, lo + step * static_cast<double>(best_i + 1));
  const Argmax refined = golden_section_max(f, a, b);
  const double grid_arg = best_i + 1 == grid_points ? hi : lo + step * static_cast<double>(best_i);
  return best_of({grid_arg, best_v}, refined);
}

MonotoneRepair repair_monotone(std::span<const double> candidates, const BlockObjective& objective,
                               const BlockMaximizer& maximize) {
  struct Block {
    std::size_t first;
    std::size_t last;
    double value;
  };
  std::vector<Block> blocks;
  blocks.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!std::isfinite(candidates[i])) throw PreconditionError("repair_monotone: non-finite candidate");
    blocks.push_back({i, i, candidates[i]});
  }

  std::vector<std::pair<std::size_t, std::size_t>> pooled;
  for (;;) {
    // Leftmost start of a non-increasing run that actually drops.
    std::size_t start = blocks.size();
    std::size_t end = 0;
    for (std::size_t b = 0; b + 1 < blocks.size(); ++b) {
      std::size_t e = b;
      while (e + 1 < blocks.size() && blocks[e].value >= blocks[e + 1].value) ++e;
      if (e > b && blocks[b].value > blocks[e].value) {
        start = b;
        end = e;
        break;
      }
    }
    if (start == blocks.size()) break;

    const std::size_t first = blocks[start].first;
    const std::size_t last = blocks[end].last;
    const Objective pooled_objective = [&objective, first, last](double x) {
      double sum = 0.0;
      for (std::size_t k = first; k <= last; ++k) sum += objective(k, x);
      return sum;
    };
    const Argmax best = maximize(pooled_objective);
    blocks[start] = {first, last, best.arg};
    blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(start) + 1,
                 blocks.begin() + static_cast<std::ptrdiff_t>(end) + 1);
  }

  MonotoneRepair result;
  result.values.resize(candidates.size());
  for (const Block& block : blocks) {
    for (std::size_t k = block.first; k <= block.last; ++k) result.values[k] = block.value;
    if (block.last > block.first) result.pooled_blocks.emplace_back(block.first, block.last);
  }
  return result;
}

}  // namespace dataplan
