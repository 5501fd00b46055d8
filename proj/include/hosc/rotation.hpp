#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <numbers>
#include <random>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hosc/error.hpp"
#include "hosc/geometry.hpp"
#include "hosc/sign_label.hpp"

namespace hosc {

/// Disjoint coordinate-pair rotation: for pair (i, j) with angle t the matrix
/// holds cos t at (i,i) and (j,j), -sin t at (i,j) and sin t at (j,i); all
/// other coordinates are fixed. Indices are 0-based with i < j.
struct RotationPlan {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<double> angles;

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }

  void validate(std::size_t dim) const {
    if (pairs.size() != angles.size())
      throw Error(ErrorKind::InvalidParams, "pairs and angles differ in length");
    if (pairs.size() > dim / 2)
      throw Error(ErrorKind::OverlappingPairs, "more than floor(D/2) pairs");
    std::vector<bool> used(dim, false);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, j] = pairs[p];
      if (i >= dim || j >= dim)
        throw Error(ErrorKind::IndexOutOfRange,
                    "pair (" + std::to_string(i) + "," + std::to_string(j) + ") outside dimension " +
                        std::to_string(dim));
      if (i >= j) throw Error(ErrorKind::InvalidParams, "pair indices must satisfy i < j");
      if (used[i] || used[j]) throw Error(ErrorKind::OverlappingPairs, "coordinate used by two pairs");
      used[i] = used[j] = true;
      if (!std::isfinite(angles[p])) throw Error(ErrorKind::InvalidValue, "non-finite angle");
    }
  }

  friend bool operator==(const RotationPlan&, const RotationPlan&) = default;
};

struct AnnealConfig {
  double initial_temperature = 0.05;
  double cooling_factor = 0.95;
  unsigned steps_per_temperature = 200;
  double min_temperature = 1e-4;
  double angle_step_stddev = 0.3;
  unsigned restarts = 4;
  std::uint64_t seed = 42;

  void validate() const {
    if (!(initial_temperature > 0.0) || !(min_temperature > 0.0) || !(angle_step_stddev > 0.0))
      throw Error(ErrorKind::InvalidParams, "temperatures and angle step must be positive");
    if (!(cooling_factor > 0.0 && cooling_factor < 1.0))
      throw Error(ErrorKind::InvalidParams, "cooling_factor must lie in (0, 1)");
    if (steps_per_temperature == 0 || restarts == 0)
      throw Error(ErrorKind::InvalidParams, "steps_per_temperature and restarts must be positive");
  }
};

struct RotationReport {
  double initial_centering = 0.0;
  double final_centering = 0.0;
  std::size_t initial_occupied = 0;
  std::size_t final_occupied = 0;
  std::size_t accepted_moves = 0;
  unsigned best_restart = 0;
};

struct RotationOutcome {
  RotationPlan plan;
  PointSet rotated;
  RotationReport report;
};

/// Mean cosine similarity between each point and the middle of its
/// hyperoctant: sum of |coordinates| over all points, divided by N sqrt(D).
inline double centering_value(const PointSet& points) {
  if (points.empty()) throw Error(ErrorKind::EmptySet, "centering value of an empty set");
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double row_sum = 0.0;
    for (double x : points.row(i)) row_sum += std::abs(x);
    total += row_sum;
  }
  return total / (static_cast<double>(points.size()) * std::sqrt(static_cast<double>(points.dim())));
}

/// Number of distinct sign labels among the points.
inline std::size_t occupied_hyperoctants(const PointSet& points) {
  std::unordered_set<SignLabel, SignLabelHash> seen;
  for (std::size_t i = 0; i < points.size(); ++i) seen.insert(SignLabel::of(points.row(i)));
  return seen.size();
}

/// Dense D x D row-major matrix.
struct SquareMatrix {
  std::size_t dim = 0;
  std::vector<double> entries;

  double operator()(std::size_t r, std::size_t c) const noexcept { return entries[r * dim + c]; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return entries[r * dim + c]; }
};

inline SquareMatrix build_rotation(const RotationPlan& plan, std::size_t dim) {
  plan.validate(dim);
  SquareMatrix m{dim, std::vector<double>(dim * dim, 0.0)};
  for (std::size_t k = 0; k < dim; ++k) m(k, k) = 1.0;
  for (std::size_t p = 0; p < plan.size(); ++p) {
    const auto [i, j] = plan.pairs[p];
    const double c = std::cos(plan.angles[p]);
    const double s = std::sin(plan.angles[p]);
    m(i, i) = c;
    m(j, j) = c;
    m(i, j) = -s;
    m(j, i) = s;
  }
  return m;
}

/// Rotates every point; ids (row positions) are unchanged. Only the paired
/// coordinates are touched, so the cost is O(N k) rather than O(N D^2).
inline PointSet apply_rotation(const RotationPlan& plan, const PointSet& points) {
  plan.validate(points.dim());
  std::vector<double> rows = points.data();
  const std::size_t d = points.dim();
  for (std::size_t p = 0; p < plan.size(); ++p) {
    const auto [i, j] = plan.pairs[p];
    const double c = std::cos(plan.angles[p]);
    const double s = std::sin(plan.angles[p]);
    for (std::size_t r = 0; r < points.size(); ++r) {
      const double xi = rows[r * d + i];
      const double xj = rows[r * d + j];
      rows[r * d + i] = c * xi - s * xj;
      rows[r * d + j] = s * xi + c * xj;
    }
  }
  return PointSet(d, std::move(rows));
}

namespace detail {

inline double wrap_angle(double t) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  t = std::fmod(t, two_pi);
  if (t < 0.0) t += two_pi;
  if (t >= two_pi) t = 0.0;
  return t;
}

/// Simulated annealing over (pairs, angles). The objective is tracked as the
/// unnormalized sum of |coordinates|, which splits into one term per unpaired
/// column plus one term per pair; every move touches at most two pairs'
/// worth of columns.
class RotationAnnealer {
 public:
  RotationAnnealer(const PointSet& points, const AnnealConfig& cfg)
      : cfg_(cfg), n_(points.size()), d_(points.dim()), cols_(d_, std::vector<double>(n_)), column_abs_(d_, 0.0) {
    for (std::size_t r = 0; r < n_; ++r) {
      auto row = points.row(r);
      for (std::size_t c = 0; c < d_; ++c) {
        cols_[c][r] = row[c];
        column_abs_[c] += std::abs(row[c]);
      }
    }
    scale_ = static_cast<double>(n_) * std::sqrt(static_cast<double>(d_));
  }

  struct Result {
    RotationPlan plan;
    double objective = 0.0;
    std::size_t accepted = 0;
  };

  Result run(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> step(0.0, cfg_.angle_step_stddev);

    State state;
    state.partner.assign(d_, kUnpaired);
    for (std::size_t c = 0; c + 1 < d_; c += 2) add_pair(state, c, c + 1, 0.0);
    double objective = total(state);

    State best = state;
    double best_objective = objective;
    std::size_t accepted = 0;

    for (double temp = cfg_.initial_temperature; temp > cfg_.min_temperature; temp *= cfg_.cooling_factor) {
      for (unsigned s = 0; s < cfg_.steps_per_temperature; ++s) {
        State candidate = state;
        const double r = unit(rng);
        if (r < 0.70 && !candidate.pairs.empty()) {
          perturb_angle(candidate, rng, step);
        } else if (r < 0.85 && !candidate.pairs.empty() && unused_count(candidate) >= 1) {
          resample_partner(candidate, rng);
        } else if (!toggle_pair(candidate, rng, unit)) {
          continue;
        }
        const double cand_objective = total(candidate);
        const double delta = (cand_objective - objective) / scale_;
        if (delta >= 0.0 || unit(rng) < std::exp(delta / temp)) {
          state = std::move(candidate);
          objective = cand_objective;
          ++accepted;
          if (objective > best_objective) {
            best = state;
            best_objective = objective;
          }
        }
      }
    }
    return {to_plan(best), best_objective / scale_, accepted};
  }

 private:
  static constexpr std::size_t kUnpaired = static_cast<std::size_t>(-1);

  struct Pair {
    std::size_t i, j;
    double angle;
    double contribution;
  };

  struct State {
    std::vector<Pair> pairs;
    std::vector<std::size_t> partner;  // coordinate -> pair index or kUnpaired
  };

  double pair_contribution(std::size_t i, std::size_t j, double angle) const {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const auto& xi = cols_[i];
    const auto& xj = cols_[j];
    double sum = 0.0;
    for (std::size_t r = 0; r < n_; ++r)
      sum += std::abs(c * xi[r] - s * xj[r]) + std::abs(s * xi[r] + c * xj[r]);
    return sum;
  }

  double total(const State& state) const {
    double sum = 0.0;
    for (std::size_t c = 0; c < d_; ++c)
      if (state.partner[c] == kUnpaired) sum += column_abs_[c];
    for (const auto& p : state.pairs) sum += p.contribution;
    return sum;
  }

  void add_pair(State& state, std::size_t a, std::size_t b, double angle) const {
    const std::size_t i = std::min(a, b);
    const std::size_t j = std::max(a, b);
    state.partner[i] = state.partner[j] = state.pairs.size();
    state.pairs.push_back({i, j, angle, pair_contribution(i, j, angle)});
  }

  static void remove_pair(State& state, std::size_t index) {
    const Pair gone = state.pairs[index];
    state.partner[gone.i] = state.partner[gone.j] = kUnpaired;
    if (index + 1 != state.pairs.size()) {
      state.pairs[index] = state.pairs.back();
      state.partner[state.pairs[index].i] = state.partner[state.pairs[index].j] = index;
    }
    state.pairs.pop_back();
  }

  std::size_t unused_count(const State& state) const { return d_ - 2 * state.pairs.size(); }

  std::size_t random_unused(const State& state, std::mt19937_64& rng, std::size_t skip = kUnpaired) const {
    std::vector<std::size_t> unused;
    for (std::size_t c = 0; c < d_; ++c)
      if (state.partner[c] == kUnpaired && c != skip) unused.push_back(c);
    std::uniform_int_distribution<std::size_t> pick(0, unused.size() - 1);
    return unused[pick(rng)];
  }

  void perturb_angle(State& state, std::mt19937_64& rng, std::normal_distribution<double>& step) const {
    std::uniform_int_distribution<std::size_t> pick(0, state.pairs.size() - 1);
    Pair& p = state.pairs[pick(rng)];
    p.angle = wrap_angle(p.angle + step(rng));
    p.contribution = pair_contribution(p.i, p.j, p.angle);
  }

  void resample_partner(State& state, std::mt19937_64& rng) const {
    std::uniform_int_distribution<std::size_t> pick(0, state.pairs.size() - 1);
    const std::size_t index = pick(rng);
    const Pair old = state.pairs[index];
    const std::size_t fresh = random_unused(state, rng);
    std::bernoulli_distribution keep_first(0.5);
    const std::size_t anchor = keep_first(rng) ? old.i : old.j;
    remove_pair(state, index);
    add_pair(state, anchor, fresh, old.angle);
  }

  bool toggle_pair(State& state, std::mt19937_64& rng, std::uniform_real_distribution<double>& unit) const {
    const bool can_add = unused_count(state) >= 2;
    const bool can_remove = !state.pairs.empty();
    if (!can_add && !can_remove) return false;
    const bool add = can_add && (!can_remove || unit(rng) < 0.5);
    if (add) {
      const std::size_t a = random_unused(state, rng);
      const std::size_t b = random_unused(state, rng, a);
      add_pair(state, a, b, unit(rng) * 2.0 * std::numbers::pi);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, state.pairs.size() - 1);
      remove_pair(state, pick(rng));
    }
    return true;
  }

  static RotationPlan to_plan(const State& state) {
    std::vector<Pair> sorted = state.pairs;
    std::sort(sorted.begin(), sorted.end(), [](const Pair& a, const Pair& b) { return a.i < b.i; });
    RotationPlan plan;
    for (const auto& p : sorted) {
      plan.pairs.emplace_back(p.i, p.j);
      plan.angles.push_back(p.angle);
    }
    return plan;
  }

  AnnealConfig cfg_;
  std::size_t n_;
  std::size_t d_;
  std::vector<std::vector<double>> cols_;
  std::vector<double> column_abs_;
  double scale_ = 1.0;
};

}  // namespace detail

/// Searches for a disjoint-pair rotation maximizing the centering value by
/// simulated annealing. Restart r is seeded with cfg.seed + r; the best
/// restart wins, ties going to the lowest index. The returned centering value
/// is never below the input's: if rounding would make it so, the identity is
/// returned instead.
inline RotationOutcome optimize_rotation(const PointSet& points, const AnnealConfig& cfg, unsigned threads = 1) {
  if (points.empty()) throw Error(ErrorKind::EmptySet, "cannot rotate an empty set");
  cfg.validate();

  RotationOutcome out;
  out.report.initial_centering = centering_value(points);
  out.report.initial_occupied = occupied_hyperoctants(points);

  if (points.dim() >= 2) {
    const detail::RotationAnnealer annealer(points, cfg);
    std::vector<detail::RotationAnnealer::Result> results(cfg.restarts);
    if (threads > 1 && cfg.restarts > 1) {
      std::vector<std::future<detail::RotationAnnealer::Result>> jobs;
      for (unsigned r = 0; r < cfg.restarts; ++r)
        jobs.push_back(std::async(std::launch::async, [&annealer, &cfg, r] { return annealer.run(cfg.seed + r); }));
      for (unsigned r = 0; r < cfg.restarts; ++r) results[r] = jobs[r].get();
    } else {
      for (unsigned r = 0; r < cfg.restarts; ++r) results[r] = annealer.run(cfg.seed + r);
    }
    unsigned best = 0;
    for (unsigned r = 0; r < cfg.restarts; ++r) {
      out.report.accepted_moves += results[r].accepted;
      if (results[r].objective > results[best].objective) best = r;
    }
    out.plan = std::move(results[best].plan);
    out.report.best_restart = best;
  }

  out.rotated = apply_rotation(out.plan, points);
  out.report.final_centering = centering_value(out.rotated);
  if (out.report.final_centering < out.report.initial_centering) {
    out.plan = {};
    out.rotated = points;
    out.report.final_centering = out.report.initial_centering;
  }
  out.report.final_occupied = occupied_hyperoctants(out.rotated);
  return out;
}

}  // namespace hosc
