#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hosc/error.hpp"
#include "hosc/geometry.hpp"
#include "hosc/sign_label.hpp"

namespace hosc {

/// Planted partition on the sphere: each group is a Gaussian bump around the
/// middle point of a random hyperoctant. Group centers are pairwise at
/// Hamming distance >= ceil(D/2), hence at angle >= pi/2.
struct PlantedSpec {
  std::size_t dim = 50;
  std::size_t groups = 5;
  std::size_t per_group = 40;
  /// Per-coordinate noise standard deviation in units of the center's
  /// coordinate magnitude 1/sqrt(D).
  double relative_spread = 0.15;
  std::uint64_t seed = 42;
};

struct PlantedData {
  PointSet points;
  std::vector<std::size_t> truth;  // group per point id
  std::vector<SignLabel> centers;
};

/// Point i belongs to group i % groups, so groups are interleaved in id order.
inline PlantedData make_planted(const PlantedSpec& spec) {
  if (spec.dim < 1 || spec.groups < 1 || spec.per_group < 1 || !(spec.relative_spread >= 0.0))
    throw Error(ErrorKind::InvalidParams, "planted dataset needs dim, groups, per_group >= 1 and spread >= 0");
  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution coin(0.5);
  const unsigned min_sep = static_cast<unsigned>((spec.dim + 1) / 2);

  PlantedData out;
  for (std::size_t attempts = 0; out.centers.size() < spec.groups; ++attempts) {
    if (attempts > 100000) throw Error(ErrorKind::InvalidParams, "cannot place that many separated group centers");
    SignLabel c(spec.dim);
    for (std::size_t k = 0; k < spec.dim; ++k) c.set(k, coin(rng));
    bool ok = true;
    for (const auto& other : out.centers) ok = ok && levenshtein(c, other) >= min_sep;
    if (ok) out.centers.push_back(c);
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.dim));
  std::normal_distribution<double> noise(0.0, spec.relative_spread * scale);
  const std::size_t n = spec.groups * spec.per_group;
  std::vector<double> rows;
  rows.reserve(n * spec.dim);
  std::vector<double> raw(spec.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t g = i % spec.groups;
    for (std::size_t k = 0; k < spec.dim; ++k) raw[k] = (out.centers[g].positive(k) ? scale : -scale) + noise(rng);
    const UnitPoint p = normalize(raw, i);
    rows.insert(rows.end(), p.coords.begin(), p.coords.end());
    out.truth.push_back(g);
  }
  out.points = PointSet(spec.dim, std::move(rows));
  return out;
}

}  // namespace hosc
