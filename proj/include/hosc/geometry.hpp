#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hosc/error.hpp"

namespace hosc {

inline constexpr double kUnitNormTolerance = 1e-9;
inline constexpr double kZeroNormThreshold = 1e-12;

/// A point on the unit sphere. The id is assigned by whoever owns the set.
struct UnitPoint {
  std::size_t id = 0;
  std::vector<double> coords;

  std::size_t dim() const noexcept { return coords.size(); }
};

/// N unit vectors of dimension D stored row-major. Point ids are the row
/// indices, so they are dense in [0, N) by construction.
class PointSet {
 public:
  PointSet() = default;

  /// Takes ownership of already-normalized rows; validates norms and finiteness.
  PointSet(std::size_t dim, std::vector<double> rows) : dim_(dim), data_(std::move(rows)) {
    if (dim_ == 0) throw Error(ErrorKind::InvalidValue, "dimension must be at least 1");
    if (data_.size() % dim_ != 0)
      throw Error(ErrorKind::DimensionMismatch, "row buffer is not a multiple of the dimension");
    for (std::size_t i = 0; i < size(); ++i) {
      double sq = 0.0;
      for (double x : row(i)) {
        if (!std::isfinite(x))
          throw Error(ErrorKind::InvalidValue, "non-finite coordinate in point " + std::to_string(i));
        sq += x * x;
      }
      if (std::abs(std::sqrt(sq) - 1.0) > kUnitNormTolerance)
        throw Error(ErrorKind::InvalidValue, "point " + std::to_string(i) + " is not unit norm");
    }
  }

  static PointSet from_points(const std::vector<UnitPoint>& points) {
    if (points.empty()) return {};
    const std::size_t d = points.front().dim();
    std::vector<double> rows;
    rows.reserve(points.size() * d);
    for (const auto& p : points) {
      if (p.dim() != d) throw Error(ErrorKind::DimensionMismatch, "points differ in dimension");
      rows.insert(rows.end(), p.coords.begin(), p.coords.end());
    }
    return PointSet(d, std::move(rows));
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const noexcept { return size() == 0; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> mutable_row(std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }

  UnitPoint point(std::size_t i) const {
    auto r = row(i);
    return {i, std::vector<double>(r.begin(), r.end())};
  }

  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

inline UnitPoint normalize(std::span<const double> raw, std::size_t id = 0) {
  if (raw.empty()) throw Error(ErrorKind::InvalidValue, "empty coordinate vector");
  double sq = 0.0;
  for (double x : raw) {
    if (!std::isfinite(x)) throw Error(ErrorKind::InvalidValue, "NaN or Inf coordinate");
    sq += x * x;
  }
  const double norm = std::sqrt(sq);
  if (norm < kZeroNormThreshold) throw Error(ErrorKind::ZeroVector, "vector norm below 1e-12");
  UnitPoint p{id, {}};
  p.coords.reserve(raw.size());
  for (double x : raw) p.coords.push_back(x / norm);
  return p;
}

inline double dot(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw Error(ErrorKind::DimensionMismatch,
                std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
  return s;
}

/// arccos(u.v) for unit vectors, evaluated as 2 atan2(|u - v|, |u + v|).
/// acos loses about half the digits near 0 and pi (a point is ~1.5e-8 rad
/// from itself); this form is exact there.
inline double angular_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw Error(ErrorKind::DimensionMismatch, std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  double diff = 0.0, sum = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    diff += (u[k] - v[k]) * (u[k] - v[k]);
    sum += (u[k] + v[k]) * (u[k] + v[k]);
  }
  return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

inline double euclidean_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw Error(ErrorKind::DimensionMismatch,
                std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double d = u[k] - v[k];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Maximum pairwise angular distance over the given point ids. Singletons have
/// diameter 0.
inline double diameter(const PointSet& points, std::span<const std::size_t> ids) {
  if (ids.empty()) throw Error(ErrorKind::EmptySet, "diameter of an empty set");
  double best = 0.0;
  for (std::size_t a = 0; a < ids.size(); ++a)
    for (std::size_t b = a + 1; b < ids.size(); ++b)
      best = std::max(best, angular_distance(points.row(ids[a]), points.row(ids[b])));
  return best;
}

inline double diameter(const PointSet& points) {
  std::vector<std::size_t> ids(points.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  return diameter(points, ids);
}

/// count / diameter; +infinity when the diameter is zero (singletons and
/// coincident points).
inline double linear_density(std::size_t count, double diam) {
  if (count == 0) throw Error(ErrorKind::EmptySet, "density of an empty set");
  if (diam <= 0.0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(count) / diam;
}

inline double linear_density(const PointSet& points, std::span<const std::size_t> ids) {
  return linear_density(ids.size(), diameter(points, ids));
}

/// log(S_D / 2^D) where S_D = 2 pi^{D/2} / Gamma(D/2) is the surface area of
/// the unit sphere in R^D.
inline double log_hyperoctant_area_fraction(unsigned dim) {
  if (dim == 0) throw Error(ErrorKind::InvalidValue, "dimension must be at least 1");
  const double d = static_cast<double>(dim);
  return std::numbers::ln2 + 0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d) -
         d * std::numbers::ln2;
}

inline double hyperoctant_area_fraction(unsigned dim) {
  return std::exp(log_hyperoctant_area_fraction(dim));
}

}  // namespace hosc
