// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "latdpc/random.hpp"

namespace latdpc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Relative tolerance for "is a lattice point" and Voronoi membership checks.
inline constexpr double kLatticeTolerance = 1e-9;

/// Full-rank real lattice {G b : b integer}. The columns of the generator span
/// the lattice. Construction validates the generator and precomputes an
/// LLL-reduced basis plus its QR factor for closest-point search.
class LatticeBasis {
 public:
  explicit LatticeBasis(Matrix generator);

  const Matrix& generator() const noexcept { return generator_; }
  int dimension() const noexcept { return static_cast<int>(generator_.rows()); }

  /// Scale γ when the generator is γ·I (hypercubic Voronoi region).
  std::optional<double> cube_scale() const noexcept { return cube_scale_; }
  bool is_diagonal() const noexcept { return diagonal_; }

  /// |det G|, the volume of a fundamental region.
  double volume() const noexcept { return volume_; }

  /// Integer coefficients of the nearest lattice point to g (rounded solve).
  /// Only meaningful when g is (close to) a lattice point.
  IntVector coefficients_of(const Vector& g) const;

  /// True when g is within kLatticeTolerance (relative) of a lattice point.
  bool contains(const Vector& g) const;

  // Search data, exposed for the enumeration routine.
  const Matrix& reduced() const noexcept { return reduced_; }
  const IntMatrix& unimodular() const noexcept { return unimodular_; }
  const Matrix& q_transpose() const noexcept { return q_transpose_; }
  const Matrix& r_factor() const noexcept { return r_factor_; }

 private:
  Matrix generator_;
  Matrix reduced_;          // generator_ * unimodular_
  IntMatrix unimodular_;
  Matrix q_transpose_;
  Matrix r_factor_;
  Eigen::PartialPivLU<Matrix> lu_;
  std::optional<double> cube_scale_;
  bool diagonal_ = false;
  double volume_ = 0.0;
};

struct LatticePoint {
  IntVector coefficients;  ///< b with point = G b
  Vector point;
};

/// Exact closest lattice point to g. Ties resolve to the lexicographically
/// smallest coefficient vector.
LatticePoint nearest_point(const LatticeBasis& basis, const Vector& g);

/// g mod Λ with respect to the Voronoi region: g - nearest_point(g).
Vector mod_lattice(const LatticeBasis& basis, const Vector& g);

/// Draws a vector uniform over the Voronoi region of the lattice.
Vector sample_dither(const LatticeBasis& basis, Rng& rng);

/// True when no lattice point is strictly closer to g than the origin.
bool in_voronoi_region(const LatticeBasis& basis, const Vector& g);

struct VoronoiStats {
  double second_moment = 0.0;  ///< per-dimension, trace(covariance)/dimension
  Matrix covariance;           ///< E[u uᵀ] for u uniform over the Voronoi region
  std::int64_t sample_count = 0;  ///< 0 means analytic
};

struct AnalyticStats {};
struct MonteCarloStats {
  std::int64_t samples = 100000;
};

/// Exact statistics of a hypercubic lattice; throws ConfigError otherwise.
VoronoiStats voronoi_stats(const LatticeBasis& basis, AnalyticStats);
/// Empirical autocorrelation of sample_dither draws, symmetrized.
VoronoiStats voronoi_stats(const LatticeBasis& basis, MonteCarloStats mode, Rng& rng);

/// In-place LLL reduction (δ = 0.99) of the columns of `basis`; returns the
/// unimodular matrix U with original * U = reduced.
IntMatrix lll_reduce(Matrix& basis, double delta = 0.99);

}  // namespace latdpc
