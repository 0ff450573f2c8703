// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

#include "latdpc/lattice.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "latdpc/error.hpp"

namespace latdpc {
namespace {

void require_finite(const Vector& g) {
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g(i))) {
      throw InvalidArgument("nearest_point: component " + std::to_string(i) +
                            " of the input vector is not finite");
    }
  }
}

// Round half toward -inf so that ties pick the smaller integer.
double round_half_down(double x) { return std::ceil(x - 0.5); }

bool lexicographically_less(const IntVector& a, const IntVector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

}  // namespace

IntMatrix lll_reduce(Matrix& b, double delta) {
  const int n = static_cast<int>(b.cols());
  IntMatrix u = IntMatrix::Identity(n, n);
  if (n <= 1) return u;

  Matrix mu = Matrix::Zero(n, n);
  Vector bn = Vector::Zero(n);  // squared Gram-Schmidt norms

  auto size_reduce = [&](int k, int l) {
    if (std::abs(mu(k, l)) > 0.5) {
      const double q = std::round(mu(k, l));
      const auto qi = static_cast<std::int64_t>(q);
      b.col(k) -= q * b.col(l);
      u.col(k) -= qi * u.col(l);
      mu(k, l) -= q;
      for (int i = 0; i < l; ++i) mu(k, i) -= q * mu(l, i);
    }
  };

  auto gram_schmidt_row = [&](int k) {
    for (int j = 0; j < k; ++j) {
      double s = b.col(k).dot(b.col(j));
      for (int i = 0; i < j; ++i) s -= mu(j, i) * mu(k, i) * bn(i);
      mu(k, j) = s / bn(j);
    }
    double s = b.col(k).squaredNorm();
    for (int j = 0; j < k; ++j) s -= mu(k, j) * mu(k, j) * bn(j);
    bn(k) = s;
  };

  bn(0) = b.col(0).squaredNorm();
  int k = 1;
  int kmax = 0;
  // Floating-point LLL can cycle on pathological inputs; the basis stays
  // valid (unimodular transform) even if the cap is hit.
  const long max_iterations = 100000L * n;
  for (long it = 0; k < n && it < max_iterations; ++it) {
    if (k > kmax) {
      kmax = k;
      gram_schmidt_row(k);
    }
    size_reduce(k, k - 1);
    if (bn(k) < (delta - mu(k, k - 1) * mu(k, k - 1)) * bn(k - 1)) {
      b.col(k).swap(b.col(k - 1));
      u.col(k).swap(u.col(k - 1));
      for (int j = 0; j < k - 1; ++j) std::swap(mu(k, j), mu(k - 1, j));
      const double m = mu(k, k - 1);
      const double big_b = bn(k) + m * m * bn(k - 1);
      mu(k, k - 1) = m * bn(k - 1) / big_b;
      bn(k) = bn(k - 1) * bn(k) / big_b;
      bn(k - 1) = big_b;
      for (int i = k + 1; i <= kmax; ++i) {
        const double t = mu(i, k);
        mu(i, k) = mu(i, k - 1) - m * t;
        mu(i, k - 1) = t + mu(k, k - 1) * mu(i, k);
      }
      k = std::max(1, k - 1);
    } else {
      for (int l = k - 2; l >= 0; --l) size_reduce(k, l);
      ++k;
    }
  }
  return u;
}

LatticeBasis::LatticeBasis(Matrix generator) : generator_(std::move(generator)) {
  const auto n = generator_.rows();
  if (n == 0 || generator_.cols() != n) {
    throw InvalidArgument("LatticeBasis: generator must be a non-empty square matrix");
  }
  if (!generator_.allFinite()) {
    throw InvalidArgument("LatticeBasis: generator has non-finite entries");
  }
  Eigen::JacobiSVD<Matrix> svd(generator_);
  const auto& sv = svd.singularValues();
  if (sv(n - 1) <= 0.0 || sv(0) / sv(n - 1) > 1e12) {
    throw NumericError("LatticeBasis: generator is rank deficient (condition number " +
                       std::to_string(sv(n - 1) > 0 ? sv(0) / sv(n - 1) : INFINITY) + ")");
  }
  lu_.compute(generator_);
  volume_ = std::abs(lu_.determinant());

  diagonal_ = generator_.isDiagonal(0.0);
  if (diagonal_) {
    const double g0 = generator_(0, 0);
    bool same = g0 > 0.0;
    for (Eigen::Index i = 1; i < n && same; ++i) same = generator_(i, i) == g0;
    if (same) cube_scale_ = g0;
  }

  reduced_ = generator_;
  unimodular_ = lll_reduce(reduced_);
  reduced_ = generator_ * unimodular_.cast<double>();
  Eigen::HouseholderQR<Matrix> qr(reduced_);
  r_factor_ = qr.matrixQR().triangularView<Eigen::Upper>();
  q_transpose_ = qr.householderQ().transpose();
}

IntVector LatticeBasis::coefficients_of(const Vector& g) const {
  if (g.size() != generator_.rows()) {
    throw InvalidArgument("LatticeBasis: vector dimension does not match lattice");
  }
  Vector c = lu_.solve(g);
  IntVector b(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) b(i) = static_cast<std::int64_t>(std::llround(c(i)));
  return b;
}

bool LatticeBasis::contains(const Vector& g) const {
  const IntVector b = coefficients_of(g);
  const double residual = (generator_ * b.cast<double>() - g).norm();
  return residual <= kLatticeTolerance * std::max(1.0, g.norm());
}

LatticePoint nearest_point(const LatticeBasis& basis, const Vector& g) {
  const int n = basis.dimension();
  if (g.size() != n) {
    throw InvalidArgument("nearest_point: vector has dimension " + std::to_string(g.size()) +
                          ", lattice has dimension " + std::to_string(n));
  }
  require_finite(g);

  const Matrix& gen = basis.generator();
  if (basis.is_diagonal()) {
    IntVector b(n);
    for (int i = 0; i < n; ++i) {
      b(i) = static_cast<std::int64_t>(round_half_down(g(i) / gen(i, i)));
    }
    return {b, gen * b.cast<double>()};
  }

  // Schnorr-Euchner enumeration over the LLL-reduced basis. The first leaf
  // reached is the Babai nearest-plane point, which fixes the initial radius.
  const Matrix& r = basis.r_factor();
  const Vector y = basis.q_transpose() * g;
  const IntMatrix& u = basis.unimodular();

  std::vector<double> center(n), partial(n + 1, 0.0);
  std::vector<std::int64_t> x(n), dx(n), ddx(n);
  double best = std::numeric_limits<double>::infinity();
  IntVector best_coeffs;
  IntVector z(n);

  auto tie_slack = [](double d) { return kLatticeTolerance * d + 1e-24; };

  auto descend = [&](int k) {
    double s = y(k);
    for (int j = k + 1; j < n; ++j) s -= r(k, j) * static_cast<double>(x[j]);
    center[k] = s / r(k, k);
    x[k] = static_cast<std::int64_t>(std::round(center[k]));
    dx[k] = ddx[k] = center[k] >= static_cast<double>(x[k]) ? 1 : -1;
  };
  auto next_sibling = [&](int k) {
    ddx[k] = -ddx[k];
    x[k] += dx[k];
    dx[k] = ddx[k] - dx[k];
  };

  int k = n - 1;
  descend(k);
  std::int64_t nodes = 0;
  const std::int64_t node_limit = std::int64_t{1} << 40;
  while (true) {
    if (++nodes > node_limit) {
      throw InternalError("nearest_point: enumeration did not terminate");
    }
    const double diff = (center[k] - static_cast<double>(x[k])) * r(k, k);
    const double d = partial[k + 1] + diff * diff;
    if (d <= best + tie_slack(best)) {
      if (k == 0) {
        for (int i = 0; i < n; ++i) z(i) = x[i];
        IntVector coeffs = u * z;
        if (d < best - tie_slack(best) || best_coeffs.size() == 0 ||
            lexicographically_less(coeffs, best_coeffs)) {
          best = std::min(best, d);
          best_coeffs = std::move(coeffs);
        }
        next_sibling(0);
      } else {
        partial[k] = d;
        --k;
        descend(k);
      }
    } else {
      ++k;
      if (k == n) break;
      next_sibling(k);
    }
  }
  if (best_coeffs.size() == 0) {
    throw InternalError("nearest_point: enumeration radius exhausted without a candidate");
  }
  return {best_coeffs, gen * best_coeffs.cast<double>()};
}

Vector mod_lattice(const LatticeBasis& basis, const Vector& g) {
  return g - nearest_point(basis, g).point;
}

Vector sample_dither(const LatticeBasis& basis, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector w(basis.dimension());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = unit(rng);
  return mod_lattice(basis, basis.generator() * w);
}

bool in_voronoi_region(const LatticeBasis& basis, const Vector& g) {
  const LatticePoint p = nearest_point(basis, g);
  const double to_origin = g.squaredNorm();
  const double to_nearest = (g - p.point).squaredNorm();
  return to_origin <= to_nearest + kLatticeTolerance * std::max(1.0, to_origin);
}

VoronoiStats voronoi_stats(const LatticeBasis& basis, AnalyticStats) {
  const auto scale = basis.cube_scale();
  if (!scale) {
    throw ConfigError(
        "voronoi_stats: analytic mode requires a scaled-identity generator; use Monte-Carlo mode");
  }
  const int n = basis.dimension();
  VoronoiStats s;
  s.second_moment = (*scale) * (*scale) / 12.0;
  s.covariance = Matrix::Identity(n, n) * s.second_moment;
  s.sample_count = 0;
  return s;
}

VoronoiStats voronoi_stats(const LatticeBasis& basis, MonteCarloStats mode, Rng& rng) {
  if (mode.samples < 1) throw InvalidArgument("voronoi_stats: sample count must be positive");
  const int n = basis.dimension();
  Matrix acc = Matrix::Zero(n, n);
  for (std::int64_t i = 0; i < mode.samples; ++i) {
    const Vector u = sample_dither(basis, rng);
    acc.selfadjointView<Eigen::Lower>().rankUpdate(u);
  }
  Matrix cov = acc.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(mode.samples);
  cov = 0.5 * (cov + cov.transpose()).eval();
  VoronoiStats s;
  s.covariance = cov;
  s.second_moment = cov.trace() / n;
  s.sample_count = mode.samples;
  return s;
}

}  // namespace latdpc
