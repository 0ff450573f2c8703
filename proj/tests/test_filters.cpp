// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "filter_instances.hpp"
#include "latdpc/error.hpp"
#include "latdpc/filters.hpp"

using namespace latdpc;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }

Matrix m22(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

double rate_from_determinants(const FilterContext& ctx) {
  return (log2_det(ctx.sigma_V) - log2_det(ctx.sigma_E)) / (2.0 * ctx.T);
}

FilterContext context_of(const oracle::FilterInstance& f) {
  return build_filter_context(f.spec, f.H, f.sigma_V, assignment::Explicit{f.W});
}

}  // namespace

TEST_CASE("build_sigma_G examples") {
  CovarianceSpec s;
  s.T = 2;
  s.sigma_I = m1(1.0);
  s.sigma_s = Matrix::Zero(2, 2);
  CHECK(build_sigma_G(s).isApprox(0.5 * Matrix::Identity(2, 2)));

  s.T = 1;
  s.sigma_I = 2.0 * Matrix::Identity(2, 2);
  s.sigma_s = Matrix::Zero(2, 2);
  CHECK(build_sigma_G(s).isApprox(Matrix::Identity(2, 2)));

  s.T = 3;
  s.sigma_I = m22(4, 2, 2, 2);
  s.sigma_s = Matrix::Zero(6, 6);
  const Matrix g = build_sigma_G(s);
  CHECK(g.rows() == 6);
  for (int t = 0; t < 3; ++t) CHECK(g.block(2 * t, 2 * t, 2, 2).isApprox(m22(2, 1, 1, 1)));
  CHECK(g.block(0, 2, 2, 4).isZero(0.0));
}

TEST_CASE("factor_covariance examples") {
  CHECK(factor_covariance(Matrix::Identity(3, 3)).isApprox(Matrix::Identity(3, 3)));
  CHECK(factor_covariance(m22(4, 2, 2, 2)).isApprox(m22(2, 0, 1, 1)));
  const Matrix r1 = factor_covariance(m22(1, 1, 1, 1));
  REQUIRE(r1.cols() == 1);
  CHECK((r1 * r1.transpose()).isApprox(m22(1, 1, 1, 1)));
  CHECK(std::fabs(r1(0, 0)) == doctest::Approx(1.0));
  CHECK(std::fabs(r1(1, 0)) == doctest::Approx(1.0));

  try {
    factor_covariance(m22(1, 2, 2, 1));
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("eigenvalue -1") != std::string::npos);
  }

  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const Matrix a = oracle::random_matrix(5, 3, rng);
    const Matrix psd = a * a.transpose();
    const Matrix f = factor_covariance(psd);
    CHECK(f.cols() == 3);
    CHECK(oracle::rel_frobenius(f * f.transpose(), psd) < 1e-9);
  }
}

TEST_CASE("scalar Wiener filter oracle") {
  const LmmseResult r = lmmse_filter(m1(std::sqrt(2.0)), m1(1.0), m1(0.0), m1(0.0));
  CHECK(r.filter(0, 0) == doctest::Approx((std::sqrt(2.0) / 2.0) / 1.5).epsilon(1e-14));
  CHECK(r.filter(0, 0) == doctest::Approx(0.4714).epsilon(1e-4));
  CHECK(r.error_covariance(0, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(la_gpc_rate(r.error_covariance, 1) == doctest::Approx(0.5 * std::log2(3.0)).epsilon(1e-14));

  // Least-squares regression of Ũ on Y over 10^6 samples.
  Rng rng(2);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  double syy = 0.0, suy = 0.0, suu = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double x = g(rng), z = g(rng);
    const double y = std::sqrt(2.0) * x + z;
    syy += y * y;
    suy += x * y;
    suu += x * x;
  }
  const double w = suy / syy;
  CHECK(w == doctest::Approx(r.filter(0, 0)).epsilon(0.005));
  CHECK((suu - w * suy) / n == doctest::Approx(1.0 / 6.0).epsilon(0.01));
}

TEST_CASE("LMMSE with nothing observable") {
  const LmmseResult r = lmmse_filter(Matrix::Zero(2, 2), Matrix::Zero(2, 2), Matrix::Zero(2, 2),
                                     Matrix::Zero(2, 2));
  CHECK(r.filter.isZero(0.0));
  CHECK(r.error_covariance.isApprox(0.5 * Matrix::Identity(2, 2)));
  CHECK(la_gpc_rate(r.error_covariance, 1) == doctest::Approx(0.0));
}

TEST_CASE("LMMSE error covariance matches a sampling oracle") {
  Rng rng(3);
  const oracle::FilterInstance f = oracle::random_filter_instance(rng, 1.0);
  const FilterContext ctx = context_of(f);
  const auto m = ctx.H_tilde.cols();
  const auto mt = f.H.cols();
  const auto nt = f.H.rows();
  const Matrix s_factor = factor_covariance(f.spec.sigma_s) * std::sqrt(0.5);
  std::normal_distribution<double> g;
  auto gauss = [&](Eigen::Index k, double scale) {
    Vector v(k);
    for (Eigen::Index i = 0; i < k; ++i) v(i) = scale * g(rng);
    return v;
  };
  Matrix acc = Matrix::Zero(m, m);
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) {
    const Vector x = gauss(m, std::sqrt(0.5));
    const Vector s = s_factor * gauss(s_factor.cols(), 1.0);
    const Vector z = gauss(nt, std::sqrt(0.5));
    const Vector u = ctx.W * s + x;
    const Vector y = ctx.H_tilde * x + f.H * s + z;
    const Vector e = u - ctx.W_U_MMSE * y;
    acc.noalias() += e * e.transpose();
  }
  CHECK(mt == f.spec.sigma_s.rows());
  CHECK(oracle::rel_frobenius(acc / draws, ctx.sigma_EU) < 0.01);
}

TEST_CASE("la_gpc_rate examples") {
  CHECK(la_gpc_rate(0.5 * Matrix::Identity(3, 3), 2) == doctest::Approx(0.0));
  CHECK(la_gpc_rate(Matrix::Identity(2, 2) / 6.0, 1) == doctest::Approx(std::log2(3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(la_gpc_rate(m22(1, 2, 2, 1), 1), NumericError);
}

TEST_CASE("transmit filter examples") {
  const Matrix half = 0.5 * Matrix::Identity(2, 2);
  CHECK(transmit_filter(cholesky_lower(half), cholesky_lower(half)).isApprox(Matrix::Identity(2, 2)));
  const Matrix ft = transmit_filter(cholesky_lower(half), cholesky_lower(Matrix::Identity(2, 2) / 3.0));
  CHECK(ft.isApprox(std::sqrt(1.5) * Matrix::Identity(2, 2)));
  CHECK((ft * (Matrix::Identity(2, 2) / 3.0) * ft.transpose()).isApprox(half));

  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const Matrix sg = oracle::random_spd(4, rng);
    const Matrix sv = oracle::random_spd(4, rng);
    const Matrix f = transmit_filter(factor_covariance(sg), cholesky_lower(sv));
    CHECK(oracle::rel_frobenius(f * sv * f.transpose(), sg) < 1e-9);
  }
  CHECK_THROWS_AS(transmit_filter(Matrix::Identity(3, 2), Matrix::Identity(3, 3)), ConfigError);
}

TEST_CASE("side-information and receive filters") {
  Rng rng(5);
  const Matrix W = oracle::random_matrix(2, 2, rng);
  const Matrix WU = oracle::random_matrix(2, 3, rng);
  const SideInfoFilters f = si_rx_filters(W, WU, cholesky_lower(0.5 * Matrix::Identity(2, 2)));
  CHECK(f.F_s.isApprox(W));
  CHECK(f.F_r.isApprox(WU));
  const SideInfoFilters z = si_rx_filters(Matrix::Zero(2, 2), WU, Matrix::Identity(2, 2));
  CHECK(z.F_s.isZero(0.0));
  const LmmseResult r = lmmse_filter(m1(std::sqrt(2.0)), m1(1.0), m1(0.0), m1(0.0));
  const SideInfoFilters sc = si_rx_filters(m1(0.0), r.filter, m1(std::sqrt(0.5)));
  CHECK(sc.F_r(0, 0) == doctest::Approx(0.4714).epsilon(1e-4));
}

TEST_CASE("effective noise covariance examples") {
  Rng rng(6);
  const Matrix H = oracle::random_matrix(3, 3, rng);
  const Matrix HF = oracle::random_matrix(3, 3, rng) + 3.0 * Matrix::Identity(3, 3);
  const Matrix sv = oracle::random_spd(3, rng);
  const Matrix ss = oracle::random_spd(3, rng);
  const Matrix Fr = HF.inverse();
  const Matrix Fs = Fr * H;
  const Matrix e = effective_noise_covariance(Fr, Fs, H, HF, sv, ss);
  CHECK(oracle::rel_frobenius(e, 0.5 * Fr * Fr.transpose()) < 1e-12);
  const Matrix zero = effective_noise_covariance(Matrix::Zero(3, 3), Matrix::Zero(3, 3), H, HF, sv, ss);
  CHECK(oracle::rel_frobenius(zero, sv) < 1e-15);
  CHECK_THROWS_AS(effective_noise_covariance(Matrix::Zero(2, 3), Fs, H, HF, sv, ss), InvalidArgument);
}

TEST_CASE("inflation filter examples") {
  Rng rng(7);
  const Matrix sv = oracle::random_spd(3, rng);
  const Matrix star = cholesky_lower(sv);
  CHECK(inflation_filter(star, sv).isApprox(Matrix::Identity(3, 3), 1e-12));
  const Matrix d = Vector::LinSpaced(3, 0.2, 0.6).asDiagonal();
  CHECK(inflation_filter(cholesky_lower(d), 2.0 * d).isApprox(Matrix::Identity(3, 3) / std::sqrt(2.0), 1e-12));
  CHECK_THROWS_AS(inflation_filter(star, -sv), NumericError);
}

TEST_CASE("DPC assignment, interference-free rate and the scalar slow-fading W") {
  CHECK(dpc_assignment(Matrix::Zero(2, 2), Matrix::Zero(2, 2)).isZero(0.0));
  const Matrix w = dpc_assignment(m1(std::sqrt(2.0)), m1(1.0));
  CHECK(w(0, 0) == doctest::Approx(0.4714).epsilon(1e-4));

  CHECK(interference_free_rate(Matrix::Zero(2, 2), Matrix::Identity(2, 2), 1) == doctest::Approx(0.0));
  CHECK(interference_free_rate(m1(1.0), m1(1.0), 1) == doctest::Approx(0.5 * std::log2(3.0)));
  CHECK(interference_free_rate(Matrix::Identity(2, 2), 0.5 * Matrix::Identity(2, 2), 1) ==
        doctest::Approx(1.0));

  const Matrix w1 = scalar_slow_fading_assignment(1.0, 2);
  CHECK(w1.rows() == 4);
  CHECK(w1.isApprox(0.5 / std::sqrt(2.0) * Matrix::Identity(4, 4)));
  CHECK(w1(0, 0) == doctest::Approx(0.35355).epsilon(1e-4));
  CHECK(scalar_slow_fading_assignment(2.0, 1)(1, 1) == doctest::Approx(0.53033).epsilon(1e-4));
  CHECK(scalar_slow_fading_assignment(60.0, 1)(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(scalar_slow_fading_assignment(0.0, 1), InvalidArgument);
}

TEST_CASE("scalar slow-fading assignment via W_B reduces to the literal matrix when Σ_G = I") {
  CovarianceSpec spec;
  spec.T = 3;
  spec.sigma_I = 2.0 * Matrix::Identity(2, 2);
  spec.sigma_s = 5.0 * Matrix::Identity(6, 6);
  const Matrix H = Matrix::Identity(6, 6);
  const FilterContext ctx =
      build_filter_context(spec, H, 0.5 * Matrix::Identity(6, 6), assignment::ScalarSlow{2.0});
  CHECK(ctx.W.isApprox(scalar_slow_fading_assignment(2.0, 3), 1e-12));
}

TEST_CASE("scalar no-interference DPC context") {
  CovarianceSpec spec;
  spec.T = 1;
  spec.sigma_I = m1(2.0);
  spec.sigma_s = m1(0.0);
  const FilterContext ctx = build_filter_context(spec, m1(1.0), m1(0.5), assignment::Dpc{});
  CHECK(ctx.R_LA_bits == doctest::Approx(0.5 * std::log2(3.0)).epsilon(1e-12));
  CHECK(ctx.W(0, 0) == doctest::Approx(0.4714).epsilon(1e-4));
  CHECK(ctx.F_t.isApprox(m1(std::sqrt(2.0))));
}

TEST_CASE("degenerate side information") {
  CovarianceSpec spec;
  spec.T = 2;
  spec.sigma_I = m22(2, 0.5, 0.5, 1);
  spec.sigma_s = Matrix::Zero(4, 4);
  Rng rng(8);
  const Matrix H = oracle::random_block_diagonal(2, 2, 2, rng);
  const FilterContext ctx =
      build_filter_context(spec, H, 0.5 * Matrix::Identity(4, 4), assignment::None{});
  CHECK(ctx.F_s.isZero(0.0));
  const LmmseResult plain = lmmse_filter(ctx.H_tilde, H, Matrix::Zero(4, 4), Matrix::Zero(4, 4));
  CHECK(ctx.R_LA_bits == doctest::Approx(la_gpc_rate(plain.error_covariance, 2)).epsilon(1e-12));
  CHECK(ctx.R_LA_bits == doctest::Approx(interference_free_rate(H, ctx.sigma_G, 2)).epsilon(1e-9));
}

TEST_CASE("filter context invariants on random instances") {
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    const oracle::FilterInstance f = oracle::random_filter_instance(rng);
    const FilterContext ctx = context_of(f);
    CHECK(oracle::rel_frobenius(ctx.sigma_G_star * ctx.sigma_G_star.transpose(), ctx.sigma_G) < 1e-9);
    CHECK(ctx.sigma_V_star.isLowerTriangular(0.0));
    CHECK(oracle::rel_frobenius(ctx.sigma_V_star * ctx.sigma_V_star.transpose(), ctx.sigma_V) < 1e-9);
    CHECK(oracle::rel_frobenius(ctx.sigma_E,
                                2.0 * ctx.sigma_V_star * ctx.sigma_EU * ctx.sigma_V_star.transpose()) < 1e-9);
    CHECK(oracle::rel_frobenius(ctx.F_t * ctx.sigma_V * ctx.F_t.transpose(), ctx.sigma_G) < 1e-9);
    CHECK(oracle::rel_frobenius(ctx.L * ctx.sigma_E * ctx.L.transpose(), ctx.sigma_V) < 1e-9);
    const double r = rate_from_determinants(ctx);
    CHECK(std::fabs(r - ctx.R_LA_bits) <= 1e-9 * std::max(1.0, std::fabs(ctx.R_LA_bits)));
    const double det_l = std::log2(std::fabs((ctx.L.transpose() * ctx.L).determinant())) / (2.0 * ctx.T);
    CHECK(det_l == doctest::Approx(ctx.R_LA_bits).epsilon(1e-9));
  }
}

TEST_CASE("DPC optimality and scalar Costa invariance") {
  Rng rng(10);
  for (double scale : {0.0, 0.01, 1.0, 10.0, 100.0}) {
    for (int t = 0; t < 20; ++t) {
      oracle::FilterInstance f = oracle::random_filter_instance(rng, scale);
      const FilterContext ctx = build_filter_context(f.spec, f.H, f.sigma_V, assignment::Dpc{});
      const double free = interference_free_rate(f.H, ctx.sigma_G, f.spec.T);
      CHECK(std::fabs(ctx.R_LA_bits - free) <= 1e-9 * std::max(1.0, free));
    }
  }
  CovarianceSpec spec;
  spec.T = 1;
  spec.sigma_I = m1(3.0);
  double first = 0.0;
  for (double p : {0.0, 1.0, 10.0, 100.0}) {
    spec.sigma_s = m1(p);
    const FilterContext ctx = build_filter_context(spec, m1(0.8), m1(0.5), assignment::Dpc{});
    if (p == 0.0) first = ctx.R_LA_bits;
    CHECK(std::fabs(ctx.R_LA_bits - first) < 1e-9);
  }
}

TEST_CASE("perturbing the Wiener filter never shrinks the effective noise") {
  Rng rng(11);
  const oracle::FilterInstance f = oracle::random_filter_instance(rng, 1.0);
  const FilterContext ctx = context_of(f);
  const double base = log2_det(ctx.sigma_E);
  for (int t = 0; t < 100; ++t) {
    Matrix delta = oracle::random_matrix(static_cast<int>(ctx.W_U_MMSE.rows()),
                                         static_cast<int>(ctx.W_U_MMSE.cols()), rng);
    delta *= 1e-2 / delta.norm();
    const Matrix fr = std::sqrt(2.0) * ctx.sigma_V_star * (ctx.W_U_MMSE + delta);
    const Matrix e = effective_noise_covariance(fr, ctx.F_s, f.H, ctx.H_tilde_F, ctx.sigma_V,
                                                f.spec.sigma_s);
    CHECK(log2_det(e) >= base - 1e-12);
  }
}

TEST_CASE("rank handling and validation") {
  CovarianceSpec spec;
  spec.T = 1;
  spec.sigma_I = m22(1, 1, 1, 1);
  spec.sigma_s = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(build_filter_context(spec, Matrix::Identity(2, 2), 0.5 * Matrix::Identity(2, 2),
                                       assignment::None{}),
                  ConfigError);
  // A one-dimensional lattice matches rank(Σ_G) = 1.
  const FilterContext ctx =
      build_filter_context(spec, Matrix::Identity(2, 2), m1(0.5), assignment::None{});
  CHECK(ctx.sigma_G_star.cols() == 1);
  CHECK(oracle::rel_frobenius(ctx.F_t * ctx.sigma_V * ctx.F_t.transpose(), ctx.sigma_G) < 1e-9);

  spec.sigma_I = Matrix::Identity(2, 2);
  spec.sigma_s = m22(1, 0.5, 0.5, 1);
  spec.T = 2;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.T = 1;
  spec.sigma_s = m22(1, 2, 2, 1);
  CHECK_THROWS_AS(spec.validate(), NumericError);
  spec.sigma_s = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(build_filter_context(spec, Matrix::Identity(2, 2), 0.5 * Matrix::Identity(2, 2),
                                       assignment::Explicit{Matrix::Identity(3, 2)}),
                  InvalidArgument);
}

TEST_CASE("filter context dump names every matrix") {
  CovarianceSpec spec;
  spec.T = 1;
  spec.sigma_I = m1(2.0);
  spec.sigma_s = m1(1.0);
  const FilterContext ctx = build_filter_context(spec, m1(1.0), m1(0.5), assignment::Dpc{});
  std::ostringstream out;
  dump_filter_context(ctx, out);
  for (const char* name : {"R_LA_bits", "Sigma_G_star", "H_tilde", "W_U_MMSE", "Sigma_EU",
                           "Sigma_V_star", "F_t", "F_s", "F_r", "H_tilde_F", "Sigma_E", "L"}) {
    CHECK(out.str().find(name) != std::string::npos);
  }
}
