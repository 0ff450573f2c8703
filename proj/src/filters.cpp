// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

#include "latdpc/filters.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "latdpc/error.hpp"

namespace latdpc {
namespace {

constexpr double kPsdTolerance = 1e-9;

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw InvalidArgument(std::string(what) + " must be square");
}

void require_dims(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument("dimension mismatch: " + what);
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool is_block_diagonal(const Matrix& m, int blocks) {
  if (blocks <= 0 || m.rows() % blocks != 0) return false;
  const auto b = m.rows() / blocks;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i / b != j / b && m(i, j) != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

void CovarianceSpec::validate() const {
  if (T < 1) throw ConfigError("covariance spec: T must be positive");
  require_square(sigma_I, "sigma_I");
  require_square(sigma_s, "sigma_s");
  if (sigma_s.rows() != sigma_I.rows() * T) {
    throw ConfigError("covariance spec: sigma_s must be MT x MT");
  }
  if (!is_block_diagonal(sigma_s, T)) {
    throw ConfigError("covariance spec: sigma_s must be block-diagonal with T blocks");
  }
  // factor_covariance performs the PSD checks.
  (void)factor_covariance(sigma_I);
  if (!sigma_s.isZero(0.0)) (void)factor_covariance(sigma_s);
}

Matrix build_sigma_G(const CovarianceSpec& spec) {
  const auto m = spec.sigma_I.rows();
  Matrix g = Matrix::Zero(m * spec.T, m * spec.T);
  for (int t = 0; t < spec.T; ++t) g.block(t * m, t * m, m, m) = 0.5 * spec.sigma_I;
  return g;
}

Matrix cholesky_lower(const Matrix& sigma) {
  require_square(sigma, "covariance");
  Eigen::LLT<Matrix> llt(symmetrize(sigma));
  if (llt.info() != Eigen::Success) throw NumericError("Cholesky: matrix is not positive definite");
  return llt.matrixL();
}

double log2_det(const Matrix& sigma) {
  const Matrix l = cholesky_lower(sigma);
  double s = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) s += std::log2(l(i, i));
  return 2.0 * s;
}

Matrix factor_covariance(const Matrix& sigma_in) {
  require_square(sigma_in, "covariance");
  if (!sigma_in.allFinite()) throw NumericError("factor_covariance: non-finite entries");
  const Matrix sigma = symmetrize(sigma_in);
  const auto n = sigma.rows();
  const double norm = sigma.norm();
  if (n == 0) return sigma;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -kPsdTolerance * std::max(norm, 1e-300)) {
    std::ostringstream msg;
    msg << "factor_covariance: matrix is not positive semidefinite (eigenvalue " << min_eig << ")";
    throw NumericError(msg.str());
  }
  const double tol = kPsdTolerance * norm;
  if (min_eig > tol) {
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }

  // Pivoted (outer-product) Cholesky; stops when the remaining diagonal is
  // below tolerance, which yields exactly rank(Σ) columns.
  Matrix a = sigma;
  Matrix factor = Matrix::Zero(n, n);
  Eigen::Index rank = 0;
  for (; rank < n; ++rank) {
    Eigen::Index piv = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (a(i, i) > best) {
        best = a(i, i);
        piv = i;
      }
    }
    if (best <= tol) break;
    const Vector col = a.col(piv) / std::sqrt(best);
    factor.col(rank) = col;
    a -= col * col.transpose();
  }
  return factor.leftCols(rank);
}

LmmseResult lmmse_filter(const Matrix& H_tilde, const Matrix& H, const Matrix& sigma_s,
                         const Matrix& W) {
  const auto nt = H.rows();
  const auto mt = H.cols();
  const auto m = H_tilde.cols();
  require_dims(H_tilde.rows() == nt, "H_tilde rows vs H rows");
  require_dims(sigma_s.rows() == mt && sigma_s.cols() == mt, "sigma_s vs H columns");
  require_dims(W.rows() == m && W.cols() == mt, "W must be m x MT");

  const Matrix hs = H * sigma_s;
  const Matrix c_uy = 0.5 * (W * hs.transpose() + H_tilde.transpose());
  const Matrix c_y = 0.5 * (H_tilde * H_tilde.transpose() + hs * H.transpose() +
                            Matrix::Identity(nt, nt));
  Eigen::LLT<Matrix> llt(symmetrize(c_y));
  if (llt.info() != Eigen::Success) throw NumericError("lmmse_filter: C_Y is not positive definite");

  LmmseResult out;
  out.filter = llt.solve(c_uy.transpose()).transpose();
  // Joseph form of C_Ũ − W_U·C_YŨ; identical in exact arithmetic and PSD by construction.
  const Matrix a = out.filter * H_tilde - Matrix::Identity(m, m);
  const Matrix b = out.filter * H - W;
  out.error_covariance =
      symmetrize(0.5 * (a * a.transpose() + b * sigma_s * b.transpose() +
                        out.filter * out.filter.transpose()));
  return out;
}

double la_gpc_rate(const Matrix& sigma_EU, int T) {
  require_square(sigma_EU, "sigma_EU");
  if (T < 1) throw InvalidArgument("la_gpc_rate: T must be positive");
  const double m = static_cast<double>(sigma_EU.rows());
  return (-m - log2_det(sigma_EU)) / (2.0 * T);
}

Matrix transmit_filter(const Matrix& sigma_G_star, const Matrix& sigma_V_star) {
  require_square(sigma_V_star, "sigma_V_star");
  if (sigma_G_star.cols() != sigma_V_star.rows()) {
    throw ConfigError("transmit_filter: rank(Sigma_G) = " + std::to_string(sigma_G_star.cols()) +
                      " differs from the lattice dimension " +
                      std::to_string(sigma_V_star.rows()));
  }
  // F_t·Σ_V* = Σ_G*  ⇔  Σ_V*ᵀ·F_tᵀ = Σ_G*ᵀ
  const Matrix ft_t =
      sigma_V_star.transpose().triangularView<Eigen::Upper>().solve(sigma_G_star.transpose());
  return ft_t.transpose();
}

SideInfoFilters si_rx_filters(const Matrix& W, const Matrix& W_U_MMSE, const Matrix& sigma_V_star) {
  require_dims(sigma_V_star.cols() == W.rows() && W.rows() == W_U_MMSE.rows(),
               "Sigma_V* vs W / W_U rows");
  const double r2 = std::sqrt(2.0);
  return {r2 * sigma_V_star * W, r2 * sigma_V_star * W_U_MMSE};
}

Matrix effective_noise_covariance(const Matrix& F_r, const Matrix& F_s, const Matrix& H,
                                  const Matrix& H_tilde_F, const Matrix& sigma_V,
                                  const Matrix& sigma_s) {
  const auto m = sigma_V.rows();
  require_dims(F_r.rows() == m && F_r.cols() == H.rows(), "F_r must be m x NT");
  require_dims(F_s.rows() == m && F_s.cols() == H.cols(), "F_s must be m x MT");
  require_dims(H_tilde_F.rows() == H.rows() && H_tilde_F.cols() == m, "H_tilde_F must be NT x m");
  require_dims(sigma_s.rows() == H.cols(), "sigma_s vs H columns");
  const Matrix a = F_r * H_tilde_F - Matrix::Identity(m, m);
  const Matrix b = F_r * H - F_s;
  return symmetrize(a * sigma_V * a.transpose() + 0.5 * b * sigma_s * b.transpose() +
                    0.5 * F_r * F_r.transpose());
}

Matrix inflation_filter(const Matrix& sigma_V_star, const Matrix& sigma_E) {
  require_dims(sigma_V_star.rows() == sigma_E.rows(), "Sigma_V* vs Sigma_E");
  Matrix e_star;
  try {
    e_star = cholesky_lower(sigma_E);
  } catch (const NumericError&) {
    throw NumericError("inflation_filter: Sigma_E is not positive definite (upstream defect)");
  }
  // L·Σ_E* = Σ_V*  ⇔  Σ_E*ᵀ·Lᵀ = Σ_V*ᵀ
  const Matrix l_t = e_star.transpose().triangularView<Eigen::Upper>().solve(sigma_V_star.transpose());
  return l_t.transpose();
}

Matrix dpc_assignment(const Matrix& H_tilde, const Matrix& H) {
  const Matrix zero_s = Matrix::Zero(H.cols(), H.cols());
  const Matrix zero_w = Matrix::Zero(H_tilde.cols(), H.cols());
  return lmmse_filter(H_tilde, H, zero_s, zero_w).filter * H;
}

double interference_free_rate(const Matrix& H, const Matrix& sigma_G, int T) {
  require_dims(sigma_G.rows() == H.cols() && sigma_G.cols() == H.cols(), "Sigma_G vs H");
  if (T < 1) throw InvalidArgument("interference_free_rate: T must be positive");
  const auto nt = H.rows();
  const Matrix c = H * sigma_G * H.transpose() + 0.5 * Matrix::Identity(nt, nt);
  return (log2_det(c) + static_cast<double>(nt)) / (2.0 * T);
}

Matrix scalar_slow_fading_assignment(double rate_bits, int T) {
  if (!(rate_bits > 0.0)) throw InvalidArgument("scalar_slow_fading_assignment: R must be > 0");
  if (T < 1) throw InvalidArgument("scalar_slow_fading_assignment: T must be positive");
  const double a = (1.0 - std::exp2(-rate_bits)) / std::sqrt(2.0);
  return a * Matrix::Identity(2 * T, 2 * T);
}

Matrix assignment_from_wb(const Matrix& sigma_G_star, const Matrix& W_B, int T) {
  require_square(W_B, "W_B");
  const auto m = W_B.rows();
  require_dims(sigma_G_star.rows() == m * T, "Sigma_G* rows vs M*T");
  Matrix rhs = Matrix::Zero(m * T, m * T);
  for (int t = 0; t < T; ++t) rhs.block(t * m, t * m, m, m) = W_B;
  const Matrix a = std::sqrt(2.0) * sigma_G_star;
  const Matrix w = a.colPivHouseholderQr().solve(rhs);
  const double residual = (a * w - rhs).norm();
  if (residual > 1e-9 * std::max(1.0, rhs.norm())) {
    throw ConfigError(
        "assignment_from_wb: I_T (x) W_B is not in the range of sqrt(2)*Sigma_G*; choose W_B "
        "compatible with the input covariance");
  }
  return w;
}

FilterContext build_filter_context(const CovarianceSpec& spec, const Matrix& H,
                                   const Matrix& sigma_V, const Assignment& assignment) {
  spec.validate();
  const int T = spec.T;
  const auto mt = spec.sigma_I.rows() * T;
  if (H.cols() != mt || H.rows() % T != 0) {
    throw InvalidArgument("build_filter_context: H must be NT x MT");
  }
  FilterContext ctx;
  ctx.T = T;
  ctx.H = H;
  ctx.sigma_s = spec.sigma_s;
  ctx.sigma_G = build_sigma_G(spec);
  ctx.sigma_G_star = factor_covariance(ctx.sigma_G);
  const auto m = ctx.sigma_G_star.cols();
  if (sigma_V.rows() != m || sigma_V.cols() != m) {
    throw ConfigError("build_filter_context: rank(Sigma_G) = " + std::to_string(m) +
                      " but the coarse lattice has dimension " + std::to_string(sigma_V.rows()) +
                      "; choose Sigma_I full rank or a lattice of dimension rank(Sigma_G)");
  }
  ctx.H_tilde = std::sqrt(2.0) * H * ctx.sigma_G_star;

  ctx.W = std::visit(
      [&](const auto& a) -> Matrix {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, assignment::Explicit>) {
          require_dims(a.W.rows() == m && a.W.cols() == mt, "explicit W must be m x MT");
          if (!is_block_diagonal(a.W, T)) {
            throw ConfigError("build_filter_context: W must be block-diagonal");
          }
          return a.W;
        } else if constexpr (std::is_same_v<A, assignment::FromWb>) {
          return assignment_from_wb(ctx.sigma_G_star, a.W_B, T);
        } else if constexpr (std::is_same_v<A, assignment::Dpc>) {
          return dpc_assignment(ctx.H_tilde, H);
        } else if constexpr (std::is_same_v<A, assignment::ScalarSlow>) {
          if (!(a.rate_bits > 0.0)) throw ConfigError("scalar-slow assignment: R must be > 0");
          const auto ant = spec.sigma_I.rows();
          const Matrix wb = (1.0 - std::exp2(-a.rate_bits)) * Matrix::Identity(ant, ant);
          return assignment_from_wb(ctx.sigma_G_star, wb, T);
        } else {
          return Matrix::Zero(m, mt);
        }
      },
      assignment);

  const LmmseResult lm = lmmse_filter(ctx.H_tilde, H, spec.sigma_s, ctx.W);
  ctx.W_U_MMSE = lm.filter;
  ctx.sigma_EU = lm.error_covariance;
  ctx.sigma_V = symmetrize(sigma_V);
  ctx.sigma_V_star = cholesky_lower(ctx.sigma_V);
  ctx.F_t = transmit_filter(ctx.sigma_G_star, ctx.sigma_V_star);
  SideInfoFilters si = si_rx_filters(ctx.W, ctx.W_U_MMSE, ctx.sigma_V_star);
  ctx.F_s = std::move(si.F_s);
  ctx.F_r = std::move(si.F_r);
  ctx.H_tilde_F = H * ctx.F_t;
  ctx.sigma_E =
      effective_noise_covariance(ctx.F_r, ctx.F_s, H, ctx.H_tilde_F, ctx.sigma_V, spec.sigma_s);
  ctx.L = inflation_filter(ctx.sigma_V_star, ctx.sigma_E);
  ctx.R_LA_bits = la_gpc_rate(ctx.sigma_EU, T);
  return ctx;
}

void dump_filter_context(const FilterContext& ctx, std::ostream& out) {
  const Eigen::IOFormat fmt(Eigen::FullPrecision, 0, " ", "\n", "  ", "");
  auto put = [&](const char* name, const Matrix& m) {
    out << name << " " << m.rows() << "x" << m.cols() << "\n" << m.format(fmt) << "\n";
  };
  out << "T " << ctx.T << "\n";
  out << "R_LA_bits " << std::setprecision(17) << ctx.R_LA_bits << "\n";
  put("H", ctx.H);
  put("Sigma_s", ctx.sigma_s);
  put("Sigma_G", ctx.sigma_G);
  put("Sigma_G_star", ctx.sigma_G_star);
  put("H_tilde", ctx.H_tilde);
  put("W", ctx.W);
  put("W_U_MMSE", ctx.W_U_MMSE);
  put("Sigma_EU", ctx.sigma_EU);
  put("Sigma_V", ctx.sigma_V);
  put("Sigma_V_star", ctx.sigma_V_star);
  put("F_t", ctx.F_t);
  put("F_s", ctx.F_s);
  put("F_r", ctx.F_r);
  put("H_tilde_F", ctx.H_tilde_F);
  put("Sigma_E", ctx.sigma_E);
  put("L", ctx.L);
}

}  // namespace latdpc
