// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <variant>

#include "latdpc/lattice.hpp"

namespace latdpc {

/// Per-symbol input covariance constraint (channel input limited by ½Σ_I)
/// and the block-diagonal interference covariance scale (s ~ N(0, ½Σ_s)).
struct CovarianceSpec {
  Matrix sigma_I;  ///< M×M, PSD
  Matrix sigma_s;  ///< MT×MT, PSD, block-diagonal with T blocks
  int T = 1;

  int antennas() const noexcept { return static_cast<int>(sigma_I.rows()); }
  void validate() const;
};

/// Σ_G = ½·I_T ⊗ Σ_I.
Matrix build_sigma_G(const CovarianceSpec& spec);

/// Full-column-rank factor F with F·Fᵀ = Σ. Lower-triangular Cholesky factor
/// when Σ is positive definite; otherwise pivoted Cholesky with rank(Σ) columns.
/// Throws NumericError when Σ has an eigenvalue below -1e-9·‖Σ‖.
Matrix factor_covariance(const Matrix& sigma);

/// Lower-triangular Cholesky factor of a positive-definite matrix.
Matrix cholesky_lower(const Matrix& sigma);

/// log2 det of a positive-definite matrix; throws NumericError otherwise.
double log2_det(const Matrix& sigma);

struct LmmseResult {
  Matrix filter;            ///< W_U,MMSE, m×NT
  Matrix error_covariance;  ///< Σ_E_U, m×m
};

/// Wiener estimate of Ũ = W·S + X̃ from Y = H̃·X̃ + H·S + Z, with
/// X̃ ~ N(0, ½I), S ~ N(0, ½Σ_s), Z ~ N(0, ½I) independent.
LmmseResult lmmse_filter(const Matrix& H_tilde, const Matrix& H, const Matrix& sigma_s,
                         const Matrix& W);

/// R_LA = (1/2T)·log2(det(½I)/det Σ_E_U), bits per channel use. Negative
/// when the assignment inflates Ũ beyond what Y reveals.
double la_gpc_rate(const Matrix& sigma_EU, int T);

/// F_t = Σ_G*·(Σ_V*)⁻¹.
Matrix transmit_filter(const Matrix& sigma_G_star, const Matrix& sigma_V_star);

struct SideInfoFilters {
  Matrix F_s;  ///< √2·Σ_V*·W
  Matrix F_r;  ///< √2·Σ_V*·W_U,MMSE
};
SideInfoFilters si_rx_filters(const Matrix& W, const Matrix& W_U_MMSE, const Matrix& sigma_V_star);

/// Covariance of e = (F_r H̃_F − I)u + (F_r H − F_s)s + F_r z.
Matrix effective_noise_covariance(const Matrix& F_r, const Matrix& F_s, const Matrix& H,
                                  const Matrix& H_tilde_F, const Matrix& sigma_V,
                                  const Matrix& sigma_s);

/// L = Σ_V*·(Σ_E*)⁻¹ with Σ_E* the Cholesky factor of Σ_E.
Matrix inflation_filter(const Matrix& sigma_V_star, const Matrix& sigma_E);

/// Perfect-CSIT assignment W = W_MMSE·H, W_MMSE the interference-free Wiener
/// filter for X̃ from H̃X̃ + Z.
Matrix dpc_assignment(const Matrix& H_tilde, const Matrix& H);

/// (1/2T)·log2(det(HΣ_GHᵀ + ½I)/det(½I)).
double interference_free_rate(const Matrix& H, const Matrix& sigma_G, int T);

/// (1/√2)·I_T ⊗ (1 − 2^{−R})·I_2, the complex-scalar slow-fading assignment
/// written for Σ_G = I.
Matrix scalar_slow_fading_assignment(double rate_bits, int T);

/// Solves √2·Σ_G*·W = I_T ⊗ W_B for W (exactly when Σ_G* is square).
Matrix assignment_from_wb(const Matrix& sigma_G_star, const Matrix& W_B, int T);

namespace assignment {
struct Explicit {
  Matrix W;  ///< m×MT
};
struct FromWb {
  Matrix W_B;  ///< M×M
};
struct Dpc {};
/// W_B = (1 − 2^{−R})·I: the scalar slow-fading choice, valid for any Σ_G.
struct ScalarSlow {
  double rate_bits = 1.0;
};
/// W = 0: the encoder ignores the side information.
struct None {};
}  // namespace assignment

using Assignment = std::variant<assignment::Explicit, assignment::FromWb, assignment::Dpc,
                                assignment::ScalarSlow, assignment::None>;

/// Every matrix of the filter chain for one channel realization.
struct FilterContext {
  int T = 1;
  Matrix H;
  Matrix sigma_s;
  Matrix sigma_G;
  Matrix sigma_G_star;
  Matrix H_tilde;
  Matrix W;
  Matrix W_U_MMSE;
  Matrix sigma_EU;
  Matrix sigma_V;
  Matrix sigma_V_star;
  Matrix F_t;
  Matrix F_s;
  Matrix F_r;
  Matrix H_tilde_F;
  Matrix sigma_E;
  Matrix L;
  double R_LA_bits = 0.0;

  int lattice_dimension() const noexcept { return static_cast<int>(sigma_V.rows()); }
};

/// Builds the chain in dependency order. `sigma_V` is the coarse-lattice dither
/// covariance; its dimension must equal rank(Σ_G).
FilterContext build_filter_context(const CovarianceSpec& spec, const Matrix& H,
                                   const Matrix& sigma_V, const Assignment& assignment);

/// Human-readable dump of every matrix and the rate, full precision.
void dump_filter_context(const FilterContext& ctx, std::ostream& out);

}  // namespace latdpc
