// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <variant>
#include <vector>

#include "latdpc/lattice.hpp"

namespace latdpc {

using ComplexMatrix = Eigen::MatrixXcd;

enum class FadingModel { kSlow, kFast };
enum class ChannelOrigin { kReal, kComplexEmbedded };

namespace fading {
/// Entries i.i.d. zero-mean Gaussian. Complex entries are circularly
/// symmetric: real and imaginary parts each carry variance/2.
struct IidGaussian {
  double variance = 1.0;
};
/// The same per-symbol matrix every channel use. Real N×M.
struct Fixed {
  Matrix H1;
};
}  // namespace fading

using Fading = std::variant<fading::IidGaussian, fading::Fixed>;

/// Antenna counts. With `complex_entries` the counts are complex antennas and
/// each per-symbol block is the 2N×2M real embedding.
struct ChannelShape {
  int M = 1;
  int N = 1;
  int T = 1;
  bool complex_entries = false;

  int real_inputs() const noexcept { return complex_entries ? 2 * M : M; }
  int real_outputs() const noexcept { return complex_entries ? 2 * N : N; }
};

struct ChannelRealization {
  Matrix H;                      ///< NT×MT block-diagonal
  std::vector<Matrix> per_symbol;
  FadingModel model = FadingModel::kSlow;
  ChannelOrigin origin = ChannelOrigin::kReal;
  int complex_rows = 0;          ///< N_c when complex-embedded
  int complex_cols = 0;          ///< M_c when complex-embedded
};

/// a+bi ↦ [[a, −b], [b, a]] entrywise.
Matrix complex_to_real(const ComplexMatrix& H_c);
/// Stacks (Re v_1, Im v_1, Re v_2, ...) to match complex_to_real.
Vector complex_to_real(const Eigen::VectorXcd& v);

/// Block-diagonal concatenation.
Matrix block_diagonal(const std::vector<Matrix>& blocks);

/// Slow: one draw replicated T times. Fast: T independent draws. Fixed
/// fading replicates H1 regardless of the model.
ChannelRealization draw_channel(FadingModel model, const ChannelShape& shape,
                                const Fading& fading, Rng& rng);

/// Zero-mean Gaussian source with covariance ½Σ. The factor is computed once.
class GaussianSource {
 public:
  GaussianSource() = default;
  explicit GaussianSource(const Matrix& sigma);

  int dimension() const noexcept { return dimension_; }
  bool is_zero() const noexcept { return factor_.cols() == 0; }
  Vector draw(Rng& rng) const;

 private:
  int dimension_ = 0;
  Matrix factor_;  // ½Σ = factor·factorᵀ
};

/// s ~ N(0, ½Σ_s). Σ_s = 0 gives s = 0 exactly.
Vector draw_interference(const Matrix& sigma_s, Rng& rng);
/// z ~ N(0, ½I).
Vector draw_noise(int dimension, Rng& rng);

/// y = H(x + s) + z.
Vector transmit(const Matrix& H, const Vector& x, const Vector& s, const Vector& z);

}  // namespace latdpc
