// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

// Random filter-chain instances shared by the unit and acceptance tests.

#pragma once

#include <random>

#include "latdpc/channel.hpp"
#include "latdpc/filters.hpp"
#include "oracles.hpp"

namespace latdpc::oracle {

struct FilterInstance {
  CovarianceSpec spec;
  Matrix H;
  Matrix sigma_V;
  Matrix W;
};

inline Matrix random_block_diagonal(int block_rows, int block_cols, int T, Rng& rng,
                                    double scale = 1.0) {
  std::vector<Matrix> blocks;
  for (int t = 0; t < T; ++t) blocks.push_back(random_matrix(block_rows, block_cols, rng, scale));
  return block_diagonal(blocks);
}

/// M, N in {1, 2, 3}, T in {1, 2}; PD Σ_I, block-diagonal PSD Σ_s with random
/// power, block-diagonal H and W, PD Σ_V.
inline FilterInstance random_filter_instance(Rng& rng, double interference_scale = -1.0) {
  std::uniform_int_distribution<int> mn(1, 3), tt(1, 2);
  std::uniform_real_distribution<double> power(0.0, 3.0);
  FilterInstance f;
  const int M = mn(rng), N = mn(rng), T = tt(rng);
  f.spec.T = T;
  f.spec.sigma_I = random_spd(M, rng);
  const double s_scale = interference_scale >= 0.0 ? interference_scale : power(rng);
  std::vector<Matrix> s_blocks;
  for (int t = 0; t < T; ++t) {
    const Matrix a = random_matrix(M, M, rng);
    s_blocks.push_back(s_scale * a * a.transpose());
  }
  f.spec.sigma_s = block_diagonal(s_blocks);
  f.H = random_block_diagonal(N, M, T, rng);
  f.sigma_V = random_spd(M * T, rng);
  f.W = random_block_diagonal(M, M, T, rng, 0.7);
  return f;
}

}  // namespace latdpc::oracle
