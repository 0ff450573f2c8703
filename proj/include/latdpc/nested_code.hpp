// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "latdpc/lattice.hpp"

namespace latdpc {

/// How the shaping (coarse) lattice is derived from the Construction-A fine lattice.
enum class CoarseMode {
  /// Λ_q = γ·Zⁿ. Analytic Voronoi statistics; coset count p^k.
  kHypercubic,
  /// Λ_q = β·Λ_c for an integer β. Monte-Carlo Voronoi statistics; coset
  /// count βⁿ, so the rate is (n/T)·log2 β regardless of (p, k).
  kSelfSimilar,
};

struct CodeConfig {
  int n = 2;                ///< lattice dimension
  std::int64_t p = 2;       ///< prime field size
  int k = 1;                ///< linear code dimension, 1 <= k <= n
  int symbols = 1;          ///< T, channel uses per codeword
  std::uint64_t seed = 1;
  double target_second_moment = 0.5;
  CoarseMode coarse = CoarseMode::kHypercubic;
  int nesting_scale = 2;    ///< β for kSelfSimilar
  /// Number of messages actually used (coset-subset rate control). 0 = all cosets.
  std::int64_t message_count = 0;
  /// Dither draws used to estimate the coarse covariance in kSelfSimilar mode.
  std::int64_t sigma_v_samples = 400000;

  void validate() const;
};

/// Fine coding lattice Λ_c, coarse shaping sublattice Λ_q = Λ_c·M, and the
/// coset indexing that maps messages to codewords Λ_c ∩ V(Λ_q).
class NestedLatticePair {
 public:
  /// Assembles the pair from a (validated) code generator over F_p. When
  /// `scale` and `coarse_covariance` are given (fixture reload) no Monte-Carlo
  /// estimation is performed.
  NestedLatticePair(const CodeConfig& config, IntMatrix code_generator,
                    std::optional<double> scale = std::nullopt,
                    std::optional<Matrix> coarse_covariance = std::nullopt);

  const CodeConfig& config() const noexcept { return config_; }
  const LatticeBasis& fine() const noexcept { return fine_; }
  const LatticeBasis& coarse() const noexcept { return coarse_; }
  const IntMatrix& nesting_matrix() const noexcept { return nesting_; }
  const VoronoiStats& coarse_stats() const noexcept { return coarse_stats_; }
  const IntMatrix& code_generator() const noexcept { return code_generator_; }
  int dimension() const noexcept { return config_.n; }
  int symbols() const noexcept { return config_.symbols; }
  double scale() const noexcept { return scale_; }

  /// |det M|, the number of cosets of Λ_q in Λ_c.
  std::int64_t coset_count() const noexcept { return coset_count_; }
  /// Messages in use (≤ coset_count).
  std::int64_t message_count() const noexcept { return message_count_; }
  /// (1/T)·log2|det M|.
  double rate_bits() const;
  /// (1/T)·log2(message_count).
  double information_rate_bits() const;

  /// Coset leader of message `index`, reduced into the coarse Voronoi region.
  Vector encode_message(std::int64_t index) const;
  /// Inverse of encode_message on Λ_q cosets. Accepts any point of Λ_c.
  std::int64_t decode_index(const Vector& c) const;

 private:
  struct Parts;
  explicit NestedLatticePair(Parts parts);
  static Parts make_parts(const CodeConfig& config, IntMatrix generator,
                          std::optional<double> scale, std::optional<Matrix> coarse_covariance);
  std::int64_t coset_index_of(const IntVector& fine_coefficients) const;

  CodeConfig config_;
  IntMatrix code_generator_;
  double scale_ = 1.0;
  LatticeBasis fine_;
  LatticeBasis coarse_;
  IntMatrix nesting_;
  VoronoiStats coarse_stats_;
  std::int64_t coset_count_ = 1;
  std::int64_t message_count_ = 1;
  std::vector<std::int64_t> invariants_;  // nontrivial Smith invariants
  std::vector<int> invariant_rows_;
  IntMatrix smith_left_;
  IntMatrix smith_left_inverse_;
};

/// Draws a uniformly random full-rank k×n generator over F_p (redrawing
/// degenerate draws) and builds the nested pair.
NestedLatticePair build_construction_a(const CodeConfig& config, Rng& rng);
/// Same, seeded from config.seed.
NestedLatticePair build_construction_a(const CodeConfig& config);

/// Text fixture: code parameters, generator entries, scale and (for
/// self-similar pairs) the coarse covariance, all at full precision.
void save_pair(const NestedLatticePair& pair, std::ostream& out);
NestedLatticePair load_pair(std::istream& in);

}  // namespace latdpc
