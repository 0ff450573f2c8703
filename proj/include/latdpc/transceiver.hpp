// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "latdpc/filters.hpp"
#include "latdpc/nested_code.hpp"

namespace latdpc {

struct EncodeRecord {
  std::int64_t message_index = 0;
  Vector codeword;         ///< c_c
  Vector dither;           ///< u
  Vector pre_filter;       ///< x̃ = (c_c − F_s s − u) mod Λ_q
  Vector transmitted;      ///< x = F_t x̃
  Vector quantizer_point;  ///< c_q, with x̃ = c_q + c_c − u − F_s s
};

/// x = F_t((c_c − F_s s − u) mod Λ_q).
EncodeRecord encode(const NestedLatticePair& pair, const Matrix& F_t, const Matrix& F_s,
                    std::int64_t message_index, const Vector& s, const Vector& u);

/// ŷ = L(F_r y + u).
Vector receiver_front_end(const Vector& y, const Matrix& F_r, const Matrix& L, const Vector& u);

struct DecodeResult {
  IntVector coefficients;  ///< b̂
  Vector codeword;         ///< ĉ_c = (G_c b̂) mod Λ_q
  std::int64_t index = 0;
};

/// Closest-point decoder on the lattice L·Λ_c. Construct once per L.
class LatticeDecoder {
 public:
  LatticeDecoder(const NestedLatticePair& pair, const Matrix& L);
  DecodeResult decode(const Vector& y_hat) const;

 private:
  const NestedLatticePair* pair_;
  LatticeBasis scaled_;
};

DecodeResult decode(const Vector& y_hat, const Matrix& L, const NestedLatticePair& pair);

/// Equivalent-channel form L(c_q + c_c + e) with
/// e = (F_r H̃_F − I)x̃ + (F_r H − F_s)s + F_r z.
Vector equivalent_channel_oracle(const EncodeRecord& record, const Vector& s, const Vector& z,
                         const FilterContext& ctx);

/// Everything needed to replay one trial.
struct TrialTrace {
  std::string scheme;
  std::uint64_t seed = 0;
  std::int64_t point_index = 0;
  std::int64_t trial_index = 0;
  double snr_db = 0.0;
  Matrix H;
  Vector s;
  Vector z;
  Vector u;
  std::int64_t message_index = 0;
  Vector x;
  Vector y;
  Vector y_hat;
  std::int64_t decoded_index = 0;
  double R_LA_bits = 0.0;
  double oracle_residual = 0.0;
};

std::string trace_to_json(const TrialTrace& trace);
TrialTrace trace_from_json(const std::string& text);

}  // namespace latdpc
