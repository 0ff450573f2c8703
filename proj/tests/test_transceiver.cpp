// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "latdpc/error.hpp"
#include "latdpc/transceiver.hpp"
#include "pipeline.hpp"

using namespace latdpc;

namespace {

const NestedLatticePair& small_pair() {
  static const NestedLatticePair pair = build_construction_a(oracle::small_pipeline_code());
  return pair;
}

/// Zero-forcing chain for an invertible H: F_r = H̃_F⁻¹, F_s = F_r·H, L = I.
FilterContext zero_forcing(const NestedLatticePair& pair, const Matrix& H, const Matrix& sigma_s) {
  CovarianceSpec spec;
  spec.T = 2;
  spec.sigma_I = 4.0 * Matrix::Identity(2, 2);
  spec.sigma_s = sigma_s;
  FilterContext ctx = build_filter_context(spec, H, pair.coarse_stats().covariance, assignment::None{});
  ctx.F_r = ctx.H_tilde_F.inverse();
  ctx.F_s = ctx.F_r * H;
  ctx.L = Matrix::Identity(4, 4);
  return ctx;
}

double shortest_vector(const Matrix& generator) {
  Matrix reduced = generator;
  lll_reduce(reduced);
  double best = std::numeric_limits<double>::infinity();
  const auto n = reduced.cols();
  IntVector b = IntVector::Constant(n, -3);
  while (true) {
    if (!b.isZero()) best = std::min(best, (reduced * b.cast<double>()).norm());
    Eigen::Index i = n - 1;
    while (i >= 0 && b(i) == 3) b(i--) = -3;
    if (i < 0) break;
    ++b(i);
  }
  return best;
}

}  // namespace

TEST_CASE("encode examples") {
  const NestedLatticePair& pair = small_pair();
  const Vector zero = Vector::Zero(4);
  const Matrix I = Matrix::Identity(4, 4);
  for (std::int64_t i = 0; i < pair.message_count(); ++i) {
    const EncodeRecord r = encode(pair, I, Matrix::Zero(4, 4), i, zero, zero);
    CHECK((r.transmitted - pair.encode_message(i)).norm() < 1e-12);
  }
  std::int64_t zero_index = -1;
  for (std::int64_t i = 0; i < pair.message_count(); ++i) {
    if (pair.encode_message(i).isZero(1e-12)) zero_index = i;
  }
  REQUIRE(zero_index >= 0);
  CHECK(encode(pair, I, Matrix::Zero(4, 4), zero_index, zero, zero).transmitted.isZero(0.0));
  CHECK_THROWS_AS(encode(pair, I, Matrix::Zero(4, 4), pair.message_count(), zero, zero),
                  InvalidArgument);
  CHECK_THROWS_AS(encode(pair, I, Matrix::Zero(4, 4), 0, zero, Vector::Zero(3)), InvalidArgument);
}

TEST_CASE("pre-filter lies in the coarse region and reconstructs exactly") {
  const NestedLatticePair& pair = small_pair();
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const FilterContext ctx = oracle::random_pipeline_context(pair, rng);
    const oracle::PipelineRun run = oracle::run_pipeline(pair, ctx, rng);
    const EncodeRecord& r = run.record;
    CHECK(in_voronoi_region(pair.coarse(), r.pre_filter));
    CHECK(pair.coarse().contains(r.quantizer_point));
    const Vector rebuilt = r.quantizer_point + r.codeword - r.dither - ctx.F_s * run.s;
    CHECK((rebuilt - r.pre_filter).norm() <= 1e-9 * std::max(1.0, r.pre_filter.norm()));
    CHECK((r.transmitted - ctx.F_t * r.pre_filter).norm() < 1e-12 * std::max(1.0, r.transmitted.norm()));
  }
}

TEST_CASE("receiver front end examples") {
  Rng rng(2);
  const Vector u = oracle::random_matrix(4, 1, rng);
  const Vector y = oracle::random_matrix(3, 1, rng);
  CHECK(receiver_front_end(y, Matrix::Zero(4, 3), Matrix::Identity(4, 4), u) == u);
  const Matrix Fr = oracle::random_matrix(4, 3, rng);
  const Matrix L = oracle::random_matrix(4, 4, rng);
  CHECK((receiver_front_end(y, Fr, L, u) - L * (Fr * y + u)).norm() < 1e-12);
  CHECK_THROWS_AS(receiver_front_end(y, Matrix::Zero(4, 4), L, u), InvalidArgument);
}

TEST_CASE("zero-forcing chain without noise lands on c_q + c_c") {
  const NestedLatticePair& pair = small_pair();
  Rng rng(3);
  const Matrix H = oracle::random_block_diagonal(2, 2, 2, rng) + 2.0 * Matrix::Identity(4, 4);
  const FilterContext ctx = zero_forcing(pair, H, 3.0 * Matrix::Identity(4, 4));
  const LatticeDecoder decoder(pair, ctx.L);
  for (std::int64_t i = 0; i < pair.message_count(); ++i) {
    const Vector u = sample_dither(pair.coarse(), rng);
    const Vector s = draw_interference(ctx.sigma_s, rng);
    const EncodeRecord r = encode(pair, ctx.F_t, ctx.F_s, i, s, u);
    const Vector y = transmit(H, r.transmitted, s, Vector::Zero(4));
    const Vector y_hat = receiver_front_end(y, ctx.F_r, ctx.L, u);
    CHECK((y_hat - (r.quantizer_point + r.codeword)).norm() < 1e-9);
    CHECK((equivalent_channel_oracle(r, s, Vector::Zero(4), ctx) - (r.quantizer_point + r.codeword)).norm() < 1e-9);
    CHECK(decoder.decode(y_hat).index == i);
  }
}

TEST_CASE("noiseless decoding recovers the coset") {
  const NestedLatticePair& pair = small_pair();
  Rng rng(4);
  std::uniform_int_distribution<int> shift(-3, 3);
  for (int t = 0; t < 50; ++t) {
    const Matrix L = oracle::random_matrix(4, 4, rng) + 2.0 * Matrix::Identity(4, 4);
    const LatticeDecoder decoder(pair, L);
    for (std::int64_t i = 0; i < pair.message_count(); i += 3) {
      IntVector k(4);
      for (int j = 0; j < 4; ++j) k(j) = shift(rng);
      const Vector cc = pair.encode_message(i) + pair.coarse().generator() * k.cast<double>();
      const DecodeResult d = decoder.decode(L * cc);
      CHECK(d.index == i);
      CHECK((d.codeword - pair.encode_message(i)).norm() < 1e-9);
      CHECK(decode(L * cc, L, pair).index == i);
    }
  }
}

TEST_CASE("decoding is correct inside half the minimum distance") {
  const NestedLatticePair& pair = small_pair();
  Rng rng(5);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    const Matrix L = oracle::random_matrix(4, 4, rng) + 2.5 * Matrix::Identity(4, 4);
    const double d_min = shortest_vector(L * pair.fine().generator());
    const LatticeDecoder decoder(pair, L);
    for (int trial = 0; trial < 50; ++trial) {
      const std::int64_t i = trial % pair.message_count();
      Vector dir(4);
      for (int j = 0; j < 4; ++j) dir(j) = g(rng);
      const Vector noise = dir / dir.norm() * (0.49 * d_min);
      const Vector y_hat = L * pair.encode_message(i) + noise;
      CHECK(decoder.decode(y_hat).index == i);
    }
  }
}

TEST_CASE("equivalent-channel identity on random pipelines") {
  const NestedLatticePair& pair = small_pair();
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(derive_seed(11, {seed}));
    const FilterContext ctx = oracle::random_pipeline_context(pair, rng);
    const oracle::PipelineRun run = oracle::run_pipeline(pair, ctx, rng);
    worst = std::max(worst, run.residual);
  }
  CHECK(worst < 1e-9);

  Rng rng(12);
  CovarianceSpec spec;
  spec.T = 2;
  spec.sigma_I = Matrix::Identity(2, 2);
  spec.sigma_s = Matrix::Zero(4, 4);
  FilterContext ctx = build_filter_context(spec, Matrix::Identity(4, 4), pair.coarse_stats().covariance,
                                           assignment::None{});
  ctx.F_r = ctx.H_tilde_F.inverse();
  const EncodeRecord r = encode(pair, ctx.F_t, ctx.F_s, 3, Vector::Zero(4), sample_dither(pair.coarse(), rng));
  CHECK((equivalent_channel_oracle(r, Vector::Zero(4), Vector::Zero(4), ctx) -
         ctx.L * (r.quantizer_point + r.codeword)).norm() < 1e-12);
}

TEST_CASE("transmitted covariance equals Σ_G and the pre-filter ignores s") {
  const NestedLatticePair& pair = small_pair();
  Rng rng(13);
  const FilterContext ctx = oracle::random_pipeline_context(pair, rng, 4.0, 10.0);
  const int draws = 100000;
  std::vector<Vector> xs;
  xs.reserve(draws);
  Matrix cross = Matrix::Zero(4, 4);
  Matrix cross_sq = Matrix::Zero(4, 4);
  std::uniform_int_distribution<std::int64_t> msg(0, pair.message_count() - 1);
  for (int t = 0; t < draws; ++t) {
    const Vector u = sample_dither(pair.coarse(), rng);
    const Vector s = draw_interference(ctx.sigma_s, rng);
    const EncodeRecord r = encode(pair, ctx.F_t, ctx.F_s, msg(rng), s, u);
    xs.push_back(r.transmitted);
    const Matrix prod = r.pre_filter * s.transpose();
    cross += prod;
    cross_sq += prod.cwiseAbs2();
  }
  CHECK(oracle::rel_frobenius(oracle::sample_covariance(xs), ctx.sigma_G) < 0.02);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double mean = cross(i, j) / draws;
      const double se = std::sqrt((cross_sq(i, j) / draws - mean * mean) / draws);
      CHECK(std::fabs(mean) < 3.0 * se);
    }
  }
}

TEST_CASE("trace JSON round trip") {
  TrialTrace t;
  t.scheme = "la-gpc";
  t.seed = 0xfedcba9876543210ULL;
  t.point_index = 3;
  t.trial_index = 12345;
  t.snr_db = 22.5;
  Rng rng(14);
  t.H = oracle::random_matrix(4, 4, rng);
  t.s = oracle::random_matrix(4, 1, rng);
  t.z = oracle::random_matrix(4, 1, rng);
  t.u = oracle::random_matrix(4, 1, rng);
  t.message_index = 17;
  t.x = oracle::random_matrix(4, 1, rng);
  t.y = oracle::random_matrix(4, 1, rng);
  t.y_hat = oracle::random_matrix(4, 1, rng);
  t.decoded_index = 16;
  t.R_LA_bits = -0.125;
  t.oracle_residual = 1e-15;
  const TrialTrace back = trace_from_json(trace_to_json(t));
  CHECK(back.scheme == t.scheme);
  CHECK(back.seed == t.seed);
  CHECK(back.point_index == t.point_index);
  CHECK(back.trial_index == t.trial_index);
  CHECK(back.snr_db == t.snr_db);
  CHECK(back.H == t.H);
  CHECK(back.s == t.s);
  CHECK(back.z == t.z);
  CHECK(back.u == t.u);
  CHECK(back.x == t.x);
  CHECK(back.y == t.y);
  CHECK(back.y_hat == t.y_hat);
  CHECK(back.message_index == t.message_index);
  CHECK(back.decoded_index == t.decoded_index);
  CHECK(back.R_LA_bits == t.R_LA_bits);
  CHECK(back.oracle_residual == t.oracle_residual);
  CHECK_THROWS_AS(trace_from_json("{not json"), IoError);
  CHECK_THROWS_AS(trace_from_json("{\"scheme\": 1}"), IoError);
}
