// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

#include "latdpc/transceiver.hpp"

#include <vector>

#include <json.hpp>

#include "latdpc/error.hpp"

namespace latdpc {
namespace {

using nlohmann::json;

json to_json_vector(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json_matrix(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(r);
  }
  return rows;
}

Vector vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix matrix_from(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return Matrix();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw IoError("trace: ragged matrix");
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  return m;
}

}  // namespace

EncodeRecord encode(const NestedLatticePair& pair, const Matrix& F_t, const Matrix& F_s,
                    std::int64_t message_index, const Vector& s, const Vector& u) {
  const int n = pair.dimension();
  if (u.size() != n || F_s.rows() != n || F_s.cols() != s.size() || F_t.cols() != n) {
    throw InvalidArgument("encode: dimension mismatch");
  }
  EncodeRecord r;
  r.message_index = message_index;
  r.codeword = pair.encode_message(message_index);
  r.dither = u;
  const Vector v = r.codeword - F_s * s - u;
  const LatticePoint q = nearest_point(pair.coarse(), v);
  r.pre_filter = v - q.point;
  r.quantizer_point = -q.point;
  r.transmitted = F_t * r.pre_filter;
  return r;
}

Vector receiver_front_end(const Vector& y, const Matrix& F_r, const Matrix& L, const Vector& u) {
  if (F_r.cols() != y.size() || F_r.rows() != u.size() || L.cols() != u.size()) {
    throw InvalidArgument("receiver_front_end: dimension mismatch");
  }
  return L * (F_r * y + u);
}

LatticeDecoder::LatticeDecoder(const NestedLatticePair& pair, const Matrix& L)
    : pair_(&pair), scaled_(L * pair.fine().generator()) {}

DecodeResult LatticeDecoder::decode(const Vector& y_hat) const {
  const LatticePoint p = nearest_point(scaled_, y_hat);
  DecodeResult r;
  r.coefficients = p.coefficients;
  const Vector fine_point = pair_->fine().generator() * p.coefficients.cast<double>();
  r.codeword = mod_lattice(pair_->coarse(), fine_point);
  r.index = pair_->decode_index(r.codeword);
  return r;
}

DecodeResult decode(const Vector& y_hat, const Matrix& L, const NestedLatticePair& pair) {
  return LatticeDecoder(pair, L).decode(y_hat);
}

Vector equivalent_channel_oracle(const EncodeRecord& record, const Vector& s, const Vector& z,
                         const FilterContext& ctx) {
  const auto m = ctx.F_r.rows();
  const Vector e = (ctx.F_r * ctx.H_tilde_F - Matrix::Identity(m, m)) * record.pre_filter +
                   (ctx.F_r * ctx.H - ctx.F_s) * s + ctx.F_r * z;
  return ctx.L * (record.quantizer_point + record.codeword + e);
}

std::string trace_to_json(const TrialTrace& t) {
  json j;
  j["scheme"] = t.scheme;
  j["seed"] = t.seed;
  j["point_index"] = t.point_index;
  j["trial_index"] = t.trial_index;
  j["snr_db"] = t.snr_db;
  j["H"] = to_json_matrix(t.H);
  j["s"] = to_json_vector(t.s);
  j["z"] = to_json_vector(t.z);
  j["u"] = to_json_vector(t.u);
  j["message_index"] = t.message_index;
  j["x"] = to_json_vector(t.x);
  j["y"] = to_json_vector(t.y);
  j["y_hat"] = to_json_vector(t.y_hat);
  j["decoded_index"] = t.decoded_index;
  j["R_LA_bits"] = t.R_LA_bits;
  j["oracle_residual"] = t.oracle_residual;
  return j.dump(2);
}

TrialTrace trace_from_json(const std::string& text) {
  TrialTrace t;
  try {
    const json j = json::parse(text);
    t.scheme = j.at("scheme").get<std::string>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.point_index = j.at("point_index").get<std::int64_t>();
    t.trial_index = j.at("trial_index").get<std::int64_t>();
    t.snr_db = j.at("snr_db").get<double>();
    t.H = matrix_from(j.at("H"));
    t.s = vector_from(j.at("s"));
    t.z = vector_from(j.at("z"));
    t.u = vector_from(j.at("u"));
    t.message_index = j.at("message_index").get<std::int64_t>();
    t.x = vector_from(j.at("x"));
    t.y = vector_from(j.at("y"));
    t.y_hat = vector_from(j.at("y_hat"));
    t.decoded_index = j.at("decoded_index").get<std::int64_t>();
    t.R_LA_bits = j.at("R_LA_bits").get<double>();
    t.oracle_residual = j.at("oracle_residual").get<double>();
  } catch (const json::exception& e) {
    throw IoError(std::string("trace: ") + e.what());
  }
  return t;
}

}  // namespace latdpc
