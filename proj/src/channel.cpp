// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

#include "latdpc/channel.hpp"

#include <cmath>
#include <random>
#include <string>

#include "latdpc/error.hpp"
#include "latdpc/filters.hpp"

namespace latdpc {
namespace {

Matrix draw_block(const ChannelShape& shape, const fading::IidGaussian& f, Rng& rng) {
  if (shape.complex_entries) {
    std::normal_distribution<double> g(0.0, std::sqrt(f.variance / 2.0));
    ComplexMatrix hc(shape.N, shape.M);
    for (int j = 0; j < shape.M; ++j) {
      for (int i = 0; i < shape.N; ++i) {
        const double re = g(rng);
        const double im = g(rng);
        hc(i, j) = {re, im};
      }
    }
    return complex_to_real(hc);
  }
  std::normal_distribution<double> g(0.0, std::sqrt(f.variance));
  Matrix h(shape.N, shape.M);
  for (int j = 0; j < shape.M; ++j) {
    for (int i = 0; i < shape.N; ++i) h(i, j) = g(rng);
  }
  return h;
}

}  // namespace

Matrix complex_to_real(const ComplexMatrix& H_c) {
  Matrix r(2 * H_c.rows(), 2 * H_c.cols());
  for (Eigen::Index i = 0; i < H_c.rows(); ++i) {
    for (Eigen::Index j = 0; j < H_c.cols(); ++j) {
      const double a = H_c(i, j).real();
      const double b = H_c(i, j).imag();
      r(2 * i, 2 * j) = a;
      r(2 * i, 2 * j + 1) = -b;
      r(2 * i + 1, 2 * j) = b;
      r(2 * i + 1, 2 * j + 1) = a;
    }
  }
  return r;
}

Vector complex_to_real(const Eigen::VectorXcd& v) {
  Vector r(2 * v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    r(2 * i) = v(i).real();
    r(2 * i + 1) = v(i).imag();
  }
  return r;
}

Matrix block_diagonal(const std::vector<Matrix>& blocks) {
  Eigen::Index rows = 0, cols = 0;
  for (const Matrix& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Eigen::Index r = 0, c = 0;
  for (const Matrix& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

ChannelRealization draw_channel(FadingModel model, const ChannelShape& shape,
                                const Fading& fading, Rng& rng) {
  if (shape.M < 1 || shape.N < 1 || shape.T < 1) {
    throw InvalidArgument("draw_channel: M, N and T must be positive");
  }
  ChannelRealization out;
  out.model = model;
  out.per_symbol.reserve(static_cast<std::size_t>(shape.T));
  if (const auto* fixed = std::get_if<fading::Fixed>(&fading)) {
    if (fixed->H1.rows() != shape.real_outputs() || fixed->H1.cols() != shape.real_inputs()) {
      throw InvalidArgument("draw_channel: fixed channel must be " +
                            std::to_string(shape.real_outputs()) + "x" +
                            std::to_string(shape.real_inputs()));
    }
    out.per_symbol.assign(static_cast<std::size_t>(shape.T), fixed->H1);
  } else {
    const auto& iid = std::get<fading::IidGaussian>(fading);
    if (!(iid.variance > 0.0)) throw InvalidArgument("draw_channel: variance must be positive");
    if (model == FadingModel::kSlow) {
      out.per_symbol.assign(static_cast<std::size_t>(shape.T), draw_block(shape, iid, rng));
    } else {
      for (int t = 0; t < shape.T; ++t) out.per_symbol.push_back(draw_block(shape, iid, rng));
    }
  }
  if (shape.complex_entries) {
    out.origin = ChannelOrigin::kComplexEmbedded;
    out.complex_rows = shape.N;
    out.complex_cols = shape.M;
  }
  out.H = block_diagonal(out.per_symbol);
  return out;
}

GaussianSource::GaussianSource(const Matrix& sigma)
    : dimension_(static_cast<int>(sigma.rows())) {
  if (sigma.rows() != sigma.cols()) throw InvalidArgument("GaussianSource: covariance must be square");
  if (sigma.isZero(0.0)) {
    factor_.resize(dimension_, 0);
  } else {
    factor_ = std::sqrt(0.5) * factor_covariance(sigma);
  }
}

Vector GaussianSource::draw(Rng& rng) const {
  if (is_zero()) return Vector::Zero(dimension_);
  std::normal_distribution<double> g;
  Vector w(factor_.cols());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = g(rng);
  return factor_ * w;
}

Vector draw_interference(const Matrix& sigma_s, Rng& rng) {
  return GaussianSource(sigma_s).draw(rng);
}

Vector draw_noise(int dimension, Rng& rng) {
  if (dimension < 0) throw InvalidArgument("draw_noise: negative dimension");
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  Vector z(dimension);
  for (int i = 0; i < dimension; ++i) z(i) = g(rng);
  return z;
}

Vector transmit(const Matrix& H, const Vector& x, const Vector& s, const Vector& z) {
  if (x.size() != H.cols() || s.size() != H.cols() || z.size() != H.rows()) {
    throw InvalidArgument("transmit: dimension mismatch");
  }
  return H * (x + s) + z;
}

}  // namespace latdpc
