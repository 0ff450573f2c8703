// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

#include "latdpc/nested_code.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "integer_matrix.hpp"
#include "latdpc/error.hpp"

namespace latdpc {
namespace {

bool is_prime(std::int64_t p) {
  if (p < 2) return false;
  for (std::int64_t d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

constexpr int kMaxRedraws = 64;
constexpr std::uint64_t kCovarianceStream = 0x5d1f7e3c0ffee;

// Integer basis of C + pZⁿ from the row echelon form of the code generator.
IntMatrix construction_a_basis(const detail::RowEchelon& echelon, int n, std::int64_t p) {
  IntMatrix basis = IntMatrix::Zero(n, n);
  std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
  int col = 0;
  for (int r = 0; r < echelon.rank; ++r) {
    basis.col(col++) = echelon.rref.row(r).transpose();
    is_pivot[static_cast<std::size_t>(echelon.pivots[static_cast<std::size_t>(r)])] = true;
  }
  for (int j = 0; j < n; ++j) {
    if (!is_pivot[static_cast<std::size_t>(j)]) basis(j, col++) = p;
  }
  return detail::hermite_normal_form(basis);
}

}  // namespace

void CodeConfig::validate() const {
  if (n < 1) throw ConfigError("code config: dimension n must be positive");
  if (!is_prime(p)) throw ConfigError("code config: p = " + std::to_string(p) + " is not prime");
  if (k < 1 || k > n) throw ConfigError("code config: need 1 <= k <= n");
  if (symbols < 1 || n % symbols != 0) {
    throw ConfigError("code config: symbols T must divide the lattice dimension n");
  }
  if (!(target_second_moment > 0.0)) {
    throw ConfigError("code config: target second moment must be positive");
  }
  if (coarse == CoarseMode::kSelfSimilar && nesting_scale < 2) {
    throw ConfigError("code config: self-similar nesting scale must be >= 2");
  }
  if (message_count < 0) throw ConfigError("code config: message count must be >= 0");
  if (sigma_v_samples < 1) throw ConfigError("code config: sigma_v_samples must be positive");
}

struct NestedLatticePair::Parts {
  CodeConfig config;
  IntMatrix code_generator;
  double scale = 1.0;
  Matrix fine;
  Matrix coarse;
  IntMatrix nesting;
  VoronoiStats stats;
};

NestedLatticePair::Parts NestedLatticePair::make_parts(const CodeConfig& config,
                                                      IntMatrix generator,
                                                      std::optional<double> scale,
                                                      std::optional<Matrix> coarse_covariance) {
  config.validate();
  const int n = config.n;
  if (generator.rows() != config.k || generator.cols() != n) {
    throw InvalidArgument("nested pair: code generator must be k x n");
  }
  const detail::RowEchelon echelon = detail::row_reduce_mod_p(generator, config.p);
  if (echelon.rank != config.k) {
    throw InvalidArgument("nested pair: code generator has rank " + std::to_string(echelon.rank) +
                          " < k = " + std::to_string(config.k));
  }
  const IntMatrix basis = construction_a_basis(echelon, n, config.p);
  const double p = static_cast<double>(config.p);

  Parts parts;
  parts.config = config;
  parts.code_generator = std::move(generator);

  if (config.coarse == CoarseMode::kHypercubic) {
    const double gamma = scale.value_or(std::sqrt(12.0 * config.target_second_moment));
    parts.scale = gamma;
    parts.fine = (gamma / p) * basis.cast<double>();
    parts.coarse = gamma * Matrix::Identity(n, n);
    parts.nesting = detail::scaled_inverse_lower(basis, config.p);
    parts.stats = voronoi_stats(LatticeBasis(parts.coarse), AnalyticStats{});
  } else {
    const double beta = config.nesting_scale;
    parts.nesting = IntMatrix::Identity(n, n) * config.nesting_scale;
    if (scale && coarse_covariance) {
      parts.scale = *scale;
      parts.stats.covariance = *coarse_covariance;
      parts.stats.second_moment = coarse_covariance->trace() / n;
      parts.stats.sample_count = config.sigma_v_samples;
    } else {
      // Estimate at unit scale, then rescale to the target second moment.
      const LatticeBasis unit(beta / p * basis.cast<double>());
      Rng rng(derive_seed(config.seed, {kCovarianceStream}));
      const VoronoiStats raw = voronoi_stats(unit, MonteCarloStats{config.sigma_v_samples}, rng);
      const double gamma2 = config.target_second_moment / raw.second_moment;
      parts.scale = std::sqrt(gamma2);
      parts.stats.covariance = raw.covariance * gamma2;
      parts.stats.second_moment = config.target_second_moment;
      parts.stats.sample_count = raw.sample_count;
    }
    parts.fine = (parts.scale / p) * basis.cast<double>();
    parts.coarse = beta * parts.fine;
  }
  return parts;
}

NestedLatticePair::NestedLatticePair(const CodeConfig& config, IntMatrix code_generator,
                                     std::optional<double> scale,
                                     std::optional<Matrix> coarse_covariance)
    : NestedLatticePair(
          make_parts(config, std::move(code_generator), scale, std::move(coarse_covariance))) {}

NestedLatticePair::NestedLatticePair(Parts parts)
    : config_(std::move(parts.config)),
      code_generator_(std::move(parts.code_generator)),
      scale_(parts.scale),
      fine_(std::move(parts.fine)),
      coarse_(std::move(parts.coarse)),
      nesting_(std::move(parts.nesting)),
      coarse_stats_(std::move(parts.stats)) {
  coset_count_ = std::llabs(detail::determinant(nesting_));
  const detail::SmithForm snf = detail::smith_normal_form(nesting_);
  std::int64_t product = 1;
  for (std::size_t i = 0; i < snf.invariants.size(); ++i) {
    const std::int64_t d = snf.invariants[i];
    product *= d;
    if (d > 1) {
      invariants_.push_back(d);
      invariant_rows_.push_back(static_cast<int>(i));
    }
  }
  if (product != coset_count_) {
    throw InternalError("nested pair: Smith invariants do not multiply to |det M|");
  }
  smith_left_ = snf.left;
  smith_left_inverse_ = snf.left_inverse;

  message_count_ = config_.message_count == 0 ? coset_count_ : config_.message_count;
  if (message_count_ > coset_count_) {
    throw ConfigError("nested pair: message count " + std::to_string(message_count_) +
                      " exceeds coset count " + std::to_string(coset_count_));
  }
}

double NestedLatticePair::rate_bits() const {
  return std::log2(static_cast<double>(coset_count_)) / config_.symbols;
}

double NestedLatticePair::information_rate_bits() const {
  return std::log2(static_cast<double>(message_count_)) / config_.symbols;
}

std::int64_t NestedLatticePair::coset_index_of(const IntVector& b) const {
  std::int64_t index = 0;
  std::int64_t radix = 1;
  for (std::size_t i = 0; i < invariants_.size(); ++i) {
    const int row = invariant_rows_[i];
    __int128 acc = 0;
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      acc += static_cast<__int128>(smith_left_(row, j)) * b(j);
    }
    const std::int64_t d = invariants_[i];
    auto digit = static_cast<std::int64_t>(acc % d);
    if (digit < 0) digit += d;
    index += digit * radix;
    radix *= d;
  }
  return index;
}

Vector NestedLatticePair::encode_message(std::int64_t index) const {
  if (index < 0 || index >= message_count_) {
    throw InvalidArgument("encode_message: index " + std::to_string(index) + " outside [0, " +
                          std::to_string(message_count_) + ")");
  }
  IntVector w = IntVector::Zero(config_.n);
  std::int64_t rest = index;
  for (std::size_t i = 0; i < invariants_.size(); ++i) {
    w(invariant_rows_[i]) = rest % invariants_[i];
    rest /= invariants_[i];
  }
  const IntVector b = smith_left_inverse_ * w;
  return mod_lattice(coarse_, fine_.generator() * b.cast<double>());
}

std::int64_t NestedLatticePair::decode_index(const Vector& c) const {
  if (!fine_.contains(c)) {
    throw InvalidArgument("decode_index: vector is not a point of the fine lattice");
  }
  return coset_index_of(fine_.coefficients_of(c));
}

NestedLatticePair build_construction_a(const CodeConfig& config, Rng& rng) {
  config.validate();
  std::uniform_int_distribution<std::int64_t> entry(0, config.p - 1);
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    IntMatrix g(config.k, config.n);
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = entry(rng);
    }
    if (detail::row_reduce_mod_p(g, config.p).rank == config.k) {
      return NestedLatticePair(config, std::move(g));
    }
  }
  throw ConfigError("build_construction_a: no full-rank generator after " +
                    std::to_string(kMaxRedraws) + " draws");
}

NestedLatticePair build_construction_a(const CodeConfig& config) {
  Rng rng(config.seed);
  return build_construction_a(config, rng);
}

void save_pair(const NestedLatticePair& pair, std::ostream& out) {
  const CodeConfig& c = pair.config();
  out << "latdpc-nested-pair 1\n";
  out << "dimension " << c.n << "\n";
  out << "symbols " << c.symbols << "\n";
  out << "p " << c.p << "\n";
  out << "k " << c.k << "\n";
  out << "seed " << c.seed << "\n";
  out << "target_second_moment " << std::setprecision(17) << c.target_second_moment << "\n";
  if (c.coarse == CoarseMode::kHypercubic) {
    out << "coarse hypercubic\n";
  } else {
    out << "coarse self-similar " << c.nesting_scale << "\n";
  }
  out << "message_count " << c.message_count << "\n";
  out << "sigma_v_samples " << c.sigma_v_samples << "\n";
  out << "scale " << std::setprecision(17) << pair.scale() << "\n";
  out << "code_generator\n";
  const IntMatrix& g = pair.code_generator();
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) out << (j ? " " : "") << g(i, j);
    out << "\n";
  }
  if (c.coarse == CoarseMode::kSelfSimilar) {
    out << "coarse_covariance\n";
    const Matrix& cov = pair.coarse_stats().covariance;
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
      for (Eigen::Index j = 0; j < cov.cols(); ++j) {
        out << (j ? " " : "") << std::setprecision(17) << cov(i, j);
      }
      out << "\n";
    }
  }
}

NestedLatticePair load_pair(std::istream& in) {
  auto fail = [](const std::string& what) -> IoError {
    return IoError("pair fixture: " + what);
  };
  std::string word;
  int version = 0;
  if (!(in >> word >> version) || word != "latdpc-nested-pair" || version != 1) {
    throw fail("missing 'latdpc-nested-pair 1' header");
  }
  auto expect = [&](const char* key) {
    if (!(in >> word) || word != key) throw fail(std::string("expected key '") + key + "'");
  };
  CodeConfig c;
  std::int64_t message_count = 0;
  double scale = 0.0;
  expect("dimension");
  in >> c.n;
  expect("symbols");
  in >> c.symbols;
  expect("p");
  in >> c.p;
  expect("k");
  in >> c.k;
  expect("seed");
  in >> c.seed;
  expect("target_second_moment");
  in >> c.target_second_moment;
  expect("coarse");
  in >> word;
  if (word == "hypercubic") {
    c.coarse = CoarseMode::kHypercubic;
  } else if (word == "self-similar") {
    c.coarse = CoarseMode::kSelfSimilar;
    in >> c.nesting_scale;
  } else {
    throw fail("unknown coarse mode '" + word + "'");
  }
  expect("message_count");
  in >> message_count;
  expect("sigma_v_samples");
  in >> c.sigma_v_samples;
  expect("scale");
  in >> scale;
  if (!in) throw fail("malformed header values");
  c.validate();
  expect("code_generator");
  IntMatrix g(c.k, c.n);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      if (!(in >> g(i, j))) throw fail("truncated code generator");
    }
  }
  std::optional<Matrix> cov;
  if (c.coarse == CoarseMode::kSelfSimilar) {
    expect("coarse_covariance");
    Matrix m(c.n, c.n);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (!(in >> m(i, j))) throw fail("truncated coarse covariance");
      }
    }
    cov = std::move(m);
  }
  c.message_count = message_count;
  return NestedLatticePair(c, std::move(g), scale, std::move(cov));
}

}  // namespace latdpc
