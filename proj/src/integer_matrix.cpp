// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

#include "integer_matrix.hpp"

#include <cstdlib>
#include <tuple>
#include <utility>

#include "latdpc/error.hpp"

namespace latdpc::detail {
namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw NumericError("integer matrix: overflow");
  return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw NumericError("integer matrix: overflow");
  return r;
}

// col_dst -= q * col_src
void axpy_col(IntMatrix& a, Eigen::Index dst, Eigen::Index src, std::int64_t q) {
  if (q == 0) return;
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    a(r, dst) = checked_sub(a(r, dst), checked_mul(q, a(r, src)));
  }
}

void axpy_row(IntMatrix& a, Eigen::Index dst, Eigen::Index src, std::int64_t q) {
  if (q == 0) return;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    a(dst, c) = checked_sub(a(dst, c), checked_mul(q, a(src, c)));
  }
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t mod_pos(std::int64_t a, std::int64_t p) {
  std::int64_t r = a % p;
  return r < 0 ? r + p : r;
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t p) {
  std::int64_t t = 0, new_t = 1, r = p, new_r = mod_pos(a, p);
  while (new_r != 0) {
    const std::int64_t q = r / new_r;
    std::tie(t, new_t) = std::make_pair(new_t, t - q * new_t);
    std::tie(r, new_r) = std::make_pair(new_r, r - q * new_r);
  }
  if (r != 1) throw InvalidArgument("inverse_mod: element is not invertible");
  return mod_pos(t, p);
}

}  // namespace

RowEchelon row_reduce_mod_p(const IntMatrix& a, std::int64_t p) {
  RowEchelon out;
  IntMatrix m = a.unaryExpr([p](std::int64_t v) { return mod_pos(v, p); });
  const auto rows = m.rows();
  const auto cols = m.cols();
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < cols && row < rows; ++col) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = row; r < rows; ++r) {
      if (m(r, col) != 0) {
        piv = r;
        break;
      }
    }
    if (piv < 0) continue;
    m.row(row).swap(m.row(piv));
    const std::int64_t inv = inverse_mod(m(row, col), p);
    for (Eigen::Index c = 0; c < cols; ++c) m(row, c) = mod_pos(m(row, c) * inv, p);
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (r == row || m(r, col) == 0) continue;
      const std::int64_t f = m(r, col);
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = mod_pos(m(r, c) - f * m(row, c), p);
    }
    out.pivots.push_back(static_cast<int>(col));
    ++row;
  }
  out.rank = static_cast<int>(row);
  out.rref = std::move(m);
  return out;
}

IntMatrix hermite_normal_form(IntMatrix a) {
  const auto n = a.rows();
  if (a.cols() != n) throw InvalidArgument("hermite_normal_form: matrix must be square");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      while (a(i, j) != 0) {
        axpy_col(a, i, j, a(i, i) / a(i, j));
        a.col(i).swap(a.col(j));
      }
    }
    if (a(i, i) == 0) throw NumericError("hermite_normal_form: matrix is singular");
    if (a(i, i) < 0) a.col(i) = -a.col(i);
    for (Eigen::Index j = 0; j < i; ++j) axpy_col(a, j, i, floor_div(a(i, j), a(i, i)));
  }
  return a;
}

IntMatrix scaled_inverse_lower(const IntMatrix& lower, std::int64_t c) {
  const auto n = lower.rows();
  IntMatrix x = IntMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      std::int64_t s = (i == j) ? c : 0;
      for (Eigen::Index l = 0; l < i; ++l) s = checked_sub(s, checked_mul(lower(i, l), x(l, j)));
      if (lower(i, i) == 0 || s % lower(i, i) != 0) {
        throw NumericError("scaled_inverse_lower: result is not integral");
      }
      x(i, j) = s / lower(i, i);
    }
  }
  return x;
}

std::int64_t determinant(const IntMatrix& a) {
  const auto n = a.rows();
  if (a.cols() != n) throw InvalidArgument("determinant: matrix must be square");
  if (n == 0) return 1;
  Eigen::Matrix<__int128, Eigen::Dynamic, Eigen::Dynamic> m = a.cast<__int128>();
  __int128 prev = 1;
  int sign = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      Eigen::Index swap_row = -1;
      for (Eigen::Index r = k + 1; r < n; ++r) {
        if (m(r, k) != 0) {
          swap_row = r;
          break;
        }
      }
      if (swap_row < 0) return 0;
      m.row(k).swap(m.row(swap_row));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = k + 1; j < n; ++j) {
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
      }
    }
    prev = m(k, k);
  }
  const __int128 d = m(n - 1, n - 1) * sign;
  if (d > INT64_MAX || d < INT64_MIN) throw NumericError("determinant: overflow");
  return static_cast<std::int64_t>(d);
}

SmithForm smith_normal_form(const IntMatrix& m) {
  const auto n = m.rows();
  if (m.cols() != n) throw InvalidArgument("smith_normal_form: matrix must be square");
  IntMatrix a = m;
  IntMatrix u = IntMatrix::Identity(n, n);
  IntMatrix u_inv = IntMatrix::Identity(n, n);

  auto row_axpy = [&](Eigen::Index dst, Eigen::Index src, std::int64_t q) {
    // row_dst -= q row_src, mirrored on U and U⁻¹
    axpy_row(a, dst, src, q);
    axpy_row(u, dst, src, q);
    axpy_col(u_inv, src, dst, -q);
  };
  auto row_swap = [&](Eigen::Index i, Eigen::Index j) {
    a.row(i).swap(a.row(j));
    u.row(i).swap(u.row(j));
    u_inv.col(i).swap(u_inv.col(j));
  };

  for (Eigen::Index t = 0; t < n; ++t) {
    while (true) {
      Eigen::Index pr = -1, pc = -1;
      std::int64_t best = 0;
      for (Eigen::Index i = t; i < n; ++i) {
        for (Eigen::Index j = t; j < n; ++j) {
          const std::int64_t v = std::llabs(a(i, j));
          if (v != 0 && (best == 0 || v < best)) {
            best = v;
            pr = i;
            pc = j;
          }
        }
      }
      if (pr < 0) throw NumericError("smith_normal_form: matrix is singular");
      if (pr != t) row_swap(t, pr);
      if (pc != t) a.col(t).swap(a.col(pc));

      bool clean = true;
      for (Eigen::Index i = t + 1; i < n; ++i) {
        row_axpy(i, t, a(i, t) / a(t, t));
        if (a(i, t) != 0) clean = false;
      }
      for (Eigen::Index j = t + 1; j < n; ++j) {
        axpy_col(a, j, t, a(t, j) / a(t, t));
        if (a(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      Eigen::Index bad_row = -1;
      for (Eigen::Index i = t + 1; i < n && bad_row < 0; ++i) {
        for (Eigen::Index j = t + 1; j < n; ++j) {
          if (a(i, j) % a(t, t) != 0) {
            bad_row = i;
            break;
          }
        }
      }
      if (bad_row < 0) break;
      row_axpy(t, bad_row, -1);
    }
    if (a(t, t) < 0) {
      a.row(t) = -a.row(t);
      u.row(t) = -u.row(t);
      u_inv.col(t) = -u_inv.col(t);
    }
  }

  SmithForm out;
  out.invariants.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out.invariants[static_cast<std::size_t>(i)] = a(i, i);
  out.left = std::move(u);
  out.left_inverse = std::move(u_inv);
  return out;
}

}  // namespace latdpc::detail
