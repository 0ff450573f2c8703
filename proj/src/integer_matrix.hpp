// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

// Exact integer and prime-field matrix routines used to build nested codes.

#pragma once

#include <cstdint>
#include <vector>

#include "latdpc/lattice.hpp"

namespace latdpc::detail {

struct RowEchelon {
  IntMatrix rref;            // reduced row echelon form, entries in [0, p)
  std::vector<int> pivots;   // pivot column of each nonzero row
  int rank = 0;
};

/// Reduced row echelon form over the prime field F_p.
RowEchelon row_reduce_mod_p(const IntMatrix& a, std::int64_t p);

/// Column-style Hermite normal form of a square nonsingular integer matrix:
/// lower triangular, positive diagonal, and 0 <= h(i, j) < h(i, i) for j < i.
IntMatrix hermite_normal_form(IntMatrix a);

/// Exact solution X of L X = c·I for lower-triangular integer L; throws when
/// the result is not integral.
IntMatrix scaled_inverse_lower(const IntMatrix& lower, std::int64_t c);

/// Integer determinant by fraction-free elimination (Bareiss).
std::int64_t determinant(const IntMatrix& a);

struct SmithForm {
  std::vector<std::int64_t> invariants;  // d_0 | d_1 | ... , all positive
  IntMatrix left;                        // U with U·M·V = diag(d)
  IntMatrix left_inverse;                // U⁻¹
};

/// Smith normal form of a square nonsingular integer matrix.
SmithForm smith_normal_form(const IntMatrix& m);

}  // namespace latdpc::detail
