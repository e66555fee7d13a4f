#pragma once

#include <cstddef>
#include <vector>

#include "floquet/model.hpp"

namespace floquet {

/// Complex tridiagonal matrix in banded storage. Row i holds
/// sub[i] (column i-1, i >= 1), diag[i], sup[i] (column i+1, i < m-1).
/// sub[0] and sup[m-1] are ignored.
struct Tridiagonal {
  std::vector<cplx> sub, diag, sup;

  explicit Tridiagonal(std::size_t m = 0) : sub(m), diag(m), sup(m) {}
  std::size_t size() const { return diag.size(); }
};

/// Solves M x = rhs by banded LU with partial pivoting (row swaps introduce
/// one extra superdiagonal of fill-in). O(m) time and storage.
/// Throws SingularMatrixError when a pivot falls below pivot_tol relative to
/// the largest entry magnitude of the input matrix.
std::vector<cplx> solve_tridiagonal(const Tridiagonal& m, std::vector<cplx> rhs,
                                    double pivot_tol = 1e-14);

}  // namespace floquet
