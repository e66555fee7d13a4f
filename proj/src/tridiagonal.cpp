#include "floquet/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace floquet {

std::vector<cplx> solve_tridiagonal(const Tridiagonal& m, std::vector<cplx> rhs,
                                    double pivot_tol) {
  const std::size_t n = m.size();
  if (n == 0) return {};
  if (rhs.size() != n)
    throw ValidationError("tridiagonal solve: rhs size mismatch");

  // Working bands: partial pivoting fills a second superdiagonal.
  std::vector<cplx> a = m.sub;   // subdiagonal, eliminated in place
  std::vector<cplx> b = m.diag;  // main diagonal
  std::vector<cplx> c = m.sup;   // first superdiagonal
  std::vector<cplx> d(n, 0.0);   // second superdiagonal (fill-in)

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    scale = std::max(scale, std::abs(b[i]));
    if (i + 1 < n) scale = std::max({scale, std::abs(m.sub[i + 1]), std::abs(c[i])});
  }
  const double tol = pivot_tol * std::max(scale, 1e-300);

  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (std::abs(a[k + 1]) > std::abs(b[k])) {
      std::swap(b[k], a[k + 1]);
      std::swap(c[k], b[k + 1]);
      std::swap(d[k], c[k + 1]);
      std::swap(rhs[k], rhs[k + 1]);
    }
    if (std::abs(b[k]) < tol) {
      std::ostringstream os;
      os << "tridiagonal pivot " << std::abs(b[k]) << " below tolerance at row "
         << k;
      throw SingularMatrixError(os.str());
    }
    const cplx factor = a[k + 1] / b[k];
    b[k + 1] -= factor * c[k];
    c[k + 1] -= factor * d[k];
    rhs[k + 1] -= factor * rhs[k];
  }
  if (std::abs(b[n - 1]) < tol)
    throw SingularMatrixError("tridiagonal pivot below tolerance at last row");

  std::vector<cplx> x(n);
  x[n - 1] = rhs[n - 1] / b[n - 1];
  if (n >= 2) x[n - 2] = (rhs[n - 2] - c[n - 2] * x[n - 1]) / b[n - 2];
  for (std::size_t i = n; i-- > 2;) {
    const std::size_t k = i - 2;
    x[k] = (rhs[k] - c[k] * x[k + 1] - d[k] * x[k + 2]) / b[k];
  }
  return x;
}

}  // namespace floquet
