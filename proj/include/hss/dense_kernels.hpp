#ifndef HSS_DENSE_KERNELS_HPP
#define HSS_DENSE_KERNELS_HPP

#include <vector>

#include "hss/matrix_accessor.hpp"

namespace hss {

  /// S = Q * Omega with Q (m x k, k = min(m, cols(S))) orthonormal columns
  /// and Omega (k x cols(S)) upper trapezoidal.
  struct QrFactors {
    Matrix Q;
    Matrix Omega;
  };

  QrFactors qr(const Matrix& S);

  /// (I - Q Q^T)^2 S, i.e. two passes of block Gram-Schmidt.
  Matrix project_out(const Matrix& Q, const Matrix& S);

  /// Column ID S ~= S(:, J) * Y. Y(:, J) is exactly the r x r identity.
  struct InterpolativeDecomposition {
    std::vector<Index> J;
    Matrix Y;
    Index rank = 0;
  };

  /// Column-pivoted Householder QR, stopping at the first pivot whose
  /// norm drops below max(eps_abs, eps_rel * |R_11|).
  InterpolativeDecomposition
  interpolative_decomposition(const Matrix& S, double eps_rel, double eps_abs);

  /// Row ID S ~= U * S(J, :) with U(J, :) = I.
  struct RowInterpolativeDecomposition {
    Matrix U;
    std::vector<Index> J;
    Index rank() const { return static_cast<Index>(J.size()); }
  };

  RowInterpolativeDecomposition
  row_interpolative_decomposition(const Matrix& S, double eps_rel, double eps_abs);

  struct SvdFactors {
    Matrix U;
    Vector sigma;  // nonincreasing
    Matrix V;
  };

  /// Thin SVD, used as a verification oracle only.
  SvdFactors svd(const Matrix& A, Index cap = 512);

} // namespace hss

#endif
