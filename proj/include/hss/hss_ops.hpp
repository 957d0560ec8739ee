#ifndef HSS_HSS_OPS_HPP
#define HSS_HSS_OPS_HPP

#include "hss/compress.hpp"

namespace hss {

  struct HssStats {
    Index max_rank = 0;
    Index final_d = 0;
    double memory_fraction = 0;  // percent of n^2
    Index adaptation_rounds = 0;
  };

  /// y = H x, O(n r).
  Vector matvec(const HssMatrix& H, const Vector& x);

  /// Y = H X, column by column equivalent to matvec.
  Matrix matmat(const HssMatrix& H, const Matrix& X);

  /// Dense expansion through the big bases. Throws when n > cap.
  Matrix reconstruct_dense(const HssMatrix& H, Index cap = 4096);

  /// Memory counts floating-point scalars only: D, B12, B21 and the
  /// non-identity rows of U and V.
  HssStats stats(const HssMatrix& H);

  /// ||A - H||_F / ||A||_F, formed a column block at a time so the cost
  /// is O(n^2 r) without an n x n temporary. 0 when both norms vanish.
  double relative_error(const MatrixAccessor& A, const HssMatrix& H,
                        Index cap = 4096);

} // namespace hss

#endif
