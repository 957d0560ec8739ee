#include "hss/dense_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Householder>
#include <Eigen/SVD>

namespace hss {

  QrFactors qr(const Matrix& S) {
    const Index m = S.rows(), c = S.cols(), k = std::min(m, c);
    QrFactors f;
    if (k == 0) {
      f.Q = Matrix(m, 0);
      f.Omega = Matrix(0, c);
      return f;
    }
    Eigen::HouseholderQR<Matrix> h(S);
    f.Q = h.householderQ() * Matrix::Identity(m, k);
    f.Omega = h.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    return f;
  }

  Matrix project_out(const Matrix& Q, const Matrix& S) {
    if (Q.rows() != S.rows())
      throw std::invalid_argument("project_out: row count mismatch");
    if (Q.cols() == 0) return S;
    Matrix T = S - Q * (Q.transpose() * S);
    T -= Q * (Q.transpose() * T);
    return T;
  }

  InterpolativeDecomposition
  interpolative_decomposition(const Matrix& S, double eps_rel, double eps_abs) {
    if (eps_rel < 0 || eps_abs < 0)
      throw std::invalid_argument("interpolative_decomposition: negative tolerance");
    const Index m = S.rows(), n = S.cols(), kmax = std::min(m, n);
    Matrix R = S;
    std::vector<Index> perm(n);
    Vector norms(n), ref(n);
    for (Index j = 0; j < n; j++) {
      perm[j] = j;
      norms(j) = ref(j) = R.col(j).norm();
    }

    double thresh = 0;
    Index r = 0;
    Vector work(std::max<Index>(n, 1));
    for (; r < kmax; r++) {
      Index p = r;
      for (Index j = r + 1; j < n; j++)
        if (norms(j) > norms(p) || (norms(j) == norms(p) && perm[j] < perm[p]))
          p = j;
      if (r == 0) thresh = std::max(eps_abs, eps_rel * norms(p));
      if (!(norms(p) > 0) || norms(p) < thresh) break;
      if (p != r) {
        R.col(r).swap(R.col(p));
        std::swap(perm[r], perm[p]);
        std::swap(norms(r), norms(p));
        std::swap(ref(r), ref(p));
      }
      double tau, beta;
      R.col(r).tail(m - r).makeHouseholderInPlace(tau, beta);
      if (r + 1 < n) {
        auto ess = R.col(r).tail(m - r - 1);
        R.block(r, r + 1, m - r, n - r - 1)
          .applyHouseholderOnTheLeft(ess, tau, work.data());
      }
      R(r, r) = beta;
      R.col(r).tail(m - r - 1).setZero();

      // downdate trailing norms; recompute once the squared ratio to the
      // last exact value falls under 1e-8
      for (Index j = r + 1; j < n; j++) {
        if (norms(j) == 0) continue;
        double t = R(r, j) / norms(j);
        double keep = std::max(0.0, 1.0 - t * t);
        double ratio = norms(j) / ref(j);
        if (keep * ratio * ratio <= 1e-8) {
          norms(j) = ref(j) = R.col(j).tail(m - r - 1).norm();
        } else
          norms(j) *= std::sqrt(keep);
      }
    }

    InterpolativeDecomposition id;
    id.rank = r;
    id.J.assign(perm.begin(), perm.begin() + r);
    id.Y = Matrix::Zero(r, n);
    if (r == 0) return id;
    Matrix T = R.topLeftCorner(r, r).triangularView<Eigen::Upper>()
      .solve(R.topRightCorner(r, n - r));
    for (Index j = 0; j < r; j++) id.Y(j, perm[j]) = 1.0;
    for (Index j = r; j < n; j++) id.Y.col(perm[j]) = T.col(j - r);
    return id;
  }

  RowInterpolativeDecomposition
  row_interpolative_decomposition(const Matrix& S, double eps_rel, double eps_abs) {
    auto id = interpolative_decomposition(S.transpose(), eps_rel, eps_abs);
    return {id.Y.transpose(), std::move(id.J)};
  }

  SvdFactors svd(const Matrix& A, Index cap) {
    if (std::min(A.rows(), A.cols()) > cap)
      throw std::invalid_argument
        ("svd: min dimension " + std::to_string(std::min(A.rows(), A.cols()))
         + " exceeds oracle cap " + std::to_string(cap));
    Eigen::BDCSVD<Matrix> s(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {s.matrixU(), s.singularValues(), s.matrixV()};
  }

} // namespace hss
