#include "hss/matrix_accessor.hpp"

#include <stdexcept>

namespace hss {

  Matrix MatrixAccessor::extract(std::span<const Index> I,
                                 std::span<const Index> J) const {
    Matrix out(static_cast<Index>(I.size()), static_cast<Index>(J.size()));
    for (Index j = 0; j < out.cols(); j++)
      for (Index i = 0; i < out.rows(); i++)
        out(i, j) = (*this)(I[i], J[j]);
    return out;
  }

  Matrix MatrixAccessor::block(Index r0, Index nr, Index c0, Index nc) const {
    if (r0 < 0 || c0 < 0 || r0 + nr > rows() || c0 + nc > cols())
      throw std::out_of_range("MatrixAccessor::block: range outside matrix");
    Matrix out(nr, nc);
    for (Index j = 0; j < nc; j++)
      for (Index i = 0; i < nr; i++)
        out(i, j) = (*this)(r0 + i, c0 + j);
    return out;
  }

  Matrix DenseAccessor::extract(std::span<const Index> I,
                                std::span<const Index> J) const {
    Matrix out(static_cast<Index>(I.size()), static_cast<Index>(J.size()));
    for (Index j = 0; j < out.cols(); j++) {
      auto col = a_.col(J[j]);
      for (Index i = 0; i < out.rows(); i++) out(i, j) = col(I[i]);
    }
    return out;
  }

  DenseAccessor materialize(const MatrixAccessor& A) {
    if (auto* d = A.dense()) return DenseAccessor(*d);
    return DenseAccessor(A.block(0, A.rows(), 0, A.cols()));
  }

} // namespace hss
