#ifndef HSS_MATRIX_ACCESSOR_HPP
#define HSS_MATRIX_ACCESSOR_HPP

#include <functional>
#include <span>

#include <Eigen/Dense>

#include "hss/cluster_tree.hpp"

namespace hss {

  using Matrix = Eigen::MatrixXd;
  using Vector = Eigen::VectorXd;

  /// Read-only access to a real matrix. Element extraction must be
  /// deterministic and side-effect free. Implementations that keep the
  /// whole matrix in memory expose it through dense() so kernels can skip
  /// the copy.
  class MatrixAccessor {
  public:
    virtual ~MatrixAccessor() = default;

    virtual Index rows() const = 0;
    virtual Index cols() const = 0;
    virtual double operator()(Index i, Index j) const = 0;

    /// A(I, J) for arbitrary index sets.
    virtual Matrix extract(std::span<const Index> I,
                           std::span<const Index> J) const;

    /// Contiguous block A(r0:r0+nr, c0:c0+nc).
    virtual Matrix block(Index r0, Index nr, Index c0, Index nc) const;

    virtual const Matrix* dense() const { return nullptr; }
  };

  class DenseAccessor final : public MatrixAccessor {
  public:
    explicit DenseAccessor(Matrix a) : a_(std::move(a)) {}

    Index rows() const override { return a_.rows(); }
    Index cols() const override { return a_.cols(); }
    double operator()(Index i, Index j) const override { return a_(i, j); }
    Matrix extract(std::span<const Index> I,
                   std::span<const Index> J) const override;
    Matrix block(Index r0, Index nr, Index c0, Index nc) const override {
      return a_.block(r0, c0, nr, nc);
    }
    const Matrix* dense() const override { return &a_; }

  private:
    Matrix a_;
  };

  /// Entries generated on demand by a callable.
  class FunctionAccessor final : public MatrixAccessor {
  public:
    using Entry = std::function<double(Index, Index)>;

    FunctionAccessor(Index rows, Index cols, Entry f)
      : rows_(rows), cols_(cols), f_(std::move(f)) {}

    Index rows() const override { return rows_; }
    Index cols() const override { return cols_; }
    double operator()(Index i, Index j) const override { return f_(i, j); }

  private:
    Index rows_, cols_;
    Entry f_;
  };

  /// Copies every entry of A into a DenseAccessor.
  DenseAccessor materialize(const MatrixAccessor& A);

} // namespace hss

#endif
