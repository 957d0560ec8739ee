#ifndef HSS_SKETCHING_HPP
#define HSS_SKETCHING_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hss/matrix_accessor.hpp"
#include "hss/random.hpp"

namespace hss {

  enum class SketchKind { Gaussian, Srht, Sjlt };
  enum class SjltConstruction { Block, Graph };

  std::string to_string(SketchKind k);
  std::string to_string(SjltConstruction c);
  SketchKind parse_sketch_kind(const std::string& s);
  SjltConstruction parse_sjlt_construction(const std::string& s);

  struct SketchParams {
    Index alpha = 4;  // nonzeros per column of R (SJLT only)
    SjltConstruction construction = SjltConstruction::Block;
  };

  /// Sparse 0/1 matrix kept in both compressed row and compressed column
  /// form, without value arrays.
  struct BinaryPattern {
    Index rows = 0;
    Index cols = 0;
    std::vector<Index> row_ptr, col_idx;  // CRS
    std::vector<Index> col_ptr, row_idx;  // CCS

    /// coords must be sorted by row; within a row the order is kept.
    static BinaryPattern from_coordinates
    (Index rows, Index cols, const std::vector<std::pair<Index,Index>>& coords);

    Index nnz() const { return static_cast<Index>(col_idx.size()); }
  };

  /// One SJLT draw stored as R^T = scale * (B+ - B-), R^T of size n x d.
  struct SjltStorage {
    double scale = 1.0;
    Index alpha = 1;
    BinaryPattern plus, minus;

    Index n() const { return plus.rows; }
    Index d() const { return plus.cols; }

    static SjltStorage draw(Index n, Index d, Index alpha,
                            SjltConstruction construction, Rng& rng);
    /// Build from an explicit n x d sign pattern with entries in {-1, 0, 1}.
    static SjltStorage from_signs(const Matrix& signs, Index alpha);
    Matrix to_dense() const;
  };

  struct GaussianBlock {
    Matrix rt;  // n x d_b, entries N(0, 1/d_b)
  };

  /// R = P H D on the zero padded length padded = 2^k >= n.
  struct SrhtBlock {
    Index padded = 1;
    std::vector<double> signs;   // length n, +-1
    std::vector<Index> samples;  // d_b distinct rows of H, ascending
  };

  struct SketchBlock {
    Index offset = 0;  // first column of R^T owned by this block
    Index cols = 0;
    std::uint64_t seed = 0;
    std::variant<GaussianBlock, SrhtBlock, SjltStorage> data;
  };

  /// Random d x n sketching operator R, stored block by block as R^T.
  /// Blocks are independent draws; append() never touches existing ones.
  class SketchOperator {
  public:
    static SketchOperator create(SketchKind kind, Index n, Index d,
                                 std::uint64_t seed, SketchParams params = {});

    /// Single-block SJLT operator around an explicit pattern.
    static SketchOperator from_sjlt(SjltStorage s);

    void append(Index dd, std::uint64_t seed);

    SketchKind kind() const { return kind_; }
    Index n() const { return n_; }
    Index d() const { return d_; }
    const SketchParams& params() const { return params_; }
    const std::vector<SketchBlock>& blocks() const { return blocks_; }

    /// Full R^T materialized, n x d.
    Matrix to_dense() const;

  private:
    SketchOperator(SketchKind kind, Index n, SketchParams params)
      : kind_(kind), n_(n), params_(params) {}
    void check_block(Index rows) const;
    SketchBlock draw_block(Index rows, std::uint64_t seed) const;

    SketchKind kind_;
    Index n_ = 0;
    Index d_ = 0;
    SketchParams params_;
    std::vector<SketchBlock> blocks_;
  };

  /// A * R^T restricted to sketch columns [c0, c1); c0 and c1 must fall on
  /// block boundaries. c1 < 0 means up to d.
  Matrix apply_right(const MatrixAccessor& A, const SketchOperator& op,
                     Index c0 = 0, Index c1 = -1);

  /// A^T * R^T restricted to sketch columns [c0, c1).
  Matrix apply_right_transposed(const MatrixAccessor& A,
                                const SketchOperator& op,
                                Index c0 = 0, Index c1 = -1);

  /// R^T(I, c0:c1).
  Matrix dense_rows(const SketchOperator& op, std::span<const Index> I,
                    Index c0, Index c1);
  /// R^T(r0:r0+nr, c0:c1).
  Matrix dense_rows(const SketchOperator& op, Index r0, Index nr,
                    Index c0, Index c1);

  /// In-place unnormalized fast Walsh-Hadamard transform; length must be a
  /// power of two.
  void fwht(std::span<double> x);

  Index next_pow2(Index n);

  struct JlDimension {
    Index d = 0;
    Index alpha = 0;  // SJLT only
  };

  /// Smallest d satisfying the Frobenius-norm concentration bound of the
  /// given operator family:
  ///   Gaussian  d >= 20 eps^-2 log(2/delta)
  ///   SRHT      d >= 2 eps^-2 log^2(4 n^2/delta) log(4/delta)
  ///   SJLT      d >= C eps^-2 log(1/delta), with alpha = ceil(eps d)
  JlDimension jl_dimension_bound(SketchKind kind, double eps, double delta,
                                 Index n, double sjlt_constant = 20.0);

} // namespace hss

#endif
