#ifndef HSS_MATGEN_HPP
#define HSS_MATGEN_HPP

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "hss/cluster_tree.hpp"
#include "hss/matrix_accessor.hpp"
#include "hss/random.hpp"

namespace hss {

  /// A generated test matrix together with the tree it should be
  /// compressed on. The accessor is already in tree order.
  struct TestMatrix {
    std::shared_ptr<const MatrixAccessor> A;
    ClusterTree tree;
    std::vector<Index> perm;  // perm[new] = original index; empty if identity
  };

  /// exp(-|x_i - x_j| / lambda) on the k^3 regular grid of [0,1]^3,
  /// reordered by coordinate bisection. Entries are evaluated lazily.
  TestMatrix covariance_matrix(Index k, double lambda, Index leaf_size);

  /// Grid points of covariance_matrix in lexicographic (x fastest) order.
  std::vector<Point3> regular_grid(Index k);

  /// 1D kinetic energy Toeplitz matrix:
  ///   T_ii = pi^2 / (6 s^2),  T_ij = (-1)^(i-j) / (s^2 (i-j)^2)
  /// with s the grid spacing.
  std::unique_ptr<MatrixAccessor> qchem_toeplitz(Index n, double spacing);

  /// m x r matrix with orthonormal columns (QR of a Gaussian draw).
  Matrix random_orthonormal(Index m, Index r, Rng& rng);

  /// U diag(sigma) V^T with Haar-like random U (m x k), V (n x k),
  /// k = sigma.size() <= min(m, n).
  Matrix matrix_with_spectrum(const Vector& sigma, Index m, Index n,
                              std::uint64_t seed);

  struct SyntheticHss {
    ClusterTree tree;
    Matrix dense;
  };

  /// Dense matrix with exact HSS rank <= r on ClusterTree::uniform(n, leaf):
  /// orthonormal leaf bases (leaf x r) and transfer matrices (2r x r),
  /// B blocks uniform in [-1,1], random dense diagonal blocks.
  SyntheticHss synthetic_hss(Index n, Index leaf_size, Index r,
                             std::uint64_t seed, bool symmetric = false);

  /// File format "HSSD": magic, u64 rows, u64 cols (little endian), then
  /// rows*cols binary64 values in column-major order.
  class MatrixFileError : public std::runtime_error {
    using std::runtime_error::runtime_error;
  };

  Matrix read_matrix_file(const std::string& path);
  void write_matrix_file(const std::string& path, const Matrix& A);
  std::unique_ptr<MatrixAccessor> from_file(const std::string& path);

  enum class MatrixKind { Covariance, QChem, Synthetic, File };

  std::string to_string(MatrixKind k);
  MatrixKind parse_matrix_kind(const std::string& s);

  struct MatrixSpec {
    MatrixKind kind = MatrixKind::Covariance;
    Index k = 10;             // covariance grid side
    double lambda = 0.2;
    Index n = 1000;           // qchem, synthetic
    double spacing = 0.1;
    Index rank = 8;           // synthetic
    std::uint64_t seed = 0;   // synthetic
    bool symmetric = false;
    std::string path;
    Index leaf_size = 256;
    bool materialize = false; // copy lazy accessors into memory
  };

  TestMatrix make_matrix(const MatrixSpec& spec);

} // namespace hss

#endif
