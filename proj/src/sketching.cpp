#include "hss/sketching.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace hss {

  std::string to_string(SketchKind k) {
    switch (k) {
    case SketchKind::Gaussian: return "gaussian";
    case SketchKind::Srht: return "srht";
    case SketchKind::Sjlt: return "sjlt";
    }
    return "?";
  }

  std::string to_string(SjltConstruction c) {
    return c == SjltConstruction::Block ? "block" : "graph";
  }

  SketchKind parse_sketch_kind(const std::string& s) {
    if (s == "gaussian") return SketchKind::Gaussian;
    if (s == "srht") return SketchKind::Srht;
    if (s == "sjlt") return SketchKind::Sjlt;
    throw std::invalid_argument("unknown sketch kind '" + s + "'");
  }

  SjltConstruction parse_sjlt_construction(const std::string& s) {
    if (s == "block") return SjltConstruction::Block;
    if (s == "graph") return SjltConstruction::Graph;
    throw std::invalid_argument("unknown SJLT construction '" + s + "'");
  }

  Index next_pow2(Index n) {
    Index p = 1;
    while (p < n) p <<= 1;
    return p;
  }

  namespace {

    int rademacher(Rng& rng) {
      return (rng() >> 63) ? 1 : -1;
    }

    // Floyd's sampling of k distinct values from [0, N). mark must have
    // size >= N and be all zero; it is left all zero on return.
    void floyd_sample(Index N, Index k, Rng& rng, std::vector<char>& mark,
                      std::vector<Index>& out) {
      out.clear();
      for (Index j = N - k; j < N; j++) {
        boost::random::uniform_int_distribution<Index> u(0, j);
        Index t = u(rng);
        if (mark[t]) t = j;
        mark[t] = 1;
        out.push_back(t);
      }
      for (auto t : out) mark[t] = 0;
    }

    void check_range(const SketchOperator& op, Index c0, Index c1) {
      if (c0 < 0 || c1 > op.d() || c0 > c1)
        throw std::out_of_range("sketch column range outside [0, d)");
    }

    // Blocks that exactly cover [c0, c1).
    std::pair<std::size_t,std::size_t>
    aligned_blocks(const SketchOperator& op, Index c0, Index c1) {
      check_range(op, c0, c1);
      auto& bl = op.blocks();
      std::size_t b0 = bl.size(), b1 = bl.size();
      for (std::size_t b = 0; b < bl.size(); b++) {
        if (bl[b].offset == c0) b0 = b;
        if (bl[b].offset == c1) b1 = b;
      }
      if (b0 == bl.size() && c0 != op.d())
        throw std::invalid_argument("sketch column range must start on a block boundary");
      if (b1 == bl.size() && c1 != op.d())
        throw std::invalid_argument("sketch column range must end on a block boundary");
      return {b0, b1};
    }

    constexpr Index stream_width = 256;

    // Calls f(c0, block) for consecutive column blocks of A.
    template <typename F>
    void for_each_column_block(const MatrixAccessor& A, F&& f) {
      if (auto* d = A.dense()) {
        f(Index(0), Eigen::Ref<const Matrix>(*d));
        return;
      }
      for (Index c0 = 0; c0 < A.cols(); c0 += stream_width) {
        Index w = std::min(stream_width, A.cols() - c0);
        Matrix blk = A.block(0, A.rows(), c0, w);
        f(c0, Eigen::Ref<const Matrix>(blk));
      }
    }

    template <typename F>
    void for_each_row_block(const MatrixAccessor& A, F&& f) {
      if (auto* d = A.dense()) {
        f(Index(0), Eigen::Ref<const Matrix>(*d));
        return;
      }
      for (Index r0 = 0; r0 < A.rows(); r0 += stream_width) {
        Index h = std::min(stream_width, A.rows() - r0);
        Matrix blk = A.block(r0, h, 0, A.cols());
        f(r0, Eigen::Ref<const Matrix>(blk));
      }
    }

    // out(r, :) = sampled( H * (signs .* x) ) / sqrt(d_b)
    void srht_vector(const SrhtBlock& s, std::vector<double>& buf,
                     auto&& load, auto&& store) {
      std::fill(buf.begin(), buf.end(), 0.0);
      Index n = static_cast<Index>(s.signs.size());
      for (Index i = 0; i < n; i++) buf[i] = load(i) * s.signs[i];
      fwht(buf);
      double scale = 1.0 / std::sqrt(double(s.samples.size()));
      for (std::size_t j = 0; j < s.samples.size(); j++)
        store(static_cast<Index>(j), buf[s.samples[j]] * scale);
    }

  } // namespace

  BinaryPattern BinaryPattern::from_coordinates
  (Index rows, Index cols, const std::vector<std::pair<Index,Index>>& coords) {
    BinaryPattern p;
    p.rows = rows;
    p.cols = cols;
    p.row_ptr.assign(rows + 1, 0);
    p.col_ptr.assign(cols + 1, 0);
    p.col_idx.reserve(coords.size());
    Index prev = 0;
    for (auto [i, j] : coords) {
      if (i < prev || i >= rows || j < 0 || j >= cols)
        throw std::invalid_argument("BinaryPattern: coordinates out of order or range");
      prev = i;
      p.row_ptr[i + 1]++;
      p.col_ptr[j + 1]++;
      p.col_idx.push_back(j);
    }
    for (Index i = 0; i < rows; i++) p.row_ptr[i + 1] += p.row_ptr[i];
    for (Index j = 0; j < cols; j++) p.col_ptr[j + 1] += p.col_ptr[j];
    p.row_idx.resize(coords.size());
    std::vector<Index> next(p.col_ptr.begin(), p.col_ptr.end() - 1);
    for (auto [i, j] : coords) p.row_idx[next[j]++] = i;
    return p;
  }

  SjltStorage SjltStorage::draw(Index n, Index d, Index alpha,
                                SjltConstruction construction, Rng& rng) {
    if (alpha < 1 || alpha > d)
      throw std::invalid_argument("SJLT: alpha must satisfy 1 <= alpha <= d");
    if (construction == SjltConstruction::Block && d % alpha != 0)
      throw std::invalid_argument
        ("SJLT block construction requires alpha | d (alpha="
         + std::to_string(alpha) + ", d=" + std::to_string(d) + ")");
    std::vector<std::pair<Index,Index>> pc, mc;
    pc.reserve(n * alpha / 2 + n);
    mc.reserve(n * alpha / 2 + n);
    std::vector<Index> pos;
    pos.reserve(alpha);
    std::vector<char> mark;
    if (construction == SjltConstruction::Graph) mark.assign(d, 0);
    Index chunk = d / alpha;
    boost::random::uniform_int_distribution<Index> in_chunk(0, chunk - 1);
    for (Index i = 0; i < n; i++) {
      if (construction == SjltConstruction::Block) {
        pos.clear();
        for (Index c = 0; c < alpha; c++) pos.push_back(c * chunk + in_chunk(rng));
      } else {
        floyd_sample(d, alpha, rng, mark, pos);
        std::sort(pos.begin(), pos.end());
      }
      for (auto j : pos)
        (rademacher(rng) > 0 ? pc : mc).emplace_back(i, j);
    }
    SjltStorage s;
    s.alpha = alpha;
    s.scale = 1.0 / std::sqrt(double(alpha));
    s.plus = BinaryPattern::from_coordinates(n, d, pc);
    s.minus = BinaryPattern::from_coordinates(n, d, mc);
    return s;
  }

  SjltStorage SjltStorage::from_signs(const Matrix& signs, Index alpha) {
    std::vector<std::pair<Index,Index>> pc, mc;
    for (Index i = 0; i < signs.rows(); i++)
      for (Index j = 0; j < signs.cols(); j++) {
        if (signs(i, j) > 0) pc.emplace_back(i, j);
        else if (signs(i, j) < 0) mc.emplace_back(i, j);
      }
    SjltStorage s;
    s.alpha = alpha;
    s.scale = 1.0 / std::sqrt(double(alpha));
    s.plus = BinaryPattern::from_coordinates(signs.rows(), signs.cols(), pc);
    s.minus = BinaryPattern::from_coordinates(signs.rows(), signs.cols(), mc);
    return s;
  }

  Matrix SjltStorage::to_dense() const {
    Matrix out = Matrix::Zero(n(), d());
    for (Index i = 0; i < n(); i++) {
      for (Index p = plus.row_ptr[i]; p < plus.row_ptr[i + 1]; p++)
        out(i, plus.col_idx[p]) += scale;
      for (Index p = minus.row_ptr[i]; p < minus.row_ptr[i + 1]; p++)
        out(i, minus.col_idx[p]) -= scale;
    }
    return out;
  }

  void SketchOperator::check_block(Index rows) const {
    if (rows < 1)
      throw std::invalid_argument("sketch block needs at least one row");
    if (rows > n_)
      throw std::invalid_argument
        ("sketch block size d=" + std::to_string(rows)
         + " exceeds ambient dimension n=" + std::to_string(n_));
    if (kind_ == SketchKind::Sjlt) {
      if (params_.alpha < 1 || params_.alpha > rows)
        throw std::invalid_argument
          ("SJLT requires 1 <= alpha <= d (alpha=" + std::to_string(params_.alpha)
           + ", d=" + std::to_string(rows) + ")");
      if (params_.construction == SjltConstruction::Block
          && rows % params_.alpha != 0)
        throw std::invalid_argument
          ("SJLT block construction requires alpha | d (alpha="
           + std::to_string(params_.alpha) + ", d=" + std::to_string(rows) + ")");
    }
  }

  SketchBlock SketchOperator::draw_block(Index rows, std::uint64_t seed) const {
    Rng rng(seed);
    SketchBlock b;
    b.offset = d_;
    b.cols = rows;
    b.seed = seed;
    switch (kind_) {
    case SketchKind::Gaussian: {
      boost::random::normal_distribution<double> N(0.0, 1.0 / std::sqrt(double(rows)));
      GaussianBlock g;
      g.rt.resize(n_, rows);
      // row j of R is column j of R^T
      for (Index j = 0; j < rows; j++)
        for (Index i = 0; i < n_; i++) g.rt(i, j) = N(rng);
      b.data = std::move(g);
      break;
    }
    case SketchKind::Srht: {
      SrhtBlock s;
      s.padded = next_pow2(n_);
      s.signs.resize(n_);
      for (auto& v : s.signs) v = rademacher(rng);
      std::vector<char> mark(s.padded, 0);
      floyd_sample(s.padded, rows, rng, mark, s.samples);
      std::sort(s.samples.begin(), s.samples.end());
      b.data = std::move(s);
      break;
    }
    case SketchKind::Sjlt:
      b.data = SjltStorage::draw(n_, rows, params_.alpha, params_.construction, rng);
      break;
    }
    return b;
  }

  SketchOperator SketchOperator::create(SketchKind kind, Index n, Index d,
                                        std::uint64_t seed, SketchParams params) {
    if (n < 1) throw std::invalid_argument("sketch operator needs n >= 1");
    SketchOperator op(kind, n, params);
    op.check_block(d);
    op.blocks_.push_back(op.draw_block(d, seed));
    op.d_ = d;
    return op;
  }

  SketchOperator SketchOperator::from_sjlt(SjltStorage s) {
    SketchParams params;
    params.alpha = s.alpha;
    params.construction = SjltConstruction::Graph;
    SketchOperator op(SketchKind::Sjlt, s.n(), params);
    SketchBlock b;
    b.cols = s.d();
    op.d_ = s.d();
    b.data = std::move(s);
    op.blocks_.push_back(std::move(b));
    return op;
  }

  void SketchOperator::append(Index dd, std::uint64_t seed) {
    check_block(dd);
    blocks_.push_back(draw_block(dd, seed));
    d_ += dd;
  }

  Matrix SketchOperator::to_dense() const {
    return dense_rows(*this, 0, n_, 0, d_);
  }

  Matrix apply_right(const MatrixAccessor& A, const SketchOperator& op,
                     Index c0, Index c1) {
    if (c1 < 0) c1 = op.d();
    if (A.cols() != op.n())
      throw std::invalid_argument
        ("apply_right: A has " + std::to_string(A.cols())
         + " columns, operator expects n=" + std::to_string(op.n()));
    auto [b0, b1] = aligned_blocks(op, c0, c1);
    Matrix out = Matrix::Zero(A.rows(), c1 - c0);
    for (std::size_t b = b0; b < b1; b++) {
      auto& blk = op.blocks()[b];
      auto dst = out.middleCols(blk.offset - c0, blk.cols);
      if (auto* g = std::get_if<GaussianBlock>(&blk.data)) {
        for_each_column_block(A, [&](Index col0, const Eigen::Ref<const Matrix>& a) {
          dst.noalias() += a * g->rt.middleRows(col0, a.cols());
        });
      } else if (auto* s = std::get_if<SjltStorage>(&blk.data)) {
        // outer product form: column i of A is added to / subtracted from
        // the output columns selected by row i of B+ / B-
        for_each_column_block(A, [&](Index col0, const Eigen::Ref<const Matrix>& a) {
          for (Index k = 0; k < a.cols(); k++) {
            Index i = col0 + k;
            auto ai = a.col(k);
            for (Index p = s->plus.row_ptr[i]; p < s->plus.row_ptr[i + 1]; p++)
              dst.col(s->plus.col_idx[p]) += ai;
            for (Index p = s->minus.row_ptr[i]; p < s->minus.row_ptr[i + 1]; p++)
              dst.col(s->minus.col_idx[p]) -= ai;
          }
        });
        dst *= s->scale;
      } else {
        auto& h = std::get<SrhtBlock>(blk.data);
        std::vector<double> buf(h.padded);
        for_each_row_block(A, [&](Index row0, const Eigen::Ref<const Matrix>& a) {
          for (Index r = 0; r < a.rows(); r++)
            srht_vector(h, buf,
                        [&](Index i) { return a(r, i); },
                        [&](Index j, double v) { dst(row0 + r, j) = v; });
        });
      }
    }
    return out;
  }

  Matrix apply_right_transposed(const MatrixAccessor& A,
                                const SketchOperator& op,
                                Index c0, Index c1) {
    if (c1 < 0) c1 = op.d();
    if (A.rows() != op.n())
      throw std::invalid_argument
        ("apply_right_transposed: A has " + std::to_string(A.rows())
         + " rows, operator expects n=" + std::to_string(op.n()));
    auto [b0, b1] = aligned_blocks(op, c0, c1);
    Matrix out = Matrix::Zero(A.cols(), c1 - c0);
    for (std::size_t b = b0; b < b1; b++) {
      auto& blk = op.blocks()[b];
      auto dst = out.middleCols(blk.offset - c0, blk.cols);
      if (auto* g = std::get_if<GaussianBlock>(&blk.data)) {
        for_each_column_block(A, [&](Index col0, const Eigen::Ref<const Matrix>& a) {
          dst.middleRows(col0, a.cols()).noalias() = a.transpose() * g->rt;
        });
      } else if (auto* s = std::get_if<SjltStorage>(&blk.data)) {
        // inner product form: entry (j, q) gathers column j of A over the
        // rows listed in column q of B+ and B-
        const Index d = s->d();
        for_each_column_block(A, [&](Index col0, const Eigen::Ref<const Matrix>& a) {
          for (Index k = 0; k < a.cols(); k++) {
            const double* aj = a.col(k).data();
            for (Index q = 0; q < d; q++) {
              double sum = 0.0;
              for (Index p = s->plus.col_ptr[q]; p < s->plus.col_ptr[q + 1]; p++)
                sum += aj[s->plus.row_idx[p]];
              for (Index p = s->minus.col_ptr[q]; p < s->minus.col_ptr[q + 1]; p++)
                sum -= aj[s->minus.row_idx[p]];
              dst(col0 + k, q) = sum;
            }
          }
        });
        dst *= s->scale;
      } else {
        auto& h = std::get<SrhtBlock>(blk.data);
        std::vector<double> buf(h.padded);
        for_each_column_block(A, [&](Index col0, const Eigen::Ref<const Matrix>& a) {
          for (Index k = 0; k < a.cols(); k++)
            srht_vector(h, buf,
                        [&](Index i) { return a(i, k); },
                        [&](Index j, double v) { dst(col0 + k, j) = v; });
        });
      }
    }
    return out;
  }

  namespace {

    template <typename RowAt>
    Matrix dense_rows_impl(const SketchOperator& op, Index nrows, RowAt row_at,
                           Index c0, Index c1) {
      check_range(op, c0, c1);
      Matrix out = Matrix::Zero(nrows, c1 - c0);
      for (auto& blk : op.blocks()) {
        Index lo = std::max(c0, blk.offset);
        Index hi = std::min(c1, blk.offset + blk.cols);
        if (lo >= hi) continue;
        if (auto* g = std::get_if<GaussianBlock>(&blk.data)) {
          for (Index c = lo; c < hi; c++)
            for (Index r = 0; r < nrows; r++)
              out(r, c - c0) = g->rt(row_at(r), c - blk.offset);
        } else if (auto* s = std::get_if<SjltStorage>(&blk.data)) {
          for (Index r = 0; r < nrows; r++) {
            Index i = row_at(r);
            for (Index p = s->plus.row_ptr[i]; p < s->plus.row_ptr[i + 1]; p++) {
              Index c = blk.offset + s->plus.col_idx[p];
              if (c >= lo && c < hi) out(r, c - c0) = s->scale;
            }
            for (Index p = s->minus.row_ptr[i]; p < s->minus.row_ptr[i + 1]; p++) {
              Index c = blk.offset + s->minus.col_idx[p];
              if (c >= lo && c < hi) out(r, c - c0) = -s->scale;
            }
          }
        } else {
          auto& h = std::get<SrhtBlock>(blk.data);
          double scale = 1.0 / std::sqrt(double(h.samples.size()));
          for (Index c = lo; c < hi; c++) {
            auto row = static_cast<unsigned long long>(h.samples[c - blk.offset]);
            for (Index r = 0; r < nrows; r++) {
              auto i = static_cast<unsigned long long>(row_at(r));
              double hs = (std::popcount(row & i) & 1) ? -1.0 : 1.0;
              out(r, c - c0) = h.signs[i] * hs * scale;
            }
          }
        }
      }
      return out;
    }

  } // namespace

  Matrix dense_rows(const SketchOperator& op, std::span<const Index> I,
                    Index c0, Index c1) {
    for (auto i : I)
      if (i < 0 || i >= op.n())
        throw std::out_of_range("dense_rows: row index outside [0, n)");
    return dense_rows_impl(op, static_cast<Index>(I.size()),
                           [&](Index r) { return I[r]; }, c0, c1);
  }

  Matrix dense_rows(const SketchOperator& op, Index r0, Index nr,
                    Index c0, Index c1) {
    if (r0 < 0 || nr < 0 || r0 + nr > op.n())
      throw std::out_of_range("dense_rows: row range outside [0, n)");
    return dense_rows_impl(op, nr, [&](Index r) { return r0 + r; }, c0, c1);
  }

  void fwht(std::span<double> x) {
    std::size_t n = x.size();
    if (n == 0 || (n & (n - 1)))
      throw std::invalid_argument("fwht: length must be a power of two");
    for (std::size_t h = 1; h < n; h <<= 1)
      for (std::size_t i = 0; i < n; i += 2 * h)
        for (std::size_t j = i; j < i + h; j++) {
          double a = x[j], b = x[j + h];
          x[j] = a + b;
          x[j + h] = a - b;
        }
  }

  namespace {
    // ceil() that ignores roundoff just above an integer
    Index ceil_bound(double x) {
      double r = std::round(x);
      if (std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x)))
        return static_cast<Index>(r);
      return static_cast<Index>(std::ceil(x));
    }
  }

  JlDimension jl_dimension_bound(SketchKind kind, double eps, double delta,
                                 Index n, double sjlt_constant) {
    if (!(eps > 0 && eps < 1) || !(delta > 0 && delta < 1))
      throw std::invalid_argument("jl_dimension_bound: eps and delta must lie in (0, 1)");
    double ie2 = 1.0 / (eps * eps);
    JlDimension out;
    switch (kind) {
    case SketchKind::Gaussian:
      out.d = ceil_bound(20.0 * ie2 * std::log(2.0 / delta));
      break;
    case SketchKind::Srht: {
      double nn = double(n);
      double l = std::log(4.0 * nn * nn / delta);
      out.d = ceil_bound(2.0 * ie2 * l * l * std::log(4.0 / delta));
      break;
    }
    case SketchKind::Sjlt:
      out.d = ceil_bound(sjlt_constant * ie2 * std::log(1.0 / delta));
      out.alpha = ceil_bound(eps * double(out.d));
      break;
    }
    return out;
  }

} // namespace hss
