#include "hss/verify.hpp"

#include <cmath>
#include <numbers>

#include <boost/random/normal_distribution.hpp>

#include "hss/dense_kernels.hpp"
#include "hss/matgen.hpp"

namespace hss {

  FrobeniusTrial frobenius_trial(const Matrix& A, SketchKind kind, Index d,
                                 SketchParams params, double eps,
                                 std::uint64_t seed) {
    auto op = SketchOperator::create(kind, A.cols(), d, seed, params);
    DenseAccessor acc(A);
    FrobeniusTrial t;
    t.lhs = apply_right(acc, op).squaredNorm();
    const double a2 = A.squaredNorm();
    t.lower = (1.0 - eps) * a2;
    t.upper = (1.0 + eps) * a2;
    t.in_range = t.lower <= t.lhs && t.lhs <= t.upper;
    return t;
  }

  double generic_jl_rhs(const Vector& sigma, Index n, Index r, double eps) {
    const double s = r < sigma.size() ? sigma(r) : 0.0;
    return std::sqrt(1.0 + double(n) * (1.0 + eps) / (1.0 - eps)) * s;
  }

  double probabilistic_rhs(SketchKind kind, const Vector& sigma, Index n,
                           Index r, Index d, Index alpha, double eps,
                           double delta) {
    const double s = r < sigma.size() ? sigma(r) : 0.0;
    const double p = double(d - r);
    switch (kind) {
    case SketchKind::Gaussian: {
      double tail = r < sigma.size() ? sigma.tail(sigma.size() - r).norm() : 0.0;
      return (1.0 + 16.0 * std::sqrt(1.0 + double(r) / (p + 1.0))) * s
        + 8.0 * std::sqrt(double(d)) / (p + 1.0) * tail;
    }
    case SketchKind::Srht:
      return std::sqrt(1.0 + 7.0 * double(n) / double(d)) * s;
    case SketchKind::Sjlt: {
      const double e2 = std::numbers::e * std::numbers::e;
      const double na = double(n) * double(alpha) / double(d);
      const double m = std::max(e2 * na, std::log(2.0 * double(d) / delta) - na);
      return s * std::sqrt(1.0 + m / (1.0 - eps));
    }
    }
    return 0;
  }

  RangefinderTrial rangefinder_trial(const Matrix& A, Index r, SketchKind kind,
                                     Index d, SketchParams params,
                                     std::uint64_t seed, double eps,
                                     double delta) {
    const Index n = A.cols();
    if (r < 0 || r > d)
      throw std::invalid_argument("rangefinder_trial: need 0 <= r <= d");
    auto op = SketchOperator::create(kind, n, d, seed, params);
    auto sv = svd(A);
    const Index k = sv.sigma.size();
    if (r > k) throw std::invalid_argument("rangefinder_trial: r exceeds rank dimension");

    RangefinderTrial t;
    t.sigma_next = r < k ? sv.sigma(r) : 0.0;

    DenseAccessor acc(A);
    Matrix Y = apply_right(acc, op);
    Matrix Q = qr(Y).Q;
    Matrix res = A - Q * (Q.transpose() * A);
    t.lhs = svd(res).sigma(0);

    Matrix Rt = op.to_dense();
    Matrix R1 = sv.V.leftCols(r).transpose() * Rt;
    Matrix R2 = sv.V.rightCols(k - r).transpose() * Rt;
    if (r > 0) {
      auto s1 = svd(R1);
      const double smax = s1.sigma(0), smin = s1.sigma(r - 1);
      t.degenerate = !(smin > 1e-12 * smax);
      if (!t.degenerate) {
        Matrix pinv = s1.V * s1.sigma.cwiseInverse().asDiagonal() * s1.U.transpose();
        Matrix M = sv.sigma.tail(k - r).asDiagonal() * (R2 * pinv);
        const double m = M.size() ? svd(M).sigma(0) : 0.0;
        t.deterministic_rhs = std::sqrt(t.sigma_next * t.sigma_next + m * m);
      }
    } else
      t.deterministic_rhs = t.sigma_next;

    t.probabilistic_rhs = probabilistic_rhs(kind, sv.sigma, n, r, d,
                                            params.alpha, eps, delta);
    t.generic_rhs = generic_jl_rhs(sv.sigma, n, r, eps);
    return t;
  }

  double BoundReport::empirical_rate() const {
    const Index used = trials - degenerate;
    return used > 0 ? double(violations) / double(used) : 0.0;
  }

  namespace {

    SketchParams sjlt_params_for(Index d, Index alpha) {
      SketchParams p;
      p.alpha = alpha;
      p.construction = d % alpha == 0 ? SjltConstruction::Block : SjltConstruction::Graph;
      return p;
    }

  } // namespace

  BoundReport frobenius_campaign(const Matrix& A, SketchKind kind, double eps,
                                 double delta, Index trials, std::uint64_t seed,
                                 double sjlt_constant) {
    BoundReport rep;
    rep.suite = "frobenius";
    rep.kind = kind;
    rep.eps = eps;
    rep.delta = delta;
    rep.theoretical_delta = delta;
    const Index n = A.cols();
    auto req = jl_dimension_bound(kind, eps, delta, n, sjlt_constant);
    rep.required_d = req.d;
    rep.d = req.d;
    if (rep.d > n) {
      rep.d = n;
      rep.informational = true;
    }
    SketchParams params;
    if (kind == SketchKind::Sjlt) {
      params = sjlt_params_for(rep.d, std::min(req.alpha, rep.d));
      rep.alpha = params.alpha;
    }
    rep.trials = trials;
    for (Index t = 0; t < trials; t++) {
      auto tr = frobenius_trial(A, kind, rep.d, params, eps, derive_seed(seed, t));
      rep.lhs.push_back(tr.lhs);
      rep.rhs.push_back(tr.upper);
      if (!tr.in_range) rep.violations++;
    }
    return rep;
  }

  BoundReport rangefinder_campaign(const Matrix& A, Index r, SketchKind kind,
                                   Index d, SketchParams params, double eps,
                                   double delta, Index trials,
                                   std::uint64_t seed) {
    BoundReport rep;
    rep.suite = "rangefinder";
    rep.kind = kind;
    rep.d = d;
    rep.alpha = kind == SketchKind::Sjlt ? params.alpha : 0;
    rep.eps = eps;
    rep.delta = delta;
    rep.theoretical_delta = delta;
    rep.trials = trials;
    for (Index t = 0; t < trials; t++) {
      auto tr = rangefinder_trial(A, r, kind, d, params, derive_seed(seed, t), eps, delta);
      rep.lhs.push_back(tr.lhs);
      rep.rhs.push_back(tr.deterministic_rhs);
      if (tr.degenerate) {
        rep.degenerate++;
        continue;
      }
      if (tr.lhs * tr.lhs > tr.deterministic_rhs * tr.deterministic_rhs + 1e-8)
        rep.violations++;
      if (tr.lhs > tr.probabilistic_rhs) rep.probabilistic_violations++;
    }
    return rep;
  }

  nlohmann::json to_json(const BoundReport& r, bool with_trials) {
    nlohmann::json j;
    j["suite"] = r.suite;
    j["kind"] = to_string(r.kind);
    j["d"] = r.d;
    j["alpha"] = r.alpha;
    j["eps"] = r.eps;
    j["delta"] = r.delta;
    if (r.suite == "frobenius") {
      j["required_d"] = r.required_d;
      j["informational"] = r.informational;
    } else
      j["probabilistic_violations"] = r.probabilistic_violations;
    j["trials"] = r.trials;
    j["violations"] = r.violations;
    j["degenerate"] = r.degenerate;
    j["empirical_rate"] = r.empirical_rate();
    j["theoretical_delta"] = r.theoretical_delta;
    if (with_trials) {
      j["lhs"] = r.lhs;
      j["rhs"] = r.rhs;
    }
    return j;
  }

  nlohmann::json run_campaign(const CampaignConfig& c, bool with_trials) {
    nlohmann::json cfg;
    cfg["suites"] = c.suites;
    std::vector<std::string> kinds;
    for (auto k : c.kinds) kinds.push_back(to_string(k));
    cfg["kinds"] = kinds;
    cfg["eps"] = c.eps;
    cfg["delta"] = c.delta;
    cfg["trials"] = c.trials;
    cfg["seed"] = c.seed;
    cfg["sjlt_constant"] = c.sjlt_constant;
    cfg["frobenius_shape"] = {c.frob_rows, c.frob_cols};
    cfg["rangefinder"] = {{"n", c.rf_n}, {"rank", c.rf_rank},
                          {"oversampling", c.rf_oversampling},
                          {"decay", c.rf_decay}, {"alpha", c.rf_alpha}};

    nlohmann::json reports = nlohmann::json::array();
    Index total = 0, viol = 0, degen = 0;
    auto add = [&](const BoundReport& r) {
      reports.push_back(to_json(r, with_trials));
      total += r.trials;
      viol += r.violations;
      degen += r.degenerate;
    };

    for (const auto& suite : c.suites) {
      if (suite == "frobenius") {
        Rng rng(derive_seed(c.seed, 0xf0));
        boost::random::normal_distribution<double> N;
        Matrix A(c.frob_rows, c.frob_cols);
        for (Index j = 0; j < A.cols(); j++)
          for (Index i = 0; i < A.rows(); i++) A(i, j) = N(rng);
        std::uint64_t stream = 1;
        for (auto kind : c.kinds)
          for (double eps : c.eps)
            for (double delta : c.delta)
              add(frobenius_campaign(A, kind, eps, delta, c.trials,
                                     derive_seed(c.seed, 0x100 + stream++),
                                     c.sjlt_constant));
      } else if (suite == "rangefinder") {
        Vector sigma(c.rf_n);
        for (Index i = 0; i < c.rf_n; i++) sigma(i) = std::pow(c.rf_decay, double(i + 1));
        Matrix A = matrix_with_spectrum(sigma, c.rf_n, c.rf_n, derive_seed(c.seed, 0xa0));
        const Index d = c.rf_rank + c.rf_oversampling;
        std::uint64_t stream = 1;
        for (auto kind : c.kinds)
          for (double eps : c.eps)
            for (double delta : c.delta) {
              SketchParams p;
              if (kind == SketchKind::Sjlt) p = sjlt_params_for(d, c.rf_alpha);
              add(rangefinder_campaign(A, c.rf_rank, kind, d, p, eps, delta,
                                       c.trials, derive_seed(c.seed, 0x200 + stream++)));
            }
      } else
        throw std::invalid_argument("unknown suite '" + suite + "'");
    }

    nlohmann::json out;
    out["config"] = cfg;
    out["reports"] = reports;
    out["summary"] = {{"reports", reports.size()}, {"trials", total},
                      {"violations", viol}, {"degenerate", degen}};
    return out;
  }

} // namespace hss
