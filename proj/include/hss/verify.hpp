#ifndef HSS_VERIFY_HPP
#define HSS_VERIFY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hss/sketching.hpp"

namespace hss {

  struct FrobeniusTrial {
    double lhs = 0;    // ||A R^T||_F^2
    double lower = 0;  // (1 - eps) ||A||_F^2
    double upper = 0;  // (1 + eps) ||A||_F^2
    bool in_range = true;
  };

  /// One draw of a d x cols(A) operator.
  FrobeniusTrial frobenius_trial(const Matrix& A, SketchKind kind, Index d,
                                 SketchParams params, double eps,
                                 std::uint64_t seed);

  struct RangefinderTrial {
    double lhs = 0;                // ||(I - P_Y) A||_2
    double deterministic_rhs = 0;  // sqrt(||S2||^2 + ||S2 R2 R1^+||^2)
    double probabilistic_rhs = 0;  // bound for the operator family
    double generic_rhs = 0;        // bound for an arbitrary JL operator
    double sigma_next = 0;         // sigma_{r+1}(A)
    bool degenerate = false;       // R1 numerically rank deficient
  };

  /// Y = A R^T with d = r + p columns; lhs from an SVD of (I - QQ^T) A.
  /// eps and delta enter only the SJLT and generic bounds.
  RangefinderTrial rangefinder_trial(const Matrix& A, Index r, SketchKind kind,
                                     Index d, SketchParams params,
                                     std::uint64_t seed, double eps = 0.5,
                                     double delta = 0.01);

  /// sigma must hold all singular values of A, nonincreasing; n is the
  /// column count of A.
  double probabilistic_rhs(SketchKind kind, const Vector& sigma, Index n,
                           Index r, Index d, Index alpha, double eps,
                           double delta);
  double generic_jl_rhs(const Vector& sigma, Index n, Index r, double eps);

  struct BoundReport {
    std::string suite;
    SketchKind kind = SketchKind::Gaussian;
    Index d = 0;
    Index alpha = 0;
    double eps = 0;
    double delta = 0;
    Index required_d = 0;     // frobenius: dimension from the JL bound
    bool informational = false;  // required_d exceeded n and was capped
    Index trials = 0;
    Index violations = 0;
    Index degenerate = 0;
    Index probabilistic_violations = 0;  // rangefinder only
    double theoretical_delta = 0;
    std::vector<double> lhs, rhs;

    // over non-degenerate trials
    double empirical_rate() const;
  };

  struct CampaignConfig {
    std::vector<std::string> suites;  // "frobenius", "rangefinder"
    std::vector<SketchKind> kinds;
    std::vector<double> eps{0.5};
    std::vector<double> delta{0.01};
    Index trials = 1000;
    std::uint64_t seed = 0;
    double sjlt_constant = 20.0;

    // frobenius: fixed Gaussian matrix
    Index frob_rows = 32;
    Index frob_cols = 512;

    // rangefinder: n x n matrix with sigma_i = decay^i, i = 1..n
    Index rf_n = 128;
    Index rf_rank = 10;
    Index rf_oversampling = 10;
    double rf_decay = 0.5;
    Index rf_alpha = 4;
  };

  BoundReport frobenius_campaign(const Matrix& A, SketchKind kind, double eps,
                                 double delta, Index trials, std::uint64_t seed,
                                 double sjlt_constant = 20.0);

  BoundReport rangefinder_campaign(const Matrix& A, Index r, SketchKind kind,
                                   Index d, SketchParams params, double eps,
                                   double delta, Index trials,
                                   std::uint64_t seed);

  nlohmann::json to_json(const BoundReport& r, bool with_trials = true);

  /// config echo, one report per grid point, and a summary.
  nlohmann::json run_campaign(const CampaignConfig& config,
                              bool with_trials = true);

} // namespace hss

#endif
