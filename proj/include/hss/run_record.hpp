#ifndef HSS_RUN_RECORD_HPP
#define HSS_RUN_RECORD_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "hss/compress.hpp"
#include "hss/hss_ops.hpp"
#include "hss/matgen.hpp"

namespace hss {

  /// Result of one compress run as emitted by the command line tool.
  struct RunRecord {
    MatrixSpec matrix;
    Index n = 0;
    CompressOptions opts;
    bool ok = true;
    std::string error;        // set when ok is false
    int blocking_node = -1;
    CompressStats compress;
    HssStats hss;
    std::optional<double> relative_error;
  };

  /// Compresses tm with opts and fills in statistics. The relative error
  /// is computed when n <= error_cap. MaxSketchReached is caught and
  /// reported through ok/error.
  RunRecord run_compress(const TestMatrix& tm, const MatrixSpec& spec,
                         const CompressOptions& opts, Index error_cap);

  /// Every field is always present; relative_error is null when not
  /// computed. Timing fields are left out when with_timing is false.
  nlohmann::json to_json(const RunRecord& r, bool with_timing = true);

  /// Column order is fixed:
  /// matrix,n,eps_rel,sketch,alpha,seed,sketch_ms,total_ms,final_d,max_rank,comp_pct,rel_err
  std::string csv_header();
  std::string csv_row(const RunRecord& r);

} // namespace hss

#endif
