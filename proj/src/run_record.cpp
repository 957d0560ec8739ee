#include "hss/run_record.hpp"

#include <cstdio>

namespace hss {

  RunRecord run_compress(const TestMatrix& tm, const MatrixSpec& spec,
                         const CompressOptions& opts, Index error_cap) {
    RunRecord r;
    r.matrix = spec;
    r.n = tm.A->rows();
    r.opts = opts;
    try {
      auto H = compress(*tm.A, tm.tree, opts);
      r.compress = H.stats();
      r.hss = stats(H);
      if (r.n <= error_cap) r.relative_error = relative_error(*tm.A, H, error_cap);
    } catch (const MaxSketchReached& e) {
      r.ok = false;
      r.error = e.what();
      r.blocking_node = e.blocking_node();
      r.compress = e.stats();
      r.hss.final_d = e.stats().final_d;
      r.hss.adaptation_rounds = e.stats().adaptation_rounds;
    }
    return r;
  }

  namespace {

    nlohmann::json matrix_json(const MatrixSpec& m) {
      nlohmann::json j;
      j["kind"] = to_string(m.kind);
      switch (m.kind) {
      case MatrixKind::Covariance:
        j["k"] = m.k;
        j["lambda"] = m.lambda;
        break;
      case MatrixKind::QChem:
        j["n"] = m.n;
        j["spacing"] = m.spacing;
        break;
      case MatrixKind::Synthetic:
        j["n"] = m.n;
        j["rank"] = m.rank;
        j["seed"] = m.seed;
        j["symmetric"] = m.symmetric;
        break;
      case MatrixKind::File:
        j["path"] = m.path;
        break;
      }
      j["leaf_size"] = m.leaf_size;
      return j;
    }

    std::string fmt(double v) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6g", v);
      return buf;
    }

  } // namespace

  nlohmann::json to_json(const RunRecord& r, bool with_timing) {
    nlohmann::json j;
    j["status"] = r.ok ? "ok" : "max_sketch_reached";
    j["error"] = r.ok ? nlohmann::json(nullptr) : nlohmann::json(r.error);
    j["blocking_node"] = r.ok ? nlohmann::json(nullptr) : nlohmann::json(r.blocking_node);
    j["matrix"] = matrix_json(r.matrix);
    j["n"] = r.n;
    j["sketch"] = to_string(r.opts.sketch);
    const bool sjlt = r.opts.sketch == SketchKind::Sjlt;
    j["alpha"] = sjlt ? nlohmann::json(r.opts.sketch_params.alpha) : nlohmann::json(nullptr);
    j["construction"] = sjlt ? nlohmann::json(to_string(r.opts.sketch_params.construction))
                             : nlohmann::json(nullptr);
    j["d0"] = r.opts.d0;
    j["dd"] = r.opts.dd;
    j["d_max"] = r.opts.d_max > 0 ? r.opts.d_max : r.n;
    j["eps_rel"] = r.opts.eps_rel;
    j["eps_abs"] = r.opts.eps_abs;
    j["seed"] = r.opts.seed;
    if (with_timing) {
      j["sketch_ms"] = r.compress.sketch_ms;
      j["total_ms"] = r.compress.total_ms;
    }
    j["final_d"] = r.compress.final_d;
    j["adaptation_rounds"] = r.compress.adaptation_rounds;
    j["sketch_columns"] = r.compress.sketch_columns;
    j["max_rank"] = r.ok ? nlohmann::json(r.hss.max_rank) : nlohmann::json(nullptr);
    j["memory_fraction"] = r.ok ? nlohmann::json(r.hss.memory_fraction) : nlohmann::json(nullptr);
    j["relative_error"] = r.relative_error ? nlohmann::json(*r.relative_error)
                                           : nlohmann::json(nullptr);
    return j;
  }

  std::string csv_header() {
    return "matrix,n,eps_rel,sketch,alpha,seed,sketch_ms,total_ms,final_d,max_rank,comp_pct,rel_err";
  }

  std::string csv_row(const RunRecord& r) {
    const bool sjlt = r.opts.sketch == SketchKind::Sjlt;
    std::string s;
    s += to_string(r.matrix.kind) + ",";
    s += std::to_string(r.n) + ",";
    s += fmt(r.opts.eps_rel) + ",";
    s += to_string(r.opts.sketch) + ",";
    s += (sjlt ? std::to_string(r.opts.sketch_params.alpha) : std::string()) + ",";
    s += std::to_string(r.opts.seed) + ",";
    s += fmt(r.compress.sketch_ms) + ",";
    s += fmt(r.compress.total_ms) + ",";
    s += std::to_string(r.compress.final_d) + ",";
    s += (r.ok ? std::to_string(r.hss.max_rank) : std::string()) + ",";
    s += (r.ok ? fmt(r.hss.memory_fraction) : std::string()) + ",";
    s += r.relative_error ? fmt(*r.relative_error) : std::string();
    return s;
  }

} // namespace hss
