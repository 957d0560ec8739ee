// Command line front end: compress, verify and sweep.
//
// Exit codes: 0 success, 2 invalid flags, 3 sketch limit reached (the
// record is still written).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hss/run_record.hpp"
#include "hss/verify.hpp"

namespace {

  using namespace hss;

  constexpr int kExitUsage = 2;
  constexpr int kExitMaxSketch = 3;

  struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
  };

  struct MatrixFlags {
    std::string kind = "covariance";
    Index k = 10;
    double lambda = 0.2;
    Index n = 1000;
    double spacing = 0.1;
    Index rank = 8;
    std::uint64_t matrix_seed = 0;
    bool symmetric = false;
    std::string path;
    Index leaf = 256;
    bool materialize = false;

    void add(CLI::App& app, bool multi_kind) {
      if (!multi_kind)
        app.add_option("--matrix", kind, "covariance, qchem, synthetic or file")
          ->capture_default_str();
      app.add_option("--k", k, "covariance grid side (n = k^3)")->capture_default_str();
      app.add_option("--lambda", lambda, "covariance correlation length")->capture_default_str();
      app.add_option("--n", n, "qchem / synthetic dimension")->capture_default_str();
      app.add_option("--spacing", spacing, "qchem grid spacing")->capture_default_str();
      app.add_option("--rank", rank, "synthetic HSS rank")->capture_default_str();
      app.add_option("--matrix-seed", matrix_seed, "synthetic generator seed")->capture_default_str();
      app.add_flag("--symmetric", symmetric, "synthetic: symmetric variant");
      app.add_option("--path", path, "HSSD matrix file");
      app.add_option("--leaf", leaf, "leaf size")->capture_default_str();
      app.add_flag("--materialize", materialize, "evaluate all entries into memory first");
    }

    MatrixSpec spec(const std::string& which) const {
      MatrixSpec s;
      s.kind = parse_matrix_kind(which);
      s.k = k;
      s.lambda = lambda;
      s.n = n;
      s.spacing = spacing;
      s.rank = rank;
      s.seed = matrix_seed;
      s.symmetric = symmetric;
      s.path = path;
      s.leaf_size = leaf;
      s.materialize = materialize;
      if (s.kind == MatrixKind::File && s.path.empty())
        throw UsageError("--matrix file requires --path");
      return s;
    }
  };

  struct CompressFlags {
    std::string sketch = "sjlt";
    Index alpha = 4;
    std::string construction = "block";
    Index d0 = 128, dd = 64, d_max = 0;
    double eps_rel = 1e-2, eps_abs = 1e-8;
    std::uint64_t seed = 0;
    int repeats = 1, warmup = 0, threads = 1;
    Index error_cap = 16384;

    void add(CLI::App& app, bool multi_sketch) {
      if (!multi_sketch) {
        app.add_option("--sketch", sketch, "gaussian, srht or sjlt")->capture_default_str();
        app.add_option("--eps-rel", eps_rel, "relative compression tolerance")->capture_default_str();
      }
      app.add_option("--alpha", alpha, "SJLT nonzeros per column")->capture_default_str();
      app.add_option("--construction", construction, "SJLT construction: block or graph")
        ->capture_default_str();
      app.add_option("--d0", d0, "initial sketch size")->capture_default_str();
      app.add_option("--dd", dd, "sketch increment")->capture_default_str();
      app.add_option("--d-max", d_max, "sketch size limit (0: n)")->capture_default_str();
      app.add_option("--eps-abs", eps_abs, "absolute compression tolerance")->capture_default_str();
      app.add_option("--seed", seed, "master seed (HSS_SEED overrides)")->capture_default_str();
      app.add_option("--repeats", repeats, "runs per configuration")->capture_default_str()
        ->check(CLI::PositiveNumber);
      app.add_option("--warmup", warmup, "untimed runs before measuring")->capture_default_str()
        ->check(CLI::NonNegativeNumber);
      app.add_option("--threads", threads, "kernel threads (kernels are single threaded)")
        ->capture_default_str()->check(CLI::PositiveNumber);
      app.add_option("--error-cap", error_cap, "largest n for which the error is measured")
        ->capture_default_str();
    }

    CompressOptions options(const std::string& kind, Index a, double eps) const {
      CompressOptions o;
      o.d0 = d0;
      o.dd = dd;
      o.d_max = d_max;
      o.eps_rel = eps;
      o.eps_abs = eps_abs;
      o.sketch = parse_sketch_kind(kind);
      o.sketch_params.alpha = a;
      o.sketch_params.construction = parse_sjlt_construction(construction);
      o.seed = seed;
      return o;
    }
  };

  std::uint64_t seed_override(std::uint64_t seed) {
    const char* env = std::getenv("HSS_SEED");
    if (!env || !*env) return seed;
    try {
      std::size_t pos = 0;
      auto v = std::stoull(env, &pos);
      if (pos != std::string(env).size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw UsageError(std::string("HSS_SEED is not an unsigned integer: ") + env);
    }
  }

  std::uint64_t repeat_seed(std::uint64_t seed, int i) {
    return i == 0 ? seed : derive_seed(seed, static_cast<std::uint64_t>(i));
  }

  void note_threads(int threads) {
    if (threads > 1)
      std::cerr << "note: --threads " << threads
                << " ignored, kernels run single threaded\n";
  }

  // Runs warmup + repeats compressions and hands each record to emit.
  // Returns false if any run hit the sketch limit.
  template <class Emit>
  bool run_series(const TestMatrix& tm, const MatrixSpec& spec,
                  CompressOptions opts, const CompressFlags& f, Emit emit) {
    opts.validate();
    const auto base = opts.seed;
    for (int w = 0; w < f.warmup; w++) run_compress(tm, spec, opts, 0);
    bool all_ok = true;
    for (int i = 0; i < f.repeats; i++) {
      opts.seed = repeat_seed(base, i);
      auto rec = run_compress(tm, spec, opts, f.error_cap);
      all_ok = all_ok && rec.ok;
      emit(rec);
    }
    return all_ok;
  }

  std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(item);
    return out;
  }

  int cmd_compress(const MatrixFlags& mf, CompressFlags cf, const std::string& csv_out) {
    cf.seed = seed_override(cf.seed);
    note_threads(cf.threads);
    auto spec = mf.spec(mf.kind);
    auto opts = cf.options(cf.sketch, cf.alpha, cf.eps_rel);
    opts.validate();
    auto tm = make_matrix(spec);
    std::ofstream csv;
    if (!csv_out.empty()) {
      csv.open(csv_out);
      if (!csv) throw UsageError("cannot open " + csv_out);
      csv << csv_header() << "\n";
    }
    bool ok = run_series(tm, spec, opts, cf, [&](const RunRecord& r) {
      std::cout << to_json(r).dump() << std::endl;
      if (csv.is_open()) csv << csv_row(r) << "\n";
      if (!r.ok) std::cerr << "error: " << r.error << "\n";
    });
    return ok ? 0 : kExitMaxSketch;
  }

  // "sjlt-2" selects SJLT with alpha 2; plain "sjlt" uses --alpha.
  std::pair<std::string, Index> parse_sketch_label(const std::string& s, Index alpha) {
    auto dash = s.find('-');
    if (dash == std::string::npos) return {s, alpha};
    try {
      std::size_t pos = 0;
      auto tail = s.substr(dash + 1);
      long a = std::stol(tail, &pos);
      if (pos != tail.size()) throw std::invalid_argument("junk");
      return {s.substr(0, dash), a};
    } catch (const std::exception&) {
      throw UsageError("bad sketch label '" + s + "' (expected e.g. sjlt-2)");
    }
  }

  int cmd_sweep(const MatrixFlags& mf, CompressFlags cf, const std::string& matrices,
                const std::string& sketches, const std::string& eps_list,
                const std::string& out) {
    cf.seed = seed_override(cf.seed);
    note_threads(cf.threads);
    auto mats = split(matrices), sks = split(sketches), eps = split(eps_list);
    if (mats.empty() || sks.empty() || eps.empty())
      throw UsageError("sweep needs at least one matrix, sketch and eps-rel value");
    std::vector<double> epsv;
    for (auto& e : eps) {
      try {
        epsv.push_back(std::stod(e));
      } catch (const std::exception&) {
        throw UsageError("bad eps-rel value '" + e + "'");
      }
    }
    // validate the whole grid before running anything
    std::vector<std::pair<std::string, Index>> labels;
    for (auto& s : sks) {
      labels.push_back(parse_sketch_label(s, cf.alpha));
      for (double e : epsv) cf.options(labels.back().first, labels.back().second, e).validate();
    }
    std::vector<MatrixSpec> specs;
    for (auto& m : mats) specs.push_back(mf.spec(m));

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out.empty()) {
      file.open(out);
      if (!file) throw UsageError("cannot open " + out);
      os = &file;
    }
    *os << csv_header() << "\n";
    bool ok = true;
    for (auto& spec : specs) {
      auto tm = make_matrix(spec);
      for (double e : epsv)
        for (auto& [kind, alpha] : labels) {
          auto opts = cf.options(kind, alpha, e);
          ok = run_series(tm, spec, opts, cf, [&](const RunRecord& r) {
            *os << csv_row(r) << std::endl;
            if (!r.ok) std::cerr << "error: " << r.error << "\n";
          }) && ok;
        }
    }
    return ok ? 0 : kExitMaxSketch;
  }

  int cmd_verify(const std::string& suite, const std::vector<std::string>& kinds,
                 CampaignConfig cfg, bool summary_only, const std::string& out) {
    cfg.seed = seed_override(cfg.seed);
    if (suite == "all") cfg.suites = {"frobenius", "rangefinder"};
    else if (suite == "frobenius" || suite == "rangefinder") cfg.suites = {suite};
    else throw UsageError("--suite must be frobenius, rangefinder or all");
    if (kinds.empty()) throw UsageError("no operator kind selected");
    for (auto& k : kinds) cfg.kinds.push_back(parse_sketch_kind(k));
    auto j = run_campaign(cfg, !summary_only);
    if (out.empty())
      std::cout << j.dump(2) << std::endl;
    else {
      std::ofstream f(out);
      if (!f) throw UsageError("cannot open " + out);
      f << j.dump(2) << "\n";
    }
    return 0;
  }

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive HSS compression with JL sketching operators"};
  app.require_subcommand(1);

  MatrixFlags cmf, smf;
  CompressFlags ccf, scf;
  std::string csv_out;
  auto* compress = app.add_subcommand("compress", "compress one matrix, JSON lines on stdout");
  cmf.add(*compress, false);
  ccf.add(*compress, false);
  compress->add_option("--out", csv_out, "also write CSV rows to this file");

  std::string sweep_matrices = "covariance", sweep_sketches = "gaussian,sjlt-2",
    sweep_eps = "1e-2,1e-4,1e-6", sweep_out;
  auto* sweep = app.add_subcommand("sweep", "cross product of matrices, tolerances and sketches, CSV");
  smf.add(*sweep, true);
  scf.add(*sweep, true);
  sweep->add_option("--matrix", sweep_matrices, "comma separated matrix kinds")->capture_default_str();
  sweep->add_option("--sketch", sweep_sketches, "comma separated, e.g. gaussian,srht,sjlt-2")
    ->capture_default_str();
  sweep->add_option("--eps-rel", sweep_eps, "comma separated tolerances")->capture_default_str();
  sweep->add_option("--out", sweep_out, "CSV file (default stdout)");

  std::string suite;
  std::vector<std::string> kinds{"gaussian", "srht", "sjlt"};
  CampaignConfig cfg;
  bool summary_only = false;
  std::string verify_out;
  auto* verify = app.add_subcommand("verify", "Monte-Carlo checks of the sketching bounds, JSON");
  verify->add_option("--suite", suite, "frobenius, rangefinder or all")->required();
  verify->add_option("--kind", kinds, "operator kinds")->capture_default_str();
  verify->add_option("--eps", cfg.eps, "JL distortion values")->capture_default_str();
  verify->add_option("--delta", cfg.delta, "failure probabilities")->capture_default_str();
  verify->add_option("--trials", cfg.trials, "trials per report")->capture_default_str()
    ->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", cfg.seed, "master seed (HSS_SEED overrides)")->capture_default_str();
  verify->add_option("--sjlt-constant", cfg.sjlt_constant, "constant C of the SJLT dimension bound")
    ->capture_default_str();
  verify->add_option("--rows", cfg.frob_rows, "frobenius matrix rows")->capture_default_str();
  verify->add_option("--cols", cfg.frob_cols, "frobenius matrix columns")->capture_default_str();
  verify->add_option("--rf-n", cfg.rf_n, "rangefinder matrix size")->capture_default_str();
  verify->add_option("--rank", cfg.rf_rank, "rangefinder target rank r")->capture_default_str();
  verify->add_option("--oversampling", cfg.rf_oversampling, "rangefinder oversampling p")
    ->capture_default_str();
  verify->add_option("--decay", cfg.rf_decay, "rangefinder spectrum ratio")->capture_default_str();
  verify->add_option("--alpha", cfg.rf_alpha, "rangefinder SJLT alpha")->capture_default_str();
  verify->add_flag("--summary-only", summary_only, "omit per-trial arrays");
  verify->add_option("--out", verify_out, "write JSON to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (compress->parsed()) return cmd_compress(cmf, ccf, csv_out);
    if (sweep->parsed())
      return cmd_sweep(smf, scf, sweep_matrices, sweep_sketches, sweep_eps, sweep_out);
    return cmd_verify(suite, kinds, cfg, summary_only, verify_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
