#include <doctest.h>

#include <sstream>

#include "hss/run_record.hpp"

using namespace hss;

namespace {

  std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    if (!s.empty() && s.back() == ',') out.push_back("");
    return out;
  }

  const char* kKeys[] = {"status", "error", "blocking_node", "matrix", "n", "sketch",
                         "alpha", "construction", "d0", "dd", "d_max", "eps_rel",
                         "eps_abs", "seed", "final_d", "adaptation_rounds",
                         "sketch_columns", "max_rank", "memory_fraction", "relative_error"};

} // namespace

TEST_CASE("run record: successful compression") {
  MatrixSpec spec;
  spec.kind = MatrixKind::QChem;
  spec.n = 600;
  spec.leaf_size = 64;
  auto tm = make_matrix(spec);
  CompressOptions o;
  o.sketch = SketchKind::Sjlt;
  o.d0 = 64;
  o.dd = 32;
  auto r = run_compress(tm, spec, o, 1000);
  REQUIRE(r.ok);
  REQUIRE(r.relative_error.has_value());
  CHECK(*r.relative_error < 1e-2);

  auto j = to_json(r);
  for (auto k : kKeys) CHECK(j.contains(k));
  CHECK(j["status"] == "ok");
  CHECK(j["error"].is_null());
  CHECK(j["alpha"] == 4);
  CHECK(j["construction"] == "block");
  CHECK(j["d_max"] == 600);
  CHECK(j["matrix"]["kind"] == "qchem");
  CHECK(j.contains("sketch_ms"));
  CHECK(j.contains("total_ms"));
  CHECK(j["total_ms"].get<double>() >= j["sketch_ms"].get<double>());

  auto quiet = to_json(r, false);
  CHECK_FALSE(quiet.contains("sketch_ms"));
  CHECK_FALSE(quiet.contains("total_ms"));

  auto row = split(csv_row(r));
  auto head = split(csv_header());
  REQUIRE(row.size() == head.size());
  CHECK(head.size() == 12);
  CHECK(row[0] == "qchem");
  CHECK(row[1] == "600");
  CHECK(row[3] == "sjlt");
  CHECK(row[4] == "4");
  CHECK(std::stod(row[11]) == doctest::Approx(*r.relative_error).epsilon(1e-5));
}

TEST_CASE("run record: error above the cap is null") {
  MatrixSpec spec;
  spec.kind = MatrixKind::QChem;
  spec.n = 300;
  spec.leaf_size = 64;
  auto tm = make_matrix(spec);
  CompressOptions o;
  o.sketch = SketchKind::Gaussian;
  o.d0 = 32;
  o.dd = 16;
  auto r = run_compress(tm, spec, o, 200);
  CHECK(r.ok);
  CHECK_FALSE(r.relative_error.has_value());
  auto j = to_json(r);
  CHECK(j["relative_error"].is_null());
  CHECK(j["alpha"].is_null());
  CHECK(j["construction"].is_null());
  auto row = split(csv_row(r));
  CHECK(row[4].empty());
  CHECK(row[11].empty());
}

TEST_CASE("run record: sketch limit is reported, not thrown") {
  MatrixSpec spec;
  spec.kind = MatrixKind::Synthetic;
  spec.n = 512;
  spec.rank = 40;
  spec.leaf_size = 64;
  auto tm = make_matrix(spec);
  CompressOptions o;
  o.sketch = SketchKind::Gaussian;
  o.eps_rel = 1e-10;
  o.d0 = 16;
  o.dd = 16;
  o.d_max = 32;
  auto r = run_compress(tm, spec, o, 1000);
  CHECK_FALSE(r.ok);
  CHECK(r.blocking_node >= 0);
  auto j = to_json(r);
  for (auto k : kKeys) CHECK(j.contains(k));
  CHECK(j["status"] == "max_sketch_reached");
  CHECK(j["error"].is_string());
  CHECK(j["max_rank"].is_null());
  CHECK(j["relative_error"].is_null());
  CHECK(j["final_d"].get<Index>() >= 32);
  CHECK(split(csv_row(r)).size() == 12);
}
