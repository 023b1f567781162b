#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "scatterlab/config.hpp"
#include "scatterlab/io.hpp"
#include "test_support.hpp"

using namespace scatterlab;

TEST_CASE("format_real round-trips doubles") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ud(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double x = ud(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(format_real(x)) == x);
  }
  CHECK(format_real(2.0) == "2");
  CHECK(format_real(0.1) == "0.1");
}

TEST_CASE("lens table survives a CSV and sidecar round trip") {
  const auto spec = manifold_preset("perturbed-d2s1");
  LensTableOptions opts;
  opts.budget = 50.0;
  auto table = lens_table(spec, MonteCarloSampling{300, 7}, opts);
  // force one censored row so empty exit cells are exercised
  table.records[3].status = ExitStatus::Trapped;
  table.records[3].exit.reset();

  std::stringstream csv;
  write_lens_table_csv(csv, table);
  const Json sidecar = Json::parse(lens_table_sidecar(table).dump());
  const LensTable back = read_lens_table(csv, sidecar);

  REQUIRE(back.records.size() == table.records.size());
  CHECK(back.spec_fingerprint == table.spec_fingerprint);
  CHECK(back.boundary == table.boundary);
  CHECK(back.budget == table.budget);
  const ComparisonReport r = compare(table, back);
  CHECK(r.status_disagreements == 0);
  CHECK(r.max_deviation() == 0.0);
  for (std::size_t i = 0; i < table.records.size(); ++i) {
    CHECK(back.records[i].travel_time == table.records[i].travel_time);
    CHECK(back.records[i].entry.direction == table.records[i].entry.direction);
  }
  CHECK_FALSE(back.records[3].exit.has_value());
  CHECK(sidecar.at("seed").get<std::uint64_t>() == 7);
}

TEST_CASE("lens table reader rejects malformed input") {
  const auto spec = manifold_preset("flat-d2s1");
  const auto table = lens_table(spec, GridSampling{2, 2, 2, 0});
  const Json sidecar = lens_table_sidecar(table);
  std::stringstream csv;
  write_lens_table_csv(csv, table);
  std::string text = csv.str();

  std::stringstream truncated(text.substr(0, text.rfind(',')) + "\n");
  CHECK(testing::error_code_of([&] { read_lens_table(truncated, sidecar); }) == ErrorCode::Io);

  std::string bad = text;
  bad.replace(bad.find("exited"), 6, "lost");
  std::stringstream bad_status(bad);
  CHECK(testing::error_code_of([&] { read_lens_table(bad_status, sidecar); }) == ErrorCode::Io);

  Json no_sampling = sidecar;
  no_sampling.erase("sampling");
  std::stringstream ok(text);
  CHECK(testing::error_code_of([&] { read_lens_table(ok, no_sampling); }) == ErrorCode::Io);

  std::stringstream empty;
  CHECK(testing::error_code_of([&] { read_lens_table(empty, sidecar); }) == ErrorCode::Io);
  CHECK(testing::error_code_of([] { load_lens_table("/nonexistent/a.csv", "/nonexistent/a.json"); }) ==
        ErrorCode::Io);
}

TEST_CASE("sampling blocks round-trip") {
  const Sampling g = GridSampling{3, 4, 5, 1};
  const Sampling m = MonteCarloSampling{1000, 42};
  CHECK(describe(sampling_from_json(sampling_json(g))) == describe(g));
  CHECK(describe(sampling_from_json(sampling_json(m))) == describe(m));
  CHECK(testing::error_code_of([] { sampling_from_json(Json{{"kind", "sobol"}}); }) == ErrorCode::Io);
}

TEST_CASE("trajectory CSV has one row per sample") {
  const auto spec = manifold_preset("flat-d2s1");
  IntegratorOptions opts;
  opts.record = true;
  BoundaryVector b{{testing::vec({1, 0}), 0.0}, testing::vec({-1, 0, 0})};
  const auto res = integrate_until_exit(spec, b, 10.0, opts);
  std::stringstream out;
  write_trajectory_csv(out, res.trajectory);
  std::string line;
  std::getline(out, line);
  CHECK(line == "elapsed,x1,x2,x3,v1,v2,v3");
  std::size_t rows = 0;
  while (std::getline(out, line)) ++rows;
  CHECK(rows == res.trajectory.size());
  const Json v = verdict_json(res.verdict);
  CHECK(v["status"] == "exited");
  CHECK(v["travel_time"].get<double>() == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("reports carry the documented fields") {
  SantaloEstimate e{19.7, 0.02, 1000, 1e4, 3, 0.003, 5, 1.0};
  const Json j = santalo_json(e);
  for (const char* k : {"estimate", "stderr", "N", "budget", "censored_fraction", "seed"}) CHECK(j.contains(k));
  std::vector<TrappedRung> ladder{{100, 10, 1, 0, 0.1, 0.09, 0.01, 0.4}};
  std::stringstream csv;
  write_ladder_csv(csv, ladder);
  CHECK(csv.str().rfind("budget,samples,trapped", 0) == 0);
  CHECK(ladder_json(ladder).size() == 1);
}
