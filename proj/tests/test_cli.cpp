// Copyright 2026 The lorentz-encode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "lorentz/cli.hpp"

namespace lorentz::cli {
namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lorentz_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const json& j) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << j.dump();
    return p;
  }
  RunOptions opts(const std::string& cmd, std::optional<fs::path> cfg) {
    RunOptions o;
    o.command = cmd;
    o.config = std::move(cfg);
    o.out_dir = dir_ / "out";
    return o;
  }
  static std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }
  static std::vector<std::vector<double>> read_csv(const fs::path& p) {
    std::ifstream is(p);
    std::string line;
    std::getline(is, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
      std::vector<double> r;
      std::stringstream ss(line);
      for (std::string c; std::getline(ss, c, ',');) r.push_back(std::stod(c));
      rows.push_back(r);
    }
    return rows;
  }
  int run_quiet(const RunOptions& o, std::string* err = nullptr) {
    std::ostringstream out, e;
    const int rc = run(o, out, e);
    if (err) *err = e.str();
    return rc;
  }

  fs::path dir_;
};

const json kTwoPeak = {{"n_q", 4}, {"terms", {{{"a", 0.5}, {"k_c", 0}, {"d", 1.0}}, {{"a", 0.5}, {"k_c", 8}, {"d", 1.0}}}}};

TEST_F(CliTest, EncodeTwoPeak) {
  auto o = opts("encode", write_config("enc.json", kTwoPeak));
  ASSERT_EQ(run_quiet(o), 0);
  const json s = read_json_file(o.out_dir / "summary.json");
  EXPECT_GE(s["fidelity"].get<double>(), 1 - 1e-10);
  EXPECT_NEAR(s["w_simulated"].get<double>(), s["w_analytic"].get<double>(), 1e-12);
  for (const char* key : {"m_opt", "theta_ar_opt", "depth", "gate_counts"}) EXPECT_TRUE(s.contains(key)) << key;
  const auto t = read_csv(o.out_dir / "target_amplitudes.csv");
  const auto m = read_csv(o.out_dir / "simulated_amplitudes.csv");
  ASSERT_EQ(t.size(), 16u);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(t[i][3], m[i][3], 1e-10);
  EXPECT_EQ(slurp(o.out_dir / "target_amplitudes.csv").substr(0, 23), "index,re,im,probability");
  EXPECT_TRUE(fs::exists(o.out_dir / "circuit.txt"));
}

TEST_F(CliTest, EncodeDeterministic) {
  auto o = opts("encode", write_config("enc.json", kTwoPeak));
  o.deterministic = true;
  ASSERT_EQ(run_quiet(o), 0);
  const json s = read_json_file(o.out_dir / "summary.json");
  EXPECT_GE(s["success_probability"].get<double>(), 1 - 1e-9);
  EXPECT_GE(s["fidelity"].get<double>(), 1 - 1e-9);
  EXPECT_EQ(s["mode"], "deterministic");
}

TEST_F(CliTest, EncodeSingleTermHasUnitWeight) {
  json cfg = {{"n_q", 3}, {"terms", {{{"a", 0.7}, {"k_c", 2}, {"d", 3.0}}}}};
  auto o = opts("encode", write_config("enc.json", cfg));
  ASSERT_EQ(run_quiet(o), 0);
  EXPECT_NEAR(read_json_file(o.out_dir / "summary.json")["w_analytic"].get<double>(), 1.0, 1e-14);
}

TEST_F(CliTest, EncodeComplexProductAndDagger) {
  json cx = {{"n_q", 4},
             {"terms", {{{"a", 0.5}, {"k_c", 3}, {"d", {1.0, 0.0}}}, {{"a", 0.9}, {"k_c", 11}, {"d", {0.0, 1.0}}}}}};
  auto o = opts("encode", write_config("cx.json", cx));
  o.qft_dagger = true;
  ASSERT_EQ(run_quiet(o), 0);
  EXPECT_GE(read_json_file(o.out_dir / "summary.json")["fidelity"].get<double>(), 1 - 1e-10);

  json p2 = {{"n_q", 3},
             {"terms",
              {{{"a", {0.5, 0.8}}, {"k_c", {1, 5}}, {"d", 0.7}}, {{"a", {1.2, 0.3}}, {"k_c", {6, 2}}, {"d", -0.4}}}}};
  auto q = opts("encode", write_config("p2.json", p2));
  q.dim = 2;
  ASSERT_EQ(run_quiet(q), 0);
  const json s = read_json_file(q.out_dir / "summary.json");
  EXPECT_GE(s["fidelity"].get<double>(), 1 - 1e-10);
  EXPECT_EQ(s["dim"], 2);
  q.dim = 3;
  EXPECT_EQ(run_quiet(q), 1);
}

TEST_F(CliTest, EncodeValidationErrors) {
  std::string err;
  json bad = {{"n_q", 4}, {"terms", {{{"a", -0.5}, {"k_c", 0}}}}};
  EXPECT_EQ(run_quiet(opts("encode", write_config("bad.json", bad)), &err), 1);
  const json e = json::parse(err);
  EXPECT_EQ(e["status"], "error");
  EXPECT_EQ(e["kind"], "config");
  json out_of_grid = {{"n_q", 3}, {"terms", {{{"a", 0.5}, {"k_c", 9}}}}};
  EXPECT_EQ(run_quiet(opts("encode", write_config("bad2.json", out_of_grid))), 1);
  EXPECT_EQ(run_quiet(opts("encode", std::nullopt)), 1);
  std::ofstream(dir_ / "broken.json") << "{ not json";
  EXPECT_EQ(run_quiet(opts("encode", dir_ / "broken.json")), 1);
  EXPECT_EQ(run_quiet(opts("nope", std::nullopt)), 1);
}

TEST_F(CliTest, FitBundledTargetIsReproducible) {
  json cfg = {{"target", std::string(LORENTZ_SAMPLES_DIR) + "/two_gaussian_target.csv"}, {"n_loc", 3}};
  auto o = opts("fit", write_config("fit.json", cfg));
  o.seed = 1;
  ASSERT_EQ(run_quiet(o), 0);
  const std::string first = slurp(o.out_dir / "fit_result.json");
  const json r = json::parse(first);
  EXPECT_GE(r["F"].get<double>(), 0.99);
  EXPECT_EQ(r["seed"], 1);
  EXPECT_EQ(read_csv(o.out_dir / "fit_amplitudes.csv").size(), 32u);
  ASSERT_EQ(run_quiet(o), 0);
  EXPECT_EQ(slurp(o.out_dir / "fit_result.json"), first);
}

TEST_F(CliTest, FitSingleLorentzianTarget) {
  json cfg = {{"target", lorentzian_table(4, 0.9, 5)}, {"n_loc", 1}, {"n_M", 40}, {"k_c_init", {5}}};
  auto o = opts("fit", write_config("fit.json", cfg));
  ASSERT_EQ(run_quiet(o), 0);
  EXPECT_GE(read_json_file(o.out_dir / "fit_result.json")["F"].get<double>(), 1 - 1e-6);
}

TEST_F(CliTest, FitBadTarget) {
  std::ofstream(dir_ / "t.csv") << "index,value\n0,1\n1,abc\n";
  json cfg = {{"target", "t.csv"}};
  EXPECT_EQ(run_quiet(opts("fit", write_config("fit.json", cfg))), 1);
  json missing = {{"target", "nope.csv"}};
  EXPECT_EQ(run_quiet(opts("fit", write_config("fit2.json", missing))), 1);
  json odd = {{"target", {1.0, 2.0, 3.0}}};
  EXPECT_EQ(run_quiet(opts("fit", write_config("fit3.json", odd))), 1);
}

TEST_F(CliTest, TargetCsvFormats) {
  std::ofstream(dir_ / "a.csv") << "index,value\n1,2\n0,1\n";
  EXPECT_EQ(read_target_csv(dir_ / "a.csv"), (std::vector<double>{1, 2}));
  std::ofstream(dir_ / "b.csv") << "0.5\n0.25\n";
  EXPECT_EQ(read_target_csv(dir_ / "b.csv"), (std::vector<double>{0.5, 0.25}));
  std::ofstream(dir_ / "c.csv") << "0,1\n0,2\n";
  EXPECT_THROW(read_target_csv(dir_ / "c.csv"), ConfigError);
}

TEST_F(CliTest, QaraSweepDefaultsAndPointwise) {
  auto o = opts("qara-sweep", std::nullopt);
  ASSERT_EQ(run_quiet(o), 0);
  const auto rows = read_csv(o.out_dir / "qara_sweep.csv");
  EXPECT_EQ(rows.size(), 180u);
  for (const auto& r : rows) EXPECT_EQ(r[2], failure_weight_after_qara({r[0], r[1] * r[0]}));
  const json s = read_json_file(o.out_dir / "qara_sweep.json");
  for (const auto& pr : s["ratios"]) EXPECT_LT(pr["max_wf_qara"].get<double>(), 0.1 * pr["max_wf_qaa"].get<double>());

  json one = {{"delta_ratios", {0.1}}, {"w_grid", {0.001}}};
  auto p = opts("qara-sweep", write_config("one.json", one));
  ASSERT_EQ(run_quiet(p), 0);
  const auto single = read_csv(p.out_dir / "qara_sweep.csv");
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0][2], failure_weight_after_qara({0.001, 0.0001}));
  EXPECT_EQ(single[0][3], qaa_only_failure({0.001, 0.0001}));

  json empty = {{"delta_ratios", json::array()}};
  EXPECT_EQ(run_quiet(opts("qara-sweep", write_config("e.json", empty))), 1);
  json emptyw = {{"w_grid", json::array()}};
  EXPECT_EQ(run_quiet(opts("qara-sweep", write_config("e2.json", emptyw))), 1);
}

TEST_F(CliTest, MetricsSweeps) {
  json slater = {{"builder", "u_slater"}, {"n_q", {2, 3, 4, 5, 8, 12, 16}}};
  auto o = opts("metrics", write_config("m.json", slater));
  ASSERT_EQ(run_quiet(o), 0);
  for (const auto& r : read_csv(o.out_dir / "metrics.csv"))
    EXPECT_LE(r[2], 3 * ceil_log2(static_cast<std::uint64_t>(r[0])) + 4);

  json shift = {{"builder", "u_shift"}, {"n_q", {1, 3, 7}}};
  auto p = opts("metrics", write_config("s.json", shift));
  ASSERT_EQ(run_quiet(p), 0);
  for (const auto& r : read_csv(p.out_dir / "metrics.csv")) EXPECT_EQ(r[2], 1.0);

  json clc = {{"builder", "c_lc"}, {"n_q", {4}}, {"n_loc", {2, 4, 8}}};
  auto q = opts("metrics", write_config("c.json", clc));
  ASSERT_EQ(run_quiet(q), 0);
  const auto rows = read_csv(q.out_dir / "metrics.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GT(rows[2][2] - rows[1][2], rows[1][2] - rows[0][2]);
  EXPECT_EQ(slurp(q.out_dir / "metrics.csv").substr(0, 35), "n_q,n_loc,depth,cx_count,mcu_count,");

  json bad = {{"builder", "warp_drive"}};
  EXPECT_EQ(run_quiet(opts("metrics", write_config("b.json", bad))), 1);
}

TEST_F(CliTest, SamplesParse) {
  for (const char* name : {"two_peak_encode.json", "complex_encode.json", "product2d_encode.json"}) {
    const json cfg = read_json_file(fs::path(LORENTZ_SAMPLES_DIR) / name);
    EXPECT_NO_THROW(parse_lc(cfg, std::nullopt)) << name;
  }
}

TEST(Csv, SeventeenDigits) {
  Csv c({"x"});
  c.row(0.1);
  EXPECT_EQ(c.str(), "x\n0.10000000000000001\n");
  EXPECT_EQ(std::stod(fmt17(1.0 / 3.0)), 1.0 / 3.0);
}

}  // namespace
}  // namespace lorentz::cli
