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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lorentz/cli.hpp"
#include "lorentz/lorentz.hpp"
#include "test_util.hpp"

using namespace lorentz;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// 50 random normalized LCs: n_q in [2, 6], n_loc in [1, 8], half with complex phases.
std::vector<LCSpec> lc_suite() {
  std::mt19937_64 rng(20260417);
  std::vector<LCSpec> out;
  for (int i = 0; i < 50; ++i) {
    const unsigned nq = 2 + static_cast<unsigned>(rng() % 5);
    const std::size_t nl = 1 + rng() % 8;
    out.push_back(i % 2 ? testing::random_complex_lc(rng, nq, nl) : testing::random_real_lc(rng, nq, nl));
  }
  return out;
}

Outcome encoding_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_fid = 1, worst_p = 0;
  for (const auto& lc : lc_suite()) {
    const auto r = run_encoder(c_lc_lorentzian(lc));
    worst_fid = std::min(worst_fid, fidelity(r.data_state, lc_target_state(lc)));
    worst_p = std::max(worst_p, std::abs(r.success_probability - 1 / std::pow(lcu_lambda(lc), 2)));
  }
  const double t = seconds_since(t0);
  return {worst_fid >= 1 - 1e-10 && worst_p <= 1e-12 && t < 30,
          fmt("min fidelity %.3e below 1, max |P - 1/lambda^2| %.2e, %.2fs", 1 - worst_fid, worst_p, t)};
}

Outcome determinization() {
  double worst_p = 1, worst_fid = 1;
  for (const auto& lc : lc_suite()) {
    const auto r = run_encoder(c_lc_deterministic(lc, plan_for_lc(lc)));
    worst_p = std::min(worst_p, r.success_probability);
    worst_fid = std::min(worst_fid, fidelity(r.data_state, lc_target_state(lc)));
  }
  // w = 1/2 exactly: d = (1, i)/sqrt 2 on two real Lorentzians (cross term is imaginary).
  const LCSpec half = normalize_lc(LCSpec{4, 1, {lf_term(0.6, 2, 1.0), lf_term(0.9, 7, cplx(0, 1))}});
  const auto plan = plan_for_lc(half);
  const auto r = run_encoder(c_lc_deterministic(half, plan));
  const bool hand = plan.m_opt == 1 && std::abs(plan.theta_ar_opt - kPi / 4) <= 1e-12 &&
                    std::abs(r.success_probability - 1) <= 1e-12;
  return {worst_p >= 1 - 1e-9 && worst_fid >= 1 - 1e-9 && hand,
          fmt("min P %.15f, min fidelity %.15f, w=1/2 case m=%g P=%.15f", worst_p, worst_fid, plan.m_opt,
              r.success_probability)};
}

Outcome qara_sweep() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> ratios{0.01, 0.04, 0.1};
  const auto grid = log_spaced(1e-4, 0.5, 400);
  const auto rows = sweep_fig1c(ratios, grid);
  bool law = true;
  double worst_rel = 0;
  for (const auto& row : rows)
    if (row.w <= 0.01) {
      const double dev = std::abs(row.wf_qara - row.eps_qara);
      law = law && dev <= 0.5 * row.eps_qara + 1e-6;
      worst_rel = std::max(worst_rel, dev / row.eps_qara);
    }
  bool sep = true;
  double worst_ratio = 0;
  for (double r : ratios) {
    double mq = 0, ma = 0;
    for (const auto& row : rows)
      if (row.delta_ratio == r) {
        mq = std::max(mq, row.wf_qara);
        ma = std::max(ma, row.wf_qaa);
      }
    sep = sep && mq < 0.1 * ma;
    worst_ratio = std::max(worst_ratio, mq / ma);
  }
  const double t = seconds_since(t0);
  return {law && sep && t < 5,
          fmt("max |Wf-eps|/eps %.3f (w<=0.01), max QARA/QAA-only %.2e, %.3fs", worst_rel, worst_ratio, t)};
}

Outcome duality() {
  double worst = 0;
  for (unsigned nq : {3u, 4u, 5u})
    for (double a : {0.1, 0.5, 1.0, 2.0, 4.0}) {
      const auto sf = slater_table(nq, a);
      const auto lf = lf_state({a, 0, nq});
      const std::size_t n = sf.size();
      for (std::size_t k = 0; k < n; ++k) {
        cplx acc = 0;
        for (std::size_t j = 0; j < n; ++j) acc += sf[j] * std::polar(1.0, 2 * kPi * double(j * k % n) / double(n));
        worst = std::max(worst, std::abs(acc / std::sqrt(double(n)) - lf[k]));
      }
      const auto sim = simulate(u_lorentzian(a, nq));
      worst = std::max(worst, max_deviation(sim, lf));
    }
  return {worst <= 1e-12, fmt("max element deviation %.2e (DFT oracle and circuit)", worst)};
}

Outcome overlap() {
  double worst = 0;
  const unsigned nq = 4;
  for (double a : {0.3, 0.7, 1.2})
    for (double b : {0.3, 0.7, 1.2})
      for (int k = 0; k < 16; ++k) {
        double s = 0;
        for (int j = 0; j < 16; ++j) s += lorentzian_value(nq, a, j - k) * lorentzian_value(nq, b, j);
        worst = std::max(worst, std::abs(lf_overlap(a, b, k, nq) - s));
      }
  const double self = std::abs(lf_overlap(0.7, 0.7, 0, nq) - 1);
  return {worst <= 1e-12 && self <= 1e-12, fmt("max |V - brute force| %.2e, |V(a,a,0)-1| %.2e", worst, self)};
}

Outcome compiler_equivalence() {
  std::mt19937_64 rng(6);
  double worst = 0;
  std::size_t configs = 0;
  for (unsigned nc = 0; nc <= 6; ++nc)
    for (unsigned nt = 1; nc + nt <= 7; ++nt)
      for (unsigned pol = 0; pol < (1u << nc); ++pol) {
        const unsigned w = nc + nt;
        std::vector<Control> cs;
        for (unsigned i = 0; i < nc; ++i) cs.push_back({nt + i, bool((pol >> i) & 1)});
        std::vector<unsigned> ts;
        std::vector<std::pair<unsigned, Mat2>> us;
        for (unsigned i = 0; i < nt; ++i) {
          ts.push_back(i);
          us.push_back({i, testing::random_unitary(rng)});
        }
        Circuit naive(w);
        for (unsigned t : ts) naive.add(Gate::unitary("cx", t, gates::x(), cs));
        worst = std::max(worst, testing::deviation_up_to_phase(testing::unitary_of(fanout_x(w, cs, ts)),
                                                               testing::unitary_of(naive)));
        const double extra = double(rng() % 1000) / 100.0;
        worst = std::max(worst, testing::deviation_up_to_phase(testing::unitary_of(mcm1(w, cs, us, extra)),
                                                               testing::unitary_of(mcm1_naive(w, cs, us, extra))));
        configs += 2;
      }
  return {worst <= 1e-10, fmt("%g configurations, max deviation %.2e", double(configs), worst)};
}

Outcome fit_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto target = TargetFunction::from_samples(
      cli::read_target_csv(fs::path(LORENTZ_SAMPLES_DIR) / "two_gaussian_target.csv"));
  FitConfig cfg;  // beta 200, n_M 400, n_p 3
  cfg.n_loc = 3;
  cfg.seed = 0;
  const auto r = fit(target, cfg);
  const double t = seconds_since(t0);
  std::ostringstream os;
  os << "F=" << r.f << " a=(" << r.a[0] << ", " << r.a[1] << ", " << r.a[2] << ") k=(" << r.k_c[0] << ", "
     << r.k_c[1] << ", " << r.k_c[2] << ") d=(" << r.d[0] << ", " << r.d[1] << ", " << r.d[2] << "), " << t << "s";
  return {r.f >= 0.99 && t < 60, os.str()};
}

Outcome ideal_distributions() {
  const fs::path dir = fs::temp_directory_path() / "lorentz_acceptance_encode";
  fs::remove_all(dir);
  // symmetric two-peak pair plus three more; n_q = 4.
  const std::vector<std::array<double, 4>> pairs{{0.5, 0.5, 0, 8}, {0.3, 0.8, 0, 8}, {0.5, 0.5, 4, 12}, {1.0, 0.4, 2, 9}};
  double worst = 0;
  bool ok = true;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    const cli::json cfg = {{"n_q", 4},
                           {"terms",
                            {{{"a", p[0]}, {"k_c", int(p[2])}, {"d", 1.0}},
                             {{"a", p[1]}, {"k_c", int(p[3])}, {"d", 1.0}}}}};
    const fs::path sub = dir / std::to_string(i);
    fs::create_directories(sub);
    std::ofstream(sub / "config.json") << cfg.dump();
    cli::RunOptions o;
    o.command = "encode";
    o.config = sub / "config.json";
    o.out_dir = sub;
    std::ostringstream out, err;
    if (cli::run(o, out, err) != 0) {
      ok = false;
      continue;
    }
    const auto lc = cli::parse_lc(cfg, std::nullopt);
    const auto target = lc_target_state(lc);
    std::ifstream is(sub / "simulated_amplitudes.csv");
    std::string line;
    std::getline(is, line);
    for (std::size_t j = 0; std::getline(is, line); ++j) {
      const double prob = std::stod(line.substr(line.rfind(',') + 1));
      worst = std::max(worst, std::abs(prob - std::norm(target[j])));
    }
  }
  fs::remove_all(dir);
  return {ok && worst <= 1e-10, fmt("4 encode runs, max |p_sim - p_ideal| %.2e", worst)};
}

Outcome depth_scaling() {
  bool ok = true;
  double worst_margin = 1e9;
  for (unsigned nq = 1; nq <= 16; ++nq) {
    const double d = double(metrics(u_slater(0.5, nq)).depth);
    const double bound = 3.0 * ceil_log2(nq) + 4;
    ok = ok && d <= bound;
    worst_margin = std::min(worst_margin, bound - d);
    ok = ok && metrics(u_shift(3, nq)).depth == 1;
  }
  std::mt19937_64 rng(9);
  const std::vector<double> ns{2, 4, 8};
  std::vector<double> depth, x;
  for (double n : ns) {
    depth.push_back(double(metrics(c_lc_lorentzian(testing::random_real_lc(rng, 5, std::size_t(n)))).depth));
    x.push_back(n * std::log2(n));
  }
  const bool superlinear = depth[1] > depth[0] && depth[2] > depth[1] && (depth[2] - depth[1]) / 4 > (depth[1] - depth[0]) / 2;
  // least squares depth ~ c0 + c1 * n log2 n
  const double mx = (x[0] + x[1] + x[2]) / 3, my = (depth[0] + depth[1] + depth[2]) / 3;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (x[i] - mx) * (depth[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double c1 = sxy / sxx, c0 = my - c1 * mx;
  double worst_ratio = 1;
  for (int i = 0; i < 3; ++i) {
    const double fitv = c0 + c1 * x[i];
    const double r = std::max(fitv / depth[i], depth[i] / fitv);
    worst_ratio = std::max(worst_ratio, fitv > 0 ? r : 1e9);
  }
  ok = ok && superlinear && worst_ratio <= 2 && c1 > 0;
  std::ostringstream os;
  os << "U^(S) bound slack >= " << worst_margin << ", u_shift depth 1, c_lc depths (" << depth[0] << ", " << depth[1]
     << ", " << depth[2] << ") fit " << c0 << " + " << c1 << " n log2 n, worst ratio " << worst_ratio;
  return {ok, os.str()};
}

Outcome appendix_paths() {
  const LCSpec cx = normalize_lc(LCSpec{4, 1, {lf_term(0.5, 3, 1.0), lf_term(0.9, 11, cplx(0, 1))}});
  const double f1 = fidelity(run_encoder(c_lc_complex(cx)).data_state, lc_target_state(cx));
  LCSpec p2{3, 2, {}};
  p2.terms.push_back({{{0.5, 1}, {0.8, 5}}, cplx{0.7}, {}});
  p2.terms.push_back({{{1.2, 6}, {0.3, 2}}, cplx{-0.4}, {}});
  p2 = normalize_lc(p2);
  const double f2 = fidelity(run_encoder(c_lc_product(p2)).data_state, lc_target_state(p2));
  return {f1 >= 1 - 1e-10 && f2 >= 1 - 1e-10, fmt("complex 1-F %.2e, 2D product 1-F %.2e", 1 - f1, 1 - f2)};
}

}  // namespace

int main() {
  configure_threads_from_env();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"encoding correctness", encoding_correctness},
      {"determinization", determinization},
      {"QARA failure-weight sweep", qara_sweep},
      {"Slater/Lorentzian duality", duality},
      {"overlap closed form", overlap},
      {"compiler equivalence", compiler_equivalence},
      {"two-Gaussian fit", fit_reproduction},
      {"ideal distributions via encode", ideal_distributions},
      {"depth scaling", depth_scaling},
      {"complex and product paths", appendix_paths},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
