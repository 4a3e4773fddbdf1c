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

#pragma once

// Classical fit of a Lorentzian linear combination to a sampled real target:
// rank-one generalized eigenproblem for the coefficients, golden-section
// updates of the decay rates, Metropolis walk over integer centres.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lorentz/common.hpp"
#include "lorentz/locfuncs.hpp"

namespace lorentz {

/// Sampled target on the N-point grid, normalized on construction.
class TargetFunction {
 public:
  TargetFunction(unsigned n_q, std::vector<double> samples) : n_q_(n_q), samples_(std::move(samples)) {
    if (static_cast<std::int64_t>(samples_.size()) != grid_size(n_q_))
      throw std::invalid_argument("target length must be 2^n_q");
    double norm = 0.0;
    for (double x : samples_) {
      if (!std::isfinite(x)) throw std::invalid_argument("target samples must be finite");
      norm += x * x;
    }
    if (!(norm > 0.0)) throw std::invalid_argument("target is identically zero");
    const double s = 1.0 / std::sqrt(norm);
    for (double& x : samples_) x *= s;
  }

  /// n_q inferred from the sample count.
  static TargetFunction from_samples(std::vector<double> samples) {
    const std::size_t n = samples.size();
    if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("target length must be a power of two >= 2");
    return TargetFunction(ceil_log2(n), std::move(samples));
  }

  unsigned n_q() const { return n_q_; }
  std::size_t size() const { return samples_.size(); }
  const std::vector<double>& samples() const { return samples_; }
  double operator[](std::size_t j) const { return samples_[j]; }

 private:
  unsigned n_q_;
  std::vector<double> samples_;
};

/// psi(j) ~ exp(-(j-16)^2/9) + 0.4 exp(-(j-8)^2/4) on 32 points.
inline TargetFunction two_gaussian_target() {
  std::vector<double> v(32);
  for (int j = 0; j < 32; ++j) {
    const double x = j;
    v[j] = std::exp(-(x - 16) * (x - 16) / 9.0) + 0.4 * std::exp(-(x - 8) * (x - 8) / 4.0);
  }
  return TargetFunction(5, std::move(v));
}

/// S is singular to working precision (duplicate basis functions).
class DegenerateBasis : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kRateMin = 1e-3;
inline constexpr double kRateMax = 8.0;
inline constexpr int kGoldenSteps = 20;

struct FitConfig {
  std::size_t n_loc = 3;
  double beta = 200.0;
  std::size_t n_m = 400;
  std::size_t n_p = 3;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> k_init;  // empty: evenly spaced
  std::vector<double> a_init;        // empty: all 0.5

  void validate() const {
    if (n_loc < 1) throw std::invalid_argument("n_loc must be >= 1");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (n_m < 1) throw std::invalid_argument("n_M must be >= 1");
    if (n_p < 1) throw std::invalid_argument("n_p must be >= 1");
    if (!k_init.empty() && k_init.size() != n_loc) throw std::invalid_argument("k_init length differs from n_loc");
    if (!a_init.empty() && a_init.size() != n_loc) throw std::invalid_argument("a_init length differs from n_loc");
    for (double a : a_init)
      if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("a_init entries must be positive");
  }

  std::vector<std::int64_t> initial_centers(unsigned n_q) const {
    if (!k_init.empty()) return k_init;
    const std::int64_t n = grid_size(n_q);
    std::vector<std::int64_t> k(n_loc);
    for (std::size_t l = 0; l < n_loc; ++l)
      k[l] = static_cast<std::int64_t>((2 * l + 1) * static_cast<std::uint64_t>(n) / (2 * n_loc));
    return k;
  }
  std::vector<double> initial_rates() const { return a_init.empty() ? std::vector<double>(n_loc, 0.5) : a_init; }
};

struct TraceEntry {
  double f_trial = 0.0;
  bool accepted = false;
  double f_best = 0.0;
};

struct FitResult {
  std::vector<double> d;
  std::vector<double> a;
  std::vector<std::int64_t> k_c;
  double f = 0.0;
  std::vector<TraceEntry> trace;
  std::uint64_t seed = 0;
  std::string selection = "best_so_far";
};

// ---------------------------------------------------------------------------
// Objective pieces.

namespace detail {
inline void check_lengths(std::size_t a, std::size_t k) {
  if (a != k) throw std::invalid_argument("decay-rate and centre vectors differ in length");
  if (a == 0) throw std::invalid_argument("need at least one basis function");
}
}  // namespace detail

/// g_l = sum_j psi(j) L_{j - k_l}(a_l).
inline Eigen::VectorXd g_vector(const TargetFunction& t, const std::vector<double>& a,
                                const std::vector<std::int64_t>& k_c) {
  detail::check_lengths(a.size(), k_c.size());
  Eigen::VectorXd g(static_cast<Eigen::Index>(a.size()));
  for (std::size_t l = 0; l < a.size(); ++l) {
    const auto table = lorentzian_table(t.n_q(), a[l], k_c[l]);
    double s = 0.0;
    for (std::size_t j = 0; j < table.size(); ++j) s += t[j] * table[j];
    g[static_cast<Eigen::Index>(l)] = s;
  }
  return g;
}

struct FitMatrices {
  Eigen::VectorXd g;
  Eigen::MatrixXd G;
  Eigen::MatrixXd S;
};

inline constexpr double kSingularTolerance = 1e-12;

/// G = g g^T, S_{ll'} = V(a_l, a_l', k_l - k_l'). Rejects a singular S.
inline FitMatrices build_matrices(const TargetFunction& t, const std::vector<double>& a,
                                  const std::vector<std::int64_t>& k_c) {
  FitMatrices m;
  m.g = g_vector(t, a, k_c);
  m.G = m.g * m.g.transpose();
  const auto n = static_cast<Eigen::Index>(a.size());
  m.S.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m.S(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = lf_overlap(a[i], a[j], k_c[i] - k_c[j], t.n_q());
      m.S(i, j) = m.S(j, i) = v;
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.S, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= kSingularTolerance * static_cast<double>(n))
    throw DegenerateBasis("overlap matrix is singular (duplicate or near-duplicate basis functions)");
  return m;
}

struct CoeffSolution {
  Eigen::VectorXd d;
  double f = 0.0;
};

/// Rank-one solution of G c = lambda S c: d = S^{-1} g / sqrt(g^T S^{-1} g),
/// F = g^T S^{-1} g. For g = 0 any normalized d gives F = 0.
inline CoeffSolution optimal_coeffs(const Eigen::MatrixXd& G, const Eigen::MatrixXd& S,
                                    const std::optional<Eigen::VectorXd>& g_hint = std::nullopt) {
  if (S.rows() != S.cols() || G.rows() != S.rows() || G.cols() != S.cols())
    throw std::invalid_argument("G and S must be square and of equal size");
  const Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) throw DegenerateBasis("overlap matrix is not positive definite");
  Eigen::VectorXd g;
  if (g_hint) {
    g = *g_hint;
  } else {
    // G = g g^T: recover g (up to sign) from its largest diagonal column.
    Eigen::Index piv = 0;
    G.diagonal().maxCoeff(&piv);
    const double gp = std::sqrt(std::max(0.0, G(piv, piv)));
    g = gp > 0 ? Eigen::VectorXd(G.col(piv) / gp) : Eigen::VectorXd::Zero(G.rows());
  }
  CoeffSolution out;
  const Eigen::VectorXd x = llt.solve(g);
  out.f = g.dot(x);
  if (out.f > 0.0) {
    out.d = x / std::sqrt(out.f);
  } else {
    out.f = 0.0;
    out.d = Eigen::VectorXd::Zero(S.rows());
    out.d[0] = 1.0;
  }
  // Cholesky roundoff: fix d^T S d = 1 exactly-ish and fold sign so d . g >= 0.
  out.d /= std::sqrt(out.d.dot(S * out.d));
  if (out.d.dot(g) < 0) out.d = -out.d;
  return out;
}

inline CoeffSolution optimal_coeffs(const FitMatrices& m) { return optimal_coeffs(m.G, m.S, m.g); }

/// Dense generalized eigensolver path: top eigenpair of G c = lambda S c.
inline CoeffSolution optimal_coeffs_dense(const Eigen::MatrixXd& G, const Eigen::MatrixXd& S) {
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(G, S);
  if (es.info() != Eigen::Success) throw DegenerateBasis("generalized eigensolver failed");
  const Eigen::Index top = S.rows() - 1;  // ascending order
  CoeffSolution out;
  out.f = std::max(0.0, es.eigenvalues()[top]);
  out.d = es.eigenvectors().col(top);
  out.d /= std::sqrt(out.d.dot(S * out.d));
  return out;
}

/// F for given parameters, or -inf for a degenerate basis.
inline double objective(const TargetFunction& t, const std::vector<double>& a, const std::vector<std::int64_t>& k_c) {
  try {
    return optimal_coeffs(build_matrices(t, a, k_c)).f;
  } catch (const DegenerateBasis&) {
    return -std::numeric_limits<double>::infinity();
  }
}

// ---------------------------------------------------------------------------
// Decay-rate optimization at fixed centres.

struct RateFit {
  std::vector<double> a;
  std::vector<double> d;
  double f = 0.0;
  std::vector<double> f_trace;  // F after each of the n_p iterations
  bool hit_floor = false;       // some a_l ended at kRateMin
};

namespace detail {
/// Golden-section maximization of f on [lo, hi] with a fixed number of shrinks.
template <class Fn>
std::pair<double, double> golden_max(Fn&& f, double lo, double hi, int steps) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < steps; ++i) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }
}  // namespace detail

/// n_p rounds of: coefficients from (G, S), then a golden-section pass over
/// each a_l. A coordinate only moves when F improves, so F never decreases.
/// F and d are recomputed after the last rate update.
inline RateFit optimize_decay_rates(const TargetFunction& t, const std::vector<std::int64_t>& k_c,
                                    const std::vector<double>& a_init, std::size_t n_p) {
  if (n_p < 1) throw std::invalid_argument("n_p must be >= 1");
  detail::check_lengths(a_init.size(), k_c.size());
  RateFit out;
  out.a = a_init;
  for (double& a : out.a) a = std::clamp(a, kRateMin, kRateMax);
  double f_cur = objective(t, out.a, k_c);
  for (std::size_t it = 0; it < n_p; ++it) {
    for (std::size_t l = 0; l < out.a.size(); ++l) {
      std::vector<double> trial = out.a;
      auto fl = [&](double log_a) {
        trial[l] = std::exp(log_a);
        return objective(t, trial, k_c);
      };
      const auto [log_x, fx] = detail::golden_max(fl, std::log(kRateMin), std::log(kRateMax), kGoldenSteps);
      const double x = std::exp(log_x);
      if (fx > f_cur) {
        out.a[l] = x;
        f_cur = fx;
      }
    }
    out.f_trace.push_back(f_cur);
  }
  const auto m = build_matrices(t, out.a, k_c);
  const auto sol = optimal_coeffs(m);
  out.d = detail::to_std(sol.d);
  out.f = sol.f;
  for (double a : out.a) out.hit_floor = out.hit_floor || a <= kRateMin * (1.0 + 1e-9) + 1e-9;
  return out;
}

// ---------------------------------------------------------------------------
// Metropolis over centres.

/// Single 64-bit Mersenne Twister stream. Integers by rejection sampling,
/// reals from the top 53 bits, so traces do not depend on the standard
/// library's distribution implementations.
class FitRng {
 public:
  explicit FitRng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("below(0)");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do x = eng_();
    while (x >= limit);
    return x % n;
  }
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 eng_;
};

/// Algorithm: pick a basis function uniformly, move its centre by -1/0/+1
/// (mod N), re-optimize the rates warm-started from the accepted ones,
/// accept iff first iteration or u < min(1, exp(-beta (F - F_M))). Returns
/// the best parameters seen.
inline FitResult fit(const TargetFunction& t, const FitConfig& cfg) {
  cfg.validate();
  const std::int64_t n = grid_size(t.n_q());
  FitRng rng(cfg.seed);

  std::vector<std::int64_t> k_acc = cfg.initial_centers(t.n_q());
  for (auto& k : k_acc) k = mod_floor(k, n);
  std::vector<double> a_acc = cfg.initial_rates();
  double f_acc = -std::numeric_limits<double>::infinity();

  FitResult best;
  best.seed = cfg.seed;
  best.f = -std::numeric_limits<double>::infinity();

  for (std::size_t it = 0; it < cfg.n_m; ++it) {
    const std::size_t l = rng.below(cfg.n_loc);
    const std::int64_t move = static_cast<std::int64_t>(rng.below(3)) - 1;
    std::vector<std::int64_t> k_trial = k_acc;
    k_trial[l] = mod_floor(k_trial[l] + move, n);

    std::optional<RateFit> rf;
    double f_trial = -std::numeric_limits<double>::infinity();
    try {
      rf = optimize_decay_rates(t, k_trial, a_acc, cfg.n_p);
      f_trial = rf->f;
    } catch (const DegenerateBasis&) {
    }

    bool accept = false;
    if (it == 0) {
      accept = rf.has_value();
    } else if (rf) {
      const double u = rng.unit();
      accept = u < std::min(1.0, std::exp(-cfg.beta * (f_acc - f_trial)));
    } else {
      rng.unit();  // keep one acceptance draw per iteration
    }
    if (accept) {
      k_acc = k_trial;
      a_acc = rf->a;
      f_acc = f_trial;
      if (f_trial > best.f) {
        best.f = f_trial;
        best.a = rf->a;
        best.d = rf->d;
        best.k_c = k_trial;
      }
    }
    best.trace.push_back({f_trial, accept, best.f});
  }
  if (best.d.empty()) throw DegenerateBasis("no non-degenerate configuration was reached");
  best.f = std::clamp(best.f, 0.0, 1.0);
  return best;
}

/// Fitted amplitudes sum_l d_l L_{j - k_l}(a_l) on the grid.
inline std::vector<double> fitted_amplitudes(unsigned n_q, const FitResult& r) {
  std::vector<double> out(static_cast<std::size_t>(grid_size(n_q)), 0.0);
  for (std::size_t l = 0; l < r.d.size(); ++l) {
    const auto table = lorentzian_table(n_q, r.a[l], r.k_c[l]);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += r.d[l] * table[j];
  }
  return out;
}

/// The fit as a real LCSpec (coefficients normalized).
inline LCSpec fit_to_lc(unsigned n_q, const FitResult& r) {
  LCSpec lc{n_q, 1, {}};
  for (std::size_t l = 0; l < r.d.size(); ++l) lc.terms.push_back(lf_term(r.a[l], r.k_c[l], r.d[l]));
  return lc;
}

}  // namespace lorentz
