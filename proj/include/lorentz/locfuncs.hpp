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

// Discrete Slater (SF) and Lorentzian (LF) functions on a period-N grid,
// N = 2^n_q, together with their states, closed-form overlaps and the
// normalization of linear combinations of LFs.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lorentz/common.hpp"
#include "lorentz/statevector.hpp"

namespace lorentz {

inline std::int64_t grid_size(unsigned n_q) {
  if (n_q < 1 || n_q > kMaxQubits) throw std::invalid_argument("n_q must lie in [1, 24]");
  return std::int64_t{1} << n_q;
}

namespace detail {
inline void require_positive_rate(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("decay rate must be positive");
}
}  // namespace detail

/// C_S(n_q, a) = sqrt((1 - e^{-2a}) / ((1 + e^{-2a})(1 - e^{-N a}))).
inline double slater_norm_const(unsigned n_q, double a) {
  detail::require_positive_rate(a);
  const double n = static_cast<double>(grid_size(n_q));
  const double num = -std::expm1(-2.0 * a);
  const double den = (1.0 + std::exp(-2.0 * a)) * -std::expm1(-n * a);
  return std::sqrt(num / den);
}

/// S_j(n_q, a); j is reduced mod N.
inline double slater_value(unsigned n_q, double a, std::int64_t j) {
  const std::int64_t n = grid_size(n_q);
  const std::int64_t jt = mod_floor(j, n);
  const double dist = static_cast<double>(jt < n / 2 ? jt : n - jt);
  return slater_norm_const(n_q, a) * std::exp(-a * dist);
}

/// L_j(n_q, a), the discrete Fourier partner of S_j(n_q, a).
inline double lorentzian_value(unsigned n_q, double a, std::int64_t j) {
  detail::require_positive_rate(a);
  const std::int64_t n = grid_size(n_q);
  const std::int64_t jt = mod_floor(j, n);
  const double nd = static_cast<double>(n);
  const double sign = (jt % 2 == 0) ? 1.0 : -1.0;
  const double ea = std::exp(-a);
  const double num = -std::expm1(-2.0 * a) * (1.0 - sign * std::exp(-a * nd / 2.0));
  const double den = 1.0 - 2.0 * ea * std::cos(2.0 * kPi * static_cast<double>(jt) / nd) + ea * ea;
  return slater_norm_const(n_q, a) / std::sqrt(nd) * num / den;
}

/// gamma_L(a) = (N / pi) sinh(a / 2); the near-origin half width of L(n_q, a).
inline double lorentz_width(unsigned n_q, double a) {
  if (a < 0.0) throw std::invalid_argument("decay rate must be non-negative");
  return static_cast<double>(grid_size(n_q)) / kPi * std::sinh(a / 2.0);
}

inline std::vector<double> slater_table(unsigned n_q, double a, std::int64_t k_c = 0) {
  const std::int64_t n = grid_size(n_q);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (std::int64_t j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = slater_value(n_q, a, j - k_c);
  return out;
}

inline std::vector<double> lorentzian_table(unsigned n_q, double a, std::int64_t k_c = 0) {
  const std::int64_t n = grid_size(n_q);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (std::int64_t j = 0; j < n; ++j)
    out[static_cast<std::size_t>(j)] = lorentzian_value(n_q, a, j - k_c);
  return out;
}

struct LorentzianSpec {
  double a = 1.0;
  std::int64_t k_c = 0;
  unsigned n_q = 1;

  void validate() const {
    detail::require_positive_rate(a);
    if (k_c < 0 || k_c >= grid_size(n_q)) throw std::invalid_argument("center outside [0, N-1]");
  }
};

namespace detail {
inline QuantumState real_table_state(const std::vector<double>& values) {
  std::vector<cplx> amps(values.begin(), values.end());
  return QuantumState::from_amplitudes(std::move(amps), 1e-9);
}
}  // namespace detail

/// |L; a, k_c>.
inline QuantumState lf_state(const LorentzianSpec& spec) {
  spec.validate();
  return detail::real_table_state(lorentzian_table(spec.n_q, spec.a, spec.k_c));
}

/// |S; a, k_c>.
inline QuantumState sf_state(const LorentzianSpec& spec) {
  spec.validate();
  return detail::real_table_state(slater_table(spec.n_q, spec.a, spec.k_c));
}

/// V(a, a', k_c) = <L; a, k_c | L; a', 0>.
inline double lf_overlap(double a, double a_prime, std::int64_t k_c, unsigned n_q) {
  detail::require_positive_rate(a);
  detail::require_positive_rate(a_prime);
  const std::int64_t n = grid_size(n_q);
  const std::int64_t k = mod_floor(k_c, n);
  const double s = a + a_prime;
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  const double num = (1.0 - sign * std::exp(-s * static_cast<double>(n) / 2.0)) * std::sinh(s);
  const double den = std::cosh(s) - std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
  return slater_norm_const(n_q, a) * slater_norm_const(n_q, a_prime) * num / den;
}

/// One axis of a (product) Lorentzian basis function.
struct AxisParams {
  double a = 1.0;
  std::int64_t k_c = 0;
};

/// Optional imaginary part of a complex basis function:
///   f = L(a_axis0) + i * scale * L(a), sharing the term's center.
/// One-dimensional terms only.
struct ImagComponent {
  double a = 1.0;
  double scale = 0.0;
};

struct LCTerm {
  std::vector<AxisParams> axes;  // one entry per dimension
  cplx coeff{1.0};
  std::optional<ImagComponent> imag;
};

/// A linear combination of displaced (product) Lorentzians on D registers of
/// n_q qubits each. Axis mu occupies qubits [mu n_q, (mu + 1) n_q).
struct LCSpec {
  unsigned n_q = 1;
  unsigned dim = 1;
  std::vector<LCTerm> terms;

  std::size_t n_loc() const { return terms.size(); }

  bool has_complex_part() const {
    for (const auto& t : terms)
      if (t.coeff.imag() != 0.0 || t.imag) return true;
    return false;
  }

  bool has_imag_generators() const {
    for (const auto& t : terms)
      if (t.imag && t.imag->scale != 0.0) return true;
    return false;
  }

  void validate() const {
    if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
    const std::int64_t n = grid_size(n_q);
    if (static_cast<unsigned long>(dim) * n_q > kMaxQubits)
      throw std::invalid_argument("dim * n_q exceeds the simulator cap");
    if (terms.empty()) throw std::invalid_argument("an LC needs at least one term");
    for (const auto& t : terms) {
      if (t.axes.size() != dim) throw std::invalid_argument("term axis count differs from dim");
      for (const auto& ax : t.axes) {
        detail::require_positive_rate(ax.a);
        if (ax.k_c < 0 || ax.k_c >= n) throw std::invalid_argument("center outside [0, N-1]");
      }
      if (!std::isfinite(t.coeff.real()) || !std::isfinite(t.coeff.imag()))
        throw std::invalid_argument("non-finite coefficient");
      if (t.imag) {
        if (dim != 1) throw std::invalid_argument("imaginary generators are 1D only");
        detail::require_positive_rate(t.imag->a);
      }
    }
  }
};

inline LCTerm lf_term(double a, std::int64_t k_c, cplx coeff = 1.0) {
  return LCTerm{{AxisParams{a, k_c}}, coeff, std::nullopt};
}

/// <f_l | f_m> for the (unit-coefficient) basis functions of terms l and m.
inline cplx basis_overlap(const LCSpec& lc, std::size_t l, std::size_t m) {
  const LCTerm& tl = lc.terms[l];
  const LCTerm& tm = lc.terms[m];
  double real_part = 1.0;
  for (unsigned mu = 0; mu < lc.dim; ++mu)
    real_part *= lf_overlap(tl.axes[mu].a, tm.axes[mu].a, tl.axes[mu].k_c - tm.axes[mu].k_c, lc.n_q);
  cplx acc{real_part};
  const std::int64_t dk = lc.dim == 1 ? tl.axes[0].k_c - tm.axes[0].k_c : 0;
  if (tm.imag)
    acc += cplx{0, tm.imag->scale} * lf_overlap(tl.axes[0].a, tm.imag->a, dk, lc.n_q);
  if (tl.imag)
    acc -= cplx{0, tl.imag->scale} * lf_overlap(tl.imag->a, tm.axes[0].a, dk, lc.n_q);
  if (tl.imag && tm.imag)
    acc += tl.imag->scale * tm.imag->scale * lf_overlap(tl.imag->a, tm.imag->a, dk, lc.n_q);
  return acc;
}

/// <psi_lc | psi_lc> = sum_{l,m} conj(d_l) d_m <f_l|f_m>; O(n_loc^2), no
/// dependence on the register size.
inline double lc_norm_squared(const LCSpec& lc) {
  cplx acc{0.0};
  for (std::size_t l = 0; l < lc.n_loc(); ++l)
    for (std::size_t m = 0; m < lc.n_loc(); ++m)
      acc += std::conj(lc.terms[l].coeff) * lc.terms[m].coeff * basis_overlap(lc, l, m);
  return acc.real();
}

inline constexpr double kDegenerateNorm = 1e-14;

/// Rescales the coefficients so that <psi_lc|psi_lc> = 1.
inline LCSpec normalize_lc(LCSpec lc) {
  lc.validate();
  const double n2 = lc_norm_squared(lc);
  if (!(n2 > kDegenerateNorm)) throw std::domain_error("LC has non-positive norm");
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& t : lc.terms) t.coeff *= inv;
  return lc;
}

/// Raw amplitudes sum_l d_l f_l(j - k_cl), unnormalized. Flat index
/// j_0 + N j_1 + N^2 j_2.
inline std::vector<cplx> lc_amplitudes(const LCSpec& lc) {
  lc.validate();
  const std::size_t n = static_cast<std::size_t>(grid_size(lc.n_q));
  std::size_t total = 1;
  for (unsigned mu = 0; mu < lc.dim; ++mu) total *= n;
  std::vector<cplx> amps(total, cplx{0.0});
  for (const auto& t : lc.terms) {
    std::vector<std::vector<double>> tables;
    for (const auto& ax : t.axes) tables.push_back(lorentzian_table(lc.n_q, ax.a, ax.k_c));
    std::vector<double> imag_table;
    if (t.imag) imag_table = lorentzian_table(lc.n_q, t.imag->a, t.axes[0].k_c);
    for (std::size_t idx = 0; idx < total; ++idx) {
      double v = 1.0;
      std::size_t rest = idx;
      for (unsigned mu = 0; mu < lc.dim; ++mu) {
        v *= tables[mu][rest % n];
        rest /= n;
      }
      cplx f{v};
      if (t.imag) f += cplx{0, t.imag->scale * imag_table[idx]};
      amps[idx] += t.coeff * f;
    }
  }
  return amps;
}

/// The state the encoders aim for, normalized.
inline QuantumState lc_target_state(const LCSpec& lc) {
  auto amps = lc_amplitudes(lc);
  double n2 = 0.0;
  for (const auto& a : amps) n2 += std::norm(a);
  if (!(n2 > kDegenerateNorm)) throw std::domain_error("LC has zero norm");
  return QuantumState::normalized(std::move(amps));
}

}  // namespace lorentz
