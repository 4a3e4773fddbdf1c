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

// Circuit builders for the Lorentzian encoders: phase shifts, translations,
// Slater/Lorentzian generators, fan-out and MCM1 compilation, ancilla
// preparation, and the probabilistic / reduced / amplified / deterministic
// linear-combination encoders.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lorentz/circuit.hpp"
#include "lorentz/common.hpp"
#include "lorentz/locfuncs.hpp"
#include "lorentz/qara.hpp"
#include "lorentz/statevector.hpp"

namespace lorentz {

/// Copy of `c` widened to `width` wires with every wire moved up by `offset`.
inline Circuit shifted(const Circuit& c, unsigned width, unsigned offset) {
  if (c.n_qubits() + offset > width) throw std::invalid_argument("shifted circuit does not fit");
  Circuit out(width);
  for (Gate g : c.gates()) {
    g.target += offset;
    for (auto& ctl : g.controls) ctl.qubit += offset;
    out.add(std::move(g));
  }
  out.add_global_phase(c.global_phase());
  return out;
}

// ---------------------------------------------------------------------------
// Phase shift and translation.

/// U_shift(k)|j> = exp(-i 2 pi k j / N)|j>, as n_q simultaneous Z(phi_m),
/// phi_m = -2 pi k 2^m / N. All n_q gates are emitted, even for k = 0 mod N.
inline Circuit u_shift(std::int64_t k, unsigned n_q) {
  const std::int64_t n = grid_size(n_q);
  const std::int64_t kt = mod_floor(k, n);
  Circuit c(n_q);
  for (unsigned m = 0; m < n_q; ++m) {
    const std::int64_t turns = mod_floor(kt << m, n);  // exact in integers
    const double phi = -2.0 * kPi * static_cast<double>(turns) / static_cast<double>(n);
    c.add(Gate::unitary("z", m, gates::phase(phi)));
  }
  return c;
}

/// T(k) = F U_shift(k) F^dagger: |j> -> |(j + k) mod N>.
inline Circuit translation(std::int64_t k, unsigned n_q) {
  Circuit c(n_q);
  c.add(Gate::qft(0, n_q, true));
  c.append(u_shift(k, n_q), "u_shift");
  c.add(Gate::qft(0, n_q, false));
  return c;
}

// ---------------------------------------------------------------------------
// Fan-out and MCM1.

/// C^{m_c} X^{(x) m_t} on a `width`-wire circuit: descending CNOT tree
/// S_K..S_1, one multi-controlled X on the first target, ascending S_1..S_K.
/// Depth 2 ceil(log2 m_t) + max(1, m_c). With no controls it is a plain X layer.
inline Circuit fanout_x(unsigned width, const std::vector<Control>& controls,
                        const std::vector<unsigned>& targets) {
  if (targets.empty()) throw std::invalid_argument("fan-out needs at least one target");
  Circuit c(width);
  std::uint64_t seen = 0;
  auto claim = [&](unsigned q) {
    if (q >= width) throw std::out_of_range("fan-out wire outside circuit");
    const std::uint64_t bit = std::uint64_t{1} << q;
    if (seen & bit) throw std::invalid_argument("fan-out control/target sets overlap");
    seen |= bit;
  };
  for (const auto& ctl : controls) claim(ctl.qubit);
  for (unsigned t : targets) claim(t);

  if (controls.empty()) {
    for (unsigned t : targets) c.add(Gate::unitary("x", t, gates::x()));
    return c;
  }
  const std::size_t mt = targets.size();
  const unsigned levels = ceil_log2(mt);
  auto tree_level = [&](unsigned k) {
    const std::size_t stride = std::size_t{1} << (k - 1);
    for (std::size_t i = 0; i < stride && i + stride < mt; ++i)
      c.add(Gate::unitary("cx", targets[i + stride], gates::x(), {{targets[i], true}}));
  };
  for (unsigned k = levels; k >= 1; --k) tree_level(k);
  c.add(Gate::unitary(controls.size() == 1 ? "cx" : "mcx", targets[0], gates::x(), controls));
  for (unsigned k = 1; k <= levels; ++k) tree_level(k);
  return c;
}

/// Spectral form of a single-qubit unitary, U = V D V^dagger with
/// D = e^{i(alpha - theta/2)} Z(theta). `trivial_axis` marks V = I.
struct RotationForm {
  double alpha = 0.0;
  double theta = 0.0;
  Mat2 v = gates::identity();
  bool trivial_axis = true;
  bool degenerate = false;  // theta == 0: a pure phase
};

inline constexpr double kAxisTolerance = 1e-12;

/// Polar/azimuth basis change V for rotation axis (polar, azimuth).
inline Mat2 axis_basis(double polar, double azimuth) {
  const double c = std::cos(polar / 2), s = std::sin(polar / 2);
  const cplx e = std::polar(1.0, azimuth);
  return {cplx{c}, cplx{s}, e * s, -e * c};
}

inline RotationForm rotation_form(const Mat2& u) {
  if (!is_unitary(u)) throw std::invalid_argument("rotation_form: matrix is not unitary");
  RotationForm r;
  if (is_diagonal(u, kAxisTolerance)) {
    // z axis with azimuth pi: V = I.
    const double p0 = std::arg(u[0]);
    r.theta = std::remainder(std::arg(u[3]) - p0, 2.0 * kPi);
    r.alpha = p0 + r.theta / 2;
    r.degenerate = std::abs(r.theta) <= kAxisTolerance;
    if (r.degenerate) r.theta = 0.0;
    return r;
  }
  const cplx det = u[0] * u[3] - u[1] * u[2];
  double alpha = std::arg(det) / 2;
  Mat2 w = scaled(u, std::polar(1.0, -alpha));
  double c = 0.5 * (w[0] + w[3]).real();
  if (c < 0) {
    alpha += kPi;
    w = scaled(w, cplx{-1.0});
    c = -c;
  }
  // w = c I - i s (n . sigma)
  const double snx = -0.5 * (w[1].imag() + w[2].imag());
  const double sny = 0.5 * (w[2].real() - w[1].real());
  const double snz = 0.5 * (w[3].imag() - w[0].imag());
  const double s = std::sqrt(snx * snx + sny * sny + snz * snz);
  r.alpha = alpha;
  r.theta = 2.0 * std::atan2(s, c);
  r.degenerate = s <= kAxisTolerance;
  if (r.degenerate) {
    r.theta = 0.0;
    return r;
  }
  const double polar = std::acos(std::clamp(snz / s, -1.0, 1.0));
  const double azimuth = std::atan2(sny, snx);
  r.v = axis_basis(polar, azimuth);
  r.trivial_axis = false;
  return r;
}

/// Phase e^{i phi} on the branch where every control matches; C^{n-1}Z(phi)
/// on the first control wire.
inline std::optional<Gate> pattern_phase(const std::vector<Control>& controls, double phi) {
  if (controls.empty() || std::abs(std::remainder(phi, 2.0 * kPi)) <= 1e-15) return std::nullopt;
  const Control head = controls.front();
  std::vector<Control> rest(controls.begin() + 1, controls.end());
  const Mat2 m = head.polarity ? gates::phase(phi)
                               : Mat2{std::polar(1.0, phi), cplx{0}, cplx{0}, cplx{1}};
  return Gate::unitary("cphase", head.qubit, m, std::move(rest));
}

/// Simultaneous single-qubit unitaries on distinct targets, all selected by
/// the same control pattern, compiled as
///   C^{n-1}Z(alpha~) ; V^dagger ; fan-out ; Z(theta/2)^dagger ; fan-out ; Z(theta/2) ; V
/// with alpha~ = sum alpha_l + extra_phase. `extra_phase` adds a phase
/// e^{i extra_phase} on the selected branch. Without controls the unitaries
/// are applied directly.
inline Circuit mcm1(unsigned width, const std::vector<Control>& controls,
                    const std::vector<std::pair<unsigned, Mat2>>& targets, double extra_phase = 0.0) {
  Circuit c(width);
  if (controls.empty()) {
    for (const auto& [q, u] : targets) c.add(Gate::unitary("u", q, u));
    c.add_global_phase(extra_phase);
    return c;
  }
  std::vector<RotationForm> forms;
  std::vector<unsigned> active;
  double alpha_sum = extra_phase;
  for (const auto& [q, u] : targets) {
    for (const auto& ctl : controls)
      if (ctl.qubit == q) throw std::invalid_argument("mcm1 target is also a control");
    RotationForm f = rotation_form(u);
    alpha_sum += f.alpha;
    if (!f.degenerate) active.push_back(q);
    forms.push_back(f);
  }
  if (auto g = pattern_phase(controls, alpha_sum)) c.add(std::move(*g));
  if (active.empty()) return c;

  auto each = [&](auto&& emit) {
    for (std::size_t i = 0; i < targets.size(); ++i)
      if (!forms[i].degenerate) emit(targets[i].first, forms[i]);
  };
  each([&](unsigned q, const RotationForm& f) {
    if (!f.trivial_axis) c.add(Gate::unitary("v_dg", q, adjoint(f.v)));
  });
  c.append(fanout_x(width, controls, active));
  each([&](unsigned q, const RotationForm& f) {
    c.add(Gate::unitary("zh_dg", q, adjoint(gates::phase(f.theta / 2))));
  });
  c.append(fanout_x(width, controls, active));
  each([&](unsigned q, const RotationForm& f) { c.add(Gate::unitary("zh", q, gates::phase(f.theta / 2))); });
  each([&](unsigned q, const RotationForm& f) {
    if (!f.trivial_axis) c.add(Gate::unitary("v", q, f.v));
  });
  return c;
}

/// Reference construction for mcm1: one multi-controlled gate per target
/// plus a pattern phase.
inline Circuit mcm1_naive(unsigned width, const std::vector<Control>& controls,
                          const std::vector<std::pair<unsigned, Mat2>>& targets, double extra_phase = 0.0) {
  Circuit c(width);
  for (const auto& [q, u] : targets) c.add(Gate::unitary("cu", q, u, controls));
  if (controls.empty())
    c.add_global_phase(extra_phase);
  else if (auto g = pattern_phase(controls, extra_phase))
    c.add(std::move(*g));
  return c;
}

// ---------------------------------------------------------------------------
// Slater / Lorentzian generators.

/// theta_m = arctan exp(-2^m a) for m < n_q - 1, arctan exp(-a) for the top qubit.
inline std::vector<double> slater_angles(double a, unsigned n_q) {
  detail::require_positive_rate(a);
  std::vector<double> th(n_q);
  for (unsigned m = 0; m + 1 < n_q; ++m) th[m] = std::atan(std::exp(-std::ldexp(a, static_cast<int>(m))));
  th[n_q - 1] = std::atan(std::exp(-a));
  return th;
}

namespace detail {
inline std::vector<unsigned> lower_wires(unsigned first, unsigned n_q) {
  std::vector<unsigned> w;
  for (unsigned m = 0; m + 1 < n_q; ++m) w.push_back(first + m);
  return w;
}
}  // namespace detail

/// U^(S): R_y(2 theta_m) on every qubit, then the top qubit flips all lower
/// qubits through a fan-out. Output |S; a, 0>.
inline Circuit u_slater(double a, unsigned n_q) {
  grid_size(n_q);
  const auto th = slater_angles(a, n_q);
  Circuit c(n_q);
  c.open_block("ry_layer");
  for (unsigned m = 0; m < n_q; ++m) c.add(Gate::unitary("ry", m, gates::ry(2.0 * th[m])));
  c.close_block();
  if (n_q >= 2) c.append(fanout_x(n_q, {{n_q - 1, true}}, detail::lower_wires(0, n_q)), "flip");
  return c;
}

/// U^(L) = F U^(S) (or F^dagger U^(S)). Output |L; a, 0>.
inline Circuit u_lorentzian(double a, unsigned n_q, bool qft_dagger = false) {
  Circuit c(n_q);
  c.append(u_slater(a, n_q), "u_slater");
  c.add(Gate::qft(0, n_q, qft_dagger));
  return c;
}

// ---------------------------------------------------------------------------
// Ancilla preparation.

namespace detail {
inline std::vector<Control> pattern_controls(const std::vector<unsigned>& wires, std::uint64_t value,
                                             unsigned from_bit = 0) {
  std::vector<Control> cs;
  for (unsigned b = from_bit; b < wires.size(); ++b) cs.push_back({wires[b], ((value >> b) & 1u) != 0});
  return cs;
}
}  // namespace detail

/// Maps |0>_{n_A} to sum_l sqrt(w_l / lambda)|l> on `ancillae` (bit b of l
/// on ancillae[b]) with a binary tree of multiplexed R_y rotations, most
/// significant bit first. Zero-angle rotations are omitted.
inline Circuit lcu_prepare_ancillae(unsigned width, const std::vector<unsigned>& ancillae,
                                    const std::vector<double>& weights) {
  const unsigned n_a = static_cast<unsigned>(ancillae.size());
  if (weights.size() > (std::size_t{1} << n_a)) throw std::invalid_argument("more weights than ancilla states");
  double lambda = 0.0;
  for (double x : weights) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("weights must be finite and non-negative");
    lambda += x;
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("all weights are zero");
  Circuit c(width);
  auto weight_at = [&](std::uint64_t l) { return l < weights.size() ? weights[l] : 0.0; };
  for (unsigned depth = 0; depth < n_a; ++depth) {
    const unsigned bit = n_a - 1 - depth;
    for (std::uint64_t prefix = 0; prefix < (std::uint64_t{1} << depth); ++prefix) {
      double w0 = 0.0, w1 = 0.0;
      for (std::uint64_t low = 0; low < (std::uint64_t{1} << bit); ++low) {
        const std::uint64_t base = (prefix << (bit + 1)) | low;
        w0 += weight_at(base);
        w1 += weight_at(base | (std::uint64_t{1} << bit));
      }
      if (w1 == 0.0) continue;
      const double theta = std::atan2(std::sqrt(w1), std::sqrt(w0));
      auto controls = detail::pattern_controls(ancillae, prefix << (bit + 1), bit + 1);
      c.add(Gate::unitary("ry", ancillae[bit], gates::ry(2.0 * theta), std::move(controls)));
    }
  }
  return c;
}

/// Standalone form on max(1, ceil(log2 n_loc)) wires.
inline Circuit lcu_prepare_ancillae(const std::vector<double>& weights) {
  const unsigned n_a = std::max(1u, ceil_log2(weights.size()));
  std::vector<unsigned> wires(n_a);
  for (unsigned i = 0; i < n_a; ++i) wires[i] = i;
  return lcu_prepare_ancillae(n_a, wires, weights);
}

// ---------------------------------------------------------------------------
// Linear-combination encoders.

struct EncodeOptions {
  /// Share one uncontrolled CNOT fan-out per axis across all terms instead
  /// of an ancilla-controlled copy per term.
  bool share_cnot_block = true;
  /// Use F^dagger for the data-register transform (shifts are negated so the
  /// centres stay put).
  bool qft_dagger = false;
  /// Append the data-register transform. Off when the caller measures first.
  bool trailing_qft = true;
  /// Amplification reflects about the initial state with the ancilla-only
  /// zero reflection instead of the full-register one.
  bool ancilla_only_reflection = false;
};

/// Wire assignment: data [0, dim n_q), LCU ancillae next, AR ancilla last.
struct EncoderLayout {
  unsigned n_q = 1;
  unsigned dim = 1;
  unsigned n_a = 0;
  bool with_ar = false;

  unsigned n_data() const { return dim * n_q; }
  unsigned width() const { return n_data() + n_a + (with_ar ? 1u : 0u); }
  std::vector<unsigned> ancillae() const {
    std::vector<unsigned> a(n_a);
    for (unsigned i = 0; i < n_a; ++i) a[i] = n_data() + i;
    return a;
  }
  std::optional<unsigned> ar() const {
    return with_ar ? std::optional<unsigned>(n_data() + n_a) : std::nullopt;
  }
  RegisterLayout registers() const { return {n_data(), dim, ancillae(), ar()}; }
};

inline EncoderLayout encoder_layout(std::size_t n_generators, unsigned n_q, unsigned dim, bool with_ar) {
  EncoderLayout lay{n_q, dim, ceil_log2(n_generators), with_ar};
  if (lay.width() > kMaxQubits) throw std::invalid_argument("encoder exceeds the simulator cap");
  return lay;
}

namespace detail {

inline void check_real_generators(const LCSpec& lc) {
  lc.validate();
  if (lc.has_imag_generators())
    throw std::invalid_argument("imaginary generators need the complex encoder");
}

inline std::vector<double> coeff_weights(const LCSpec& lc) {
  std::vector<double> w;
  for (const auto& t : lc.terms) w.push_back(std::abs(t.coeff));
  return w;
}

inline void add_data_transform(Circuit& c, const EncoderLayout& lay, bool dagger) {
  c.open_block("qft");
  for (unsigned mu = 0; mu < lay.dim; ++mu) c.add(Gate::qft(mu * lay.n_q, lay.n_q, dagger));
  c.close_block();
}

/// Selection block of the Lorentzian encoder: per-term R_y layers (with the
/// coefficient phase folded in), the fan-out block(s), per-term shifts.
inline Circuit lorentzian_select(const LCSpec& lc, const EncoderLayout& lay, const EncodeOptions& opt) {
  const unsigned width = lay.width();
  const auto anc = lay.ancillae();
  Circuit c(width);
  auto flip_axis = [&](unsigned mu, std::vector<Control> controls) {
    if (lay.n_q < 2) return;
    const unsigned first = mu * lay.n_q;
    controls.push_back({first + lay.n_q - 1, true});
    c.append(fanout_x(width, controls, lower_wires(first, lay.n_q)));
  };

  c.open_block("rotations");
  for (std::size_t l = 0; l < lc.n_loc(); ++l) {
    const LCTerm& t = lc.terms[l];
    if (std::abs(t.coeff) == 0.0) continue;
    const auto controls = pattern_controls(anc, l);
    std::vector<std::pair<unsigned, Mat2>> rys;
    for (unsigned mu = 0; mu < lay.dim; ++mu) {
      const auto th = slater_angles(t.axes[mu].a, lay.n_q);
      for (unsigned m = 0; m < lay.n_q; ++m) rys.push_back({mu * lay.n_q + m, gates::ry(2.0 * th[m])});
    }
    c.append(mcm1(width, controls, rys, std::arg(t.coeff)), "select_ry_" + std::to_string(l));
    if (!opt.share_cnot_block) {
      for (unsigned mu = 0; mu < lay.dim; ++mu) flip_axis(mu, controls);
    }
  }
  c.close_block();

  if (opt.share_cnot_block) {
    c.open_block("shared_flip");
    for (unsigned mu = 0; mu < lay.dim; ++mu) flip_axis(mu, {});
    c.close_block();
  }

  c.open_block("shifts");
  const std::int64_t n = grid_size(lay.n_q);
  for (std::size_t l = 0; l < lc.n_loc(); ++l) {
    const LCTerm& t = lc.terms[l];
    if (std::abs(t.coeff) == 0.0) continue;
    std::vector<std::pair<unsigned, Mat2>> zs;
    for (unsigned mu = 0; mu < lay.dim; ++mu) {
      const std::int64_t k = opt.qft_dagger ? -t.axes[mu].k_c : t.axes[mu].k_c;
      const std::int64_t kt = mod_floor(k, n);
      if (kt == 0) continue;
      for (unsigned m = 0; m < lay.n_q; ++m) {
        const std::int64_t turns = mod_floor(kt << m, n);
        if (turns == 0) continue;
        const double phi = -2.0 * kPi * static_cast<double>(turns) / static_cast<double>(n);
        zs.push_back({mu * lay.n_q + m, gates::phase(phi)});
      }
    }
    if (!zs.empty()) c.append(mcm1(width, pattern_controls(anc, l), zs), "select_shift_" + std::to_string(l));
  }
  c.close_block();
  return c;
}

/// prepare ; select ; unprepare  (plus the reduction rotation when the
/// layout has an AR ancilla).
inline Circuit lorentzian_core(const LCSpec& lc, const EncoderLayout& lay, const EncodeOptions& opt,
                               double theta_ar) {
  Circuit c(lay.width(), lay.registers());
  if (lay.with_ar) {
    if (!(theta_ar >= 0.0 && theta_ar < kPi / 2)) throw std::invalid_argument("theta_ar must lie in [0, pi/2)");
    c.open_block("reduce");
    c.add(Gate::unitary("ry_ar", *lay.ar(), gates::ry(2.0 * theta_ar)));
    c.close_block();
  }
  const auto anc = lay.ancillae();
  Circuit prep(lay.width());
  if (lay.n_a > 0) prep = lcu_prepare_ancillae(lay.width(), anc, coeff_weights(lc));
  c.append(prep, "prepare");
  c.append(lorentzian_select(lc, lay, opt), "select");
  c.append(prep.inverse(), "unprepare");
  return c;
}

}  // namespace detail

/// Probabilistic encoder C_lc^(L). Success = every ancilla reads 0; the
/// conditional data state is lc_target_state(lc), with weight 1 / lambda^2.
/// D > 1 gives the product-basis encoder (one register and one transform per
/// axis, shared ancillae).
inline Circuit c_lc_lorentzian(const LCSpec& lc, const EncodeOptions& opt = {}) {
  detail::check_real_generators(lc);
  const auto lay = encoder_layout(lc.n_loc(), lc.n_q, lc.dim, false);
  Circuit c = detail::lorentzian_core(lc, lay, opt, 0.0);
  if (opt.trailing_qft) detail::add_data_transform(c, lay, opt.qft_dagger);
  return c;
}

/// Product-basis encoder for D in {2, 3}.
inline Circuit c_lc_product(const LCSpec& lc, const EncodeOptions& opt = {}) {
  if (lc.dim != 2 && lc.dim != 3) throw std::invalid_argument("product encoder needs dim 2 or 3");
  return c_lc_lorentzian(lc, opt);
}

/// U^(L,AR): the reduced encoder without its trailing transform.
inline Circuit u_lar(const LCSpec& lc, double theta_ar, const EncodeOptions& opt = {}) {
  detail::check_real_generators(lc);
  const auto lay = encoder_layout(lc.n_loc(), lc.n_q, lc.dim, true);
  return detail::lorentzian_core(lc, lay, opt, theta_ar);
}

/// C_lc^(L,AR): success weight w cos^2(theta_ar) on the all-zero pattern of
/// n_A + 1 ancillae.
inline Circuit c_lc_ar(const LCSpec& lc, double theta_ar, const EncodeOptions& opt = {}) {
  Circuit c = u_lar(lc, theta_ar, opt);
  if (opt.trailing_qft)
    detail::add_data_transform(c, encoder_layout(lc.n_loc(), lc.n_q, lc.dim, true), opt.qft_dagger);
  return c;
}

/// Sign flip on the all-zero pattern of the success qubits (S_0 = I_d (x)
/// X^{(x)(n_A+1)} C^{n_A}Z X^{(x)(n_A+1)}). With `include_data` the pattern
/// also covers the data wires, i.e. the reflection about |0...0>.
inline Circuit zero_reflection(const RegisterLayout& lay, unsigned width, bool include_data = false) {
  std::vector<unsigned> wires;
  if (include_data)
    for (unsigned q = 0; q < lay.n_data; ++q) wires.push_back(q);
  for (unsigned q : lay.success_qubits()) wires.push_back(q);
  if (wires.empty()) throw std::invalid_argument("zero reflection needs at least one wire");
  Circuit c(width, lay);
  for (unsigned q : wires) c.add(Gate::unitary("x", q, gates::x()));
  std::vector<Control> controls;
  for (std::size_t i = 0; i + 1 < wires.size(); ++i) controls.push_back({wires[i], true});
  c.add(Gate::unitary(controls.empty() ? "z" : "mcz", wires.back(), gates::z(), std::move(controls)));
  for (unsigned q : wires) c.add(Gate::unitary("x", q, gates::x()));
  return c;
}

/// Q = -U S_0' U^dagger S_0 with U = U^(L,AR). S_0 marks the success branch;
/// S_0' reflects about the initial state and therefore covers the data wires
/// too. `ancilla_only_reflection` uses the ancilla-only S_0 in both places,
/// which amplifies exactly only when the success block is proportional to a
/// unitary.
inline Circuit amplification_q(const LCSpec& lc, double theta_ar, const EncodeOptions& opt = {}) {
  const Circuit u = u_lar(lc, theta_ar, opt);
  const Circuit mark = zero_reflection(u.layout(), u.n_qubits(), false);
  const Circuit about_start = zero_reflection(u.layout(), u.n_qubits(), !opt.ancilla_only_reflection);
  Circuit q(u.n_qubits(), u.layout());
  q.append(mark, "s0");
  q.append(u.inverse(), "u_dg");
  q.append(about_start, "s0_start");
  q.append(u, "u");
  q.add_global_phase(kPi);
  return q;
}

/// C_lc^(L,m): U^(L,AR) followed by m rounds of Q and the single transform.
inline Circuit c_lc_amplified(const LCSpec& lc, double theta_ar, unsigned m, const EncodeOptions& opt = {}) {
  Circuit c = u_lar(lc, theta_ar, opt);
  const Circuit q = amplification_q(lc, theta_ar, opt);
  for (unsigned i = 0; i < m; ++i) c.append(q, "q_" + std::to_string(i));
  if (opt.trailing_qft)
    detail::add_data_transform(c, encoder_layout(lc.n_loc(), lc.n_q, lc.dim, true), opt.qft_dagger);
  return c;
}

inline constexpr double kPlanLambdaTolerance = 1e-9;

/// C_lc^(L,det): the amplified encoder at (theta_ar_opt, m_opt).
inline Circuit c_lc_deterministic(const LCSpec& lc, const QaraPlan& plan, const EncodeOptions& opt = {}) {
  const double lambda = lcu_lambda(lc);
  if (!std::isfinite(plan.lambda) || std::abs(plan.lambda - lambda) > kPlanLambdaTolerance * lambda)
    throw std::invalid_argument("plan was not computed for this LC (lambda mismatch)");
  return c_lc_amplified(lc, plan.theta_ar_opt, plan.m_opt, opt);
}

// ---------------------------------------------------------------------------
// Generic LCU over arbitrary origin generators.

/// One selectable unitary: coefficient weight * e^{i phase} * U_shift(k) F^dagger
/// `generator`, where `generator` prepares the origin-centred function on
/// n_q wires (it may contain QFT gates).
struct SelectTerm {
  Circuit generator;
  double weight = 1.0;
  double phase = 0.0;
  std::int64_t k_c = 0;
};

/// Controlled-generator encoder: prepare; controlled generators;
/// uncontrolled F^dagger; controlled shifts with phases; unprepare; F.
inline Circuit c_lc_generic(unsigned n_q, const std::vector<SelectTerm>& terms, const EncodeOptions& opt = {}) {
  if (terms.empty()) throw std::invalid_argument("generic encoder needs at least one term");
  const auto lay = encoder_layout(terms.size(), n_q, 1, false);
  const unsigned width = lay.width();
  const auto anc = lay.ancillae();
  std::vector<double> weights;
  for (const auto& t : terms) {
    if (t.generator.n_qubits() != n_q) throw std::invalid_argument("generator width differs from n_q");
    weights.push_back(t.weight);
  }
  Circuit c(width, lay.registers());
  Circuit prep(width);
  if (lay.n_a > 0) prep = lcu_prepare_ancillae(width, anc, weights);
  c.append(prep, "prepare");
  c.open_block("select");
  for (std::size_t l = 0; l < terms.size(); ++l) {
    if (terms[l].weight == 0.0) continue;
    c.append(shifted(terms[l].generator, width, 0).controlled_by(detail::pattern_controls(anc, l)),
             "generator_" + std::to_string(l));
  }
  c.add(Gate::qft(0, n_q, !opt.qft_dagger));
  const std::int64_t n = grid_size(n_q);
  for (std::size_t l = 0; l < terms.size(); ++l) {
    if (terms[l].weight == 0.0) continue;
    const std::int64_t k = mod_floor(opt.qft_dagger ? -terms[l].k_c : terms[l].k_c, n);
    std::vector<std::pair<unsigned, Mat2>> zs;
    for (unsigned m = 0; m < n_q; ++m) {
      const std::int64_t turns = mod_floor(k << m, n);
      zs.push_back({m, gates::phase(-2.0 * kPi * static_cast<double>(turns) / static_cast<double>(n))});
    }
    c.append(mcm1_naive(width, detail::pattern_controls(anc, l), zs, terms[l].phase),
             "shift_" + std::to_string(l));
  }
  c.close_block();
  c.append(prep.inverse(), "unprepare");
  if (opt.trailing_qft) detail::add_data_transform(c, lay, opt.qft_dagger);
  return c;
}

/// Complex coefficients and/or complex basis functions. Terms without an
/// imaginary generator only carry the phase of d_l and reuse the Lorentzian
/// encoder. Otherwise each term splits into a real and an imaginary
/// generator (2 n_loc unitaries, one more ancilla):
///   |d| e^{i arg d} U^(L)(a)   and   |d| |s| i sgn(s) e^{i arg d} U^(L)(b).
inline Circuit c_lc_complex(const LCSpec& lc, const EncodeOptions& opt = {}) {
  lc.validate();
  if (!lc.has_imag_generators()) return c_lc_lorentzian(lc, opt);
  if (lc.dim != 1) throw std::invalid_argument("imaginary generators are 1D only");
  std::vector<SelectTerm> terms;
  for (const auto& t : lc.terms) {
    const double mag = std::abs(t.coeff);
    const double ph = std::arg(t.coeff);
    terms.push_back({u_lorentzian(t.axes[0].a, lc.n_q, opt.qft_dagger), mag, ph, t.axes[0].k_c});
    if (t.imag && t.imag->scale != 0.0) {
      const double extra = t.imag->scale > 0 ? kPi / 2 : -kPi / 2;
      terms.push_back({u_lorentzian(t.imag->a, lc.n_q, opt.qft_dagger), mag * std::abs(t.imag->scale), ph + extra,
                       t.axes[0].k_c});
    }
  }
  return c_lc_generic(lc.n_q, terms, opt);
}

// ---------------------------------------------------------------------------
// Running encoders.

struct EncodeResult {
  double success_probability = 0.0;
  QuantumState data_state;  // normalized, on the data wires only
};

namespace detail {
inline EncodeResult finish_encoding(const Circuit& c, QuantumState state, bool transform_after, bool dagger) {
  const auto& lay = c.layout();
  const auto succ = lay.success_qubits();
  double p = 1.0;
  if (!succ.empty()) {
    const std::vector<int> zeros(succ.size(), 0);
    auto outcome = project_ancilla(state, succ, zeros);
    p = outcome.probability;
    state = std::move(outcome.post_state);
  }
  auto data = QuantumState::normalized(state.low_slice(lay.n_data, 0));
  if (transform_after) {
    const unsigned n_q = lay.n_data / lay.dim;
    for (unsigned mu = 0; mu < lay.dim; ++mu) data.apply_qft(mu * n_q, n_q, dagger);
  }
  return {p, std::move(data)};
}
}  // namespace detail

/// Simulates an encoder from |0...0> and post-selects the success branch.
/// With `transform_after`, the data-register transform is applied after the
/// post-selection (for circuits built with trailing_qft = false).
inline EncodeResult run_encoder(const Circuit& c, bool transform_after = false, bool dagger = false) {
  return detail::finish_encoding(c, simulate(c), transform_after, dagger);
}

}  // namespace lorentz
