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

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lorentz/common.hpp"

namespace lorentz {

inline constexpr unsigned kMaxQubits = 24;

/// A control wire. polarity == false selects the |0> branch (anti-control).
struct Control {
  unsigned qubit = 0;
  bool polarity = true;

  friend bool operator==(const Control&, const Control&) = default;
};

/// Thrown when a projection hits a branch of (numerically) zero weight.
class ImpossibleOutcome : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// In-place radix-2 DFT with kernel exp(sign * i 2 pi j k / M), unscaled.
inline void fft_inplace(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * kPi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx w = std::polar(1.0, ang * static_cast<double>(k));
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

struct ControlMask {
  std::uint64_t mask = 0;
  std::uint64_t value = 0;
  bool matches(std::uint64_t index) const { return (index & mask) == value; }
};

inline ControlMask make_mask(std::span<const Control> controls) {
  ControlMask m;
  for (const auto& c : controls) {
    const std::uint64_t bit = std::uint64_t{1} << c.qubit;
    m.mask |= bit;
    if (c.polarity) m.value |= bit;
  }
  return m;
}

}  // namespace detail

/// Dense state vector over n qubits. Qubit 0 is the least-significant bit of
/// the basis index.
class QuantumState {
 public:
  static QuantumState zero(unsigned n_qubits) {
    check_size(n_qubits);
    QuantumState s(n_qubits);
    s.amps_[0] = 1.0;
    return s;
  }

  static QuantumState basis(unsigned n_qubits, std::uint64_t index) {
    check_size(n_qubits);
    QuantumState s(n_qubits);
    if (index >= s.amps_.size()) throw std::out_of_range("basis index out of range");
    s.amps_[index] = 1.0;
    return s;
  }

  /// Takes ownership of an already-normalized amplitude vector.
  static QuantumState from_amplitudes(std::vector<cplx> amps, double tol = 1e-10) {
    QuantumState s = wrap(std::move(amps));
    if (std::abs(s.norm_squared() - 1.0) > tol)
      throw std::invalid_argument("amplitude vector is not normalized");
    return s;
  }

  /// Rescales the amplitudes to unit norm.
  static QuantumState normalized(std::vector<cplx> amps) {
    QuantumState s = wrap(std::move(amps));
    const double n2 = s.norm_squared();
    if (!(n2 > 0.0)) throw std::invalid_argument("zero-norm amplitude vector");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& a : s.amps_) a *= inv;
    return s;
  }

  unsigned n_qubits() const { return n_qubits_; }
  std::size_t size() const { return amps_.size(); }
  std::span<const cplx> amplitudes() const { return amps_; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const {
    double acc = 0.0;
    for (const auto& a : amps_) acc += std::norm(a);
    return acc;
  }

  QuantumState& apply_1q(unsigned target, const Mat2& u) {
    return apply_controlled({}, target, u);
  }

  QuantumState& apply_controlled(std::span<const Control> controls, unsigned target,
                                 const Mat2& u) {
    check_qubit(target);
    if (!is_unitary(u)) throw std::invalid_argument("gate matrix is not unitary");
    std::uint64_t seen = std::uint64_t{1} << target;
    for (const auto& c : controls) {
      check_qubit(c.qubit);
      const std::uint64_t bit = std::uint64_t{1} << c.qubit;
      if (seen & bit) throw std::invalid_argument("control/target qubits overlap");
      seen |= bit;
    }
    const auto mask = detail::make_mask(controls);
    const std::uint64_t tbit = std::uint64_t{1} << target;
    const std::uint64_t low = tbit - 1;
    const std::size_t half = amps_.size() / 2;
    const bool diag = is_diagonal(u);
    parallel_for(half, [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        const std::uint64_t i0 = ((k & ~low) << 1) | (k & low);
        if (!mask.matches(i0)) continue;
        const std::uint64_t i1 = i0 | tbit;
        const cplx a0 = amps_[i0], a1 = amps_[i1];
        if (diag) {
          amps_[i0] = u[0] * a0;
          amps_[i1] = u[3] * a1;
        } else {
          amps_[i0] = u[0] * a0 + u[1] * a1;
          amps_[i1] = u[2] * a0 + u[3] * a1;
        }
      }
    });
    return *this;
  }

  /// QFT on qubits [first, first + count):
  ///   F|j> = N^{-1/2} sum_k exp(+i 2 pi j k / N) |k>,  N = 2^count.
  /// `inverse` applies F^dagger. Controls restrict the action to matching
  /// basis states.
  QuantumState& apply_qft(unsigned first, unsigned count, bool inverse = false,
                          std::span<const Control> controls = {}) {
    if (count == 0 || first + count > n_qubits_)
      throw std::out_of_range("QFT range outside register");
    const std::uint64_t range_mask = ((std::uint64_t{1} << count) - 1) << first;
    for (const auto& c : controls) {
      check_qubit(c.qubit);
      if (range_mask & (std::uint64_t{1} << c.qubit))
        throw std::invalid_argument("QFT control inside transformed range");
    }
    const auto mask = detail::make_mask(controls);
    const std::size_t m = std::size_t{1} << count;
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    const int sign = inverse ? -1 : +1;
    std::vector<cplx> buf(m);
    for (std::uint64_t outer = 0; outer < amps_.size(); ++outer) {
      if (outer & range_mask) continue;
      if (!mask.matches(outer)) continue;
      for (std::size_t j = 0; j < m; ++j) buf[j] = amps_[outer | (std::uint64_t{j} << first)];
      detail::fft_inplace(buf, sign);
      for (std::size_t j = 0; j < m; ++j)
        amps_[outer | (std::uint64_t{j} << first)] = buf[j] * scale;
    }
    return *this;
  }

  QuantumState& apply_global_phase(double phi) {
    if (phi == 0.0) return *this;
    const cplx p = std::polar(1.0, phi);
    for (auto& a : amps_) a *= p;
    return *this;
  }

  /// Total weight of basis states whose `qubits` read `pattern`.
  double probability(std::span<const unsigned> qubits, std::span<const int> pattern) const {
    const auto mask = pattern_mask(qubits, pattern);
    double acc = 0.0;
    for (std::uint64_t i = 0; i < amps_.size(); ++i)
      if (mask.matches(i)) acc += std::norm(amps_[i]);
    return acc;
  }

  /// Tensor product; `low` occupies the least-significant qubits.
  friend QuantumState tensor(const QuantumState& low, const QuantumState& high) {
    check_size(low.n_qubits_ + high.n_qubits_);
    QuantumState s(low.n_qubits_ + high.n_qubits_);
    for (std::size_t h = 0; h < high.size(); ++h)
      for (std::size_t l = 0; l < low.size(); ++l)
        s.amps_[(h << low.n_qubits_) | l] = low.amps_[l] * high.amps_[h];
    return s;
  }

  /// Amplitudes of qubits [0, n_low) with every higher qubit fixed to the
  /// bits of `high`. The result is not renormalized.
  std::vector<cplx> low_slice(unsigned n_low, std::uint64_t high = 0) const {
    if (n_low == 0 || n_low > n_qubits_) throw std::out_of_range("slice width");
    const std::size_t m = std::size_t{1} << n_low;
    const std::uint64_t base = high << n_low;
    if (base >= amps_.size()) throw std::out_of_range("slice selector");
    return {amps_.begin() + static_cast<std::ptrdiff_t>(base),
            amps_.begin() + static_cast<std::ptrdiff_t>(base + m)};
  }

  detail::ControlMask pattern_mask(std::span<const unsigned> qubits,
                                   std::span<const int> pattern) const {
    if (qubits.size() != pattern.size())
      throw std::invalid_argument("pattern length differs from ancilla count");
    detail::ControlMask m;
    for (std::size_t i = 0; i < qubits.size(); ++i) {
      check_qubit(qubits[i]);
      if (pattern[i] != 0 && pattern[i] != 1) throw std::invalid_argument("pattern bit not 0/1");
      const std::uint64_t bit = std::uint64_t{1} << qubits[i];
      if (m.mask & bit) throw std::invalid_argument("repeated ancilla qubit");
      m.mask |= bit;
      if (pattern[i]) m.value |= bit;
    }
    return m;
  }

  std::vector<cplx>& mutable_amplitudes() { return amps_; }

 private:
  explicit QuantumState(unsigned n) : n_qubits_(n), amps_(std::size_t{1} << n) {}

  static QuantumState wrap(std::vector<cplx> amps) {
    const std::size_t len = amps.size();
    if (len < 2 || (len & (len - 1)) != 0)
      throw std::invalid_argument("amplitude count must be a power of two >= 2");
    const unsigned n = ceil_log2(len);
    check_size(n);
    QuantumState s(n);
    s.amps_ = std::move(amps);
    return s;
  }

  static void check_size(unsigned n) {
    if (n < 1 || n > kMaxQubits)
      throw std::invalid_argument("qubit count must lie in [1, " + std::to_string(kMaxQubits) + "]");
  }

  void check_qubit(unsigned q) const {
    if (q >= n_qubits_) throw std::out_of_range("qubit index out of range");
  }

  unsigned n_qubits_ = 0;
  std::vector<cplx> amps_;
};

struct MeasurementOutcome {
  double probability = 0.0;
  QuantumState post_state;
};

inline constexpr double kImpossibleThreshold = 1e-14;

/// Projects `ancillae` onto `pattern` and renormalizes the full register.
inline MeasurementOutcome project_ancilla(const QuantumState& state,
                                          std::span<const unsigned> ancillae,
                                          std::span<const int> pattern) {
  const auto mask = state.pattern_mask(ancillae, pattern);
  std::vector<cplx> amps(state.size());
  double p = 0.0;
  for (std::uint64_t i = 0; i < state.size(); ++i) {
    if (!mask.matches(i)) continue;
    amps[i] = state[i];
    p += std::norm(state[i]);
  }
  if (p < kImpossibleThreshold) throw ImpossibleOutcome("projection onto impossible outcome");
  return {p, QuantumState::normalized(std::move(amps))};
}

inline cplx inner_product(const QuantumState& a, const QuantumState& b) {
  if (a.size() != b.size()) throw std::invalid_argument("state size mismatch");
  cplx acc{0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

/// |<a|b>|^2.
inline double fidelity(const QuantumState& a, const QuantumState& b) {
  return std::min(1.0, std::norm(inner_product(a, b)));
}

/// max_i |a_i - b_i|.
inline double max_deviation(const QuantumState& a, const QuantumState& b) {
  if (a.size() != b.size()) throw std::invalid_argument("state size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// Value-returning forms. Each takes its input by value and hands back the
// transformed copy.

inline QuantumState zero_state(unsigned n_qubits) { return QuantumState::zero(n_qubits); }

inline QuantumState apply_1q(QuantumState s, unsigned target, const Mat2& u) {
  s.apply_1q(target, u);
  return s;
}

inline QuantumState apply_controlled(QuantumState s, std::span<const Control> controls,
                                     unsigned target, const Mat2& u) {
  s.apply_controlled(controls, target, u);
  return s;
}

inline QuantumState apply_qft(QuantumState s, unsigned first, unsigned count,
                              bool inverse = false) {
  s.apply_qft(first, count, inverse);
  return s;
}

}  // namespace lorentz
