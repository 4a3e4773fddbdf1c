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

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lorentz {

using cplx = std::complex<double>;

/// Row-major 2x2 complex matrix: {m00, m01, m10, m11}.
using Mat2 = std::array<cplx, 4>;

inline constexpr double kPi = std::numbers::pi;

namespace gates {

inline Mat2 identity() { return {cplx{1}, cplx{0}, cplx{0}, cplx{1}}; }
inline Mat2 x() { return {cplx{0}, cplx{1}, cplx{1}, cplx{0}}; }
inline Mat2 z() { return {cplx{1}, cplx{0}, cplx{0}, cplx{-1}}; }
inline Mat2 h() {
  const double s = 1.0 / std::numbers::sqrt2;
  return {cplx{s}, cplx{s}, cplx{s}, cplx{-s}};
}

/// R_y(angle) = exp(-i angle Y / 2). R_y(2t)|0> = cos t|0> + sin t|1>.
inline Mat2 ry(double angle) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  return {cplx{c}, cplx{-s}, cplx{s}, cplx{c}};
}

/// Phase shift Z(phi) = diag(1, e^{i phi}).
inline Mat2 phase(double phi) {
  return {cplx{1}, cplx{0}, cplx{0}, std::polar(1.0, phi)};
}

}  // namespace gates

inline Mat2 matmul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

inline Mat2 adjoint(const Mat2& m) {
  return {std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])};
}

inline Mat2 scaled(const Mat2& m, cplx s) {
  return {m[0] * s, m[1] * s, m[2] * s, m[3] * s};
}

/// max-norm of (u^dagger u - I).
inline double unitarity_defect(const Mat2& u) {
  const Mat2 p = matmul(adjoint(u), u);
  const Mat2 id = gates::identity();
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(p[i] - id[i]));
  return worst;
}

inline bool is_unitary(const Mat2& u, double tol = 1e-10) {
  return unitarity_defect(u) <= tol;
}

inline bool is_diagonal(const Mat2& u, double tol = 1e-14) {
  return std::abs(u[1]) <= tol && std::abs(u[2]) <= tol;
}

/// Mathematical modulus, result in [0, n).
inline std::int64_t mod_floor(std::int64_t value, std::int64_t n) {
  const std::int64_t r = value % n;
  return r < 0 ? r + n : r;
}

inline unsigned ceil_log2(std::uint64_t n) {
  unsigned bits = 0;
  while ((std::uint64_t{1} << bits) < n) ++bits;
  return bits;
}

// Internal parallelism cap. 0 means "not configured": one thread.
inline std::atomic<unsigned>& thread_cap() {
  static std::atomic<unsigned> cap{0};
  return cap;
}

inline void set_max_threads(unsigned n) { thread_cap().store(n); }

/// Reads LORENTZ_ENCODE_THREADS; returns the cap that was applied.
inline unsigned configure_threads_from_env() {
  unsigned n = 1;
  if (const char* env = std::getenv("LORENTZ_ENCODE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) n = static_cast<unsigned>(v);
  }
  set_max_threads(n);
  return n;
}

/// Runs fn(begin, end) over [0, count) split into contiguous chunks.
/// Small ranges always run inline.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  constexpr std::size_t kMinChunk = std::size_t{1} << 14;
  unsigned threads = std::max(1u, thread_cap().load());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(1, count / kMinChunk)));
  if (threads <= 1) {
    fn(std::size_t{0}, count);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
}

}  // namespace lorentz
