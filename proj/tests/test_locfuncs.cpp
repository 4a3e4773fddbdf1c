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

#include <cmath>
#include <random>
#include <vector>

#include "lorentz/locfuncs.hpp"

namespace lorentz {
namespace {

// Slater vector straight from its definition, normalized by brute force.
std::vector<double> slater_oracle(unsigned n_q, double a) {
  const int n = 1 << n_q;
  std::vector<double> v(n);
  double s = 0;
  for (int j = 0; j < n; ++j) {
    v[j] = j < n / 2 ? std::exp(-a * j) : std::exp(-a * (n - j));
    s += v[j] * v[j];
  }
  for (auto& x : v) x /= std::sqrt(s);
  return v;
}

std::vector<cplx> dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<cplx> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) y[k] += x[j] * std::polar(1.0, 2 * kPi * double(j * k % n) / double(n));
    y[k] /= std::sqrt(double(n));
  }
  return y;
}

TEST(SlaterNorm, HandValue) { EXPECT_NEAR(slater_norm_const(2, std::log(2.0)), 0.8, 1e-15); }

TEST(SlaterNorm, LargeRateLimit) { EXPECT_NEAR(slater_norm_const(4, 40.0), 1.0, 1e-15); }

TEST(SlaterNorm, NormalizesBruteForce) {
  double s = 0;
  for (int j = 0; j < 32; ++j) s += std::pow(slater_value(5, 0.7, j), 2);
  EXPECT_NEAR(s, 1.0, 1e-14);
}

TEST(SlaterNorm, RejectsNonPositiveRate) {
  EXPECT_THROW(slater_norm_const(3, 0.0), std::invalid_argument);
  EXPECT_THROW(slater_norm_const(3, -1.0), std::invalid_argument);
}

TEST(SlaterValue, TableAndSymmetries) {
  const double expect[] = {0.8, 0.4, 0.2, 0.4};
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(slater_value(2, std::log(2.0), j), expect[j], 1e-15);
  for (int j = -9; j < 20; ++j) EXPECT_DOUBLE_EQ(slater_value(4, 0.3, j), slater_value(4, 0.3, j + 16));
  for (int j = 1; j < 16; ++j) EXPECT_NEAR(slater_value(4, 0.3, j), slater_value(4, 0.3, 16 - j), 1e-15);
  const auto ref = slater_oracle(5, 0.45);
  for (int j = 0; j < 32; ++j) EXPECT_NEAR(slater_value(5, 0.45, j), ref[j], 1e-14);
}

TEST(LorentzianValue, IsDftOfSlater) {
  for (unsigned nq : {3u, 4u, 5u})
    for (double a : {0.1, 0.5, 1.0, 2.0, 4.0}) {
      const auto y = dft(slater_oracle(nq, a));
      for (std::size_t k = 0; k < y.size(); ++k) {
        EXPECT_NEAR(y[k].real(), lorentzian_value(nq, a, static_cast<std::int64_t>(k)), 1e-12);
        EXPECT_NEAR(y[k].imag(), 0.0, 1e-12);
      }
    }
}

TEST(LorentzianValue, SymmetricAndNormalized) {
  for (int j = 1; j < 16; ++j) EXPECT_NEAR(lorentzian_value(4, 0.5, j), lorentzian_value(4, 0.5, 16 - j), 1e-15);
  double s = 0;
  for (int j = 0; j < 32; ++j) s += std::pow(lorentzian_value(5, 1.0, j), 2);
  EXPECT_NEAR(s, 1.0, 1e-13);
}

TEST(LorentzianValue, LargerRateWiderPeak) {
  double prev = 0;
  for (double a : {0.1, 0.3, 0.7, 1.5, 3.0}) {
    const double r = lorentzian_value(5, a, 1) / lorentzian_value(5, a, 0);
    EXPECT_GT(r, prev);
    prev = r;
  }
}

TEST(LorentzWidth, Values) {
  EXPECT_NEAR(lorentz_width(5, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(lorentz_width(5, 2 * std::asinh(kPi / 32)), 1.0, 1e-14);
  EXPECT_LT(lorentz_width(5, 0.3), lorentz_width(5, 0.31));
}

TEST(States, CentredAndShifted) {
  auto base = lf_state({0.6, 0, 4});
  auto moved = lf_state({0.6, 5, 4});
  for (int j = 0; j < 16; ++j) {
    EXPECT_NEAR(base[j].real(), lorentzian_value(4, 0.6, j), 1e-15);
    EXPECT_NEAR(std::abs(moved[(j + 5) % 16] - base[j]), 0, 1e-15);
  }
  EXPECT_NEAR(base.norm_squared(), 1.0, 1e-13);
  auto sf = sf_state({0.6, 3, 4});
  for (int j = 0; j < 16; ++j) EXPECT_NEAR(sf[j].real(), slater_value(4, 0.6, j - 3), 1e-15);
}

TEST(States, SpecValidation) {
  EXPECT_THROW(lf_state({-0.1, 0, 3}), std::invalid_argument);
  EXPECT_THROW(lf_state({0.5, 8, 3}), std::invalid_argument);
  EXPECT_THROW(lf_state({0.5, -1, 3}), std::invalid_argument);
}

TEST(Overlap, ClosedFormMatchesBruteForce) {
  const unsigned nq = 4;
  for (double a : {0.3, 0.7, 1.2})
    for (double b : {0.3, 0.7, 1.2})
      for (int k = 0; k < 16; ++k) {
        double s = 0;
        for (int j = 0; j < 16; ++j) s += lorentzian_value(nq, a, j - k) * lorentzian_value(nq, b, j);
        EXPECT_NEAR(lf_overlap(a, b, k, nq), s, 1e-12);
        EXPECT_NEAR(lf_overlap(a, b, k, nq), lf_overlap(b, a, k, nq), 1e-15);
        EXPECT_NEAR(lf_overlap(a, b, k, nq), lf_overlap(a, b, (16 - k) % 16, nq), 1e-14);
      }
  EXPECT_NEAR(lf_overlap(0.9, 0.9, 0, 5), 1.0, 1e-14);
}

LCSpec random_lc(std::mt19937_64& rng, unsigned nq, int terms) {
  std::uniform_real_distribution<double> a(0.2, 2.0), d(-1, 1);
  LCSpec lc{nq, 1, {}};
  for (int l = 0; l < terms; ++l)
    lc.terms.push_back(lf_term(a(rng), static_cast<std::int64_t>(rng() % (1u << nq)), d(rng)));
  return lc;
}

TEST(NormalizeLc, Examples) {
  auto one = normalize_lc(LCSpec{4, 1, {lf_term(0.5, 3, 2.0)}});
  EXPECT_NEAR(one.terms[0].coeff.real(), 1.0, 1e-14);

  auto pair = normalize_lc(LCSpec{8, 1, {lf_term(0.3, 0, 1.0), lf_term(0.3, 128, 1.0)}});
  double v = 0;
  for (int x = 0; x < 256; ++x) v += lorentzian_value(8, 0.3, x) * lorentzian_value(8, 0.3, x - 128);
  EXPECT_NEAR(pair.terms[0].coeff.real(), 1 / std::sqrt(2 + 2 * v), 1e-12);
  EXPECT_NEAR(pair.terms[1].coeff.real(), 1 / std::sqrt(2 + 2 * v), 1e-12);

  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    auto lc = normalize_lc(random_lc(rng, 5, 3));
    const auto amps = lc_amplitudes(lc);
    double s = 0;
    for (auto x : amps) s += std::norm(x);
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_NEAR(lc_norm_squared(lc), 1.0, 1e-12);
  }
}

TEST(NormalizeLc, DegenerateRejected) {
  LCSpec lc{4, 1, {lf_term(0.5, 3, 1.0), lf_term(0.5, 3, -1.0)}};
  EXPECT_THROW(normalize_lc(lc), std::domain_error);
  EXPECT_THROW(lc_target_state(lc), std::domain_error);
}

TEST(TargetState, SingleTermIsLfState) {
  auto s = lc_target_state(LCSpec{4, 1, {lf_term(0.8, 6, 1.0)}});
  EXPECT_LE(max_deviation(s, lf_state({0.8, 6, 4})), 1e-14);
}

TEST(TargetState, MirrorSymmetricPair) {
  auto s = lc_target_state(LCSpec{4, 1, {lf_term(0.5, 0, 1.0), lf_term(0.5, 8, 1.0)}});
  for (int j = 0; j < 16; ++j) EXPECT_NEAR(s[j].real(), s[(16 - j) % 16].real(), 1e-14);
  for (int j = 0; j < 16; ++j) EXPECT_NEAR(s[j].real(), s[(j + 8) % 16].real(), 1e-14);
}

TEST(TargetState, FittedTwoGaussianOverlap) {
  LCSpec lc{5, 1, {lf_term(0.360, 8, 0.417), lf_term(0.490, 16, 1.23), lf_term(1.672, 12, -0.507)}};
  auto s = lc_target_state(lc);
  std::vector<double> t(32);
  double n = 0;
  for (int j = 0; j < 32; ++j) {
    t[j] = std::exp(-(j - 16.0) * (j - 16.0) / 9) + 0.4 * std::exp(-(j - 8.0) * (j - 8.0) / 4);
    n += t[j] * t[j];
  }
  double ov = 0;
  for (int j = 0; j < 32; ++j) ov += t[j] / std::sqrt(n) * s[j].real();
  EXPECT_NEAR(ov * ov, 0.992, 1e-3);
}

TEST(TargetState, ProductAmplitudes) {
  LCSpec lc{3, 2, {}};
  lc.terms.push_back({{{0.5, 1}, {0.9, 6}}, cplx{1.0}, {}});
  auto s = lc_target_state(lc);
  for (int j0 = 0; j0 < 8; ++j0)
    for (int j1 = 0; j1 < 8; ++j1)
      EXPECT_NEAR(s[j0 + 8 * j1].real(), lorentzian_value(3, 0.5, j0 - 1) * lorentzian_value(3, 0.9, j1 - 6), 1e-14);
}

TEST(TargetState, ComplexCoefficientsAndImagParts) {
  LCSpec lc{4, 1, {lf_term(0.5, 2, cplx(1, 0)), lf_term(0.7, 9, cplx(0, 1))}};
  lc.terms[0].imag = ImagComponent{1.3, 0.5};
  lc = normalize_lc(lc);
  const auto amps = lc_amplitudes(lc);
  const cplx d0 = lc.terms[0].coeff, d1 = lc.terms[1].coeff;
  double n = 0;
  for (int j = 0; j < 16; ++j) {
    const cplx f0 = lorentzian_value(4, 0.5, j - 2) + cplx(0, 0.5) * lorentzian_value(4, 1.3, j - 2);
    const cplx ref = d0 * f0 + d1 * lorentzian_value(4, 0.7, j - 9);
    EXPECT_NEAR(std::abs(amps[j] - ref), 0, 1e-14);
    n += std::norm(ref);
  }
  EXPECT_NEAR(n, 1.0, 1e-12);
}

}  // namespace
}  // namespace lorentz
