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

// Quantum amplitude reduction + amplification (QARA): planning of the
// reduction angle and amplification count that make a probabilistic
// preparation deterministic, and the error model for a mis-estimated
// success weight.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lorentz/common.hpp"
#include "lorentz/locfuncs.hpp"

namespace lorentz {

struct QaraPlan {
  double w = 1.0;            // weight the plan was computed from
  double theta_w = kPi / 2;  // arcsin(sqrt(w))
  unsigned m_opt = 0;        // number of amplification rounds
  double theta_ar_opt = 0.0; // reduction angle, in [0, pi/2)
  double lambda = std::numeric_limits<double>::quiet_NaN();  // sum |d_l| when planned from an LC
};

/// Mis-estimated success weight: w_est = w_true + delta_w.
struct ErroneousEstimate {
  double w_true = 0.0;
  double delta_w = 0.0;

  double w_est() const { return w_true + delta_w; }

  void validate() const {
    if (!(w_true > 0.0 && w_true <= 1.0)) throw std::invalid_argument("true weight outside (0, 1]");
    if (!(std::abs(delta_w) < w_true)) throw std::invalid_argument("|delta_w| must be below w");
    if (w_est() > 1.0) throw std::invalid_argument("estimated weight exceeds 1");
  }
};

namespace detail {
inline void require_weight(double w) {
  if (!(w > 0.0 && w <= 1.0)) throw std::invalid_argument("success weight outside (0, 1]");
}
}  // namespace detail

/// w_m = sin^2((2m + 1) arcsin sqrt(w)).
inline double amplified_weight(double w, unsigned m) {
  detail::require_weight(w);
  const double s = std::sin((2.0 * m + 1.0) * std::asin(std::sqrt(w)));
  return s * s;
}

/// Smallest-m exact determinization for a known weight.
inline QaraPlan plan_exact(double w) {
  detail::require_weight(w);
  QaraPlan plan;
  plan.w = w;
  plan.theta_w = std::asin(std::sqrt(w));
  if (w == 1.0) return plan;  // already deterministic: m = 0, no reduction
  plan.m_opt = static_cast<unsigned>(std::ceil(kPi / (4.0 * plan.theta_w) - 0.5));
  const double target = std::sin(kPi / (4.0 * plan.m_opt + 2.0));
  plan.theta_ar_opt = std::acos(std::clamp(target / std::sqrt(w), -1.0, 1.0));
  return plan;
}

/// Plan an observer builds from a wrong weight; both m and the angle use w_est.
inline QaraPlan plan_erroneous(const ErroneousEstimate& est) {
  est.validate();
  return plan_exact(est.w_est());
}

/// 1 - W_ARA: weight left outside the success branch after QARA planned
/// from w_est but run on w_true. Exact trigonometry, no series.
inline double failure_weight_after_qara(const ErroneousEstimate& est) {
  const QaraPlan plan = plan_erroneous(est);
  const double c = std::cos(plan.theta_ar_opt);
  const double w_ar = est.w_true * c * c;
  return 1.0 - amplified_weight(w_ar, plan.m_opt);
}

/// Failure weight when the m from w_est is applied with no reduction.
inline double qaa_only_failure(const ErroneousEstimate& est) {
  const QaraPlan plan = plan_erroneous(est);
  return 1.0 - amplified_weight(est.w_true, plan.m_opt);
}

/// eps_QARA = sin^2(pi * ratio / 4), ratio = delta_w / w.
inline double epsilon_qara(double delta_ratio) {
  if (!(std::abs(delta_ratio) < 1.0)) throw std::invalid_argument("|delta_w / w| must be below 1");
  const double s = std::sin(kPi * delta_ratio / 4.0);
  return s * s;
}

struct SweepRow {
  double w = 0.0;
  double delta_ratio = 0.0;
  double wf_qara = 0.0;
  double wf_qaa = 0.0;
  double eps_qara = 0.0;
};

/// Failure-weight table over (w, delta_w / w), rows ordered ratio-major.
inline std::vector<SweepRow> sweep_fig1c(const std::vector<double>& delta_ratios,
                                         const std::vector<double>& w_grid) {
  if (delta_ratios.empty() || w_grid.empty()) throw std::invalid_argument("sweep grids must be non-empty");
  std::vector<SweepRow> rows;
  rows.reserve(delta_ratios.size() * w_grid.size());
  for (double r : delta_ratios) {
    for (double w : w_grid) {
      const ErroneousEstimate est{w, r * w};
      rows.push_back({w, r, failure_weight_after_qara(est), qaa_only_failure(est), epsilon_qara(r)});
    }
  }
  return rows;
}

inline std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi >= lo) || count == 0) throw std::invalid_argument("bad log-spaced grid");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double l0 = std::log(lo), l1 = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

/// lambda = sum over generator terms of |coefficient|. A term with an
/// imaginary part contributes two generators.
inline double lcu_lambda(const LCSpec& lc) {
  double lambda = 0.0;
  for (const auto& t : lc.terms) {
    lambda += std::abs(t.coeff);
    if (t.imag) lambda += std::abs(t.coeff) * std::abs(t.imag->scale);
  }
  return lambda;
}

/// Success weight of the probabilistic encoder for a normalized LC: 1 / lambda^2.
inline double analytic_success_weight(const LCSpec& lc) {
  const double lambda = lcu_lambda(lc);
  if (!(lambda > 0.0)) throw std::invalid_argument("LC has no non-zero coefficient");
  return 1.0 / (lambda * lambda);
}

/// Exact plan for an LC; records lambda for consistency checks.
inline QaraPlan plan_for_lc(const LCSpec& lc) {
  const double w = std::min(1.0, analytic_success_weight(lc));
  QaraPlan plan = plan_exact(w);
  plan.lambda = lcu_lambda(lc);
  return plan;
}

}  // namespace lorentz
