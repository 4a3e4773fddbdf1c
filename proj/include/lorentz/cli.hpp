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

// Command implementations behind the `lorentz` tool. Each command reads a
// JSON config, writes CSV/JSON artifacts atomically into an output directory
// and returns a JSON summary.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lorentz/builders.hpp"
#include "lorentz/circuit.hpp"
#include "lorentz/fitter.hpp"
#include "lorentz/locfuncs.hpp"
#include "lorentz/qara.hpp"

namespace lorentz::cli {

using nlohmann::json;
namespace fs = std::filesystem;

/// Bad user input (config, flags, files). Reported as error JSON, exit 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::string command;
  std::optional<fs::path> config;
  fs::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
  std::optional<unsigned> dim;
  bool qft_dagger = false;
};

// ---------------------------------------------------------------------------
// IO helpers.

/// Writes via a sibling temp file and renames over the destination.
inline void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << content;
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline std::string fmt17(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << v;
  return os.str();
}

/// Minimal CSV builder: header row, '.' decimals, 17 significant digits.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) { row_strings(header); }

  template <class... T>
  void row(const T&... values) {
    static_assert(sizeof...(T) > 0);
    std::vector<std::string> cells{cell(values)...};
    if (cells.size() != cols_) throw std::logic_error("CSV row width");
    row_strings(cells);
  }
  const std::string& str() const { return text_; }

 private:
  static std::string cell(double v) { return fmt17(v); }
  static std::string cell(const std::string& s) { return s; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I v) {
    return std::to_string(v);
  }
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
    text_ += '\n';
  }
  std::size_t cols_;
  std::string text_;
};

inline json read_json_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

/// Real target samples from a CSV of "index,value" (or one value per line);
/// a non-numeric first line is taken as a header.
inline std::vector<double> read_target_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open target " + path.string());
  std::vector<std::pair<long long, double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    try {
      std::size_t used = 0;
      if (cells.size() == 1) {
        const double v = std::stod(cells[0], &used);
        rows.push_back({static_cast<long long>(rows.size()), v});
      } else if (cells.size() == 2) {
        const long long idx = std::stoll(cells[0]);
        rows.push_back({idx, std::stod(cells[1], &used)});
      } else {
        throw std::invalid_argument("column count");
      }
    } catch (const std::exception&) {
      if (lineno == 1 && rows.empty()) continue;  // header
      throw ConfigError("malformed target CSV at line " + std::to_string(lineno));
    }
  }
  if (rows.empty()) throw ConfigError("target CSV has no data rows");
  std::vector<double> out(rows.size());
  std::vector<bool> seen(rows.size(), false);
  for (const auto& [idx, v] : rows) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= out.size() || seen[idx])
      throw ConfigError("target CSV indices must be a permutation of 0..N-1");
    seen[idx] = true;
    out[idx] = v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config parsing.

namespace detail {

inline cplx parse_coeff(const json& d) {
  if (d.is_number()) return {d.get<double>(), 0.0};
  if (d.is_array() && d.size() == 2 && d[0].is_number() && d[1].is_number())
    return {d[0].get<double>(), d[1].get<double>()};
  if (d.is_object()) return {get_or(d, "re", 0.0), get_or(d, "im", 0.0)};
  throw ConfigError("coefficient 'd' must be a number, [re, im] or {re, im}");
}

template <class T>
std::vector<T> per_axis(const json& v, unsigned dim, const char* name) {
  std::vector<T> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(x.get<T>());
  } else {
    out.assign(dim, v.get<T>());
    if (dim > 1) throw ConfigError(std::string("'") + name + "' must list one value per axis");
  }
  if (out.size() != dim) throw ConfigError(std::string("'") + name + "' must have one value per axis");
  return out;
}

}  // namespace detail

/// {n_q, dim?, terms: [{a, k_c, d, imag?: {a, scale}}]}; per-axis a / k_c
/// are arrays when dim > 1. Returned normalized.
inline LCSpec parse_lc(const json& cfg, std::optional<unsigned> dim_flag) {
  if (!cfg.is_object()) throw ConfigError("encode config must be a JSON object");
  if (!cfg.contains("n_q") || !cfg.contains("terms")) throw ConfigError("encode config needs 'n_q' and 'terms'");
  LCSpec lc;
  try {
    const long long nq = cfg.at("n_q").get<long long>();
    if (nq < 1 || nq > static_cast<long long>(kMaxQubits)) throw ConfigError("n_q out of range");
    lc.n_q = static_cast<unsigned>(nq);
    const unsigned dim_cfg = get_or(cfg, "dim", dim_flag.value_or(1u));
    if (dim_flag && *dim_flag != dim_cfg) throw ConfigError("--dim disagrees with the config's 'dim'");
    if (dim_cfg < 1 || dim_cfg > 3) throw ConfigError("dim must be 1, 2 or 3");
    lc.dim = dim_cfg;
    const auto& terms = cfg.at("terms");
    if (!terms.is_array() || terms.empty()) throw ConfigError("'terms' must be a non-empty array");
    for (const auto& t : terms) {
      LCTerm term;
      const auto a = detail::per_axis<double>(t.at("a"), lc.dim, "a");
      const auto k = detail::per_axis<long long>(t.at("k_c"), lc.dim, "k_c");
      for (unsigned mu = 0; mu < lc.dim; ++mu) term.axes.push_back({a[mu], k[mu]});
      term.coeff = t.contains("d") ? detail::parse_coeff(t.at("d")) : cplx{1.0};
      if (t.contains("imag")) term.imag = ImagComponent{t.at("imag").at("a").get<double>(), t.at("imag").at("scale").get<double>()};
      lc.terms.push_back(std::move(term));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad encode config: ") + e.what());
  }
  try {
    lc.validate();
    return normalize_lc(lc);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid LC: ") + e.what());
  }
}

inline json metrics_json(const CircuitMetrics& m) {
  return {{"depth", m.depth}, {"one_qubit", m.one_qubit}, {"cnot", m.cnot},
          {"multi_controlled", m.multi_controlled}, {"total", m.total()}};
}

// ---------------------------------------------------------------------------
// encode

/// Builds the encoder for the LC, simulates it and writes
/// target_amplitudes.csv, simulated_amplitudes.csv, circuit.txt and summary.json.
inline json cmd_encode(const json& cfg, const RunOptions& opt) {
  const LCSpec lc = parse_lc(cfg, opt.dim);
  EncodeOptions eo;
  eo.qft_dagger = opt.qft_dagger;
  const QaraPlan plan = plan_for_lc(lc);

  Circuit circuit(1);
  std::string mode;
  if (lc.has_imag_generators()) {
    if (opt.deterministic) throw ConfigError("--deterministic does not support imaginary generators");
    circuit = c_lc_complex(lc, eo);
    mode = "probabilistic_complex";
  } else if (opt.deterministic) {
    circuit = c_lc_deterministic(lc, plan, eo);
    mode = "deterministic";
  } else {
    circuit = c_lc_lorentzian(lc, eo);
    mode = lc.dim > 1 ? "probabilistic_product" : "probabilistic";
  }

  const QuantumState target = lc_target_state(lc);
  const EncodeResult res = run_encoder(circuit);
  // Align the global phase so the two CSVs are directly comparable.
  const cplx ov = inner_product(res.data_state, target);
  const cplx align = std::abs(ov) > 0 ? ov / std::abs(ov) : cplx{1};
  const double fid = fidelity(res.data_state, target);

  Csv tcsv({"index", "re", "im", "probability"}), scsv({"index", "re", "im", "probability"});
  for (std::uint64_t i = 0; i < target.size(); ++i) {
    const cplx t = target[i];
    const cplx s = res.data_state[i] * align;
    tcsv.row(i, t.real(), t.imag(), std::norm(t));
    scsv.row(i, s.real(), s.imag(), std::norm(s));
  }
  const CircuitMetrics m = metrics(circuit);

  json summary = {
      {"command", "encode"},
      {"mode", mode},
      {"n_q", lc.n_q},
      {"dim", lc.dim},
      {"n_loc", lc.n_loc()},
      {"n_qubits", circuit.n_qubits()},
      {"lambda", plan.lambda},
      {"w_analytic", analytic_success_weight(lc)},
      {"w_simulated", res.success_probability},
      {"success_probability", res.success_probability},
      {"fidelity", fid},
      {"m_opt", plan.m_opt},
      {"theta_ar_opt", plan.theta_ar_opt},
      {"qft_dagger", opt.qft_dagger},
      {"depth", m.depth},
      {"gate_counts", metrics_json(m)},
  };
  write_atomic(opt.out_dir / "target_amplitudes.csv", tcsv.str());
  write_atomic(opt.out_dir / "simulated_amplitudes.csv", scsv.str());
  write_atomic(opt.out_dir / "circuit.txt", to_text(circuit));
  write_atomic(opt.out_dir / "summary.json", summary.dump(2) + "\n");
  return summary;
}

// ---------------------------------------------------------------------------
// fit

inline TargetFunction load_target(const json& cfg, const fs::path& base_dir) {
  if (!cfg.contains("target")) return two_gaussian_target();
  const json& t = cfg.at("target");
  std::vector<double> samples;
  if (t.is_string()) {
    fs::path p = t.get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    samples = read_target_csv(p);
  } else if (t.is_array()) {
    for (const auto& x : t) {
      if (!x.is_number()) throw ConfigError("target array must contain numbers");
      samples.push_back(x.get<double>());
    }
  } else {
    throw ConfigError("'target' must be a CSV path or an array of samples");
  }
  try {
    return TargetFunction::from_samples(std::move(samples));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad target: ") + e.what());
  }
}

inline FitConfig parse_fit_config(const json& cfg, std::optional<std::uint64_t> seed_flag) {
  FitConfig fc;
  fc.n_loc = get_or<std::size_t>(cfg, "n_loc", fc.n_loc);
  fc.beta = get_or(cfg, "beta", fc.beta);
  fc.n_m = get_or<std::size_t>(cfg, "n_M", fc.n_m);
  fc.n_p = get_or<std::size_t>(cfg, "n_p", fc.n_p);
  fc.seed = seed_flag.value_or(get_or<std::uint64_t>(cfg, "seed", fc.seed));
  fc.k_init = get_or(cfg, "k_c_init", fc.k_init);
  fc.a_init = get_or(cfg, "a_init", fc.a_init);
  try {
    fc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid fit config: ") + e.what());
  }
  return fc;
}

/// Runs the Metropolis fit; writes fit_result.json, fit_amplitudes.csv and fit_trace.csv.
inline json cmd_fit(const json& cfg, const RunOptions& opt) {
  const fs::path base = opt.config ? opt.config->parent_path() : fs::path(".");
  const TargetFunction target = load_target(cfg, base);
  const FitConfig fc = parse_fit_config(cfg, opt.seed);
  const FitResult r = fit(target, fc);

  json result = {
      {"command", "fit"},
      {"n_q", target.n_q()},
      {"n_loc", fc.n_loc},
      {"beta", fc.beta},
      {"n_M", fc.n_m},
      {"n_p", fc.n_p},
      {"seed", r.seed},
      {"F", r.f},
      {"d", r.d},
      {"a", r.a},
      {"k_c", r.k_c},
      {"trace_length", r.trace.size()},
      {"selection", r.selection},
  };
  const auto fitted = fitted_amplitudes(target.n_q(), r);
  Csv amp({"index", "target", "fitted"});
  for (std::size_t j = 0; j < fitted.size(); ++j) amp.row(j, target[j], fitted[j]);
  Csv trace({"iteration", "f_trial", "accepted", "f_best"});
  for (std::size_t i = 0; i < r.trace.size(); ++i)
    trace.row(i, r.trace[i].f_trial, static_cast<int>(r.trace[i].accepted), r.trace[i].f_best);
  write_atomic(opt.out_dir / "fit_amplitudes.csv", amp.str());
  write_atomic(opt.out_dir / "fit_trace.csv", trace.str());
  write_atomic(opt.out_dir / "fit_result.json", result.dump(2) + "\n");
  return result;
}

// ---------------------------------------------------------------------------
// qara-sweep

inline const std::vector<double> kDefaultRatios{0.1, 0.04, 0.01};

inline std::vector<double> parse_w_grid(const json& cfg) {
  if (!cfg.contains("w_grid")) return log_spaced(1e-4, 0.5, 60);
  const json& g = cfg.at("w_grid");
  if (g.is_array()) return g.get<std::vector<double>>();
  if (g.is_object())
    return log_spaced(get_or(g, "lo", 1e-4), get_or(g, "hi", 0.5), get_or<std::size_t>(g, "count", 60));
  throw ConfigError("'w_grid' must be an array or {lo, hi, count}");
}

/// Writes qara_sweep.csv (w, delta_ratio, wf_qara, wf_qaa, eps_qara) and
/// qara_sweep.json with per-ratio maxima.
inline json cmd_qara_sweep(const json& cfg, const RunOptions& opt) {
  std::vector<double> ratios, grid;
  try {
    ratios = get_or(cfg, "delta_ratios", kDefaultRatios);
    grid = parse_w_grid(cfg);
    if (ratios.empty() || grid.empty()) throw ConfigError("sweep grids must be non-empty");
    for (double w : grid)
      if (!(w > 0.0 && w <= 1.0)) throw ConfigError("w_grid values must lie in (0, 1]");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad sweep config: ") + e.what());
  }
  std::vector<SweepRow> rows;
  try {
    rows = sweep_fig1c(ratios, grid);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  Csv csv({"w", "delta_ratio", "wf_qara", "wf_qaa", "eps_qara"});
  json per_ratio = json::array();
  for (double r : ratios) {
    double mq = 0.0, ma = 0.0;
    for (const auto& row : rows)
      if (row.delta_ratio == r) {
        mq = std::max(mq, row.wf_qara);
        ma = std::max(ma, row.wf_qaa);
      }
    per_ratio.push_back({{"delta_ratio", r}, {"max_wf_qara", mq}, {"max_wf_qaa", ma}, {"eps_qara", epsilon_qara(r)}});
  }
  for (const auto& row : rows) csv.row(row.w, row.delta_ratio, row.wf_qara, row.wf_qaa, row.eps_qara);
  json summary = {{"command", "qara-sweep"}, {"rows", rows.size()}, {"ratios", per_ratio}};
  write_atomic(opt.out_dir / "qara_sweep.csv", csv.str());
  write_atomic(opt.out_dir / "qara_sweep.json", summary.dump(2) + "\n");
  return summary;
}

// ---------------------------------------------------------------------------
// metrics

/// Seeded random real LC with n_loc terms (rates in [0.2, 2], distinct
/// centres where the grid allows it, coefficients in +-[0.2, 1]).
inline LCSpec random_lc(unsigned n_q, std::size_t n_loc, std::uint64_t seed, unsigned dim = 1) {
  FitRng rng(seed);
  const std::int64_t n = grid_size(n_q);
  LCSpec lc{n_q, dim, {}};
  for (std::size_t l = 0; l < n_loc; ++l) {
    LCTerm t;
    for (unsigned mu = 0; mu < dim; ++mu) {
      const double a = 0.2 + 1.8 * rng.unit();
      const std::int64_t k = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
      t.axes.push_back({a, k});
    }
    const double mag = 0.2 + 0.8 * rng.unit();
    t.coeff = rng.below(2) ? mag : -mag;
    lc.terms.push_back(std::move(t));
  }
  return normalize_lc(lc);
}

inline const std::vector<std::string> kMetricBuilders{"u_slater", "u_lorentzian", "u_shift", "translation", "c_lc",
                                                      "c_lc_deterministic"};

inline Circuit build_for_metrics(const std::string& builder, unsigned n_q, std::size_t n_loc, double a,
                                 std::uint64_t seed, bool qft_dagger) {
  EncodeOptions eo;
  eo.qft_dagger = qft_dagger;
  if (builder == "u_slater") return u_slater(a, n_q);
  if (builder == "u_lorentzian") return u_lorentzian(a, n_q, qft_dagger);
  if (builder == "u_shift") return u_shift(static_cast<std::int64_t>(grid_size(n_q) / 2 + 1), n_q);
  if (builder == "translation") return translation(1, n_q);
  const LCSpec lc = random_lc(n_q, n_loc, seed);
  if (builder == "c_lc") return c_lc_lorentzian(lc, eo);
  if (builder == "c_lc_deterministic") return c_lc_deterministic(lc, plan_for_lc(lc), eo);
  throw ConfigError("unknown builder '" + builder + "'");
}

/// Writes metrics.csv (n_q, n_loc, depth, cx_count, mcu_count, one_qubit_count).
inline json cmd_metrics(const json& cfg, const RunOptions& opt) {
  const std::string builder = get_or<std::string>(cfg, "builder", "c_lc");
  if (std::find(kMetricBuilders.begin(), kMetricBuilders.end(), builder) == kMetricBuilders.end())
    throw ConfigError("unknown builder '" + builder + "'");
  const auto nqs = get_or<std::vector<unsigned>>(cfg, "n_q", {4});
  const auto nlocs = get_or<std::vector<std::size_t>>(cfg, "n_loc", {2, 4, 8});
  const double a = get_or(cfg, "a", 0.5);
  const std::uint64_t seed = opt.seed.value_or(get_or<std::uint64_t>(cfg, "seed", 0));
  if (nqs.empty() || nlocs.empty()) throw ConfigError("n_q and n_loc lists must be non-empty");
  if (!(a > 0.0)) throw ConfigError("a must be positive");
  const bool uses_nloc = builder.rfind("c_lc", 0) == 0;

  Csv csv({"n_q", "n_loc", "depth", "cx_count", "mcu_count", "one_qubit_count"});
  std::size_t rows = 0;
  for (unsigned nq : nqs) {
    if (nq < 1 || nq > kMaxQubits) throw ConfigError("n_q out of range");
    for (std::size_t nl : (uses_nloc ? nlocs : std::vector<std::size_t>{1})) {
      if (nl < 1) throw ConfigError("n_loc must be >= 1");
      Circuit c(1);
      try {
        c = build_for_metrics(builder, nq, nl, a, seed, opt.qft_dagger);
      } catch (const ConfigError&) {
        throw;
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("cannot build ") + builder + ": " + e.what());
      }
      const CircuitMetrics m = metrics(c);
      csv.row(nq, nl, m.depth, m.cnot, m.multi_controlled, m.one_qubit);
      ++rows;
    }
  }
  json summary = {{"command", "metrics"}, {"builder", builder}, {"rows", rows}, {"seed", seed}};
  write_atomic(opt.out_dir / "metrics.csv", csv.str());
  write_atomic(opt.out_dir / "metrics.json", summary.dump(2) + "\n");
  return summary;
}

// ---------------------------------------------------------------------------
// dispatch

inline json error_json(const std::string& command, const std::string& kind, const std::string& message) {
  return {{"status", "error"}, {"command", command}, {"kind", kind}, {"message", message}};
}

/// Runs one command. Returns 0 on success; on failure prints error JSON to
/// `err` and returns 1.
inline int run(const RunOptions& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    configure_threads_from_env();
    const json cfg = opt.config ? read_json_file(*opt.config) : json::object();
    fs::create_directories(opt.out_dir);
    json summary;
    if (opt.command == "encode") {
      if (!opt.config) throw ConfigError("encode needs --config");
      summary = cmd_encode(cfg, opt);
    } else if (opt.command == "fit") {
      summary = cmd_fit(cfg, opt);
    } else if (opt.command == "qara-sweep") {
      summary = cmd_qara_sweep(cfg, opt);
    } else if (opt.command == "metrics") {
      summary = cmd_metrics(cfg, opt);
    } else {
      throw ConfigError("unknown command '" + opt.command + "'");
    }
    summary["status"] = "ok";
    out << summary.dump() << "\n";
    return 0;
  } catch (const ConfigError& e) {
    err << error_json(opt.command, "config", e.what()).dump() << "\n";
  } catch (const ImpossibleOutcome& e) {
    err << error_json(opt.command, "impossible_outcome", e.what()).dump() << "\n";
  } catch (const std::exception& e) {
    err << error_json(opt.command, "runtime", e.what()).dump() << "\n";
  }
  return 1;
}

}  // namespace lorentz::cli
