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

#include <CLI11.hpp>

#include "lorentz/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lorentzian-basis state preparation: encode, fit, qara-sweep, metrics"};
  app.require_subcommand(1);

  lorentz::cli::RunOptions opt;
  std::string config, out = ".";
  std::uint64_t seed = 0;
  unsigned dim = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "RNG seed (overrides the config)");
    sub->add_flag("--deterministic", opt.deterministic, "amplified deterministic encoder");
    sub->add_option("--dim", dim, "spatial dimension")->check(CLI::IsMember({1u, 2u, 3u}));
    sub->add_flag("--qft-dagger", opt.qft_dagger, "use the inverse QFT for the data transform");
  };
  const std::pair<const char*, const char*> subs[] = {
      {"encode", "Build and simulate the encoding circuit for a linear combination"},
      {"fit", "Fit Lorentzians to a sampled target function"},
      {"qara-sweep", "Failure weight of QARA versus plain QAA over a w grid"},
      {"metrics", "Depth and gate counts over (n_q, n_loc) grids"},
  };
  for (const auto& [name, desc] : subs) add_common(app.add_subcommand(name, desc));

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();
  opt.command = sub->get_name();
  if (!config.empty()) opt.config = config;
  opt.out_dir = out;
  if (sub->count("--seed")) opt.seed = seed;
  if (sub->count("--dim")) opt.dim = dim;
  return lorentz::cli::run(opt);
}
