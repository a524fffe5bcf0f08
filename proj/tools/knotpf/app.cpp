/*
 * Copyright 2026 The knotpf Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "app.hpp"

#include <chrono>
#include <ostream>

#include <boost/program_options.hpp>

#include "experiments.hpp"
#include "manifest.hpp"
#include "knotpf/errors.hpp"
#include "knotpf/version.hpp"

namespace knotpf::cli {
namespace {

namespace po = boost::program_options;

constexpr const char* kUsage =
    "usage: knotpf <subcommand> --config <path> [--out <dir>] [--jobs <k>] [--seed <s>]\n"
    "       knotpf --help | --version\n"
    "\n"
    "subcommands:\n"
    "  binary-sweep       asymptotic and empirical variance of eta_hat(phi) on the binary model\n"
    "  binary-nc-sweep    the same for the normalizing-constant estimator\n"
    "  student-nc         log normalizing constants on the Student state-space model\n"
    "  verify             seeded property checks of knots and variances\n"
    "  simulate-student   writes Student observation datasets\n";

po::options_description option_spec() {
  po::options_description desc("options");
  desc.add_options()
      ("config", po::value<std::string>(), "experiment config (JSON)")
      ("out", po::value<std::string>(), "output directory, overriding the config")
      ("jobs", po::value<std::size_t>(), "worker threads; 0 uses every hardware thread")
      ("seed", po::value<std::uint64_t>(), "master seed, overriding the config")
      ("corrupt-knot", po::bool_switch(), "verify only: inject an incompatible knot");
  return desc;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << kUsage;
    return kExitConfigError;
  }
  if (args[0] == "--help" || args[0] == "-h") {
    out << kUsage << '\n' << option_spec();
    return kExitOk;
  }
  if (args[0] == "--version") {
    out << "knotpf " << kVersion << '\n';
    return kExitOk;
  }

  ExperimentConfig config;
  try {
    const ExperimentKind kind = parse_kind(args[0]);
    po::variables_map vm;
    const std::vector<std::string> rest(args.begin() + 1, args.end());
    po::store(po::command_line_parser(rest).options(option_spec()).run(), vm);
    po::notify(vm);
    if (!vm.count("config")) throw ConfigError("--config is required");

    config = load_config(vm["config"].as<std::string>(), kind);
    Overrides overrides;
    if (vm.count("out")) overrides.output_dir = vm["out"].as<std::string>();
    if (vm.count("jobs")) overrides.jobs = vm["jobs"].as<std::size_t>();
    if (vm.count("seed")) overrides.seed = vm["seed"].as<std::uint64_t>();
    overrides.corrupt_knot = vm["corrupt-knot"].as<bool>();
    apply_overrides(config, overrides);
  } catch (const po::error& e) {
    err << "knotpf: " << e.what() << "\n\n" << kUsage;
    return kExitConfigError;
  } catch (const ConfigError& e) {
    err << "knotpf: config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    const RunOutcome outcome = run_experiment(config);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    write_manifest(config.output_dir, make_manifest(config, outcome.files, elapsed.count()));
    out << to_string(config.kind) << ": " << outcome.summary << " -> "
        << config.output_dir.string() << '\n';
    return outcome.passed ? kExitOk : kExitVerificationFailed;
  } catch (const FileError& e) {
    err << "knotpf: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ConfigError& e) {
    err << "knotpf: config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const Error& e) {
    err << "knotpf: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

}  // namespace knotpf::cli
