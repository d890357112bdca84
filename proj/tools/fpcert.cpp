// fpcert: norm evaluation, certificate runs and orbit tables.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "fpcert/io/config.hpp"
#include "fpcert/io/csv.hpp"
#include "fpcert/io/experiment.hpp"
#include "fpcert/io/tags.hpp"

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

template <fpcert::Scalar S>
std::string evaluate_norm(const std::string& tag, const std::string& coeffs) {
  const auto spec = fpcert::io::parse_tag(tag);
  const auto v = fpcert::io::parse_coefficients<S>(coeffs);
  if (v.size() == 0) return "0";
  return fpcert::to_string(spec.evaluate(v));
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw fpcert::ConfigError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-dimensional certificates for basic sequences and affine maps"};
  app.require_subcommand(1);

  std::string tag, coeffs, config, out_path, arithmetic;
  std::optional<std::uint64_t> seed;

  auto* norm = app.add_subcommand("norm", "Evaluate a norm of a coefficient vector");
  norm->add_option("--tag", tag, "sup | lin | l<p> | james<p> | summing")->required();
  norm->add_option("--coeffs", coeffs, "Comma separated entries (decimal or p/q)")->required();
  norm->add_option("--arithmetic", arithmetic, "float | rational");

  auto* certify = app.add_subcommand("certify", "Run the checks of a config and write a JSON report");
  auto* orbit = app.add_subcommand("orbit", "Write the orbit distance table of a config as CSV");
  for (auto* sub : {certify, orbit}) {
    sub->add_option("--config", config, "Experiment config file")->required();
    sub->add_option("--out", out_path, "Output file (default: stdout)");
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--arithmetic", arithmetic, "float | rational (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    std::optional<fpcert::Arithmetic> mode;
    if (!arithmetic.empty()) mode = fpcert::io::parse_arithmetic(arithmetic);

    if (norm->parsed()) {
      if (mode == fpcert::Arithmetic::Rational) {
        std::cout << evaluate_norm<fpcert::Rational>(tag, coeffs) << '\n';
      } else {
        std::cout << evaluate_norm<double>(tag, coeffs) << '\n';
      }
      return 0;
    }

    const auto cfg = fpcert::io::load_config(config);
    fpcert::io::RunOptions opt;
    opt.seed = seed;
    opt.arithmetic = mode;
    opt.threads = fpcert::io::threads_from_env();

    if (orbit->parsed()) {
      emit(fpcert::io::orbit(cfg, opt), out_path);
      return 0;
    }

    const auto result = fpcert::io::certify(cfg, opt);
    emit(result.report.dump(2) + "\n", out_path);
    if (result.exit_code != 0) std::cerr << "one or more certificates failed\n";
    return result.exit_code == 0 ? 0 : kExitFailed;
  } catch (const fpcert::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
