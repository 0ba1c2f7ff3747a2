#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cpdm/harness.hpp"

namespace {

// "A..B" -> (A, B)
void parse_range(const std::string& text, std::uint64_t& lo,
                 std::uint64_t& hi) {
  const auto sep = text.find("..");
  if (sep == std::string::npos)
    throw CLI::ValidationError("--n-range", "expected the form A..B");
  try {
    lo = std::stoull(text.substr(0, sep));
    hi = std::stoull(text.substr(sep + 2));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--n-range", "expected integers in A..B");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "exact closest-pair distance in metrics of bounded doubling dimension"};
  app.require_subcommand(1);

  cpdm::RunOptions run_opts;
  auto* run = app.add_subcommand(
      "run", "compute the closest pair of one instance file");
  run->add_option("--input", run_opts.input_path,
                  "points CSV (euclidean) or matrix file")
      ->required();
  run->add_option("--metric", run_opts.metric, "input format")
      ->check(CLI::IsMember({"euclidean", "matrix"}));
  run->add_option("--d", run_opts.d,
                  "upper bound on the doubling dimension of the input");
  run->add_option("--seed", run_opts.seed, "rng seed");
  run->add_flag("--audit", run_opts.audit,
                "check every separator guarantee during the run");
  run->add_flag("--verify", run_opts.verify,
                "compare the result against the quadratic scan");

  cpdm::BenchOptions bench_opts;
  std::string generator = "line-uniform";
  std::string n_range = "2..2";
  auto* bench = app.add_subcommand(
      "bench", "run seeded generated instances and write a CSV");
  bench->add_option("--generator", generator,
                    "line-uniform|square-uniform|clustered|explicit-random");
  bench->add_option("--n-range", n_range, "instance sizes A..B")->required();
  bench->add_option("--n-steps", bench_opts.n_steps,
                    "number of sizes on a geometric grid");
  bench->add_option("--seeds", bench_opts.seeds, "runs per size");
  bench->add_option("--d", bench_opts.d, "dimension bound passed to every run");
  bench->add_option("--out", bench_opts.out_path, "output CSV path, - for stdout")
      ->required();
  bench->add_flag("--timing", bench_opts.timing,
                  "record wall time (off by default so output is "
                  "byte-reproducible)");

  cpdm::VerifyOptions verify_opts;
  auto* verify = app.add_subcommand(
      "verify", "run the self-check suites on seeded instances");
  verify->add_option("--trials", verify_opts.trials, "effort scale");
  verify->add_option("--seed", verify_opts.seed, "base seed");
  verify->add_option("--max-n", verify_opts.max_n,
                     "largest generated instance size");
  verify->add_option("--suite", verify_opts.suite,
                     "run a single suite by name");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cpdm::run_command(run_opts, std::cout, std::cerr);
  if (bench->parsed()) {
    try {
      bench_opts.generator = cpdm::parse_generator_kind(generator);
      parse_range(n_range, bench_opts.n_min, bench_opts.n_max);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
    return cpdm::bench_command(bench_opts, std::cout, std::cerr);
  }
  return cpdm::verify_command(verify_opts, std::cout, std::cerr);
}
