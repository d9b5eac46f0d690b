#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qfluct/error.hpp"
#include "qfluct/scenario.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;

struct RunArgs {
  std::string config;
  std::optional<std::string> mode;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::string dump;
  std::string out;
  std::size_t workers = 1;
};

struct SweepArgs {
  std::size_t n = 100;
  std::string dims = "2,2,2";
  std::string betas = "1";
  std::uint64_t seed = 0;
  std::optional<long> rank;
  std::string out;
  std::size_t workers = 1;
};

template <typename T>
std::vector<T> split_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream in(item);
    T value{};
    if (!(in >> value) || !(in >> std::ws).eof()) {
      throw qfluct::Error(qfluct::ErrorKind::ConfigInvalid, std::string("bad ") + what + " list '" + text + "'");
    }
    out.push_back(value);
  }
  return out;
}

void emit(const nlohmann::json& doc, const std::string& path) {
  if (path.empty()) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw qfluct::Error(qfluct::ErrorKind::ConfigInvalid, "cannot write " + path);
  out << doc.dump(2) << '\n';
}

int run(const RunArgs& args) {
  const qfluct::ToleranceProfile profile = qfluct::profile_from_env();
  qfluct::ScenarioConfig config = qfluct::load_config(args.config);
  if (args.mode) config.mode.kind = *args.mode == "sample" ? qfluct::Mode::Sampled : qfluct::Mode::Exact;
  if (args.samples) config.mode.samples = *args.samples;
  if (args.seed) config.mode.seed = *args.seed;
  if (config.mode.kind == qfluct::Mode::Sampled && config.mode.samples < 2) {
    throw qfluct::Error(qfluct::ErrorKind::ConfigInvalid, "sample mode needs --samples >= 2");
  }
  if (!args.dump.empty() && config.mode.kind != qfluct::Mode::Exact) {
    throw qfluct::Error(qfluct::ErrorKind::ConfigInvalid, "--dump-trajectories requires exact mode");
  }

  qfluct::RunOptions options;
  options.profile = profile;
  options.workers = args.workers;
  options.keep_trajectories = !args.dump.empty();
  const qfluct::ScenarioResult result = qfluct::run_scenario(config, options);

  if (!args.dump.empty()) {
    std::ofstream csv(args.dump);
    if (!csv) throw qfluct::Error(qfluct::ErrorKind::ConfigInvalid, "cannot write " + args.dump);
    qfluct::write_trajectory_csv(csv, *result.frame, result.trajectories);
  }
  emit(qfluct::report_to_json(config, result, profile), args.out);
  for (const auto& c : result.checks) {
    std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << qfluct::format_double(c.value)
              << " tol=" << qfluct::format_double(c.tolerance);
    if (!c.detail.empty()) std::cerr << " (" << c.detail << ")";
    std::cerr << '\n';
  }
  return result.all_passed() ? kPass : kCheckFailed;
}

int sweep(const SweepArgs& args) {
  qfluct::SweepOptions options;
  options.profile = qfluct::profile_from_env();
  options.n_instances = args.n;
  const auto dims = split_list<long>(args.dims, "dims");
  if (dims.size() != 3) throw qfluct::Error(qfluct::ErrorKind::ConfigInvalid, "--dims needs dA,dB,dR");
  options.d_a = dims[0];
  options.d_b = dims[1];
  options.d_r = dims[2];
  options.betas = split_list<double>(args.betas, "beta");
  options.seed = args.seed;
  if (args.rank) options.rank = *args.rank;
  options.workers = args.workers;

  const qfluct::SweepSummary summary = qfluct::run_sweep(options);
  emit(qfluct::sweep_to_json(options, summary), args.out);
  std::cerr << summary.violations << " of " << summary.rows.size() << " instances violate a check\n";
  return summary.violations == 0 ? kPass : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fluctuation-theorem checks for bipartite quantum processes"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario config and its checks");
  run_cmd->add_option("--config", run_args.config, "Scenario JSON file")->required();
  run_cmd->add_option("--mode", run_args.mode, "Override the config mode")->check(CLI::IsMember({"exact", "sample"}));
  run_cmd->add_option("--samples", run_args.samples, "Sample count in sample mode");
  run_cmd->add_option("--seed", run_args.seed, "Sampler seed");
  run_cmd->add_option("--dump-trajectories", run_args.dump, "Write the trajectory table as CSV");
  run_cmd->add_option("--out", run_args.out, "Write the JSON report here instead of stdout");
  run_cmd->add_option("--workers", run_args.workers, "Worker threads (0 = hardware concurrency)");

  SweepArgs sweep_args;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Check the theorems over random instances");
  sweep_cmd->add_option("--n", sweep_args.n, "Number of instances");
  sweep_cmd->add_option("--dims", sweep_args.dims, "dA,dB,dR");
  sweep_cmd->add_option("--beta", sweep_args.betas, "Inverse temperature, or a comma list cycled over instances");
  sweep_cmd->add_option("--seed", sweep_args.seed, "Master seed");
  sweep_cmd->add_option("--rank", sweep_args.rank, "Rank of the initial joint state (default full)");
  sweep_cmd->add_option("--out", sweep_args.out, "Write the JSON summary here instead of stdout");
  sweep_cmd->add_option("--workers", sweep_args.workers, "Worker threads (0 = hardware concurrency)");

  CLI::App* presets_cmd = app.add_subcommand("presets", "Preset catalog");
  presets_cmd->add_subcommand("list", "List preset names per config slot");
  presets_cmd->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (*run_cmd) return run(run_args);
    if (*sweep_cmd) return sweep(sweep_args);
    std::cout << qfluct::presets::catalog().dump(2) << '\n';
    return kPass;
  } catch (const qfluct::Error& e) {
    std::cerr << "error (" << qfluct::to_string(e.kind()) << "): " << e.what() << '\n';
    return kConfigError;
  }
}
