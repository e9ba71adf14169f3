#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "dirnet/commands.hpp"
#include "dirnet/validation.hpp"

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct Args {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out;
  std::string format = "csv";
  double gamma_scale = 1.0;
};

dirnet::Scenario resolve_scenario(const Args& args, const char* fallback_preset) {
  if (!args.config.empty() && !args.preset.empty())
    throw dirnet::ScenarioError("use either --config or --preset, not both");
  dirnet::Scenario sc;
  if (!args.config.empty()) sc = dirnet::load_scenario(args.config);
  else if (!args.preset.empty()) sc = dirnet::load_preset(args.preset);
  else if (fallback_preset) sc = dirnet::load_preset(fallback_preset);
  else throw dirnet::ScenarioError("a scenario is required: pass --config <path> or --preset <name>");
  if (args.seed) sc.seed = *args.seed;
  return sc;
}

void emit(const Args& args, const dirnet::Table& table) {
  const auto format = dirnet::output_format_from_string(args.format);
  if (args.out.empty()) {
    dirnet::write_table(std::cout, table, format);
    return;
  }
  std::ofstream f(args.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + args.out);
  dirnet::write_table(f, table, format);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacity analysis for dynamic networks of directional device pairs"};
  app.require_subcommand(1);
  Args args;

  auto add_common = [&args](CLI::App* cmd) {
    cmd->add_option("--config", args.config, "Scenario file (key = value)");
    cmd->add_option("--preset", args.preset, "Bundled scenario name");
    cmd->add_option("--seed", args.seed, "Override the scenario seed");
    cmd->add_option("--jobs", args.jobs, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", args.out, "Write output to this path instead of stdout");
    cmd->add_option("--format", args.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* analyze = app.add_subcommand("analyze", "Analytic steady-state metrics per sweep point");
  auto* simulate = app.add_subcommand("simulate", "Spatial Monte Carlo statistics per sweep point");
  auto* sweep = app.add_subcommand("sweep-power", "Area throughput vs transmit power, with optimum");
  auto* validate = app.add_subcommand("validate", "Run the acceptance checks");
  auto* presets = app.add_subcommand("presets", "List bundled presets, or print one with --show");
  for (auto* cmd : {analyze, simulate, sweep, validate}) add_common(cmd);
  validate->add_option("--inject-gamma-scale", args.gamma_scale,
                       "Scale the analytic gamma in the cross-engine check (fault injection)");
  std::string show;
  presets->add_option("--show", show, "Preset to print");

  CLI11_PARSE(app, argc, argv);

  try {
    const dirnet::CommandOptions opts{args.jobs};
    if (presets->parsed()) {
      if (show.empty()) {
        for (const auto& n : dirnet::preset_names()) std::cout << n << '\n';
      } else {
        std::cout << dirnet::preset_text(show);
      }
      return 0;
    }
    if (analyze->parsed()) {
      emit(args, dirnet::cmd_analyze(resolve_scenario(args, nullptr), opts));
    } else if (simulate->parsed()) {
      emit(args, dirnet::cmd_simulate(resolve_scenario(args, nullptr), opts));
    } else if (sweep->parsed()) {
      emit(args, dirnet::cmd_sweep_power(resolve_scenario(args, nullptr), opts));
    } else if (validate->parsed()) {
      const auto sc = resolve_scenario(args, "desk-fig4");
      const auto results = dirnet::run_validation(sc, {args.jobs, args.gamma_scale});
      emit(args, dirnet::validation_table(results));
      std::size_t passed = 0;
      for (const auto& r : results) passed += r.passed() ? 1 : 0;
      std::cerr << "validate: " << passed << "/" << results.size() << " checks passed\n";
      return passed == results.size() ? 0 : kExitCheckFailed;
    }
  } catch (const dirnet::ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const dirnet::NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
