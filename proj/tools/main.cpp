#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "descon/commands.hpp"

namespace {

// Comma- or space-separated positive doubles.
std::vector<double> parse_alpha_list(const std::string& text, bool& ok) {
  std::vector<double> out;
  std::string cur;
  ok = true;
  const auto flush = [&]() {
    if (cur.empty()) return;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(cur, &pos);
    } catch (const std::exception&) {
      ok = false;
      return;
    }
    if (pos != cur.size()) {
      ok = false;
      return;
    }
    out.push_back(v);
    cur.clear();
  };
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      flush();
      if (!ok) return out;
    } else {
      cur += ch;
    }
  }
  flush();
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale laboratory for decentralized consensus optimization"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::string alphas_text = "0.1,0.01,0.001";

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out_dir, "output directory (default: current)");
    sub->add_option("--seed", seed, "override every seed in the config");
  };

  CLI::App* run = app.add_subcommand("run", "run one solver; writes trace.csv + report.json");
  add_common(run);
  CLI::App* compare =
      app.add_subcommand("compare", "run several solvers on one problem; writes comparison.csv");
  add_common(compare);
  CLI::App* sweep = app.add_subcommand(
      "sweep-alpha", "study the penalty-parameter tradeoff; writes sweep.csv");
  add_common(sweep);
  sweep->add_option("--alphas", alphas_text, "comma-separated penalty parameters");
  CLI::App* certify =
      app.add_subcommand("certify", "certify the spectral bounds at the initial point");
  add_common(certify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (run->parsed()) return descon::cli::cmd_run(config_path, out_dir, seed);
  if (compare->parsed()) return descon::cli::cmd_compare(config_path, out_dir, seed);
  if (sweep->parsed()) {
    bool ok = true;
    const std::vector<double> alphas = parse_alpha_list(alphas_text, ok);
    if (!ok) {
      std::cerr << "error: invalid --alphas list: '" << alphas_text << "'\n";
      return 1;
    }
    return descon::cli::cmd_sweep_alpha(config_path, out_dir, seed, alphas);
  }
  return descon::cli::cmd_certify(config_path, out_dir, seed);
}
