#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "dtlab/cli.hpp"

namespace {

namespace fs = std::filesystem;
using namespace dtlab;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dtlab: exact and Monte Carlo checks for DT-operators"};
  app.require_subcommand(1);

  std::string config_path, out_path, format = "json", suite;
  std::string seed;
  bool analytic_flag = false;
  std::vector<std::string> overrides;

  for (const auto& name : cli::commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value file, or a previous JSON report");
    sub->add_option("--seed", seed, "64-bit master seed");
    sub->add_option("--out", out_path, "report path (stdout when absent)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    if (name == "verify") sub->add_option("--suite", suite, "all or one named suite");
    if (name == "dimension") sub->add_flag("--analytic-flag", analytic_flag, "supply limsup t Phi*(: C) = 0");
    sub->add_option("overrides", overrides, "key=value parameters");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kUsageError;
  }

  try {
    cli::RunConfig cfg;
    if (!config_path.empty()) cfg = cli::load_config_file(config_path);
    const std::string command = app.get_subcommands().front()->get_name();
    if (!cfg.command.empty() && cfg.command != command) {
      throw std::invalid_argument("config is for '" + cfg.command + "', not '" + command + "'");
    }
    cfg.command = command;
    for (const auto& o : overrides) cli::apply_override(cfg, o);
    if (!seed.empty()) cfg.params["seed"] = seed;
    if (!suite.empty()) cfg.params["suite"] = suite;
    if (analytic_flag) cfg.params["analytic_flag"] = "true";

    const cli::RunReport report = cli::run(cfg);
    const std::string primary = format == "csv" ? cli::report_csv(report) : cli::report_json(report);
    if (out_path.empty()) {
      std::cout << primary;
      if (!report.estimates.empty()) std::cout << cli::estimates_csv(report);
    } else {
      const fs::path out(out_path);
      write_file(out, primary);
      if (format == "csv") write_file(fs::path(out).replace_extension(".json"), cli::report_json(report));
      if (!report.estimates.empty()) {
        fs::path est = out;
        est.replace_extension("");
        est += "_estimates.csv";
        write_file(est, cli::estimates_csv(report));
      }
    }
    std::size_t failed = 0;
    for (const auto& rec : report.records) failed += rec.pass ? 0 : 1;
    std::cerr << report.command << ": " << report.records.size() - failed << "/" << report.records.size() << " checks pass\n";
    return cli::exit_code(report);
  } catch (const PrecisionError& e) {
    std::cerr << "precision error: " << e.what() << "\n";
    return cli::kPrecisionError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return cli::kUsageError;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return cli::kUsageError;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "check failure: " << e.what() << "\n";
    return cli::kCheckFailure;
  }
}
