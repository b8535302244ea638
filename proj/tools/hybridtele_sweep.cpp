// Sweep and cross-validation front end.
//
// Exit codes: 0 success, 1 configuration error, 2 check failure,
// 3 numeric or cutoff error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hybridtele/state_engine.hpp"
#include "hybridtele/sweep.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kCheck = 2, kNumeric = 3 };

bool write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return static_cast<bool>(std::cout);
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace hybridtele;
  CLI::App app{"Hybrid-qubit teleportation under photon loss: parameter sweeps and cross-validation"};
  app.set_config("--config", "", "Flat key = value file mirroring the long flags");

  std::string type = "both";
  std::string alpha = "1,2,5";
  std::string engine = "closed-form";
  std::string format = "csv";
  std::string out;
  std::string crossval_r = "0.2,0.5,0.8";
  bool crossval = false;
  SweepConfig cfg;

  app.add_option("--type", type, "Hybrid type")->check(CLI::IsMember({"I", "II", "both"}))->capture_default_str();
  app.add_option("--alpha", alpha, "Comma-separated coherent amplitudes")->capture_default_str();
  app.add_option("--r-min", cfg.r_min, "First loss value r")->capture_default_str();
  app.add_option("--r-max", cfg.r_max, "Last loss value r (< 1)")->capture_default_str();
  app.add_option("--r-step", cfg.r_step, "Loss grid step")->capture_default_str();
  app.add_option("--engine", engine, "closed-form, first-principles-coherent or first-principles-fock")
      ->check(CLI::IsMember({"closed-form", "first-principles-coherent", "first-principles-fock"}))
      ->capture_default_str();
  app.add_option("--quad-u", cfg.quad_u, "Gauss-Legendre nodes in cos u")->capture_default_str();
  app.add_option("--quad-v", cfg.quad_v, "Trapezoid nodes in v")->capture_default_str();
  app.add_option("--out", out, "Output path (stdout when omitted)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_flag("--crossval", crossval, "Run the cross-validation suite instead of a sweep");
  app.add_option("--tol", cfg.tolerance, "Tolerance for every cross-validation check")->capture_default_str();
  app.add_option("--crossval-r", crossval_r, "Loss values used by --crossval")->capture_default_str();
  app.add_option("--threads", cfg.threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (type == "I") {
      cfg.types = {HybridType::TypeI};
    } else if (type == "II") {
      cfg.types = {HybridType::TypeII};
    }
    cfg.alphas = parse_number_list(alpha);
    cfg.crossval_r = parse_number_list(crossval_r);
    cfg.engine = parse_engine(engine);
    cfg.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;

    if (crossval) {
      const auto report = run_crossval(cfg);
      const std::string text = cfg.format == OutputFormat::Json ? to_json(report) : to_text(report);
      if (!write_output(out, text)) {
        std::cerr << "error: cannot write " << out << "\n";
        return kConfig;
      }
      return report.passed() ? kOk : kCheck;
    }
    const auto rows = run_sweep(cfg);
    const std::string text = cfg.format == OutputFormat::Json ? to_json(rows) : to_csv(rows);
    if (!write_output(out, text)) {
      std::cerr << "error: cannot write " << out << "\n";
      return kConfig;
    }
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ContractViolation& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const CutoffInsufficientError& e) {
    std::cerr << "cutoff error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  }
}
