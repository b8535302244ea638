#pragma once

// Parameter sweeps over (type, alpha, r) and the cross-validation suite.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hybridtele/hybrid_types.hpp"

namespace hybridtele {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Engine { ClosedForm, FirstPrinciplesCoherent, FirstPrinciplesFock };

std::string to_string(Engine e);
Engine parse_engine(std::string_view text);

enum class OutputFormat { Csv, Json };

struct SweepConfig {
  std::vector<HybridType> types{HybridType::TypeI, HybridType::TypeII};
  std::vector<double> alphas{1.0, 2.0, 5.0};
  double r_min = 0.0;
  double r_max = 0.98;
  double r_step = 0.02;
  Engine engine = Engine::ClosedForm;
  int quad_u = 32;
  int quad_v = 64;
  OutputFormat format = OutputFormat::Csv;
  /// Tolerance applied to every cross-validation check.
  double tolerance = 1e-6;
  /// Loss values probed by the cross-validation suite.
  std::vector<double> crossval_r{0.2, 0.5, 0.8};
  /// Worker threads; 0 picks the hardware concurrency.
  int threads = 0;
};

/// Throws ConfigError on an invalid configuration.
void validate(const SweepConfig& config);
void validate_crossval(const SweepConfig& config);

std::vector<double> r_grid(const SweepConfig& config);

/// Largest alpha accepted by the truncated Fock engine.
inline constexpr double kFockAlphaLimit = 2.0;
inline constexpr double kClassicalLimit = 2.0 / 3.0;

struct SweepRow {
  HybridType type;
  double alpha;
  double r;
  double t;
  double avg_fidelity;
  double avg_success;
  Engine engine;
};

std::vector<SweepRow> run_sweep(const SweepConfig& config);

std::string csv_header();
std::string to_csv(const std::vector<SweepRow>& rows);
std::string to_json(const std::vector<SweepRow>& rows);

struct CheckResult {
  std::string name;
  std::string where;  // parameter point, e.g. "type=I alpha=1 r=0.2"
  double deviation;
  double tolerance;
  bool passed;
};

struct CrossvalReport {
  std::vector<CheckResult> checks;
  bool passed() const;
  double max_deviation() const;
};

CrossvalReport run_crossval(const SweepConfig& config);
std::string to_text(const CrossvalReport& report);
std::string to_json(const CrossvalReport& report);

/// "1,2,5" -> {1, 2, 5}
std::vector<double> parse_number_list(std::string_view text);

}  // namespace hybridtele
