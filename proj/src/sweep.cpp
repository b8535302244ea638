#include "hybridtele/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hybridtele/closed_forms.hpp"
#include "hybridtele/hybrid_encoding.hpp"
#include "hybridtele/loss_channel.hpp"
#include "hybridtele/teleport.hpp"

namespace hybridtele {

std::string to_string(Engine e) {
  switch (e) {
    case Engine::ClosedForm:
      return "closed-form";
    case Engine::FirstPrinciplesCoherent:
      return "first-principles-coherent";
    case Engine::FirstPrinciplesFock:
      return "first-principles-fock";
  }
  return "?";
}

Engine parse_engine(std::string_view text) {
  for (auto e : {Engine::ClosedForm, Engine::FirstPrinciplesCoherent, Engine::FirstPrinciplesFock})
    if (to_string(e) == text) return e;
  throw ConfigError("unknown engine '" + std::string(text) + "'");
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss{std::string(text)};
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw ConfigError("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

namespace {

void check_alphas(const SweepConfig& c, bool fock_included) {
  if (c.alphas.empty()) throw ConfigError("alpha list is empty");
  for (double a : c.alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("alpha must be positive");
    if (fock_included && a > kFockAlphaLimit) {
      std::ostringstream os;
      os << "alpha = " << a << " exceeds " << kFockAlphaLimit << ", the limit of the first-principles-fock engine";
      throw ConfigError(os.str());
    }
  }
}

}  // namespace

void validate(const SweepConfig& c) {
  if (c.types.empty()) throw ConfigError("no hybrid type selected");
  check_alphas(c, c.engine == Engine::FirstPrinciplesFock);
  if (!(c.r_min >= 0.0) || !(c.r_max < 1.0) || c.r_min > c.r_max)
    throw ConfigError("r range must satisfy 0 <= r_min <= r_max < 1");
  if (!(c.r_step > 0.0)) throw ConfigError("r_step must be positive");
  if (c.quad_u < 1 || c.quad_v < 1) throw ConfigError("quadrature sizes must be positive");
  if (!(c.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (c.threads < 0) throw ConfigError("thread count must be nonnegative");
}

void validate_crossval(const SweepConfig& c) {
  validate(c);
  for (double r : c.crossval_r)
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError("cross-validation r values must lie in [0, 1)");
}

std::vector<double> r_grid(const SweepConfig& c) {
  const auto n = static_cast<long>(std::floor((c.r_max - c.r_min) / c.r_step + 1e-9));
  std::vector<double> out;
  for (long k = 0; k <= n; ++k) {
    // rounding keeps grid values such as 0.3 exact to the printed precision
    const double r = std::round((c.r_min + k * c.r_step) * 1e12) / 1e12;
    out.push_back(std::min(r, c.r_max));
  }
  return out;
}

namespace {

// Runs body(i) for i in [0, n) on a small worker pool. The first exception is
// rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::mutex mtx;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; !failed && (i = next++) < n;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(mtx);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string point_name(HybridType type, double alpha, double r) {
  std::ostringstream os;
  os << "type=" << to_string(type) << " alpha=" << alpha << " r=" << r;
  return os.str();
}

// Rethrows the active exception with the parameter point prepended, keeping its category.
[[noreturn]] void rethrow_at(const std::string& where) {
  try {
    throw;
  } catch (const CutoffInsufficientError& e) {
    throw CutoffInsufficientError(where + ": " + e.what());
  } catch (const DimensionLimitError& e) {
    throw DimensionLimitError(where + ": " + e.what());
  } catch (const ContractViolation& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(where + ": " + e.what());
  }
}

BackendChoice backend_for(Engine e) {
  return e == Engine::FirstPrinciplesFock ? BackendChoice::truncated_fock() : BackendChoice::coherent_algebra();
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  validate(config);
  const auto rs = r_grid(config);
  std::vector<SweepRow> rows;
  for (auto type : config.types)
    for (double a : config.alphas)
      for (double r : rs) rows.push_back({type, a, r, 0.0, 0.0, 0.0, config.engine});
  const SphereQuadrature quad(config.quad_u, config.quad_v);
  parallel_for(rows.size(), config.threads, [&](std::size_t i) {
    auto& row = rows[i];
    try {
      const auto loss = LossParameter::from_r(row.r);
      row.t = loss.t();
      if (config.engine == Engine::ClosedForm) {
        if (row.type == HybridType::TypeI) {
          row.avg_fidelity = F_I(row.alpha, loss.t());
          row.avg_success = P_I(row.alpha, loss.t());
        } else {
          row.avg_fidelity = F_II_numeric(row.alpha, loss.t(), quad);
          row.avg_success = P_II(row.alpha, loss.t());
        }
      } else {
        const auto avg = sphere_averages(TransferMap(row.type, row.alpha, loss, backend_for(config.engine)), quad);
        row.avg_fidelity = avg.fidelity;
        row.avg_success = avg.success;
      }
    } catch (...) {
      rethrow_at(point_name(row.type, row.alpha, row.r));
    }
  });
  return rows;
}

std::string csv_header() { return "type,alpha,r,t,avg_fidelity,avg_success,classical_limit,engine"; }

namespace {

std::string fixed6(double x) {
  if (std::abs(x) < 5e-7) x = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

}  // namespace

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) {
    out += to_string(r.type) + "," + fixed6(r.alpha) + "," + fixed6(r.r) + "," + fixed6(r.t) + "," +
           fixed6(r.avg_fidelity) + "," + fixed6(r.avg_success) + "," + fixed6(kClassicalLimit) + "," +
           to_string(r.engine) + "\n";
  }
  return out;
}

std::string to_json(const std::vector<SweepRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows)
    j.push_back({{"type", to_string(r.type)},
                 {"alpha", r.alpha},
                 {"r", r.r},
                 {"t", r.t},
                 {"avg_fidelity", r.avg_fidelity},
                 {"avg_success", r.avg_success},
                 {"classical_limit", kClassicalLimit},
                 {"engine", to_string(r.engine)}});
  return nlohmann::json{{"rows", j}}.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

bool CrossvalReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

double CrossvalReport::max_deviation() const {
  double m = 0.0;
  for (const auto& c : checks) m = std::max(m, c.deviation);
  return m;
}

namespace {

double max_transfer_difference(const TransferMap& a, const TransferMap& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.outcomes().size(); ++i) {
    const auto& x = a.outcomes()[i];
    const auto& y = b.outcomes()[i];
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) {
        worst = std::max(worst, std::abs(x.trace[p][q] - y.trace[p][q]));
        for (int s = 0; s < 2; ++s)
          for (int u = 0; u < 2; ++u) worst = std::max(worst, std::abs(x.overlap[p][q][s][u] - y.overlap[p][q][s][u]));
      }
  }
  return worst;
}

struct Task {
  std::string name;
  std::string where;
  std::function<double()> run;
};

}  // namespace

CrossvalReport run_crossval(const SweepConfig& config) {
  validate_crossval(config);
  const SphereQuadrature quad(config.quad_u, config.quad_v);
  const BlochAngles probe(std::numbers::pi / 3.0, std::numbers::pi / 4.0);
  std::vector<Task> tasks;

  for (auto type : config.types)
    for (double a : config.alphas) {
      const bool fock = a <= kFockAlphaLimit;
      tasks.push_back({"eq2_residual", point_name(type, a, 0.0), [=] {
                         double worst = 0.0;
                         for (double u : {0.0, std::numbers::pi / 2.0, std::numbers::pi})
                           for (double v : {0.0, 2.0 * std::numbers::pi / 3.0, 4.0 * std::numbers::pi / 3.0})
                             worst = std::max(worst, bell_decomposition_check(type, a, BlochAngles(u, v)));
                         return worst;
                       }});
      for (double r : config.crossval_r) {
        const auto loss = LossParameter::from_r(r);
        const std::string where = point_name(type, a, r);
        tasks.push_back({"closed_form_vs_first_principles", where, [=, &quad] {
                           const auto avg = sphere_averages(TransferMap(type, a, loss, BackendChoice{}), quad);
                           const double t = loss.t();
                           if (type == HybridType::TypeI)
                             return std::max(std::abs(avg.fidelity - F_I(a, t)), std::abs(avg.success - P_I(a, t)));
                           return std::max(std::abs(avg.fidelity - F_II_numeric(a, t, quad)),
                                           std::abs(avg.success - P_II(a, t)));
                         }});
        tasks.push_back({"channel_closed_form", where, [=] {
                           return trace_distance(decohered_channel(type, a, loss), damped_channel(type, a, loss));
                         }});
        tasks.push_back({"probability_completeness", where, [=] {
                           const TransferMap map(type, a, loss, BackendChoice{});
                           double worst = std::abs(map.total_probability(probe) - 1.0);
                           if (type == HybridType::TypeI) {
                             using O = Outcome;
                             for (OutcomeLabel l : {OutcomeLabel{O::One, O::Three}, OutcomeLabel{O::One, O::Four},
                                                    OutcomeLabel{O::Two, O::One}, OutcomeLabel{O::Two, O::Two}})
                               worst = std::max(worst, std::abs(map.outcome(l).probability(probe)));
                           }
                           return worst;
                         }});
        if (type == HybridType::TypeI) {
          tasks.push_back({"outcome_independence", where, [=] {
                             const auto rep = teleport_once(type, a, loss, BlochAngles(std::numbers::pi / 2.0, 0.0));
                             double worst = 0.0;
                             for (std::size_t i = 0; i < rep.outcomes.size(); ++i)
                               for (std::size_t j = i + 1; j < rep.outcomes.size(); ++j) {
                                 const auto& x = rep.outcomes[i];
                                 const auto& y = rep.outcomes[j];
                                 if (!x.correction || !y.correction || x.probability <= 0.0 || y.probability <= 0.0)
                                   continue;
                                 worst = std::max(worst, trace_distance(x.state, y.state));
                               }
                             return worst;
                           }});
        } else {
          tasks.push_back({"appendix_consistency", where, [=, &quad] {
                             return appendix_consistency(a, loss.t(), quad, TransferMap(type, a, loss, BackendChoice{}));
                           }});
        }
        if (fock) {
          tasks.push_back({"backend_equivalence", where, [=, &quad] {
                             const TransferMap c(type, a, loss, BackendChoice::coherent_algebra());
                             const TransferMap f(type, a, loss, BackendChoice::truncated_fock());
                             const auto ac = sphere_averages(c, quad);
                             const auto af = sphere_averages(f, quad);
                             return std::max({max_transfer_difference(c, f), std::abs(ac.fidelity - af.fidelity),
                                              std::abs(ac.success - af.success)});
                           }});
        }
      }
    }

  CrossvalReport report;
  report.checks.resize(tasks.size());
  parallel_for(tasks.size(), config.threads, [&](std::size_t i) {
    double dev = 0.0;
    try {
      dev = tasks[i].run();
    } catch (...) {
      rethrow_at(tasks[i].name + " " + tasks[i].where);
    }
    const bool ok = std::isfinite(dev) && dev <= config.tolerance;
    report.checks[i] = {tasks[i].name, tasks[i].where, dev, config.tolerance, ok};
  });
  return report;
}

std::string to_text(const CrossvalReport& report) {
  std::ostringstream os;
  for (const auto& c : report.checks) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e (tol %.1e)", c.deviation, c.tolerance);
    os << (c.passed ? "PASS " : "FAIL ") << c.name << " [" << c.where << "] deviation " << buf << "\n";
  }
  os << (report.passed() ? "all checks passed" : "some checks FAILED") << "\n";
  return os.str();
}

std::string to_json(const CrossvalReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json j{{"name", c.name},
                     {"where", c.where},
                     {"deviation", c.deviation},
                     {"tolerance", c.tolerance},
                     {"passed", c.passed}};
    if (!c.passed) failures.push_back(j);
    checks.push_back(std::move(j));
  }
  return nlohmann::json{{"passed", report.passed()},
                        {"max_deviation", report.max_deviation()},
                        {"checks", checks},
                        {"failures", failures}}
             .dump(2) +
         "\n";
}

}  // namespace hybridtele
