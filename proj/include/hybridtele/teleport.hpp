#pragma once

// End-to-end teleportation from first principles: input (x) damped channel,
// beam splitters on (b, a) and (A, B), joint measurement, trace over Alice's
// modes, correction on Bob's slot c.

#include <array>
#include <optional>
#include <vector>

#include "hybridtele/bell_measurement.hpp"
#include "hybridtele/hybrid_encoding.hpp"
#include "hybridtele/loss_channel.hpp"
#include "hybridtele/state_engine.hpp"

namespace hybridtele {

struct SphereNode {
  double u;
  double v;
  double weight;  // includes the 1/(4 pi) normalization
};

/// Gauss-Legendre in cos u times a periodic trapezoid in v.
class SphereQuadrature {
 public:
  explicit SphereQuadrature(int n_u = 32, int n_v = 64);
  int n_u() const { return n_u_; }
  int n_v() const { return n_v_; }
  const std::vector<SphereNode>& nodes() const { return nodes_; }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (const auto& n : nodes_) sum += n.weight * f(BlochAngles(n.u, n.v));
    return sum;
  }

 private:
  int n_u_;
  int n_v_;
  std::vector<SphereNode> nodes_;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct OutcomeEntry {
  OutcomeLabel label;
  std::optional<Pauli> correction;  // nullopt: failure
  bool relabel = false;
  double probability = 0.0;  // Tr of the unnormalized conditional state
  TermSum state;             // normalized, corrected (unnormalized when probability is 0)
  double fidelity = 0.0;     // <phi|state|phi>
};

struct TeleportReport {
  HybridType type = HybridType::TypeI;
  double alpha = 0.0;
  LossParameter loss;
  BlochAngles angles;
  Backend backend = Backend::CoherentAlgebra;
  std::vector<OutcomeEntry> outcomes;  // s-outcome major
  double total_probability = 0.0;
  double success_probability = 0.0;
  double conditional_fidelity = 0.0;
};

TeleportReport teleport_once(HybridType type, double alpha, const LossParameter& loss, const BlochAngles& angles,
                             const BackendChoice& backend = BackendChoice::coherent_algebra());

/// Bob's corrected conditional operators for the four logical inputs
/// |x_L><y_L|; any input follows by linearity.
struct TransferOutcome {
  OutcomeLabel label;
  std::optional<Pauli> correction;
  bool relabel = false;
  std::array<std::array<TermSum, 2>, 2> bob;
  std::array<std::array<cplx, 2>, 2> trace{};
  // overlap[x][y][x'][y'] = <x'_L| R_xy |y'_L>
  std::array<std::array<std::array<std::array<cplx, 2>, 2>, 2>, 2> overlap{};

  double probability(const BlochAngles& angles) const;
  /// <phi| R |phi> for the unnormalized conditional state R
  double fidelity_weight(const BlochAngles& angles) const;
  TermSum state(const BlochAngles& angles) const;
};

class TransferMap {
 public:
  TransferMap(HybridType type, double alpha, const LossParameter& loss, const BackendChoice& backend);

  HybridType type() const { return type_; }
  double alpha() const { return alpha_; }
  const LossParameter& loss() const { return loss_; }
  const BackendChoice& backend() const { return backend_; }
  const std::vector<TransferOutcome>& outcomes() const { return outcomes_; }
  const TransferOutcome& outcome(const OutcomeLabel& label) const;

  double total_probability(const BlochAngles& angles) const;
  double success_probability(const BlochAngles& angles) const;
  /// sum_success <phi|R|phi> / sum_success Tr R
  double conditional_fidelity(const BlochAngles& angles) const;

 private:
  HybridType type_;
  double alpha_;
  LossParameter loss_;
  BackendChoice backend_;
  std::vector<TransferOutcome> outcomes_;
};

struct SphereAverages {
  double fidelity;
  double success;
};

SphereAverages sphere_averages(const TransferMap& map, const SphereQuadrature& quad);

double average_fidelity(HybridType type, double alpha, const LossParameter& loss, const SphereQuadrature& quad,
                        const BackendChoice& backend = BackendChoice::coherent_algebra());
double average_success(HybridType type, double alpha, const LossParameter& loss, const SphereQuadrature& quad,
                       const BackendChoice& backend = BackendChoice::coherent_algebra());

/// The channel obtained by damping every mode of the ideal channel.
TermSum damped_channel(HybridType type, double alpha, const LossParameter& loss,
                       const BackendChoice& backend = BackendChoice::coherent_algebra());

/// Uncorrected conditional operators on slot c for each label, given an input
/// operator on slot a and a channel on slots b, c.
std::vector<TermSum> conditional_states(HybridType type, const TermSum& input, const TermSum& channel,
                                        const std::vector<OutcomeLabel>& labels);

}  // namespace hybridtele
