#include "hybridtele/teleport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hybridtele {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw ContractViolation("quadrature needs at least one node");
  // Golub-Welsch: eigen-decomposition of the Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    j(k, k - 1) = b;
    j(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    weights[i] = 2.0 * v0 * v0;
  }
}

SphereQuadrature::SphereQuadrature(int n_u, int n_v) : n_u_(n_u), n_v_(n_v) {
  if (n_u < 1 || n_v < 1) throw ContractViolation("quadrature sizes must be positive");
  std::vector<double> x, w;
  gauss_legendre(n_u, x, w);
  nodes_.reserve(static_cast<std::size_t>(n_u) * n_v);
  for (int i = 0; i < n_u; ++i) {
    const double u = std::acos(std::clamp(x[i], -1.0, 1.0));
    for (int k = 0; k < n_v; ++k)
      nodes_.push_back({u, 2.0 * std::numbers::pi * k / n_v, w[i] / (2.0 * n_v)});
  }
}

// ---------------------------------------------------------------------------

namespace {

TermSum apply_beam_splitters(HybridType type, const TermSum& s) {
  TermSum out = s;
  for (std::size_t k = 0; k < qubit_modes(type, 'a').photonic.size(); ++k)
    out = apply_beam_splitter(out, qubit_modes(type, 'b').photonic[k], qubit_modes(type, 'a').photonic[k]);
  return apply_beam_splitter(out, "A", "B");
}

}  // namespace

TermSum damped_channel(HybridType type, double alpha, const LossParameter& loss, const BackendChoice& backend) {
  const KetSum ideal = to_backend(ideal_channel(type, alpha), backend);
  std::vector<std::string> modes;
  for (const auto& m : ideal.layout().modes()) modes.push_back(m.name);
  return damp_modes(TermSum::projector(ideal), modes, loss);
}

std::vector<TermSum> conditional_states(HybridType type, const TermSum& input, const TermSum& channel,
                                        const std::vector<OutcomeLabel>& labels) {
  const TermSum full = apply_beam_splitters(type, input.tensor(channel));
  const auto keep = qubit_modes(type, 'c').all();
  std::vector<TermSum> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(project_and_trace(full, joint_projector(type, l), keep));
  return out;
}

TeleportReport teleport_once(HybridType type, double alpha, const LossParameter& loss, const BlochAngles& angles,
                             const BackendChoice& backend) {
  const DynamicBasis basis(alpha, loss);
  const KetSum phi_a = to_backend(input_state(type, angles, basis, 'a'), backend);
  const KetSum phi_c = to_backend(input_state(type, angles, basis, 'c'), backend);
  const auto labels = enumerate_outcomes(type);
  const auto states =
      conditional_states(type, TermSum::projector(phi_a), damped_channel(type, alpha, loss, backend), labels);

  TeleportReport rep;
  rep.type = type;
  rep.alpha = alpha;
  rep.loss = loss;
  rep.angles = angles;
  rep.backend = backend.kind;
  double weighted = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    OutcomeEntry e;
    e.label = labels[i];
    e.correction = correction_lookup(type, labels[i]);
    TermSum s = states[i];
    if (e.correction) {
      const auto map = correction_map(type, *e.correction);
      e.relabel = map.relabel;
      s = apply_correction(map, s, 'c');
    }
    e.probability = s.trace().real();
    if (e.probability > 0.0) {
      const double unnormalized = expectation(s, phi_c).real();
      e.state = s.scaled(1.0 / e.probability);
      e.fidelity = unnormalized / e.probability;
      if (e.correction) weighted += unnormalized;
    } else {
      e.state = s;
    }
    rep.total_probability += e.probability;
    if (e.correction) rep.success_probability += e.probability;
    rep.outcomes.push_back(std::move(e));
  }
  rep.conditional_fidelity = rep.success_probability > 0.0 ? weighted / rep.success_probability : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------

double TransferOutcome::probability(const BlochAngles& angles) const {
  const auto c = angles.amplitudes();
  cplx p = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) p += c[x] * std::conj(c[y]) * trace[x][y];
  return p.real();
}

double TransferOutcome::fidelity_weight(const BlochAngles& angles) const {
  const auto c = angles.amplitudes();
  cplx f = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const cplx cxy = c[x] * std::conj(c[y]);
      for (int xp = 0; xp < 2; ++xp)
        for (int yp = 0; yp < 2; ++yp) f += cxy * std::conj(c[xp]) * c[yp] * overlap[x][y][xp][yp];
    }
  return f.real();
}

TermSum TransferOutcome::state(const BlochAngles& angles) const {
  const auto c = angles.amplitudes();
  TermSum out(bob[0][0].layout());
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) out = out + bob[x][y].scaled(c[x] * std::conj(c[y]));
  return out.canonicalized();
}

TransferMap::TransferMap(HybridType type, double alpha, const LossParameter& loss, const BackendChoice& backend)
    : type_(type), alpha_(alpha), loss_(loss), backend_(backend) {
  const DynamicBasis basis(alpha, loss);
  std::array<KetSum, 2> in, out;
  for (int x = 0; x < 2; ++x) {
    in[x] = to_backend(logical_ket(type, x, basis, 'a'), backend);
    out[x] = to_backend(logical_ket(type, x, basis, 'c'), backend);
  }
  const TermSum channel = damped_channel(type, alpha, loss, backend);
  const auto labels = enumerate_outcomes(type);
  outcomes_.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto& o = outcomes_[i];
    o.label = labels[i];
    o.correction = correction_lookup(type, labels[i]);
    if (o.correction) o.relabel = correction_map(type, *o.correction).relabel;
  }
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const auto states = conditional_states(type, TermSum::outer(in[x], in[y]), channel, labels);
      for (std::size_t i = 0; i < labels.size(); ++i) {
        auto& o = outcomes_[i];
        TermSum s = states[i];
        if (o.correction) s = apply_correction(correction_map(type, *o.correction), s, 'c');
        o.trace[x][y] = s.trace();
        for (int xp = 0; xp < 2; ++xp)
          for (int yp = 0; yp < 2; ++yp) o.overlap[x][y][xp][yp] = matrix_element(out[xp], s, out[yp]);
        o.bob[x][y] = std::move(s);
      }
    }
}

const TransferOutcome& TransferMap::outcome(const OutcomeLabel& label) const {
  for (const auto& o : outcomes_)
    if (o.label == label) return o;
  throw ContractViolation("outcome " + to_string(label) + " not in transfer map");
}

double TransferMap::total_probability(const BlochAngles& angles) const {
  double p = 0.0;
  for (const auto& o : outcomes_) p += o.probability(angles);
  return p;
}

double TransferMap::success_probability(const BlochAngles& angles) const {
  double p = 0.0;
  for (const auto& o : outcomes_)
    if (o.correction) p += o.probability(angles);
  return p;
}

double TransferMap::conditional_fidelity(const BlochAngles& angles) const {
  double p = 0.0, f = 0.0;
  for (const auto& o : outcomes_) {
    if (!o.correction) continue;
    p += o.probability(angles);
    f += o.fidelity_weight(angles);
  }
  return p > 0.0 ? f / p : 0.0;
}

SphereAverages sphere_averages(const TransferMap& map, const SphereQuadrature& quad) {
  SphereAverages a{0.0, 0.0};
  for (const auto& n : quad.nodes()) {
    const BlochAngles ang(n.u, n.v);
    a.fidelity += n.weight * map.conditional_fidelity(ang);
    a.success += n.weight * map.success_probability(ang);
  }
  return a;
}

double average_fidelity(HybridType type, double alpha, const LossParameter& loss, const SphereQuadrature& quad,
                        const BackendChoice& backend) {
  return sphere_averages(TransferMap(type, alpha, loss, backend), quad).fidelity;
}

double average_success(HybridType type, double alpha, const LossParameter& loss, const SphereQuadrature& quad,
                       const BackendChoice& backend) {
  return sphere_averages(TransferMap(type, alpha, loss, backend), quad).success;
}

}  // namespace hybridtele
