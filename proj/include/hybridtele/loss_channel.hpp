#pragma once

// Photon loss: the solution of the Born-Markov master equation with per-mode
// decay rate gamma over time tau, parameterized by t = exp(-gamma tau / 2).

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hybridtele/hybrid_types.hpp"
#include "hybridtele/state_engine.hpp"

namespace hybridtele {

class LossParameter {
 public:
  LossParameter() = default;  // lossless
  static LossParameter from_r(double r);
  static LossParameter from_t(double t);
  static LossParameter from_gamma_tau(double gamma_tau);

  double t() const { return t_; }
  double r() const { return r_; }
  bool lossless() const { return r_ == 0.0; }

 private:
  LossParameter(double t, double r) : t_(t), r_(r) {}
  double t_ = 1.0;
  double r_ = 0.0;
};

/// E_k = sum_n sqrt(C(n,k)) t^{n-k} r^k |n-k><n|, k = 0..cutoff.
std::vector<Eigen::MatrixXd> kraus_operators(int cutoff, const LossParameter& loss);

TermSum damp_mode(const TermSum& s, std::string_view mode, const LossParameter& loss);
TermSum damp_modes(const TermSum& s, const std::vector<std::string>& modes, const LossParameter& loss);

/// The damped channel state built from its closed form (slots b and c, every
/// mode damped by the same loss).
TermSum decohered_channel(HybridType type, double alpha, const LossParameter& loss);

}  // namespace hybridtele
