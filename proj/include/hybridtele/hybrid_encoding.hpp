#pragma once

// Hybrid qubits |0_L> = |+>|t alpha>, |1_L> = |-> |-t alpha> in the damped
// (dynamic) basis, the channel state, Bell families and logical corrections.

#include <array>
#include <string>
#include <vector>

#include "hybridtele/hybrid_types.hpp"
#include "hybridtele/loss_channel.hpp"
#include "hybridtele/state_engine.hpp"

namespace hybridtele {

struct BlochAngles {
  double u = 0.0;  // [0, pi]
  double v = 0.0;  // [0, 2pi)
  BlochAngles() = default;
  BlochAngles(double u_, double v_);
  cplx mu() const;
  cplx nu() const;
  /// (mu, nu)
  std::array<cplx, 2> amplitudes() const { return {mu(), nu()}; }
};

class DynamicBasis {
 public:
  DynamicBasis(double alpha, LossParameter loss);
  double alpha() const { return alpha_; }
  const LossParameter& loss() const { return loss_; }
  /// t * alpha
  double amplitude() const { return loss_.t() * alpha_; }

 private:
  double alpha_;
  LossParameter loss_;
};

/// (|H> + sign |V>)/sqrt2 (TypeI) or (|0> + sign |1>)/sqrt2 (TypeII) on the slot's photonic modes.
KetSum single_photon_ket(HybridType type, int sign, char slot, double alpha);
/// Vacuum on the slot's photonic modes.
KetSum photonic_vacuum(HybridType type, char slot, double alpha);

KetSum logical_ket(HybridType type, int bit, const DynamicBasis& basis, char slot = 'c');
KetSum input_state(HybridType type, const BlochAngles& angles, const DynamicBasis& basis, char slot = 'a');
/// (|0_L>_b |0_L>_c + |1_L>_b |1_L>_c)/sqrt2 at full amplitude alpha.
KetSum ideal_channel(HybridType type, double alpha);

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };
std::string to_string(BellKind kind);

/// Psi = (|01> +- |10>)/sqrt2, Phi = (|00> +- |11>)/sqrt2 over slots a, b, with
/// 0/1 read as H/V for TypeI.
KetSum photonic_bell(HybridType type, BellKind kind, double alpha);
/// N^{+-} (|g>|-g> +- |-g>|g>) and N^{+-} (|g>|g> +- |-g>|-g>) over modes A, B.
KetSum coherent_bell(BellKind kind, double amplitude, double alpha);
/// 1/sqrt(2 + 2 sign e^{-4 g^2})
double coherent_bell_normalization(int sign, double amplitude);

enum class Pauli { I, X, Z, XZ };
std::string to_string(Pauli p);

/// Logical correction acting on one qubit slot. X flips the photon-number
/// parity phase of the V mode (TypeI) or the single mode (TypeII) and of the
/// coherent mode. Z swaps H and V (TypeI) or the levels 0 and 1 (TypeII); for
/// TypeII it corresponds to classical relabeling, recorded in `relabel`.
/// XZ applies Z first.
struct CorrectionMap {
  HybridType type = HybridType::TypeI;
  Pauli pauli = Pauli::I;
  bool relabel = false;
};

CorrectionMap correction_map(HybridType type, Pauli pauli);
KetSum apply_correction(const CorrectionMap& map, const KetSum& s, char slot = 'c');
TermSum apply_correction(const CorrectionMap& map, const TermSum& s, char slot = 'c');

/// One branch of the lossless decomposition of |phi>_{aA}|Psi_ch>_{bBcC}:
/// coefficient (sign/4)/N^{+-} in front of photonic_bell x coherent_bell x pauli|phi>.
struct BellBranch {
  BellKind photonic;
  BellKind coherent;
  Pauli pauli;
  int sign;
};

const std::vector<BellBranch>& bell_branches();

/// || |phi>|Psi_ch> - sum over branches ||, lossless. The coherent Bell states
/// are not mutually orthogonal, so the expansion is compared as a whole rather
/// than projected pair by pair.
double bell_decomposition_check(HybridType type, double alpha, const BlochAngles& angles,
                                const BackendChoice& backend = BackendChoice::coherent_algebra());

}  // namespace hybridtele
