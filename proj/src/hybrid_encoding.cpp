#include "hybridtele/hybrid_encoding.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

namespace hybridtele {

std::string to_string(HybridType type) { return type == HybridType::TypeI ? "I" : "II"; }

HybridType parse_hybrid_type(std::string_view text) {
  if (text == "I" || text == "1" || text == "TypeI") return HybridType::TypeI;
  if (text == "II" || text == "2" || text == "TypeII") return HybridType::TypeII;
  throw ContractViolation("unknown hybrid type '" + std::string(text) + "'");
}

std::vector<std::string> QubitModes::all() const {
  auto out = photonic;
  out.push_back(coherent);
  return out;
}

QubitModes qubit_modes(HybridType type, char slot) {
  if (slot != 'a' && slot != 'b' && slot != 'c') throw ContractViolation("qubit slot must be a, b or c");
  const std::string s(1, slot);
  QubitModes q;
  if (type == HybridType::TypeI) {
    q.photonic = {s + "_H", s + "_V"};
  } else {
    q.photonic = {s};
  }
  q.coherent = std::string(1, static_cast<char>(std::toupper(slot)));
  return q;
}

int coherent_cutoff(double alpha) { return default_cutoff(std::sqrt(2.0) * alpha); }

ModeLayout qubit_layout(HybridType type, char slot, double alpha) {
  const auto q = qubit_modes(type, slot);
  std::vector<ModeSpec> modes;
  for (const auto& p : q.photonic) modes.push_back({p, kPhotonicCutoff, ModeRole::Photonic});
  modes.push_back({q.coherent, coherent_cutoff(alpha), ModeRole::Coherent});
  return ModeLayout(std::move(modes));
}

ModeLayout protocol_layout(HybridType type, double alpha, std::string_view slots) {
  ModeLayout out;
  for (char s : slots) out = out.concat(qubit_layout(type, s, alpha));
  return out;
}

// ---------------------------------------------------------------------------

BlochAngles::BlochAngles(double u_, double v_) : u(u_), v(v_) {
  if (!(u >= 0.0 && u <= std::numbers::pi)) throw ContractViolation("u must lie in [0, pi]");
  if (!std::isfinite(v)) throw ContractViolation("v must be finite");
}

cplx BlochAngles::mu() const { return std::cos(0.5 * u); }
cplx BlochAngles::nu() const { return std::polar(std::sin(0.5 * u), v); }

DynamicBasis::DynamicBasis(double alpha, LossParameter loss) : alpha_(alpha), loss_(loss) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ContractViolation("alpha must be positive");
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

ModeLayout photonic_layout(HybridType type, std::string_view slots) {
  std::vector<ModeSpec> modes;
  for (char s : slots)
    for (const auto& p : qubit_modes(type, s).photonic) modes.push_back({p, kPhotonicCutoff, ModeRole::Photonic});
  return ModeLayout(std::move(modes));
}

// |n0, n1> on a dual-rail pair, or |n> on a single mode; `bit` selects the
// occupied rail (TypeI) or the photon number (TypeII).
std::vector<LocalKet> photonic_basis_kets(HybridType type, int bit) {
  if (type == HybridType::TypeI)
    return bit == 0 ? std::vector{LocalKet::number(1), LocalKet::number(0)}
                    : std::vector{LocalKet::number(0), LocalKet::number(1)};
  return {LocalKet::number(bit)};
}

KetSum coherent_ket(const std::string& mode, cplx amplitude, int cutoff) {
  return KetSum(ModeLayout({{mode, cutoff, ModeRole::Coherent}}), {{1.0, {LocalKet::coherent(amplitude)}}});
}

}  // namespace

KetSum single_photon_ket(HybridType type, int sign, char slot, double) {
  const std::string s(1, slot);
  KetSum out(photonic_layout(type, s));
  out.add_term(kInvSqrt2, photonic_basis_kets(type, 0));
  out.add_term(sign * kInvSqrt2, photonic_basis_kets(type, 1));
  return out;
}

KetSum photonic_vacuum(HybridType type, char slot, double) {
  const auto layout = photonic_layout(type, std::string(1, slot));
  return KetSum(layout, {{1.0, std::vector<LocalKet>(layout.size(), LocalKet::vacuum())}});
}

KetSum logical_ket(HybridType type, int bit, const DynamicBasis& basis, char slot) {
  if (bit != 0 && bit != 1) throw ContractViolation("logical bit must be 0 or 1");
  const int sign = bit == 0 ? 1 : -1;
  const auto q = qubit_modes(type, slot);
  return single_photon_ket(type, sign, slot, basis.alpha())
      .tensor(coherent_ket(q.coherent, sign * basis.amplitude(), coherent_cutoff(basis.alpha())));
}

KetSum input_state(HybridType type, const BlochAngles& angles, const DynamicBasis& basis, char slot) {
  return (logical_ket(type, 0, basis, slot).scaled(angles.mu()) + logical_ket(type, 1, basis, slot).scaled(angles.nu()))
      .canonicalized();
}

KetSum ideal_channel(HybridType type, double alpha) {
  const DynamicBasis basis(alpha, LossParameter{});
  KetSum out = logical_ket(type, 0, basis, 'b').tensor(logical_ket(type, 0, basis, 'c')) +
               logical_ket(type, 1, basis, 'b').tensor(logical_ket(type, 1, basis, 'c'));
  return out.scaled(kInvSqrt2).canonicalized();
}

std::string to_string(BellKind kind) {
  switch (kind) {
    case BellKind::PhiPlus:
      return "Phi+";
    case BellKind::PhiMinus:
      return "Phi-";
    case BellKind::PsiPlus:
      return "Psi+";
    case BellKind::PsiMinus:
      return "Psi-";
  }
  return "?";
}

namespace {

int bell_sign(BellKind k) { return k == BellKind::PhiPlus || k == BellKind::PsiPlus ? 1 : -1; }
bool is_psi(BellKind k) { return k == BellKind::PsiPlus || k == BellKind::PsiMinus; }

}  // namespace

KetSum photonic_bell(HybridType type, BellKind kind, double) {
  KetSum out(photonic_layout(type, "ab"));
  const int flip = is_psi(kind) ? 1 : 0;
  for (int x = 0; x < 2; ++x) {
    auto kets = photonic_basis_kets(type, x);
    const auto kb = photonic_basis_kets(type, x ^ flip);
    kets.insert(kets.end(), kb.begin(), kb.end());
    out.add_term((x == 0 ? 1.0 : bell_sign(kind)) * kInvSqrt2, std::move(kets));
  }
  return out;
}

double coherent_bell_normalization(int sign, double amplitude) {
  return 1.0 / std::sqrt(2.0 + 2.0 * sign * std::exp(-4.0 * amplitude * amplitude));
}

KetSum coherent_bell(BellKind kind, double amplitude, double alpha) {
  const int cut = coherent_cutoff(alpha);
  KetSum out(ModeLayout({{"A", cut, ModeRole::Coherent}, {"B", cut, ModeRole::Coherent}}));
  const double n = coherent_bell_normalization(bell_sign(kind), amplitude);
  const double g = amplitude;
  const double second = is_psi(kind) ? -g : g;
  out.add_term(n, {LocalKet::coherent(g), LocalKet::coherent(second)});
  out.add_term(bell_sign(kind) * n, {LocalKet::coherent(-g), LocalKet::coherent(-second)});
  return out;
}

std::string to_string(Pauli p) {
  switch (p) {
    case Pauli::I:
      return "I";
    case Pauli::X:
      return "X";
    case Pauli::Z:
      return "Z";
    case Pauli::XZ:
      return "XZ";
  }
  return "?";
}

CorrectionMap correction_map(HybridType type, Pauli pauli) {
  const bool has_z = pauli == Pauli::Z || pauli == Pauli::XZ;
  return {type, pauli, type == HybridType::TypeII && has_z};
}

namespace {

// e^{i pi n}
LocalKet parity_phase(const LocalKet& k) {
  if (k.is_coherent()) return LocalKet::coherent(-k.amplitude(), k.filter());
  auto a = k.amplitudes();
  for (std::size_t n = 1; n < a.size(); n += 2) a[n] = -a[n];
  return LocalKet::fock(std::move(a));
}

LocalKet swap_levels01(const LocalKet& k) {
  auto a = k.amplitudes();
  if (a.size() < 2) a.resize(2, 0.0);
  std::swap(a[0], a[1]);
  return LocalKet::fock(std::move(a));
}

struct SlotIndices {
  std::vector<std::size_t> photonic;
  std::size_t coherent;
};

SlotIndices slot_indices(const ModeLayout& layout, HybridType type, char slot) {
  const auto q = qubit_modes(type, slot);
  SlotIndices s{{}, layout.index_of(q.coherent)};
  for (const auto& p : q.photonic) s.photonic.push_back(layout.index_of(p));
  return s;
}

void correct_kets(const CorrectionMap& map, const SlotIndices& idx, std::vector<LocalKet>& kets) {
  const bool z = map.pauli == Pauli::Z || map.pauli == Pauli::XZ;
  const bool x = map.pauli == Pauli::X || map.pauli == Pauli::XZ;
  if (z) {
    if (map.type == HybridType::TypeI) {
      std::swap(kets[idx.photonic[0]], kets[idx.photonic[1]]);
    } else {
      kets[idx.photonic[0]] = swap_levels01(kets[idx.photonic[0]]);
    }
  }
  if (x) {
    const std::size_t flipped = map.type == HybridType::TypeI ? idx.photonic[1] : idx.photonic[0];
    kets[flipped] = parity_phase(kets[flipped]);
    kets[idx.coherent] = parity_phase(kets[idx.coherent]);
  }
}

}  // namespace

KetSum apply_correction(const CorrectionMap& map, const KetSum& s, char slot) {
  if (map.pauli == Pauli::I) return s;
  const auto idx = slot_indices(s.layout(), map.type, slot);
  KetSum out(s.layout());
  for (const auto& t : s.terms()) {
    auto k = t.kets;
    correct_kets(map, idx, k);
    out.add_term(t.coeff, std::move(k));
  }
  return out.canonicalized();
}

TermSum apply_correction(const CorrectionMap& map, const TermSum& s, char slot) {
  if (map.pauli == Pauli::I) return s;
  const auto idx = slot_indices(s.layout(), map.type, slot);
  TermSum out(s.layout());
  for (const auto& t : s.terms()) {
    auto l = t.left;
    auto r = t.right;
    correct_kets(map, idx, l);
    correct_kets(map, idx, r);
    out.add_term(t.coeff, std::move(l), std::move(r));
  }
  return out.canonicalized();
}

const std::vector<BellBranch>& bell_branches() {
  using B = BellKind;
  static const std::vector<BellBranch> branches = {
      {B::PhiPlus, B::PhiPlus, Pauli::I, 1},    {B::PsiPlus, B::PhiMinus, Pauli::I, 1},
      {B::PhiPlus, B::PhiMinus, Pauli::Z, 1},   {B::PsiPlus, B::PhiPlus, Pauli::Z, 1},
      {B::PhiMinus, B::PsiPlus, Pauli::X, 1},   {B::PsiMinus, B::PsiMinus, Pauli::X, -1},
      {B::PhiMinus, B::PsiMinus, Pauli::XZ, 1}, {B::PsiMinus, B::PsiPlus, Pauli::XZ, -1},
  };
  return branches;
}

double bell_decomposition_check(HybridType type, double alpha, const BlochAngles& angles,
                                const BackendChoice& backend) {
  const DynamicBasis basis(alpha, LossParameter{});
  const KetSum phi_a = input_state(type, angles, basis, 'a');
  const KetSum phi_c = input_state(type, angles, basis, 'c');
  const KetSum total = phi_a.tensor(ideal_channel(type, alpha));
  // The coherent Bell states are not orthogonal, so rebuild the expansion and compare states.
  KetSum expansion(total.layout());
  for (const auto& br : bell_branches()) {
    const double n = coherent_bell_normalization(bell_sign(br.coherent), alpha);
    const CorrectionMap m{type, br.pauli, false};
    const KetSum piece = photonic_bell(type, br.photonic, alpha)
                             .tensor(coherent_bell(br.coherent, alpha, alpha))
                             .tensor(apply_correction(m, phi_c, 'c'));
    expansion = expansion + piece.scaled(0.25 * br.sign / n).reordered(total.layout());
  }
  return (to_backend(total, backend) - to_backend(expansion, backend)).canonicalized().norm();
}

}  // namespace hybridtele
