#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "hybridtele/hybrid_encoding.hpp"
#include "hybridtele/loss_channel.hpp"
#include "oracle.hpp"

using namespace hybridtele;
using std::numbers::pi;

namespace {

constexpr HybridType kTypes[] = {HybridType::TypeI, HybridType::TypeII};

double distance(const KetSum& a, const KetSum& b) { return (a - b.reordered(a.layout())).canonicalized().norm(); }

// Photonic logical levels of one slot: TypeII is a single mode (|0>, |1>), TypeI
// two modes (H, V) holding one photon.
oracle::Vec photonic_level(HybridType type, int bit) {
  if (type == HybridType::TypeII) return oracle::number(bit, 1);
  return bit == 0 ? oracle::kron(oracle::number(1, 1), oracle::number(0, 1))
                  : oracle::kron(oracle::number(0, 1), oracle::number(1, 1));
}

oracle::Vec plus_minus(HybridType type, int sign) {
  return (photonic_level(type, 0) + sign * photonic_level(type, 1)) / std::sqrt(2.0);
}

}  // namespace

TEST_CASE("logical kets", "[encoding]") {
  const DynamicBasis lossless(1.0, LossParameter{});
  const KetSum k0 = logical_ket(HybridType::TypeII, 0, lossless);
  const int nc = k0.layout()[1].cutoff;
  REQUIRE(k0.layout()[0].cutoff == 2);
  const oracle::Vec plus3 = (oracle::number(0, 2) + oracle::number(1, 2)) / std::sqrt(2.0);
  CHECK((to_dense(k0) - oracle::kron(plus3, oracle::coherent(1.0, nc))).norm() < 1e-12);

  for (auto type : kTypes)
    for (double r : {0.0, 0.5}) {
      const DynamicBasis basis(1.0, LossParameter::from_r(r));
      const KetSum a = logical_ket(type, 0, basis), b = logical_ket(type, 1, basis);
      CHECK(std::abs(a.norm() - 1.0) < 1e-12);
      CHECK(std::abs(b.norm() - 1.0) < 1e-12);
      CHECK(std::abs(a.inner(b)) < 1e-12);
      CHECK(basis.amplitude() == Catch::Approx(std::sqrt(1.0 - r * r)));
    }
}

TEST_CASE("input states", "[encoding]") {
  for (auto type : kTypes) {
    const DynamicBasis basis(2.0, LossParameter::from_r(0.3));
    CHECK(distance(input_state(type, {0.0, 1.3}, basis, 'c'), logical_ket(type, 0, basis)) < 1e-12);
    const KetSum south = input_state(type, {pi, 1.3}, basis, 'c');
    CHECK(std::abs(std::abs(south.inner(logical_ket(type, 1, basis))) - 1.0) < 1e-12);
    CHECK(std::abs(input_state(type, {pi / 3, pi / 4}, basis).norm() - 1.0) < 1e-12);
  }
  const BlochAngles a(pi / 3, pi / 4);
  CHECK(std::norm(a.mu()) + std::norm(a.nu()) == Catch::Approx(1.0));
  CHECK_THROWS_AS(BlochAngles(-0.1, 0.0), ContractViolation);
}

TEST_CASE("ideal channel", "[encoding]") {
  for (auto type : kTypes) {
    const KetSum ch = ideal_channel(type, 1.0);
    CHECK(std::abs(ch.norm() - 1.0) < 1e-12);
    const TermSum red = partial_trace(TermSum::projector(ch), qubit_modes(type, 'c').all());
    const DynamicBasis basis(1.0, LossParameter{});
    Eigen::Matrix2cd m;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = matrix_element(logical_ket(type, i, basis), red, logical_ket(type, j, basis));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
    CHECK(std::abs(es.eigenvalues()[0] - 0.5) < 1e-10);
    CHECK(std::abs(es.eigenvalues()[1] - 0.5) < 1e-10);
  }
}

TEST_CASE("Bell families", "[encoding]") {
  constexpr BellKind kinds[] = {BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus};
  for (auto type : kTypes)
    for (auto k : kinds) CHECK(std::abs(photonic_bell(type, k, 1.0).norm() - 1.0) < 1e-12);

  for (double g : {0.5, 1.0, 0.7 * 2.0}) {
    for (auto k : kinds) CHECK(std::abs(coherent_bell(k, g, 2.0).norm() - 1.0) < 1e-10);
    const auto pp = coherent_bell(BellKind::PhiPlus, g, 2.0), pm = coherent_bell(BellKind::PhiMinus, g, 2.0),
               sp = coherent_bell(BellKind::PsiPlus, g, 2.0), sm = coherent_bell(BellKind::PsiMinus, g, 2.0);
    CHECK(std::abs(pp.inner(pm)) < 1e-10);
    CHECK(std::abs(sp.inner(sm)) < 1e-10);
    CHECK(std::abs(pm.inner(sp)) < 1e-10);
    CHECK(std::abs(pm.inner(sm)) < 1e-10);
    CHECK(std::abs(pp.inner(sm)) < 1e-10);

    // Phi+ and Psi+ overlap through <g|-g> = e^{-2g^2}; dense oracle
    const int n = 30;
    const double np = 1.0 / std::sqrt(2.0 + 2.0 * std::exp(-4.0 * g * g));
    const oracle::Vec cg = oracle::coherent(g, n), cm = oracle::coherent(-g, n);
    const oracle::Vec phi = np * (oracle::kron(cg, cg) + oracle::kron(cm, cm));
    const oracle::Vec psi = np * (oracle::kron(cg, cm) + oracle::kron(cm, cg));
    CHECK(std::abs(pp.inner(sp) - phi.dot(psi)) < 1e-10);
    CHECK(std::abs(pp.inner(sp)) > 1e-3);
  }
}

TEST_CASE("Bell decomposition of the lossless product state", "[encoding]") {
  const double us[] = {0.0, pi / 2, 2 * pi / 3};
  const double vs[] = {0.0, pi / 5, 4.0};
  for (auto type : kTypes)
    for (double alpha : {0.5, 1.0, 2.0})
      for (double u : us)
        for (double v : vs) CHECK(bell_decomposition_check(type, alpha, {u, v}) < 1e-8);
  CHECK(bell_decomposition_check(HybridType::TypeI, 1.0, {pi / 2, 0.0}) < 1e-8);
  CHECK(bell_decomposition_check(HybridType::TypeII, 2.0, {pi / 3, pi / 5}) < 1e-8);
}

TEST_CASE("Bell decomposition against a dense expansion", "[encoding]") {
  // Written out from the decomposition: 1/4 sum over branches of
  // sign / N * |P>_ab |C>_AB  pauli|phi>_cC, with Paulis in the logical basis.
  const double alpha = 1.0;
  const int n = 13;
  const BlochAngles ang(1.1, 0.4);
  const cplx mu = ang.mu(), nu = ang.nu();
  const oracle::Vec cg = oracle::coherent(alpha, n), cm = oracle::coherent(-alpha, n);
  const double np = 1.0 / std::sqrt(2.0 + 2.0 * std::exp(-4.0 * alpha * alpha));
  const double nm = 1.0 / std::sqrt(2.0 - 2.0 * std::exp(-4.0 * alpha * alpha));

  for (auto type : kTypes) {
    const oracle::Vec p0 = photonic_level(type, 0), p1 = photonic_level(type, 1);
    const oracle::Vec l0 = oracle::kron(plus_minus(type, 1), cg), l1 = oracle::kron(plus_minus(type, -1), cm);
    const oracle::Vec phi = mu * l0 + nu * l1;
    const oracle::Vec z_phi = mu * l0 - nu * l1, x_phi = mu * l1 + nu * l0, xz_phi = mu * l1 - nu * l0;

    // photonic Bell kets on (a, b) and coherent ones on (A, B), kept as product pairs
    using Pair = std::vector<std::pair<oracle::Vec, oracle::Vec>>;
    const double s2 = 1.0 / std::sqrt(2.0);
    const Pair phi_p_plus{{s2 * p0, p0}, {s2 * p1, p1}}, phi_p_minus{{s2 * p0, p0}, {-s2 * p1, p1}};
    const Pair psi_p_plus{{s2 * p0, p1}, {s2 * p1, p0}}, psi_p_minus{{s2 * p0, p1}, {-s2 * p1, p0}};
    const Pair phi_c_plus{{np * cg, cg}, {np * cm, cm}}, phi_c_minus{{nm * cg, cg}, {-nm * cm, cm}};
    const Pair psi_c_plus{{np * cg, cm}, {np * cm, cg}}, psi_c_minus{{nm * cg, cm}, {-nm * cm, cg}};

    auto piece = [&](const Pair& p, const Pair& c, const oracle::Vec& bob, double coeff) {
      oracle::Vec out = oracle::Vec::Zero(p0.size() * p0.size() * (n + 1) * (n + 1) * bob.size());
      for (const auto& [pa, pb] : p)
        for (const auto& [ca, cb] : c) out += coeff * oracle::kron({pa, ca, pb, cb, bob});
      return out;
    };
    oracle::Vec expansion = 0.25 * (piece(phi_p_plus, phi_c_plus, phi, 1 / np) + piece(psi_p_plus, phi_c_minus, phi, 1 / nm) +
                                    piece(phi_p_plus, phi_c_minus, z_phi, 1 / nm) + piece(psi_p_plus, phi_c_plus, z_phi, 1 / np) +
                                    piece(phi_p_minus, psi_c_plus, x_phi, 1 / np) - piece(psi_p_minus, psi_c_minus, x_phi, 1 / nm) +
                                    piece(phi_p_minus, psi_c_minus, xz_phi, 1 / nm) - piece(psi_p_minus, psi_c_plus, xz_phi, 1 / np));
    const oracle::Vec channel = (oracle::kron(l0, l0) + oracle::kron(l1, l1)) / std::sqrt(2.0);
    const oracle::Vec total = oracle::kron(phi, channel);
    CHECK((total - expansion).norm() < 1e-8);
  }

  // the library's branch table is the same expansion
  const auto& br = bell_branches();
  REQUIRE(br.size() == 8);
  auto has = [&](BellKind p, BellKind c, Pauli x, int sign) {
    for (const auto& b : br)
      if (b.photonic == p && b.coherent == c && b.pauli == x && b.sign == sign) return true;
    return false;
  };
  using B = BellKind;
  CHECK(has(B::PhiPlus, B::PhiPlus, Pauli::I, 1));
  CHECK(has(B::PsiPlus, B::PhiMinus, Pauli::I, 1));
  CHECK(has(B::PhiPlus, B::PhiMinus, Pauli::Z, 1));
  CHECK(has(B::PsiPlus, B::PhiPlus, Pauli::Z, 1));
  CHECK(has(B::PhiMinus, B::PsiPlus, Pauli::X, 1));
  CHECK(has(B::PsiMinus, B::PsiMinus, Pauli::X, -1));
  CHECK(has(B::PhiMinus, B::PsiMinus, Pauli::XZ, 1));
  CHECK(has(B::PsiMinus, B::PsiPlus, Pauli::XZ, -1));
}

TEST_CASE("library Bell kets match the dense forms", "[encoding]") {
  const double g = 1.0;
  const KetSum c = coherent_bell(BellKind::PsiMinus, g, g);
  const int n = c.layout()[0].cutoff;
  const double nm = 1.0 / std::sqrt(2.0 - 2.0 * std::exp(-4.0 * g * g));
  const oracle::Vec ref = nm * (oracle::kron(oracle::coherent(g, n), oracle::coherent(-g, n)) -
                                oracle::kron(oracle::coherent(-g, n), oracle::coherent(g, n)));
  CHECK((to_dense(c) - ref).norm() < 1e-10);

  // TypeI Psi+ = (|HV> + |VH>)/sqrt2 over a_H a_V b_H b_V, photonic cutoff 2
  const CVector p = to_dense(photonic_bell(HybridType::TypeI, BellKind::PsiPlus, 1.0));
  auto idx = [](int ah, int av, int bh, int bv) { return ((ah * 3 + av) * 3 + bh) * 3 + bv; };
  CHECK(std::abs(p[idx(1, 0, 0, 1)] - 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(p[idx(0, 1, 1, 0)] - 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(p.norm() - 1.0) < 1e-14);
}

TEST_CASE("logical corrections", "[encoding]") {
  for (auto type : kTypes)
    for (double r : {0.0, 0.4}) {
      const DynamicBasis basis(1.0, LossParameter::from_r(r));
      const KetSum k0 = logical_ket(type, 0, basis), k1 = logical_ket(type, 1, basis);
      const auto X = correction_map(type, Pauli::X), Z = correction_map(type, Pauli::Z),
                 XZ = correction_map(type, Pauli::XZ);
      CHECK(distance(apply_correction(X, k0), k1) < 1e-12);
      CHECK(distance(apply_correction(X, k1), k0) < 1e-12);

      const BlochAngles ang(0.9, 2.2);
      const KetSum phi = input_state(type, ang, basis, 'c');
      const KetSum zphi = k0.scaled(ang.mu()) - k1.scaled(ang.nu());
      CHECK(distance(apply_correction(Z, phi), zphi) < 1e-12);
      CHECK(distance(apply_correction(X, apply_correction(X, phi)), phi) < 1e-12);
      CHECK(distance(apply_correction(Z, apply_correction(Z, phi)), phi) < 1e-12);
      CHECK(distance(apply_correction(XZ, phi), apply_correction(X, apply_correction(Z, phi))) < 1e-12);
      CHECK(distance(apply_correction(correction_map(type, Pauli::I), phi), phi) < 1e-14);
    }
  CHECK(correction_map(HybridType::TypeII, Pauli::Z).relabel);
  CHECK(correction_map(HybridType::TypeII, Pauli::XZ).relabel);
  CHECK_FALSE(correction_map(HybridType::TypeII, Pauli::X).relabel);
  CHECK_FALSE(correction_map(HybridType::TypeI, Pauli::Z).relabel);
}

TEST_CASE("TypeI corrections on the vacuum-leakage component", "[encoding]") {
  const double g = 0.8;
  const KetSum leak = photonic_vacuum(HybridType::TypeI, 'c', 1.0).tensor([&] {
    KetSum c(ModeLayout({{"C", coherent_cutoff(1.0), ModeRole::Coherent}}));
    c.add_term(1.0, {LocalKet::coherent(g)});
    return c;
  }());
  const KetSum flipped = photonic_vacuum(HybridType::TypeI, 'c', 1.0).tensor([&] {
    KetSum c(ModeLayout({{"C", coherent_cutoff(1.0), ModeRole::Coherent}}));
    c.add_term(1.0, {LocalKet::coherent(-g)});
    return c;
  }());
  CHECK(distance(apply_correction(correction_map(HybridType::TypeI, Pauli::X), leak), flipped) < 1e-12);
  CHECK(distance(apply_correction(correction_map(HybridType::TypeI, Pauli::Z), leak), leak) < 1e-12);
}
