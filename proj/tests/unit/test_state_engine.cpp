#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hybridtele/hybrid_encoding.hpp"
#include "hybridtele/state_engine.hpp"
#include "oracle.hpp"

using namespace hybridtele;
using Catch::Approx;

namespace {

ModeLayout two_modes(int cutoff, ModeRole role = ModeRole::Coherent) {
  return ModeLayout({{"i", cutoff, role}, {"j", cutoff, role}});
}

LocalKet fock_from(const oracle::Vec& v) { return LocalKet::fock(std::vector<cplx>(v.data(), v.data() + v.size())); }

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("coherent overlaps", "[state]") {
  const auto a = LocalKet::coherent(1.0), m = LocalKet::coherent(-1.0);
  CHECK(std::abs(inner(a, a) - 1.0) < 1e-14);

  // finite Fock sum of (-1)^n e^{-1}/n!
  double sum = 0.0, term = std::exp(-1.0);
  for (int n = 0; n <= 40; ++n) {
    sum += (n % 2 ? -term : term);
    term /= (n + 1);
  }
  CHECK(std::abs(inner(a, m) - sum) < 1e-12);
  CHECK(std::abs(inner(LocalKet::vacuum(), a) - oracle::coherent(1.0, 0)[0]) < 1e-14);
  CHECK(std::abs(inner(a, m) - 0.135335) < 1e-6);
}

TEST_CASE("backends agree on single-mode overlaps", "[state]") {
  const std::vector<cplx> amps{1.0, cplx(0.3, -1.2), -1.5, cplx(0.0, 2.0)};
  for (auto g : amps)
    for (auto d : amps) {
      const auto a = LocalKet::coherent(g), b = LocalKet::coherent(d);
      const cplx exact = overlap(a, b, BackendChoice::coherent_algebra(), 0);
      const cplx fock = overlap(a, b, BackendChoice::truncated_fock(), default_cutoff(2.0));
      const cplx ref = oracle::coherent(g, 60).dot(oracle::coherent(d, 60));
      CHECK(std::abs(exact - ref) < 1e-12);
      CHECK(std::abs(fock - ref) < 1e-8);
    }
}

TEST_CASE("truncation below tolerance raises", "[state]") {
  const auto a = LocalKet::coherent(3.0);
  CHECK_THROWS_AS(overlap(a, a, BackendChoice::truncated_fock(), 6), CutoffInsufficientError);
  CHECK_THROWS_AS(a.fock_amplitudes(6), CutoffInsufficientError);
  CHECK_NOTHROW(a.fock_amplitudes(default_cutoff(3.0)));
}

TEST_CASE("default cutoff rule", "[state]") {
  CHECK(default_cutoff(0.0) == 10);
  CHECK(default_cutoff(1.0) == 17);
  CHECK(default_cutoff(2.0) == 26);
  for (double g : {0.5, 1.0, 1.5, 2.0}) {
    const oracle::Vec v = oracle::coherent(g, default_cutoff(g));
    CHECK(1.0 - v.squaredNorm() < 1e-10);
  }
}

TEST_CASE("beam splitter on coherent pairs", "[state]") {
  const cplx a(0.7, 0.2), b(-0.4, 0.9);
  const int n = 16;
  KetSum s(two_modes(n));
  s.add_term(1.0, {LocalKet::coherent(a), LocalKet::coherent(b)});
  const KetSum out = apply_beam_splitter(s, "i", "j");
  REQUIRE(out.size() == 1);
  CHECK(out.terms()[0].kets[0].is_coherent());
  CHECK(std::abs(out.terms()[0].kets[0].amplitude() - (a + b) / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(out.terms()[0].kets[1].amplitude() - (b - a) / std::sqrt(2.0)) < 1e-14);

  // against the generator's matrix exponential
  const oracle::Vec ref = oracle::beam_splitter(n) * oracle::kron(oracle::coherent(a, n), oracle::coherent(b, n));
  const CVector got = to_dense(out);
  CHECK((got - ref).norm() < 1e-6);
}

TEST_CASE("beam splitter on Fock states", "[state]") {
  KetSum vac(two_modes(4, ModeRole::Photonic));
  vac.add_term(1.0, {LocalKet::vacuum(), LocalKet::vacuum()});
  const CVector v = to_dense(apply_beam_splitter(vac, "i", "j"));
  CHECK(std::abs(v[0] - 1.0) < 1e-14);
  CHECK(v.norm() == Approx(1.0));

  KetSum one(two_modes(4, ModeRole::Photonic));
  one.add_term(1.0, {LocalKet::number(1), LocalKet::vacuum()});
  const CVector got = to_dense(apply_beam_splitter(one, "i", "j"));
  const oracle::Vec ref = oracle::beam_splitter(4) * oracle::kron(oracle::number(1, 4), oracle::number(0, 4));
  CHECK((got - ref).norm() < 1e-12);
  // (|1,0> - |0,1>)/sqrt2: index 1*5+0 and 0*5+1
  CHECK(std::abs(got[5] - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(got[1] + 1.0 / std::sqrt(2.0)) < 1e-12);

  // random low-photon two-mode vector, entangled input
  std::mt19937 rng(7);
  const int c = 6;
  oracle::Vec x = oracle::Vec::Zero((c + 1) * (c + 1));
  oracle::Vec r = oracle::random_vector(16, rng);
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) x[p * (c + 1) + q] = r[p * 4 + q];
  KetSum in(two_modes(c, ModeRole::Photonic));
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) in.add_term(x[p * (c + 1) + q], {LocalKet::number(p), LocalKet::number(q)});
  const CVector out = to_dense(apply_beam_splitter(in, "i", "j"));
  CHECK((out - oracle::beam_splitter(c) * x).norm() < 1e-10);
}

TEST_CASE("beam splitter block unitary", "[state]") {
  for (int n : {1, 3, 8}) {
    const CMatrix u = beam_splitter_block_unitary(n);
    CHECK(max_abs(u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())) < 1e-10);
  }
}

TEST_CASE("beam splitter preserves the trace", "[state]") {
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  TermSum s(two_modes(24));
  for (int k = 0; k < 5; ++k) {
    const cplx c(g(rng), g(rng));
    s.add_term(c, {LocalKet::coherent({0.5 * g(rng), 0.5 * g(rng)}), LocalKet::number(k % 3)},
               {LocalKet::coherent({0.5 * g(rng), 0.5 * g(rng)}), LocalKet::fock({0.3, cplx(0, 0.5), -0.2})});
  }
  const TermSum out = apply_beam_splitter(s, "i", "j");
  CHECK(std::abs(out.trace() - s.trace()) < 1e-10);
}

TEST_CASE("projection onto detector outcomes", "[state]") {
  // vacuum onto "both silent"
  TermSum vac(two_modes(20));
  vac.add_term(1.0, {LocalKet::vacuum(), LocalKet::vacuum()}, {LocalKet::vacuum(), LocalKet::vacuum()});
  ProjectorSum oe{{"i", "j"}, {{1.0, {NumberSet::only(0), NumberSet::only(0)}}}};
  const TermSum pv = project(vac, oe);
  CHECK(std::abs(pv.trace() - 1.0) < 1e-14);
  CHECK(trace_distance(pv, vac) < 1e-14);

  // odd counts in either detector after U(|1>|-1>); truncated oracle at cutoff 40
  KetSum in(two_modes(40));
  in.add_term(1.0, {LocalKet::coherent(1.0), LocalKet::coherent(-1.0)});
  const TermSum rho = TermSum::projector(apply_beam_splitter(in, "i", "j"));
  ProjectorSum odd{{"i", "j"},
                   {{1.0, {NumberSet::odd(), NumberSet::only(0)}}, {1.0, {NumberSet::only(0), NumberSet::odd()}}}};
  const oracle::Vec ref = oracle::beam_splitter(40) * oracle::kron(oracle::coherent(1.0, 40), oracle::coherent(-1.0, 40));
  double expect = 0.0;
  for (int p = 0; p <= 40; ++p)
    for (int q = 0; q <= 40; ++q) {
      const bool hit = (p % 2 == 1 && q == 0) || (p == 0 && q % 2 == 1);
      if (hit) expect += std::norm(ref[p * 41 + q]);
    }
  const double got = projector_weight(rho, odd).real();
  CHECK(std::abs(got - expect) < 1e-10);
  CHECK(std::abs(got - 0.490842) < 1e-6);
}

TEST_CASE("backends agree on every parity projection", "[state]") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.4, 1.4);
  const ModeLayout lay = two_modes(default_cutoff(2.0));
  TermSum s(lay);
  s.add_term(cplx(0.6, 0.1), {LocalKet::coherent({u(rng), u(rng)}), LocalKet::coherent({u(rng), u(rng)})},
             {LocalKet::coherent({u(rng), u(rng)}), LocalKet::coherent({u(rng), u(rng)})});
  const TermSum f = to_backend(s, BackendChoice::truncated_fock());
  const std::vector<std::vector<NumberSet>> comps = {
      {NumberSet::even_positive(), NumberSet::only(0)}, {NumberSet::odd(), NumberSet::only(0)},
      {NumberSet::only(0), NumberSet::even_positive()}, {NumberSet::only(0), NumberSet::odd()},
      {NumberSet::only(0), NumberSet::only(0)}};
  for (const auto& c : comps) {
    const ProjectorSum p{{"i", "j"}, {{1.0, c}}};
    CHECK(std::abs(projector_weight(s, p) - projector_weight(f, p)) < 1e-8);
  }
}

TEST_CASE("partial trace", "[state]") {
  KetSum prod(two_modes(20));
  prod.add_term(1.0, {LocalKet::coherent(cplx(0.5, 0.5)), LocalKet::fock({0.6, cplx(0, 0.8)})});
  const TermSum rp = partial_trace(TermSum::projector(prod), {"j"});
  CHECK(std::abs(rp.trace() - 1.0) < 1e-12);

  // reduced state of the coherent Bell state Phi+ at alpha=1 against a dense oracle
  const KetSum phi = coherent_bell(BellKind::PhiPlus, 1.0, 1.0);
  const TermSum red = partial_trace(TermSum::projector(phi), {"B"});
  CHECK(std::abs(red.trace() - 1.0) < 1e-10);

  const int n = 24;
  const double nrm = 1.0 / std::sqrt(2.0 + 2.0 * std::exp(-4.0));
  const oracle::Vec v = nrm * (oracle::kron(oracle::coherent(1.0, n), oracle::coherent(1.0, n)) +
                               oracle::kron(oracle::coherent(-1.0, n), oracle::coherent(-1.0, n)));
  oracle::Mat rho_a = oracle::Mat::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k) rho_a(i, j) += v[i * (n + 1) + k] * std::conj(v[j * (n + 1) + k]);
  const double oracle_purity = (rho_a * rho_a).trace().real();
  CHECK(std::abs(purity(red) - oracle_purity) < 1e-8);

  // single-term trace is the product of per-mode overlaps
  TermSum one(two_modes(20));
  const auto l0 = LocalKet::coherent(0.3), r0 = LocalKet::coherent(-0.2), l1 = LocalKet::number(1),
             r1 = LocalKet::fock({0.0, 0.5, 0.5});
  one.add_term(2.0, {l0, l1}, {r0, r1});
  CHECK(std::abs(one.trace() - 2.0 * inner(r0, l0) * inner(r1, l1)) < 1e-14);
}

TEST_CASE("dense conversion", "[state]") {
  TermSum v(ModeLayout({{"m", 3, ModeRole::Photonic}}));
  v.add_term(1.0, {LocalKet::vacuum()}, {LocalKet::vacuum()});
  const CMatrix d = to_dense(v);
  CHECK(d.rows() == 4);
  CHECK(std::abs(d(0, 0) - 1.0) < 1e-15);
  CHECK(d.cwiseAbs().sum() == Approx(1.0));

  const TermSum phi = TermSum::projector(coherent_bell(BellKind::PhiPlus, 1.0, 1.0));
  const CMatrix p = to_dense(phi);
  CHECK(max_abs(p - p.adjoint()) < 1e-12);
  CHECK(std::abs(p.trace() - 1.0) < 1e-10);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(p);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);

  // contraction through the dense matrix matches the term algebra
  KetSum psi(phi.layout());
  psi.add_term(0.8, {LocalKet::coherent(0.4), LocalKet::coherent(cplx(0.0, 0.7))});
  psi.add_term(0.6, {LocalKet::number(2), LocalKet::number(1)});
  const CVector pv = to_dense(psi);
  CHECK(std::abs(expectation(phi, psi) - pv.dot(p * pv)) < 1e-10);

  CHECK_THROWS_AS(to_dense(phi, 10), DimensionLimitError);
}

TEST_CASE("trace norm against singular values", "[state]") {
  std::mt19937 rng(5);
  const int c = 5;
  TermSum s(two_modes(c, ModeRole::Photonic));
  for (int k = 0; k < 4; ++k) {
    const oracle::Vec a = oracle::random_vector(c + 1, rng), b = oracle::random_vector(c + 1, rng),
                      x = oracle::random_vector(c + 1, rng), y = oracle::random_vector(c + 1, rng);
    s.add_term(k % 2 ? 1.0 : -0.7, {fock_from(a), fock_from(b)}, {fock_from(x), fock_from(y)});
  }
  CHECK(std::abs(trace_norm(s) - oracle::trace_norm(to_dense(s))) < 1e-10);
}

TEST_CASE("canonicalization merges equal kets", "[state]") {
  TermSum s(two_modes(10));
  s.add_term(0.5, {LocalKet::coherent(1.0), LocalKet::number(1)}, {LocalKet::coherent(1.0), LocalKet::number(1)});
  s.add_term(0.5, {LocalKet::coherent(1.0), LocalKet::fock({0.0, 2.0})},
             {LocalKet::coherent(1.0), LocalKet::number(1)});
  s.add_term(1e-16, {LocalKet::vacuum(), LocalKet::vacuum()}, {LocalKet::vacuum(), LocalKet::vacuum()});
  const TermSum c = s.canonicalized();
  CHECK(c.size() == 1);
  CHECK(std::abs(c.trace() - 1.5) < 1e-14);
}

TEST_CASE("layout contract", "[state]") {
  CHECK_THROWS_AS(ModeLayout({{"x", 2, ModeRole::Photonic}, {"x", 2, ModeRole::Photonic}}), ContractViolation);
  KetSum s(two_modes(4));
  s.add_term(1.0, {LocalKet::vacuum(), LocalKet::vacuum()});
  CHECK_THROWS_AS(apply_beam_splitter(s, "i", "i"), ContractViolation);
  CHECK_THROWS_AS(apply_beam_splitter(s, "i", "zz"), ContractViolation);
}
