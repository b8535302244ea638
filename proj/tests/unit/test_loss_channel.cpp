#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hybridtele/hybrid_encoding.hpp"
#include "hybridtele/loss_channel.hpp"
#include "hybridtele/teleport.hpp"
#include "oracle.hpp"

using namespace hybridtele;

namespace {

ModeLayout one_mode(int cutoff) { return ModeLayout({{"m", cutoff, ModeRole::Coherent}}); }

TermSum random_operator(std::mt19937& rng, int cutoff) {
  std::normal_distribution<double> g;
  TermSum s(ModeLayout({{"x", cutoff, ModeRole::Coherent}, {"y", cutoff, ModeRole::Photonic}}));
  for (int k = 0; k < 4; ++k)
    s.add_term(cplx(g(rng), g(rng)),
               {LocalKet::coherent({0.5 * g(rng), 0.5 * g(rng)}), LocalKet::fock({g(rng), g(rng), g(rng)})},
               {LocalKet::fock({g(rng), g(rng), 0.0, g(rng)}), LocalKet::number(k % 3)});
  return s;
}

}  // namespace

TEST_CASE("loss parameterization", "[loss]") {
  const auto l = LossParameter::from_r(0.6);
  CHECK(l.t() == Catch::Approx(0.8).epsilon(1e-15));
  CHECK(l.t() * l.t() + l.r() * l.r() == Catch::Approx(1.0).epsilon(1e-15));
  const auto g = LossParameter::from_gamma_tau(std::log(4.0));  // t = e^{-gamma tau/2} = 1/2
  CHECK(std::abs(g.t() - 0.5) < 1e-15);
  CHECK(LossParameter{}.lossless());
  CHECK_THROWS_AS(LossParameter::from_r(1.0), ContractViolation);
  CHECK_THROWS_AS(LossParameter::from_r(-0.1), ContractViolation);
  CHECK_THROWS_AS(LossParameter::from_t(0.0), ContractViolation);
}

TEST_CASE("Kraus completeness", "[loss]") {
  for (int cutoff : {2, 10, default_cutoff(std::sqrt(2.0)), default_cutoff(2.0 * std::sqrt(2.0)), 40})
    for (double r : {0.1, 0.5, 0.9, 0.999}) {
      const auto ks = kraus_operators(cutoff, LossParameter::from_r(r));
      CHECK(ks.size() == std::size_t(cutoff + 1));
      Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
      for (const auto& e : ks) sum += e.transpose() * e;
      CHECK((sum - Eigen::MatrixXd::Identity(cutoff + 1, cutoff + 1)).cwiseAbs().maxCoeff() < 1e-10);

      const auto ref = oracle::kraus(cutoff, std::sqrt(1.0 - r * r));
      for (std::size_t k = 0; k < ks.size(); ++k) CHECK((ks[k] - ref[k]).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("damping a coherent projector", "[loss]") {
  const int n = 32;
  for (double r : {0.2, 0.5, 0.8}) {
    const auto loss = LossParameter::from_r(r);
    for (cplx a : {cplx(1.0), cplx(-1.3, 0.6), cplx(0.0, 2.0)}) {
      TermSum s(one_mode(n));
      s.add_term(1.0, {LocalKet::coherent(a)}, {LocalKet::coherent(a)});
      const TermSum d = damp_mode(s, "m", loss);
      REQUIRE(d.size() == 1);
      CHECK(std::abs(d.terms()[0].coeff - 1.0) < 1e-14);
      CHECK(std::abs(d.terms()[0].left[0].amplitude() - loss.t() * a) < 1e-14);

      // Stinespring oracle on the truncated space
      const oracle::Vec v = oracle::coherent(a, n);
      const oracle::Mat ref = oracle::damp(v * v.adjoint(), loss.t());
      CHECK((to_dense(d) - ref).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("damping coherent coherences", "[loss]") {
  const int n = 22;
  const auto loss = LossParameter::from_r(0.5);
  const cplx g(1.0, 0.3), h(-0.8, 0.2);
  TermSum s(one_mode(n));
  s.add_term(1.0, {LocalKet::coherent(g)}, {LocalKet::coherent(h)});
  const TermSum d = damp_mode(s, "m", loss);
  const oracle::Vec a = oracle::coherent(g, n), b = oracle::coherent(h, n);
  CHECK((to_dense(d) - oracle::damp(a * b.adjoint(), loss.t())).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("damping a single photon", "[loss]") {
  const auto loss = LossParameter::from_r(0.3);
  TermSum s(ModeLayout({{"m", 2, ModeRole::Photonic}}));
  s.add_term(1.0, {LocalKet::number(1)}, {LocalKet::number(1)});
  const CMatrix d = to_dense(damp_mode(s, "m", loss));
  CHECK(std::abs(d(1, 1) - loss.t() * loss.t()) < 1e-14);
  CHECK(std::abs(d(0, 0) - loss.r() * loss.r()) < 1e-14);
  CHECK(std::abs(d(0, 1)) + std::abs(d(1, 0)) + std::abs(d(2, 2)) < 1e-14);
}

TEST_CASE("lossless damping is the identity", "[loss]") {
  std::mt19937 rng(1);
  const TermSum s = random_operator(rng, 12);
  const TermSum d = damp_modes(s, {"x", "y"}, LossParameter{});
  CHECK(trace_norm(d - s) < 1e-12);
}

TEST_CASE("trace preservation and the semigroup property", "[loss]") {
  std::mt19937 rng(2);
  const TermSum s = random_operator(rng, 14);
  const auto l1 = LossParameter::from_t(0.9), l2 = LossParameter::from_t(0.7), l12 = LossParameter::from_t(0.63);
  const TermSum once = damp_modes(s, {"x", "y"}, l1);
  CHECK(std::abs(once.trace() - s.trace()) < 1e-10);
  const TermSum twice = damp_modes(once, {"x", "y"}, l2);
  const TermSum direct = damp_modes(s, {"x", "y"}, l12);
  CHECK(trace_norm(twice - direct) < 1e-8);
}

TEST_CASE("closed-form channels at r = 0", "[loss]") {
  for (auto type : {HybridType::TypeI, HybridType::TypeII}) {
    const TermSum ideal = TermSum::projector(ideal_channel(type, 1.0));
    const TermSum ch = decohered_channel(type, 1.0, LossParameter{});
    CHECK(trace_distance(ch.reordered(ideal.layout()), ideal) < 1e-12);
  }
}

TEST_CASE("closed-form channels match mode-by-mode damping", "[loss]") {
  for (auto type : {HybridType::TypeI, HybridType::TypeII})
    for (double r : {0.2, 0.5, 0.8}) {
      const auto loss = LossParameter::from_r(r);
      const TermSum a = decohered_channel(type, 1.0, loss);
      const TermSum b = damped_channel(type, 1.0, loss, BackendChoice::truncated_fock());
      CHECK(std::abs(a.trace() - 1.0) < 1e-10);
      CHECK(trace_distance(a, b.reordered(a.layout())) < 1e-8);
    }
}

TEST_CASE("TypeII channel against dense Kraus damping", "[loss]") {
  // Fock-space matrix elements of the closed-form channel against a dense
  // reference: (|+>|1> |+>|1> + |->|-1> |->|-1>)/sqrt2 over (b, B, c, C),
  // each mode damped with explicit Kraus operators.
  const double alpha = 1.0, r = 0.5, t = std::sqrt(1.0 - r * r);
  const int nc = 12, dp = 2;
  const oracle::Vec plus = (oracle::number(0, 1) + oracle::number(1, 1)) / std::sqrt(2.0);
  const oracle::Vec minus = (oracle::number(0, 1) - oracle::number(1, 1)) / std::sqrt(2.0);
  const oracle::Vec ca = oracle::coherent(alpha, nc), cm = oracle::coherent(-alpha, nc);
  const oracle::Vec psi = (oracle::kron({plus, ca, plus, ca}) + oracle::kron({minus, cm, minus, cm})) / std::sqrt(2.0);
  const std::vector<int> dims{dp, nc + 1, dp, nc + 1};
  oracle::Mat rho = psi * psi.adjoint();
  for (int m = 0; m < 4; ++m) rho = oracle::damp_factor(rho, dims, m, t);

  const TermSum ch = decohered_channel(HybridType::TypeII, alpha, LossParameter::from_r(r));
  const ModeLayout& lay = ch.layout();
  REQUIRE(lay[0].name == "b");
  REQUIRE(lay[1].name == "B");
  auto basis = [&](int b, int B, int c, int C) {
    KetSum k(lay);
    k.add_term(1.0, {LocalKet::number(b), LocalKet::number(B), LocalKet::number(c), LocalKet::number(C)});
    return k;
  };
  auto index = [&](int b, int B, int c, int C) { return ((b * (nc + 1) + B) * dp + c) * (nc + 1) + C; };
  double worst = 0.0;
  for (int b = 0; b < 2; ++b)
    for (int B = 0; B < 4; ++B)
      for (int c = 0; c < 2; ++c)
        for (int C = 0; C < 4; ++C)
          for (int b2 = 0; b2 < 2; ++b2)
            for (int B2 = 0; B2 < 4; ++B2)
              for (int c2 = 0; c2 < 2; ++c2)
                for (int C2 = 0; C2 < 4; ++C2) {
                  const cplx got = matrix_element(basis(b, B, c, C), ch, basis(b2, B2, c2, C2));
                  const cplx want = rho(index(b, B, c, C), index(b2, B2, c2, C2));
                  worst = std::max(worst, std::abs(got - want));
                }
  CHECK(worst < 1e-8);
}
