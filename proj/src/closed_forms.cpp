#include "hybridtele/closed_forms.hpp"

#include <cmath>
#include <string>

namespace hybridtele {

const std::vector<AppendixGroup>& appendix_groups() {
  using O = Outcome;
  static const std::vector<AppendixGroup> groups = {
      {1, {{O::One, O::Two}, {O::One, O::Three}, {O::Two, O::One}, {O::Two, O::Four}}},
      {2, {{O::One, O::One}, {O::One, O::Four}, {O::Two, O::Two}, {O::Two, O::Three}}},
      {3, {{O::Fail, O::One}, {O::Fail, O::Three}}},
      {4, {{O::Fail, O::Two}, {O::Fail, O::Four}}},
      {5, {{O::One, O::Fail}, {O::Two, O::Fail}}},
  };
  return groups;
}

namespace {

void check_index(int i) {
  if (i < 1 || i > 5) throw ContractViolation("appendix group index must be 1..5, got " + std::to_string(i));
}

void check_t(double t) {
  if (!(t > 0.0 && t <= 1.0)) throw ContractViolation("t must lie in (0, 1]");
}

struct Moments {
  double m4;  // |mu|^4 + |nu|^4
  double mn;  // 2 |mu|^2 |nu|^2
  double s1;  // mu nu* + mu* nu
  double s2;  // mu^2 nu*^2 + mu*^2 nu^2
  double prod;  // |mu|^2 |nu|^2
};

Moments moments(const BlochAngles& a) {
  const cplx mu = a.mu(), nu = a.nu();
  const double m2 = std::norm(mu), n2 = std::norm(nu);
  return {m2 * m2 + n2 * n2, 2.0 * m2 * n2, 2.0 * (mu * std::conj(nu)).real(),
          2.0 * (mu * mu * std::conj(nu * nu)).real(), m2 * n2};
}

double f5_bracket(double alpha, double t, const Moments& m) {
  const double a2 = alpha * alpha, r2 = 1.0 - t * t;
  const double e2 = std::exp(-2.0 * a2 * t * t);
  const double hp = (t * t + t) / 2.0, hm = (t * t - t) / 2.0;
  const double er = std::exp(-4.0 * a2 * r2), ea = std::exp(-4.0 * a2);
  return m.m4 * (std::pow((1.0 + t) / 2.0, 2) + std::pow((1.0 - t) / 2.0, 2) * std::exp(-4.0 * a2 * t * t)) +
         m.mn * (r2 / 4.0 * std::pow(1.0 + e2, 2) + hp * hp * er + hm * hm * ea) +
         m.s2 * (r2 * r2 / 2.0 * e2 + hp * hm * (er + ea)) -
         m.s1 * r2 / 2.0 * (1.0 + e2) * ((1.0 + t) / 2.0 + (1.0 - t) / 2.0 * e2);
}

double f5_denominator(double t, const Moments& m) {
  const double d = 1.0 - m.s1 * (1.0 - t * t);
  if (!(d > 0.0)) throw ContractViolation("non-positive denominator in f_5");
  return d;
}

}  // namespace

double p_formula(int i, double alpha, double t, const BlochAngles& angles) {
  check_index(i);
  check_t(t);
  const double e2 = std::exp(-2.0 * alpha * alpha * t * t);
  switch (i) {
    case 1:
      return 0.25 * (1.0 - e2) * (1.0 + t * e2);
    case 2:
      return 0.25 * (1.0 - e2) * (1.0 - t * e2);
    case 3:
      return 0.25 * (1.0 - e2) * (1.0 - e2);
    case 4:
      return 0.25 * (1.0 - e2) * (1.0 + e2);
    default:
      return 0.5 * e2 * (1.0 - moments(angles).s1 * (1.0 - t * t));
  }
}

double f_formula(int i, double alpha, double t, const BlochAngles& angles) {
  check_index(i);
  check_t(t);
  const Moments m = moments(angles);
  const double a2 = alpha * alpha, r2 = 1.0 - t * t;
  const double e2 = std::exp(-2.0 * a2 * t * t);
  if (i == 5) return (f5_bracket(alpha, t, m) - m.prod * t * t * r2 * e2) / f5_denominator(t, m);
  const double k = i <= 2 ? t : t * t;
  const double sign = (i == 1 || i == 3) ? 1.0 : -1.0;
  return m.m4 * (1.0 + t) / 2.0 +
         m.mn * ((1.0 - t) / 2.0 * std::exp(-4.0 * a2 * t * t) + k * (t * t + t) / 2.0 * std::exp(-4.0 * a2 * r2)) +
         m.s2 * k * (t * t - t) / 2.0 * std::exp(-4.0 * a2) + sign * m.s1 * r2 / 2.0 * e2;
}

double f5_as_printed(double alpha, double t, const BlochAngles& angles) {
  check_t(t);
  const Moments m = moments(angles);
  return f5_bracket(alpha, t, m) / f5_denominator(t, m);
}

namespace {

// Operators on slot c in the {|+>, |->} x {|g>, |-g>} form.
struct Type2Blocks {
  KetSum plus, minus;
  std::array<KetSum, 2> coh;  // |g>, |-g>

  TermSum ph(const KetSum& a, const KetSum& b) const { return TermSum::outer(a, b); }
  TermSum c(int i, int j) const { return TermSum::outer(coh[i], coh[j]); }
};

Type2Blocks type2_blocks(double alpha, double t) {
  const auto q = qubit_modes(HybridType::TypeII, 'c');
  const ModeLayout cl({{q.coherent, coherent_cutoff(alpha), ModeRole::Coherent}});
  const double g = t * alpha;
  return {single_photon_ket(HybridType::TypeII, 1, 'c', alpha), single_photon_ket(HybridType::TypeII, -1, 'c', alpha),
          {KetSum(cl, {{1.0, {LocalKet::coherent(g)}}}), KetSum(cl, {{1.0, {LocalKet::coherent(-g)}}})}};
}

}  // namespace

TermSum rho_T(int i, double alpha, double t, const BlochAngles& angles) {
  check_index(i);
  check_t(t);
  const auto b = type2_blocks(alpha, t);
  const double r2 = 1.0 - t * t;
  const double er = std::exp(-4.0 * alpha * alpha * r2);
  const cplx mu = angles.mu(), nu = angles.nu();
  const bool primed = i == 2 || i == 4 || i == 5;
  const double off = primed ? -r2 / 2.0 : r2 / 2.0;
  const TermSum rpp = b.ph(b.plus, b.plus).scaled((1.0 + t) / 2.0) + b.ph(b.plus, b.minus).scaled(off) +
                      b.ph(b.minus, b.plus).scaled(off) + b.ph(b.minus, b.minus).scaled((1.0 - t) / 2.0);
  const TermSum rmm = b.ph(b.plus, b.plus).scaled((1.0 - t) / 2.0) + b.ph(b.plus, b.minus).scaled(off) +
                      b.ph(b.minus, b.plus).scaled(off) + b.ph(b.minus, b.minus).scaled((1.0 + t) / 2.0);
  const TermSum rpm =
      b.ph(b.plus, b.minus).scaled((t * t + t) / 2.0) + b.ph(b.minus, b.plus).scaled((t * t - t) / 2.0);
  const TermSum rmp = rpm.adjoint();

  TermSum out;
  if (i <= 4) {
    const double k = i <= 2 ? t : t * t;
    out = rpp.tensor(b.c(0, 0)).scaled(std::norm(mu)) + rpm.tensor(b.c(0, 1)).scaled(k * er * mu * std::conj(nu)) +
          rmp.tensor(b.c(1, 0)).scaled(k * er * std::conj(mu) * nu) + rmm.tensor(b.c(1, 1)).scaled(std::norm(nu));
  } else {
    const Moments m = moments(angles);
    const double d = f5_denominator(t, m);
    const double wp = std::norm(mu) * (1.0 + t) / 2.0 - m.s1 * r2 / 2.0 + std::norm(nu) * (1.0 - t) / 2.0;
    const double wm = std::norm(mu) * (1.0 - t) / 2.0 - m.s1 * r2 / 2.0 + std::norm(nu) * (1.0 + t) / 2.0;
    const cplx mn = mu * std::conj(nu);
    const cplx cpm = mn * (t * t + t) / 2.0 + std::conj(mn) * (t * t - t) / 2.0;
    const cplx cmp = mn * (t * t - t) / 2.0 + std::conj(mn) * (t * t + t) / 2.0;
    out = (rpp.tensor(b.c(0, 0)).scaled(wp) + rpm.tensor(b.c(0, 1)).scaled(er * cpm) +
           rmp.tensor(b.c(1, 0)).scaled(er * cmp) + rmm.tensor(b.c(1, 1)).scaled(wm))
              .scaled(1.0 / d);
  }
  return out.canonicalized();
}

TermSum rho_T_type1(double alpha, double t, const BlochAngles& angles) {
  check_t(t);
  const auto type = HybridType::TypeI;
  const auto q = qubit_modes(type, 'c');
  const ModeLayout cl({{q.coherent, coherent_cutoff(alpha), ModeRole::Coherent}});
  const double g = t * alpha, r2 = 1.0 - t * t;
  const KetSum cp(cl, {{1.0, {LocalKet::coherent(g)}}});
  const KetSum cm(cl, {{1.0, {LocalKet::coherent(-g)}}});
  const KetSum plus = single_photon_ket(type, 1, 'c', alpha);
  const KetSum minus = single_photon_ket(type, -1, 'c', alpha);
  const KetSum vac = photonic_vacuum(type, 'c', alpha);
  const cplx mu = angles.mu(), nu = angles.nu();
  const double off = t * t * std::exp(-4.0 * alpha * alpha * r2);
  const TermSum vv = TermSum::outer(vac, vac).scaled(r2);
  TermSum out = (TermSum::outer(plus, plus).scaled(t * t) + vv).tensor(TermSum::outer(cp, cp)).scaled(std::norm(mu)) +
                TermSum::outer(plus, minus).tensor(TermSum::outer(cp, cm)).scaled(off * mu * std::conj(nu)) +
                TermSum::outer(minus, plus).tensor(TermSum::outer(cm, cp)).scaled(off * std::conj(mu) * nu) +
                (TermSum::outer(minus, minus).scaled(t * t) + vv).tensor(TermSum::outer(cm, cm)).scaled(std::norm(nu));
  return out.canonicalized();
}

double P_I(double alpha, double t) {
  check_t(t);
  return t * t * (1.0 - 0.5 * std::exp(-2.0 * alpha * alpha * t * t));
}

double F_I(double alpha, double t) {
  check_t(t);
  return t * t * (2.0 + std::exp(-4.0 * alpha * alpha * (1.0 - t * t))) / 3.0;
}

double P_II(double alpha, double t) {
  check_t(t);
  return 1.0 - 0.5 * std::exp(-2.0 * alpha * alpha * t * t);
}

double F_II_numeric(double alpha, double t, const SphereQuadrature& quad) {
  return quad.integrate([&](const BlochAngles& a) {
    double p = 0.0, pf = 0.0;
    for (int i = 1; i <= 5; ++i) {
      const double pi = p_formula(i, alpha, t, a);
      p += pi;
      pf += pi * f_formula(i, alpha, t, a);
    }
    return pf / p;
  });
}

double P_II_numeric(double alpha, double t, const SphereQuadrature& quad) {
  return quad.integrate([&](const BlochAngles& a) {
    double p = 0.0;
    for (int i = 1; i <= 5; ++i) p += p_formula(i, alpha, t, a);
    return p;
  });
}

double appendix_consistency(double alpha, double t, const SphereQuadrature& quad) {
  return std::abs(P_II_numeric(alpha, t, quad) - P_II(alpha, t));
}

double appendix_consistency(double alpha, double t, const SphereQuadrature& quad, const TransferMap& map) {
  if (map.type() != HybridType::TypeII) throw ContractViolation("appendix consistency needs a TypeII transfer map");
  double worst = appendix_consistency(alpha, t, quad);
  for (const auto& n : quad.nodes()) {
    const BlochAngles a(n.u, n.v);
    for (const auto& g : appendix_groups()) {
      double p = 0.0;
      for (const auto& l : g.members) p += map.outcome(l).probability(a);
      worst = std::max(worst, std::abs(p - p_formula(g.index, alpha, t, a)));
    }
  }
  return worst;
}

}  // namespace hybridtele
