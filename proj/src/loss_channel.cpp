#include "hybridtele/loss_channel.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

#include "hybridtele/hybrid_encoding.hpp"
#include "ket_table.hpp"

namespace hybridtele {

LossParameter LossParameter::from_r(double r) {
  if (!(r >= 0.0 && r < 1.0)) {
    std::ostringstream os;
    os << "loss amplitude r must lie in [0, 1), got " << r;
    throw ContractViolation(os.str());
  }
  return LossParameter(std::sqrt(1.0 - r * r), r);
}

LossParameter LossParameter::from_t(double t) {
  if (!(t > 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << "transmission t must lie in (0, 1], got " << t;
    throw ContractViolation(os.str());
  }
  return LossParameter(t, std::sqrt(1.0 - t * t));
}

LossParameter LossParameter::from_gamma_tau(double gamma_tau) {
  if (!(gamma_tau >= 0.0) || !std::isfinite(gamma_tau)) throw ContractViolation("gamma*tau must be finite and >= 0");
  return from_t(std::exp(-0.5 * gamma_tau));
}

namespace {

// sqrt(C(n, k)) table, rows n = 0..max_n.
std::vector<std::vector<double>> sqrt_binomials(int max_n) {
  std::vector<std::vector<double>> c(static_cast<std::size_t>(max_n) + 1);
  for (int n = 0; n <= max_n; ++n) {
    c[n].assign(static_cast<std::size_t>(n) + 1, 1.0);
    for (int k = 1; k < n; ++k) c[n][k] = c[n - 1][k - 1] + c[n - 1][k];
  }
  for (auto& row : c)
    for (auto& x : row) x = std::sqrt(x);
  return c;
}

constexpr double kRefactorDropRelative = 1e-10;

class DampingKernel {
 public:
  DampingKernel(int cutoff, const LossParameter& loss)
      : cutoff_(cutoff), loss_(loss), binom_(sqrt_binomials(cutoff)) {}

  struct Piece {
    cplx coeff;
    LocalKet left, right;
  };

  const std::vector<Piece>& apply(const LocalKet& l, const LocalKet& r) {
    const std::size_t h = detail::hash_ket(l) * 131 + detail::hash_ket(r);
    auto& bucket = cache_[h];
    for (const auto& e : bucket)
      if (e.l == l && e.r == r) return e.pieces;
    bucket.push_back({l, r, compute(l, r)});
    return bucket.back().pieces;
  }

 private:
  struct Entry {
    LocalKet l, r;
    std::vector<Piece> pieces;
  };

  static bool plain_coherent(const LocalKet& k) {
    return (k.is_coherent() && k.filter().is_all()) || (k.is_fock() && k.is_vacuum_like());
  }
  static cplx amplitude_of(const LocalKet& k) { return k.is_coherent() ? k.amplitude() : cplx(0.0); }
  static cplx scale_of(const LocalKet& k) { return k.is_coherent() ? cplx(1.0) : k.amplitudes()[0]; }

  std::vector<Piece> compute(const LocalKet& l, const LocalKet& r) {
    const double t = loss_.t();
    if ((l.is_coherent() || r.is_coherent()) && plain_coherent(l) && plain_coherent(r)) {
      const cplx g = amplitude_of(l);
      const cplx d = amplitude_of(r);
      const cplx f = std::exp((1.0 - t * t) * (g * std::conj(d) - 0.5 * std::norm(g) - 0.5 * std::norm(d)));
      return {{f * scale_of(l) * std::conj(scale_of(r)), LocalKet::coherent(t * g), LocalKet::coherent(t * d)}};
    }
    const auto x = l.fock_amplitudes(cutoff_);
    const auto y = r.fock_amplitudes(cutoff_);
    const double rr = loss_.r();
    CMatrix m = CMatrix::Zero(cutoff_ + 1, cutoff_ + 1);
    for (int k = 0; k <= cutoff_; ++k) {
      CVector ex = CVector::Zero(cutoff_ + 1);
      CVector ey = CVector::Zero(cutoff_ + 1);
      const double rk = std::pow(rr, k);
      if (rk == 0.0) continue;
      for (int n = 0; n + k <= cutoff_; ++n) {
        const double e = binom_[n + k][k] * std::pow(t, n) * rk;
        ex[n] = e * x[n + k];
        ey[n] = e * y[n + k];
      }
      m.noalias() += ex * ey.adjoint();
    }
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    std::vector<Piece> out;
    if (s.size() == 0 || s[0] == 0.0) return out;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s[i] <= kRefactorDropRelative * s[0]) break;
      const CVector u = svd.matrixU().col(i);
      const CVector v = svd.matrixV().col(i);
      out.push_back({s[i], LocalKet::fock({u.data(), u.data() + u.size()}),
                     LocalKet::fock({v.data(), v.data() + v.size()})});
    }
    return out;
  }

  int cutoff_;
  LossParameter loss_;
  std::vector<std::vector<double>> binom_;
  std::unordered_map<std::size_t, std::vector<Entry>> cache_;
};

}  // namespace

std::vector<Eigen::MatrixXd> kraus_operators(int cutoff, const LossParameter& loss) {
  if (cutoff < 0) throw ContractViolation("cutoff must be nonnegative");
  const auto binom = sqrt_binomials(cutoff);
  std::vector<Eigen::MatrixXd> ops;
  for (int k = 0; k <= cutoff; ++k) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
    for (int n = k; n <= cutoff; ++n) e(n - k, n) = binom[n][k] * std::pow(loss.t(), n - k) * std::pow(loss.r(), k);
    ops.push_back(std::move(e));
  }
  return ops;
}

TermSum damp_mode(const TermSum& s, std::string_view mode, const LossParameter& loss) {
  const std::size_t m = s.layout().index_of(mode);
  if (loss.lossless()) return s;
  DampingKernel kernel(s.layout()[m].cutoff, loss);
  TermSum out(s.layout());
  for (const auto& t : s.terms())
    for (const auto& p : kernel.apply(t.left[m], t.right[m])) {
      auto l = t.left;
      auto r = t.right;
      l[m] = p.left;
      r[m] = p.right;
      out.add_term(t.coeff * p.coeff, std::move(l), std::move(r));
    }
  return out.canonicalized();
}

TermSum damp_modes(const TermSum& s, const std::vector<std::string>& modes, const LossParameter& loss) {
  TermSum out = s;
  for (const auto& m : modes) out = damp_mode(out, m, loss);
  return out;
}

namespace {

// Qubit block of the damped channel for |i><j| (i, j in {+, -}) on one slot.
TermSum channel_block(HybridType type, int si, int sj, char slot, double alpha, const LossParameter& loss) {
  const double t = loss.t();
  const double r = loss.r();
  const double g = t * alpha;
  const auto q = qubit_modes(type, slot);
  const KetSum ci(ModeLayout({{q.coherent, coherent_cutoff(alpha), ModeRole::Coherent}}),
                  {{1.0, {LocalKet::coherent(si * g)}}});
  const KetSum cj(ModeLayout({{q.coherent, coherent_cutoff(alpha), ModeRole::Coherent}}),
                  {{1.0, {LocalKet::coherent(sj * g)}}});
  const KetSum plus = single_photon_ket(type, 1, slot, alpha);
  const KetSum minus = single_photon_ket(type, -1, slot, alpha);
  const auto& ki = si > 0 ? plus : minus;
  const auto& kj = sj > 0 ? plus : minus;
  TermSum photonic;
  if (type == HybridType::TypeI) {
    if (si == sj) {
      const KetSum vac = photonic_vacuum(type, slot, alpha);
      photonic = TermSum::outer(ki, kj).scaled(t * t) + TermSum::outer(vac, vac).scaled(r * r);
    } else {
      photonic = TermSum::outer(ki, kj).scaled(t * t * std::exp(-2.0 * alpha * alpha * r * r));
    }
  } else if (si == sj) {
    const auto& kp = si > 0 ? plus : minus;
    const auto& km = si > 0 ? minus : plus;
    photonic = TermSum::outer(kp, kp).scaled((1.0 + t) / 2.0) + TermSum::outer(km, km).scaled((1.0 - t) / 2.0) +
               TermSum::outer(plus, minus).scaled(r * r / 2.0) + TermSum::outer(minus, plus).scaled(r * r / 2.0);
  } else {
    // rho_{+-}; rho_{-+} is its adjoint
    TermSum pm = TermSum::outer(plus, minus).scaled((t * t + t) / 2.0) +
                 TermSum::outer(minus, plus).scaled((t * t - t) / 2.0);
    if (si < 0) pm = pm.adjoint();
    photonic = pm.scaled(std::exp(-2.0 * alpha * alpha * r * r));
  }
  return photonic.tensor(TermSum::outer(ci, cj));
}

}  // namespace

TermSum decohered_channel(HybridType type, double alpha, const LossParameter& loss) {
  if (!(alpha > 0.0)) throw ContractViolation("alpha must be positive");
  TermSum out(protocol_layout(type, alpha, "bc"));
  for (int si : {1, -1})
    for (int sj : {1, -1}) {
      TermSum block = channel_block(type, si, sj, 'b', alpha, loss).tensor(channel_block(type, si, sj, 'c', alpha, loss));
      out = out + block.reordered(out.layout());
    }
  return out.scaled(0.5).canonicalized();
}

}  // namespace hybridtele
