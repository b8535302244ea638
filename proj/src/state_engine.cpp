#include "hybridtele/state_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "ket_table.hpp"

namespace hybridtele {

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

// Singular values below this fraction of the largest are dropped when a dense
// block is re-factored into product terms.
constexpr double kRefactorDropRelative = 1e-10;

double norm2(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// ModeLayout

int default_cutoff(double max_amplitude) {
  const double g = std::abs(max_amplitude);
  return static_cast<int>(std::ceil(g * g + 6.0 * g + 10.0));
}

ModeLayout::ModeLayout(std::vector<ModeSpec> modes) : modes_(std::move(modes)) {
  std::unordered_set<std::string> seen;
  for (const auto& m : modes_) {
    if (m.name.empty()) throw ContractViolation("mode name must not be empty");
    if (!seen.insert(m.name).second) throw ContractViolation("duplicate mode '" + m.name + "'");
    if (m.role == ModeRole::Photonic && m.cutoff < kPhotonicCutoff)
      throw ContractViolation("photonic mode '" + m.name + "' needs cutoff >= 2");
    if (m.cutoff < 0) throw ContractViolation("negative cutoff for mode '" + m.name + "'");
  }
}

bool ModeLayout::contains(std::string_view name) const {
  return std::any_of(modes_.begin(), modes_.end(), [&](const ModeSpec& m) { return m.name == name; });
}

std::size_t ModeLayout::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < modes_.size(); ++i)
    if (modes_[i].name == name) return i;
  throw ContractViolation("unknown mode '" + std::string(name) + "'");
}

ModeLayout ModeLayout::subset(const std::vector<std::string>& keep) const {
  for (const auto& k : keep) (void)index_of(k);
  std::vector<ModeSpec> out;
  for (const auto& m : modes_)
    if (std::find(keep.begin(), keep.end(), m.name) != keep.end()) out.push_back(m);
  return ModeLayout(std::move(out));
}

ModeLayout ModeLayout::concat(const ModeLayout& other) const {
  std::vector<ModeSpec> all = modes_;
  all.insert(all.end(), other.modes_.begin(), other.modes_.end());
  return ModeLayout(std::move(all));
}

bool ModeLayout::operator==(const ModeLayout& other) const {
  if (modes_.size() != other.modes_.size()) return false;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const auto& a = modes_[i];
    const auto& b = other.modes_[i];
    if (a.name != b.name || a.cutoff != b.cutoff || a.role != b.role) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// NumberSet

NumberSet NumberSet::finite(std::vector<int> numbers) {
  for (int n : numbers)
    if (n < 0) throw ContractViolation("photon numbers must be nonnegative");
  std::sort(numbers.begin(), numbers.end());
  numbers.erase(std::unique(numbers.begin(), numbers.end()), numbers.end());
  NumberSet s;
  s.kind_ = Kind::Finite;
  s.numbers_ = std::move(numbers);
  return s;
}

NumberSet NumberSet::even_positive() {
  NumberSet s;
  s.kind_ = Kind::EvenPositive;
  return s;
}

NumberSet NumberSet::odd() {
  NumberSet s;
  s.kind_ = Kind::Odd;
  return s;
}

bool NumberSet::contains(int n) const {
  if (n < 0) return false;
  switch (kind_) {
    case Kind::All:
      return true;
    case Kind::EvenPositive:
      return n >= 2 && n % 2 == 0;
    case Kind::Odd:
      return n % 2 == 1;
    case Kind::Finite:
      return std::binary_search(numbers_.begin(), numbers_.end(), n);
  }
  return false;
}

NumberSet NumberSet::intersect(const NumberSet& other) const {
  if (is_all()) return other;
  if (other.is_all()) return *this;
  if (kind_ == Kind::Finite || other.kind_ == Kind::Finite) {
    const NumberSet& fin = kind_ == Kind::Finite ? *this : other;
    const NumberSet& rest = kind_ == Kind::Finite ? other : *this;
    std::vector<int> out;
    for (int n : fin.numbers_)
      if (rest.contains(n)) out.push_back(n);
    return finite(std::move(out));
  }
  if (kind_ == other.kind_) return *this;
  return finite({});
}

cplx NumberSet::exp_series(cplx z) const {
  switch (kind_) {
    case Kind::All:
      return std::exp(z);
    case Kind::EvenPositive:
      return std::cosh(z) - 1.0;
    case Kind::Odd:
      return std::sinh(z);
    case Kind::Finite: {
      cplx sum = 0.0;
      cplx term = 1.0;
      int n = 0;
      for (int target : numbers_) {
        for (; n < target; ++n) term *= z / static_cast<double>(n + 1);
        sum += term;
      }
      return sum;
    }
  }
  return 0.0;
}

namespace {

// e^{-scale} * sum_{n in S} z^n/n!, combined so that large |z| does not overflow.
cplx scaled_exp_series(const NumberSet& s, cplx z, double scale) {
  switch (s.kind()) {
    case NumberSet::Kind::All:
      return std::exp(z - scale);
    case NumberSet::Kind::EvenPositive:
      return 0.5 * (std::exp(z - scale) + std::exp(-z - scale)) - std::exp(-scale);
    case NumberSet::Kind::Odd:
      return 0.5 * (std::exp(z - scale) - std::exp(-z - scale));
    case NumberSet::Kind::Finite:
      return s.exp_series(z) * std::exp(-scale);
  }
  return 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// LocalKet

LocalKet LocalKet::fock(std::vector<cplx> amplitudes) {
  for (const auto& a : amplitudes)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw ContractViolation("Fock coefficients must be finite");
  return LocalKet(Fock{std::move(amplitudes)});
}

LocalKet LocalKet::number(int n) {
  if (n < 0) throw ContractViolation("photon number must be nonnegative");
  std::vector<cplx> v(static_cast<std::size_t>(n) + 1, 0.0);
  v[static_cast<std::size_t>(n)] = 1.0;
  return LocalKet(Fock{std::move(v)});
}

LocalKet LocalKet::coherent(cplx amplitude, NumberSet filter) {
  if (!std::isfinite(amplitude.real()) || !std::isfinite(amplitude.imag()))
    throw ContractViolation("coherent amplitude must be finite");
  return LocalKet(Coherent{amplitude, std::move(filter)});
}

cplx LocalKet::amplitude() const {
  if (!is_coherent()) throw ContractViolation("not a coherent ket");
  return std::get<Coherent>(data_).amplitude;
}

const NumberSet& LocalKet::filter() const {
  if (!is_coherent()) throw ContractViolation("not a coherent ket");
  return std::get<Coherent>(data_).filter;
}

const std::vector<cplx>& LocalKet::amplitudes() const {
  if (is_coherent()) throw ContractViolation("not a Fock ket");
  return std::get<Fock>(data_).amps;
}

bool LocalKet::is_vacuum_like() const {
  if (is_coherent()) {
    const auto& c = std::get<Coherent>(data_);
    return c.amplitude == cplx(0.0) && c.filter.is_all();
  }
  const auto& a = std::get<Fock>(data_).amps;
  for (std::size_t n = 1; n < a.size(); ++n)
    if (a[n] != cplx(0.0)) return false;
  return true;
}

std::vector<cplx> coherent_fock_coefficients(cplx amplitude, int cutoff) {
  std::vector<cplx> c(static_cast<std::size_t>(cutoff) + 1);
  c[0] = std::exp(-0.5 * std::norm(amplitude));
  for (int n = 1; n <= cutoff; ++n) c[n] = c[n - 1] * amplitude / std::sqrt(static_cast<double>(n));
  return c;
}

std::vector<cplx> LocalKet::fock_amplitudes(int cutoff, double tolerance) const {
  if (is_coherent()) {
    const auto& c = std::get<Coherent>(data_);
    auto v = coherent_fock_coefficients(c.amplitude, cutoff);
    const double tail = 1.0 - norm2(v);
    if (tail > tolerance) {
      std::ostringstream os;
      os << "cutoff " << cutoff << " too small for coherent amplitude " << std::abs(c.amplitude)
         << " (lost weight " << tail << ")";
      throw CutoffInsufficientError(os.str());
    }
    if (!c.filter.is_all())
      for (int n = 0; n <= cutoff; ++n)
        if (!c.filter.contains(n)) v[n] = 0.0;
    return v;
  }
  const auto& a = std::get<Fock>(data_).amps;
  std::vector<cplx> v(static_cast<std::size_t>(cutoff) + 1, 0.0);
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (n <= static_cast<std::size_t>(cutoff)) {
      v[n] = a[n];
    } else if (std::abs(a[n]) > 0.0) {
      throw CutoffInsufficientError("Fock ket has support above cutoff " + std::to_string(cutoff));
    }
  }
  return v;
}

LocalKet LocalKet::projected(const NumberSet& set) const {
  if (set.is_all()) return *this;
  if (is_coherent()) {
    const auto& c = std::get<Coherent>(data_);
    return coherent(c.amplitude, c.filter.intersect(set));
  }
  auto a = std::get<Fock>(data_).amps;
  for (std::size_t n = 0; n < a.size(); ++n)
    if (!set.contains(static_cast<int>(n))) a[n] = 0.0;
  return fock(std::move(a));
}

double LocalKet::norm() const { return std::sqrt(std::max(0.0, inner(*this, *this).real())); }

bool LocalKet::approx_equal(const LocalKet& other, double tolerance) const {
  if (is_coherent() != other.is_coherent()) return false;
  if (is_coherent()) {
    const auto& a = std::get<Coherent>(data_);
    const auto& b = std::get<Coherent>(other.data_);
    return a.filter == b.filter && std::abs(a.amplitude - b.amplitude) <= tolerance;
  }
  const auto& a = std::get<Fock>(data_).amps;
  const auto& b = std::get<Fock>(other.data_).amps;
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const cplx x = i < a.size() ? a[i] : cplx(0.0);
    const cplx y = i < b.size() ? b[i] : cplx(0.0);
    if (std::abs(x - y) > tolerance) return false;
  }
  return true;
}

bool LocalKet::operator==(const LocalKet& other) const {
  if (is_coherent() != other.is_coherent()) return false;
  if (is_coherent()) {
    const auto& a = std::get<Coherent>(data_);
    const auto& b = std::get<Coherent>(other.data_);
    return a.amplitude == b.amplitude && a.filter == b.filter;
  }
  return std::get<Fock>(data_).amps == std::get<Fock>(other.data_).amps;
}

cplx inner(const LocalKet& bra, const LocalKet& ket, const NumberSet& middle) {
  if (bra.is_coherent() && ket.is_coherent()) {
    const NumberSet s = middle.intersect(bra.filter()).intersect(ket.filter());
    if (s.empty()) return 0.0;
    const cplx g = ket.amplitude();
    const cplx d = bra.amplitude();
    return scaled_exp_series(s, std::conj(d) * g, 0.5 * (std::norm(g) + std::norm(d)));
  }
  if (bra.is_fock() && ket.is_fock()) {
    const auto& b = bra.amplitudes();
    const auto& k = ket.amplitudes();
    cplx sum = 0.0;
    const std::size_t n = std::min(b.size(), k.size());
    for (std::size_t i = 0; i < n; ++i)
      if (middle.contains(static_cast<int>(i))) sum += std::conj(b[i]) * k[i];
    return sum;
  }
  if (bra.is_fock()) {
    const auto& b = bra.amplitudes();
    const NumberSet s = middle.intersect(ket.filter());
    const auto c = coherent_fock_coefficients(ket.amplitude(), static_cast<int>(b.size()) - 1);
    cplx sum = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i)
      if (s.contains(static_cast<int>(i))) sum += std::conj(b[i]) * c[i];
    return sum;
  }
  return std::conj(inner(ket, bra, middle));
}

cplx inner(const LocalKet& bra, const LocalKet& ket) { return inner(bra, ket, NumberSet::all()); }

// ---------------------------------------------------------------------------
// Backend

BackendChoice::BackendChoice(Backend k, double tol) : kind(k), tolerance(tol) {
  if (!(tol > 0.0)) throw ContractViolation("backend tolerance must be positive");
}

std::string to_string(Backend backend) {
  return backend == Backend::TruncatedFock ? "truncated-fock" : "coherent-algebra";
}

cplx overlap(const LocalKet& a, const LocalKet& b, const BackendChoice& backend, int cutoff) {
  if (backend.kind == Backend::CoherentAlgebra) return inner(a, b);
  const auto x = a.fock_amplitudes(cutoff);
  const auto y = b.fock_amplitudes(cutoff);
  cplx sum = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) sum += std::conj(x[n]) * y[n];
  return sum;
}

// ---------------------------------------------------------------------------
// Canonical form helpers

namespace detail {

std::size_t hash_ket(const LocalKet& k) {
  auto mix = [](std::size_t h, double v) {
    std::uint64_t bits;
    if (v == 0.0) v = 0.0;  // fold -0.0
    std::memcpy(&bits, &v, sizeof bits);
    return h ^ (std::hash<std::uint64_t>{}(bits) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  };
  std::size_t h = k.is_coherent() ? 0x1234 : 0x5678;
  if (k.is_coherent()) {
    h = mix(h, k.amplitude().real());
    h = mix(h, k.amplitude().imag());
    h = mix(h, static_cast<double>(k.filter().kind()));
    for (int n : k.filter().numbers()) h = mix(h, n);
  } else {
    const auto& a = k.amplitudes();
    std::size_t last = a.size();
    while (last > 0 && a[last - 1] == cplx(0.0)) --last;
    for (std::size_t i = 0; i < last; ++i) {
      h = mix(h, a[i].real());
      h = mix(h, a[i].imag());
    }
  }
  return h;
}

int KetTable::intern(const LocalKet& k) {
  const std::size_t h = hash_ket(k);
  auto it = by_hash_.find(h);
  if (it != by_hash_.end())
    for (int id : it->second)
      if (kets_[id] == k) return id;
  for (std::size_t id = 0; id < kets_.size(); ++id)
    if (kets_[id].approx_equal(k)) {
      by_hash_[h].push_back(static_cast<int>(id));
      return static_cast<int>(id);
    }
  kets_.push_back(k);
  by_hash_[h].push_back(static_cast<int>(kets_.size() - 1));
  return static_cast<int>(kets_.size() - 1);
}

std::pair<cplx, LocalKet> normalize_ket(const LocalKet& k) {
  if (k.is_coherent()) return {1.0, k};
  const auto& a = k.amplitudes();
  const double n = std::sqrt(norm2(a));
  if (n == 0.0) return {0.0, k};
  double amax = 0.0;
  for (const auto& c : a) amax = std::max(amax, std::abs(c));
  std::size_t pivot = 0;
  while (std::abs(a[pivot]) < amax * (1.0 - 1e-9)) ++pivot;
  const cplx phase = a[pivot] / std::abs(a[pivot]);
  const cplx scale = n * phase;
  std::vector<cplx> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / scale;
  return {scale, LocalKet::fock(std::move(out))};
}

std::size_t IdVectorHash::operator()(const std::vector<int>& v) const {
  std::size_t h = v.size();
  for (int x : v) h ^= std::hash<int>{}(x) + 0x9e3779b9 + (h << 6) + (h >> 2);
  return h;
}

}  // namespace detail

using detail::KetTable;
using detail::normalize_ket;

// ---------------------------------------------------------------------------
// KetSum

KetSum::KetSum(ModeLayout layout, std::vector<KetTerm> terms) : layout_(std::move(layout)) {
  for (auto& t : terms) add_term(t.coeff, std::move(t.kets));
}

void KetSum::add_term(cplx coeff, std::vector<LocalKet> kets) {
  if (kets.size() != layout_.size()) throw ContractViolation("ket term does not match layout");
  terms_.push_back({coeff, std::move(kets)});
}

cplx KetSum::inner(const KetSum& ket) const {
  if (!(layout_ == ket.layout_)) return this->inner(ket.reordered(layout_));
  cplx sum = 0.0;
  for (const auto& b : terms_)
    for (const auto& k : ket.terms_) {
      cplx p = std::conj(b.coeff) * k.coeff;
      for (std::size_t m = 0; m < layout_.size() && p != cplx(0.0); ++m)
        p *= hybridtele::inner(b.kets[m], k.kets[m]);
      sum += p;
    }
  return sum;
}

double KetSum::norm() const { return std::sqrt(std::max(0.0, inner(*this).real())); }

KetSum KetSum::scaled(cplx factor) const {
  KetSum out = *this;
  for (auto& t : out.terms_) t.coeff *= factor;
  return out;
}

KetSum KetSum::operator+(const KetSum& other) const {
  if (!(layout_ == other.layout_)) return *this + other.reordered(layout_);
  KetSum out = *this;
  out.terms_.insert(out.terms_.end(), other.terms_.begin(), other.terms_.end());
  return out;
}

KetSum KetSum::tensor(const KetSum& other) const {
  KetSum out(layout_.concat(other.layout_));
  for (const auto& a : terms_)
    for (const auto& b : other.terms_) {
      auto kets = a.kets;
      kets.insert(kets.end(), b.kets.begin(), b.kets.end());
      out.terms_.push_back({a.coeff * b.coeff, std::move(kets)});
    }
  return out;
}

KetSum KetSum::reordered(const ModeLayout& layout) const {
  if (layout.size() != layout_.size()) throw ContractViolation("reorder: mode sets differ");
  std::vector<std::size_t> src(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) src[i] = layout_.index_of(layout[i].name);
  KetSum out(layout);
  for (const auto& t : terms_) {
    std::vector<LocalKet> kets;
    kets.reserve(src.size());
    for (auto s : src) kets.push_back(t.kets[s]);
    out.terms_.push_back({t.coeff, std::move(kets)});
  }
  return out;
}

KetSum KetSum::canonicalized() const {
  const std::size_t modes = layout_.size();
  std::vector<KetTable> tables(modes);
  std::unordered_map<std::vector<int>, std::size_t, detail::IdVectorHash> index;
  std::vector<std::vector<int>> keys;
  std::vector<cplx> coeffs;
  for (const auto& t : terms_) {
    cplx c = t.coeff;
    std::vector<int> key(modes);
    for (std::size_t m = 0; m < modes && c != cplx(0.0); ++m) {
      auto [s, k] = normalize_ket(t.kets[m]);
      c *= s;
      key[m] = tables[m].intern(k);
    }
    if (c == cplx(0.0)) continue;
    auto [it, inserted] = index.try_emplace(key, keys.size());
    if (inserted) {
      keys.push_back(std::move(key));
      coeffs.push_back(c);
    } else {
      coeffs[it->second] += c;
    }
  }
  KetSum out(layout_);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (std::abs(coeffs[i]) < kTermDropTolerance) continue;
    std::vector<LocalKet> kets;
    kets.reserve(modes);
    for (std::size_t m = 0; m < modes; ++m) kets.push_back(tables[m].at(keys[i][m]));
    out.terms_.push_back({coeffs[i], std::move(kets)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// TermSum

TermSum::TermSum(ModeLayout layout, std::vector<Term> terms) : layout_(std::move(layout)) {
  for (auto& t : terms) add_term(t.coeff, std::move(t.left), std::move(t.right));
}

void TermSum::add_term(cplx coeff, std::vector<LocalKet> left, std::vector<LocalKet> right) {
  if (left.size() != layout_.size() || right.size() != layout_.size())
    throw ContractViolation("term does not match layout");
  terms_.push_back({coeff, std::move(left), std::move(right)});
}

TermSum TermSum::outer(const KetSum& ket, const KetSum& bra) {
  const KetSum b = bra.layout() == ket.layout() ? bra : bra.reordered(ket.layout());
  TermSum out(ket.layout());
  out.terms_.reserve(ket.size() * b.size());
  for (const auto& k : ket.terms())
    for (const auto& r : b.terms()) out.terms_.push_back({k.coeff * std::conj(r.coeff), k.kets, r.kets});
  return out;
}

cplx TermSum::trace() const {
  cplx sum = 0.0;
  for (const auto& t : terms_) {
    cplx p = t.coeff;
    for (std::size_t m = 0; m < layout_.size() && p != cplx(0.0); ++m) p *= inner(t.right[m], t.left[m]);
    sum += p;
  }
  return sum;
}

TermSum TermSum::adjoint() const {
  TermSum out(layout_);
  out.terms_.reserve(terms_.size());
  for (const auto& t : terms_) out.terms_.push_back({std::conj(t.coeff), t.right, t.left});
  return out;
}

TermSum TermSum::scaled(cplx factor) const {
  TermSum out = *this;
  for (auto& t : out.terms_) t.coeff *= factor;
  return out;
}

TermSum TermSum::operator+(const TermSum& other) const {
  if (!(layout_ == other.layout_)) return *this + other.reordered(layout_);
  TermSum out = *this;
  out.terms_.insert(out.terms_.end(), other.terms_.begin(), other.terms_.end());
  return out;
}

TermSum TermSum::tensor(const TermSum& other) const {
  TermSum out(layout_.concat(other.layout_));
  out.terms_.reserve(terms_.size() * other.terms_.size());
  for (const auto& a : terms_)
    for (const auto& b : other.terms_) {
      auto l = a.left;
      l.insert(l.end(), b.left.begin(), b.left.end());
      auto r = a.right;
      r.insert(r.end(), b.right.begin(), b.right.end());
      out.terms_.push_back({a.coeff * b.coeff, std::move(l), std::move(r)});
    }
  return out;
}

TermSum TermSum::reordered(const ModeLayout& layout) const {
  if (layout.size() != layout_.size()) throw ContractViolation("reorder: mode sets differ");
  std::vector<std::size_t> src(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) src[i] = layout_.index_of(layout[i].name);
  TermSum out(layout);
  out.terms_.reserve(terms_.size());
  for (const auto& t : terms_) {
    std::vector<LocalKet> l, r;
    l.reserve(src.size());
    r.reserve(src.size());
    for (auto s : src) {
      l.push_back(t.left[s]);
      r.push_back(t.right[s]);
    }
    out.terms_.push_back({t.coeff, std::move(l), std::move(r)});
  }
  return out;
}

TermSum TermSum::canonicalized() const {
  const std::size_t modes = layout_.size();
  std::vector<KetTable> tables(modes);
  std::unordered_map<std::vector<int>, std::size_t, detail::IdVectorHash> index;
  std::vector<std::vector<int>> keys;
  std::vector<cplx> coeffs;
  for (const auto& t : terms_) {
    cplx c = t.coeff;
    std::vector<int> key(2 * modes);
    for (std::size_t m = 0; m < modes && c != cplx(0.0); ++m) {
      auto [sl, kl] = normalize_ket(t.left[m]);
      auto [sr, kr] = normalize_ket(t.right[m]);
      c *= sl * std::conj(sr);
      key[2 * m] = tables[m].intern(kl);
      key[2 * m + 1] = tables[m].intern(kr);
    }
    if (c == cplx(0.0)) continue;
    auto [it, inserted] = index.try_emplace(key, keys.size());
    if (inserted) {
      keys.push_back(std::move(key));
      coeffs.push_back(c);
    } else {
      coeffs[it->second] += c;
    }
  }
  TermSum out(layout_);
  out.terms_.reserve(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (std::abs(coeffs[i]) < kTermDropTolerance) continue;
    std::vector<LocalKet> l, r;
    l.reserve(modes);
    r.reserve(modes);
    for (std::size_t m = 0; m < modes; ++m) {
      l.push_back(tables[m].at(keys[i][2 * m]));
      r.push_back(tables[m].at(keys[i][2 * m + 1]));
    }
    out.terms_.push_back({coeffs[i], std::move(l), std::move(r)});
  }
  return out;
}

TermSum to_backend(const TermSum& s, const BackendChoice& backend) {
  if (backend.kind == Backend::CoherentAlgebra) return s;
  TermSum out(s.layout());
  for (const auto& t : s.terms()) {
    std::vector<LocalKet> l, r;
    for (std::size_t m = 0; m < s.layout().size(); ++m) {
      const int cut = s.layout()[m].cutoff;
      l.push_back(LocalKet::fock(t.left[m].fock_amplitudes(cut)));
      r.push_back(LocalKet::fock(t.right[m].fock_amplitudes(cut)));
    }
    out.add_term(t.coeff, std::move(l), std::move(r));
  }
  return out.canonicalized();
}

KetSum to_backend(const KetSum& s, const BackendChoice& backend) {
  if (backend.kind == Backend::CoherentAlgebra) return s;
  KetSum out(s.layout());
  for (const auto& t : s.terms()) {
    std::vector<LocalKet> k;
    for (std::size_t m = 0; m < s.layout().size(); ++m)
      k.push_back(LocalKet::fock(t.kets[m].fock_amplitudes(s.layout()[m].cutoff)));
    out.add_term(t.coeff, std::move(k));
  }
  return out.canonicalized();
}

// ---------------------------------------------------------------------------
// Beam splitter

namespace {

// blocks[N] column n: image of |n, N-n> expanded over |k, N-k>.
std::vector<Eigen::MatrixXd> beam_splitter_blocks(int max_total) {
  std::vector<Eigen::MatrixXd> blocks(static_cast<std::size_t>(max_total) + 1);
  for (int N = 0; N <= max_total; ++N) blocks[N] = Eigen::MatrixXd::Zero(N + 1, N + 1);
  // Creation operators act on v (block N) producing block N+1:
  //   i^dag |k, N-k> = sqrt(k+1) |k+1, N-k>,  j^dag |k, N-k> = sqrt(N-k+1) |k, N+1-k>.
  auto apply = [](const Eigen::VectorXd& v, double ci, double cj) {
    const int N = static_cast<int>(v.size()) - 1;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(N + 2);
    for (int k = 0; k <= N; ++k) {
      out[k + 1] += ci * std::sqrt(static_cast<double>(k + 1)) * v[k];
      out[k] += cj * std::sqrt(static_cast<double>(N - k + 1)) * v[k];
    }
    return out;
  };
  // U_{i,j}: i^dag -> (i^dag - j^dag)/sqrt2 and j^dag -> (i^dag + j^dag)/sqrt2.
  Eigen::VectorXd b_pow = Eigen::VectorXd::Ones(1);  // (U j^dag U^dag)^m |0> / sqrt(m!)
  for (int m = 0; m <= max_total; ++m) {
    Eigen::VectorXd v = b_pow;
    for (int n = 0; n + m <= max_total; ++n) {
      blocks[n + m].col(n) = v;
      if (n + m < max_total) v = apply(v, kSqrtHalf, -kSqrtHalf) / std::sqrt(static_cast<double>(n + 1));
    }
    if (m < max_total) b_pow = apply(b_pow, kSqrtHalf, kSqrtHalf) / std::sqrt(static_cast<double>(m + 1));
  }
  return blocks;
}

struct SchmidtTerm {
  cplx coeff;
  LocalKet ki;
  LocalKet kj;
};

class BeamSplitterKernel {
 public:
  BeamSplitterKernel(int cut_i, int cut_j, double tolerance)
      : cut_i_(cut_i), cut_j_(cut_j), tolerance_(tolerance) {}

  const std::vector<SchmidtTerm>& decompose(const LocalKet& a, const LocalKet& b) {
    const std::size_t h = detail::hash_ket(a) * 31 + detail::hash_ket(b);
    auto& bucket = cache_[h];
    for (const auto& entry : bucket)
      if (entry.a == a && entry.b == b) return entry.terms;
    bucket.push_back({a, b, compute(a, b)});
    return bucket.back().terms;
  }

 private:
  struct Entry {
    LocalKet a, b;
    std::vector<SchmidtTerm> terms;
  };

  static std::optional<cplx> as_coherent(const LocalKet& k) {
    if (k.is_coherent()) {
      if (k.filter().is_all()) return k.amplitude();
      return std::nullopt;
    }
    if (k.is_vacuum_like()) return cplx(0.0);
    return std::nullopt;
  }

  std::vector<SchmidtTerm> compute(const LocalKet& a, const LocalKet& b) {
    const auto ga = as_coherent(a);
    const auto gb = as_coherent(b);
    const bool any_coherent = a.is_coherent() || b.is_coherent();
    if (ga && gb && any_coherent) {
      cplx scale = 1.0;
      if (a.is_fock()) scale *= a.amplitudes()[0];
      if (b.is_fock()) scale *= b.amplitudes()[0];
      return {{scale, LocalKet::coherent((*ga + *gb) * kSqrtHalf), LocalKet::coherent((*gb - *ga) * kSqrtHalf)}};
    }
    const auto x = a.fock_amplitudes(cut_i_);
    const auto y = b.fock_amplitudes(cut_j_);
    int nx = static_cast<int>(x.size()) - 1;
    int ny = static_cast<int>(y.size()) - 1;
    while (nx > 0 && x[nx] == cplx(0.0)) --nx;
    while (ny > 0 && y[ny] == cplx(0.0)) --ny;
    const int max_total = nx + ny;
    if (static_cast<int>(blocks_.size()) <= max_total) blocks_ = beam_splitter_blocks(max_total);

    CMatrix w = CMatrix::Zero(cut_i_ + 1, cut_j_ + 1);
    for (int n = 0; n <= nx; ++n) {
      if (x[n] == cplx(0.0)) continue;
      for (int m = 0; m <= ny; ++m) {
        const cplx c = x[n] * y[m];
        if (c == cplx(0.0)) continue;
        const int N = n + m;
        const auto col = blocks_[N].col(n);
        for (int k = std::max(0, N - cut_j_); k <= std::min(N, cut_i_); ++k) w(k, N - k) += c * col[k];
      }
    }
    const double in_weight = norm2(x) * norm2(y);
    const double lost = in_weight - w.squaredNorm();
    if (in_weight > 0.0 && lost > tolerance_ * in_weight) {
      std::ostringstream os;
      os << "beam splitter output exceeds cutoffs (" << cut_i_ << ", " << cut_j_ << "), lost weight " << lost;
      throw CutoffInsufficientError(os.str());
    }
    Eigen::JacobiSVD<CMatrix> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    std::vector<SchmidtTerm> out;
    if (s.size() == 0 || s[0] == 0.0) return out;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      if (s[k] <= kRefactorDropRelative * s[0]) break;
      std::vector<cplx> u(svd.matrixU().col(k).data(), svd.matrixU().col(k).data() + cut_i_ + 1);
      CVector vc = svd.matrixV().col(k).conjugate();
      std::vector<cplx> v(vc.data(), vc.data() + cut_j_ + 1);
      out.push_back({s[k], LocalKet::fock(std::move(u)), LocalKet::fock(std::move(v))});
    }
    return out;
  }

  int cut_i_;
  int cut_j_;
  double tolerance_;
  std::vector<Eigen::MatrixXd> blocks_;
  std::unordered_map<std::size_t, std::vector<Entry>> cache_;
};

}  // namespace

CMatrix beam_splitter_block_unitary(int max_total) {
  if (max_total < 0) throw ContractViolation("max_total must be nonnegative");
  const auto blocks = beam_splitter_blocks(max_total);
  const int dim = (max_total + 1) * (max_total + 2) / 2;
  CMatrix u = CMatrix::Zero(dim, dim);
  int offset = 0;
  for (int N = 0; N <= max_total; ++N) {
    u.block(offset, offset, N + 1, N + 1) = blocks[N].cast<cplx>();
    offset += N + 1;
  }
  return u;
}

TermSum apply_beam_splitter(const TermSum& s, std::string_view i, std::string_view j, double tolerance) {
  if (i == j) throw ContractViolation("beam splitter needs two distinct modes");
  const std::size_t mi = s.layout().index_of(i);
  const std::size_t mj = s.layout().index_of(j);
  BeamSplitterKernel kernel(s.layout()[mi].cutoff, s.layout()[mj].cutoff, tolerance);
  TermSum out(s.layout());
  for (const auto& t : s.terms()) {
    const auto left = kernel.decompose(t.left[mi], t.left[mj]);
    const auto& right = kernel.decompose(t.right[mi], t.right[mj]);
    for (const auto& l : left)
      for (const auto& r : right) {
        auto lk = t.left;
        auto rk = t.right;
        lk[mi] = l.ki;
        lk[mj] = l.kj;
        rk[mi] = r.ki;
        rk[mj] = r.kj;
        out.add_term(t.coeff * l.coeff * std::conj(r.coeff), std::move(lk), std::move(rk));
      }
  }
  return out.canonicalized();
}

KetSum apply_beam_splitter(const KetSum& s, std::string_view i, std::string_view j, double tolerance) {
  if (i == j) throw ContractViolation("beam splitter needs two distinct modes");
  const std::size_t mi = s.layout().index_of(i);
  const std::size_t mj = s.layout().index_of(j);
  BeamSplitterKernel kernel(s.layout()[mi].cutoff, s.layout()[mj].cutoff, tolerance);
  KetSum out(s.layout());
  for (const auto& t : s.terms())
    for (const auto& d : kernel.decompose(t.kets[mi], t.kets[mj])) {
      auto k = t.kets;
      k[mi] = d.ki;
      k[mj] = d.kj;
      out.add_term(t.coeff * d.coeff, std::move(k));
    }
  return out.canonicalized();
}

// ---------------------------------------------------------------------------
// Projectors

namespace {

std::vector<std::size_t> projector_indices(const ModeLayout& layout, const ProjectorSum& p) {
  std::vector<std::size_t> idx;
  for (const auto& m : p.modes) idx.push_back(layout.index_of(m));
  for (const auto& c : p.components)
    if (c.factors.size() != p.modes.size())
      throw ContractViolation("projector component does not match its mode list");
  return idx;
}

}  // namespace

TermSum project(const TermSum& s, const ProjectorSum& p) {
  const auto idx = projector_indices(s.layout(), p);
  TermSum out(s.layout());
  for (const auto& t : s.terms())
    for (const auto& kc : p.components)
      for (const auto& bc : p.components) {
        auto l = t.left;
        auto r = t.right;
        bool zero = false;
        for (std::size_t q = 0; q < idx.size() && !zero; ++q) {
          l[idx[q]] = l[idx[q]].projected(kc.factors[q]);
          r[idx[q]] = r[idx[q]].projected(bc.factors[q]);
          zero = l[idx[q]].norm() == 0.0 || r[idx[q]].norm() == 0.0;
        }
        if (!zero) out.add_term(t.coeff * kc.weight * bc.weight, std::move(l), std::move(r));
      }
  return out.canonicalized();
}

TermSum partial_trace(const TermSum& s, const std::vector<std::string>& keep) {
  const ModeLayout kept = s.layout().subset(keep);
  std::vector<bool> is_kept(s.layout().size(), false);
  for (std::size_t m = 0; m < kept.size(); ++m) is_kept[s.layout().index_of(kept[m].name)] = true;
  TermSum out(kept);
  for (const auto& t : s.terms()) {
    cplx c = t.coeff;
    std::vector<LocalKet> l, r;
    for (std::size_t m = 0; m < s.layout().size() && c != cplx(0.0); ++m) {
      if (is_kept[m]) {
        l.push_back(t.left[m]);
        r.push_back(t.right[m]);
      } else {
        c *= inner(t.right[m], t.left[m]);
      }
    }
    if (c != cplx(0.0)) out.add_term(c, std::move(l), std::move(r));
  }
  return out.canonicalized();
}

TermSum project_and_trace(const TermSum& s, const ProjectorSum& p, const std::vector<std::string>& keep) {
  const auto idx = projector_indices(s.layout(), p);
  const ModeLayout kept = s.layout().subset(keep);
  std::vector<int> role(s.layout().size(), 0);  // 0 traced, 1 kept, 2 projected
  for (std::size_t m = 0; m < kept.size(); ++m) role[s.layout().index_of(kept[m].name)] = 1;
  for (auto m : idx) {
    if (role[m] == 1) throw ContractViolation("project_and_trace: projector acts on a kept mode");
    role[m] = 2;
  }
  TermSum out(kept);
  for (const auto& t : s.terms()) {
    cplx c = t.coeff;
    std::vector<LocalKet> l, r;
    for (std::size_t m = 0; m < s.layout().size() && c != cplx(0.0); ++m) {
      if (role[m] == 1) {
        l.push_back(t.left[m]);
        r.push_back(t.right[m]);
      } else if (role[m] == 0) {
        c *= inner(t.right[m], t.left[m]);
      }
    }
    if (c == cplx(0.0)) continue;
    cplx w = 0.0;
    for (const auto& comp : p.components) {
      cplx prod = comp.weight;
      for (std::size_t q = 0; q < idx.size() && prod != cplx(0.0); ++q)
        prod *= inner(t.right[idx[q]], t.left[idx[q]], comp.factors[q]);
      w += prod;
    }
    if (w != cplx(0.0)) out.add_term(c * w, std::move(l), std::move(r));
  }
  return out.canonicalized();
}

cplx projector_weight(const TermSum& s, const ProjectorSum& p) {
  return project_and_trace(s, p, {}).trace();
}

// ---------------------------------------------------------------------------
// Contractions

namespace {

// <psi| (x)_m |kets_m>
cplx product_amplitude(const KetSum& psi, const std::vector<LocalKet>& kets) {
  cplx sum = 0.0;
  for (const auto& p : psi.terms()) {
    cplx prod = std::conj(p.coeff);
    for (std::size_t m = 0; m < kets.size() && prod != cplx(0.0); ++m) prod *= inner(p.kets[m], kets[m]);
    sum += prod;
  }
  return sum;
}

}  // namespace

cplx matrix_element(const KetSum& bra_in, const TermSum& s, const KetSum& ket_in) {
  const KetSum bra = bra_in.layout() == s.layout() ? bra_in : bra_in.reordered(s.layout());
  const KetSum ket = ket_in.layout() == s.layout() ? ket_in : ket_in.reordered(s.layout());
  cplx sum = 0.0;
  for (const auto& t : s.terms())
    sum += t.coeff * product_amplitude(bra, t.left) * std::conj(product_amplitude(ket, t.right));
  return sum;
}

cplx expectation(const TermSum& s, const KetSum& psi) { return matrix_element(psi, s, psi); }

KetSum contract_bra(const KetSum& bra, const KetSum& ket) {
  std::vector<std::size_t> bra_idx;
  std::vector<bool> contracted(ket.layout().size(), false);
  for (std::size_t b = 0; b < bra.layout().size(); ++b) {
    const auto m = ket.layout().index_of(bra.layout()[b].name);
    bra_idx.push_back(m);
    contracted[m] = true;
  }
  std::vector<std::string> rest;
  for (std::size_t m = 0; m < ket.layout().size(); ++m)
    if (!contracted[m]) rest.push_back(ket.layout()[m].name);
  KetSum out(ket.layout().subset(rest));
  for (const auto& b : bra.terms())
    for (const auto& k : ket.terms()) {
      cplx c = std::conj(b.coeff) * k.coeff;
      for (std::size_t q = 0; q < bra_idx.size() && c != cplx(0.0); ++q) c *= inner(b.kets[q], k.kets[bra_idx[q]]);
      if (c == cplx(0.0)) continue;
      std::vector<LocalKet> kets;
      for (std::size_t m = 0; m < ket.layout().size(); ++m)
        if (!contracted[m]) kets.push_back(k.kets[m]);
      out.add_term(c, std::move(kets));
    }
  return out.canonicalized();
}

namespace {

// s = E C E^dag with E the matrix of distinct product kets.
struct ProductIndex {
  std::vector<KetTable> tables;            // per mode
  std::vector<std::vector<int>> products;  // local ids per product ket
  CMatrix coeffs;
};

ProductIndex index_products(const TermSum& s) {
  const std::size_t modes = s.layout().size();
  ProductIndex p{std::vector<KetTable>(modes), {}, {}};
  std::unordered_map<std::vector<int>, int, detail::IdVectorHash> index;
  auto product_id = [&](const std::vector<LocalKet>& kets) {
    std::vector<int> key(modes);
    for (std::size_t m = 0; m < modes; ++m) key[m] = p.tables[m].intern(kets[m]);
    auto [it, inserted] = index.try_emplace(key, static_cast<int>(p.products.size()));
    if (inserted) p.products.push_back(std::move(key));
    return it->second;
  };
  std::vector<std::tuple<int, int, cplx>> entries;
  for (const auto& t : s.terms()) {
    const int l = product_id(t.left);
    const int r = product_id(t.right);
    entries.emplace_back(l, r, t.coeff);
  }
  const int K = static_cast<int>(p.products.size());
  p.coeffs = CMatrix::Zero(K, K);
  for (const auto& [l, r, c] : entries) p.coeffs(l, r) += c;
  return p;
}

CMatrix local_gram(const KetTable& table) {
  const int u = static_cast<int>(table.size());
  CMatrix g(u, u);
  for (int a = 0; a < u; ++a)
    for (int b = 0; b < u; ++b) g(a, b) = inner(table.at(a), table.at(b));
  return g;
}

// Returns C and G = E^dag E.
struct GramForm {
  CMatrix coeffs;
  CMatrix gram;
};

GramForm gram_form(const TermSum& s) {
  auto p = index_products(s);
  const std::size_t modes = p.tables.size();
  std::vector<CMatrix> local(modes);
  for (std::size_t m = 0; m < modes; ++m) local[m] = local_gram(p.tables[m]);
  const int K = static_cast<int>(p.products.size());
  GramForm g{std::move(p.coeffs), CMatrix::Zero(K, K)};
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) {
      cplx x = 1.0;
      for (std::size_t m = 0; m < modes; ++m) x *= local[m](p.products[a][m], p.products[b][m]);
      g.gram(a, b) = x;
    }
  return g;
}

CMatrix psd_sqrt(const CMatrix& g) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

// Columns: one mode's kets in an orthonormal basis of their span. Fock kets go
// through an SVD of their amplitudes, which avoids squaring the conditioning
// the way a Gram matrix does.
CMatrix local_coordinates(const KetTable& table) {
  const int u = static_cast<int>(table.size());
  std::size_t len = 0;
  bool fock = true;
  for (int a = 0; a < u && fock; ++a) {
    fock = table.at(a).is_fock();
    if (fock) len = std::max(len, table.at(a).amplitudes().size());
  }
  if (fock) {
    CMatrix amps = CMatrix::Zero(static_cast<Eigen::Index>(len), u);
    for (int a = 0; a < u; ++a) {
      const auto& x = table.at(a).amplitudes();
      for (std::size_t n = 0; n < x.size(); ++n) amps(static_cast<Eigen::Index>(n), a) = x[n];
    }
    Eigen::JacobiSVD<CMatrix> svd(amps, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv[rank] > 1e-15 * sv[0]) ++rank;
    return svd.matrixU().leftCols(rank).adjoint() * amps;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(local_gram(table));
  const auto& ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] > 1e-15 * top) keep.push_back(i);
  CMatrix out(static_cast<Eigen::Index>(keep.size()), u);
  for (std::size_t k = 0; k < keep.size(); ++k)
    out.row(static_cast<Eigen::Index>(k)) = std::sqrt(ev[keep[k]]) * es.eigenvectors().col(keep[k]).adjoint();
  return out;
}

// E C E^dag expressed as a K x K (or smaller) matrix in an orthonormal basis of
// the span, when the product coordinates are small enough to form.
std::optional<CMatrix> orthonormal_form(const TermSum& s) {
  constexpr double kMaxEntries = 2e7;
  auto p = index_products(s);
  const std::size_t modes = p.tables.size();
  std::vector<CMatrix> coords(modes);
  double dim = 1.0;
  for (std::size_t m = 0; m < modes; ++m) {
    coords[m] = local_coordinates(p.tables[m]);
    dim *= static_cast<double>(coords[m].rows());
  }
  const auto K = static_cast<Eigen::Index>(p.products.size());
  if (dim * static_cast<double>(K) > kMaxEntries) return std::nullopt;
  const auto D = static_cast<Eigen::Index>(dim);
  CMatrix prod(D, K);
  for (Eigen::Index a = 0; a < K; ++a) {
    CVector v = CVector::Ones(1);
    for (std::size_t m = 0; m < modes; ++m) {
      const CVector c = coords[m].col(p.products[a][m]);
      CVector next(v.size() * c.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) next.segment(i * c.size(), c.size()) = v[i] * c;
      v = std::move(next);
    }
    prod.col(a) = v;
  }
  if (D <= K) return CMatrix(prod * p.coeffs * prod.adjoint());
  Eigen::HouseholderQR<CMatrix> qr(prod);
  const CMatrix r = qr.matrixQR().topRows(K).triangularView<Eigen::Upper>();
  return CMatrix(r * p.coeffs * r.adjoint());
}

}  // namespace

double trace_norm(const TermSum& s) {
  if (s.empty()) return 0.0;
  if (auto m = orthonormal_form(s)) {
    Eigen::JacobiSVD<CMatrix> svd(*m);
    return svd.singularValues().sum();
  }
  const auto g = gram_form(s);
  const CMatrix h = psd_sqrt(g.gram);
  const CMatrix m = h * g.coeffs * h;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().sum();
}

double trace_distance(const TermSum& a, const TermSum& b) {
  return 0.5 * trace_norm((a - b).canonicalized());
}

double purity(const TermSum& s) {
  if (s.empty()) return 0.0;
  const auto g = gram_form(s);
  const CMatrix cg = g.coeffs * g.gram;
  return (cg * cg).trace().real();
}

namespace {

std::vector<std::size_t> dense_dims(const ModeLayout& layout) {
  std::vector<std::size_t> d;
  for (const auto& m : layout.modes()) d.push_back(static_cast<std::size_t>(m.cutoff) + 1);
  return d;
}

CVector kron_kets(const ModeLayout& layout, const std::vector<LocalKet>& kets, std::size_t dim) {
  CVector v = CVector::Ones(1);
  for (std::size_t m = 0; m < layout.size(); ++m) {
    const auto a = kets[m].fock_amplitudes(layout[m].cutoff);
    CVector next(v.size() * static_cast<Eigen::Index>(a.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
      for (std::size_t k = 0; k < a.size(); ++k) next[i * static_cast<Eigen::Index>(a.size()) + k] = v[i] * a[k];
    v = std::move(next);
  }
  (void)dim;
  return v;
}

}  // namespace

CMatrix to_dense(const TermSum& s, std::size_t entry_limit) {
  std::size_t dim = 1;
  for (auto d : dense_dims(s.layout())) {
    dim *= d;
    if (dim * dim > entry_limit) throw DimensionLimitError("dense operator exceeds entry limit");
  }
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& t : s.terms()) {
    const CVector l = kron_kets(s.layout(), t.left, dim);
    const CVector r = kron_kets(s.layout(), t.right, dim);
    out.noalias() += t.coeff * l * r.adjoint();
  }
  return out;
}

CVector to_dense(const KetSum& s, std::size_t entry_limit) {
  std::size_t dim = 1;
  for (auto d : dense_dims(s.layout())) {
    dim *= d;
    if (dim > entry_limit) throw DimensionLimitError("dense vector exceeds entry limit");
  }
  CVector out = CVector::Zero(static_cast<Eigen::Index>(dim));
  for (const auto& t : s.terms()) out += t.coeff * kron_kets(s.layout(), t.kets, dim);
  return out;
}

}  // namespace hybridtele
