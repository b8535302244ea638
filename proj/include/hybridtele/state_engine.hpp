#pragma once

// Multimode bosonic states and operators as weighted sums of product terms.
//
// A TermSum holds  sum_k c_k (x)_m |L_{k,m}><R_{k,m}|  over the modes of a
// ModeLayout. Each local ket is either a finite Fock vector or an exact
// coherent state (optionally restricted to a set of photon numbers). All
// contractions reduce to single-mode inner products, which are evaluated in
// closed form for coherent states and by finite sums otherwise.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace hybridtele {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

class CutoffInsufficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Weight beyond the cutoff tolerated when a coherent state is expanded in Fock space.
inline constexpr double kTruncationTolerance = 1e-10;
/// Entrywise tolerance under which two local kets are considered identical.
inline constexpr double kKetMergeTolerance = 1e-12;
/// Terms with |coefficient| below this are dropped by canonicalization.
inline constexpr double kTermDropTolerance = 1e-14;
/// Default bound on the number of entries of a dense operator.
inline constexpr std::size_t kDenseEntryLimit = 10'000'000;

// ---------------------------------------------------------------------------
// Mode layout

enum class ModeRole { Photonic, Coherent };

struct ModeSpec {
  std::string name;
  int cutoff = 2;
  ModeRole role = ModeRole::Photonic;
};

/// Cutoff rule for a mode carrying coherent amplitudes up to |gamma|:
/// ceil(|gamma|^2 + 6|gamma| + 10).
int default_cutoff(double max_amplitude);

inline constexpr int kPhotonicCutoff = 2;

class ModeLayout {
 public:
  ModeLayout() = default;
  explicit ModeLayout(std::vector<ModeSpec> modes);

  std::size_t size() const { return modes_.size(); }
  const ModeSpec& operator[](std::size_t i) const { return modes_[i]; }
  const std::vector<ModeSpec>& modes() const { return modes_; }

  bool contains(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;

  /// Sub-layout with the named modes, kept in this layout's order.
  ModeLayout subset(const std::vector<std::string>& keep) const;
  ModeLayout concat(const ModeLayout& other) const;

  bool operator==(const ModeLayout& other) const;

 private:
  std::vector<ModeSpec> modes_;
};

// ---------------------------------------------------------------------------
// Photon-number sets (supports of diagonal single-mode projectors)

class NumberSet {
 public:
  enum class Kind { All, Finite, EvenPositive, Odd };

  NumberSet() = default;
  static NumberSet all() { return NumberSet(); }
  static NumberSet finite(std::vector<int> numbers);
  static NumberSet only(int n) { return finite({n}); }
  /// {2, 4, 6, ...}
  static NumberSet even_positive();
  /// {1, 3, 5, ...}
  static NumberSet odd();

  Kind kind() const { return kind_; }
  const std::vector<int>& numbers() const { return numbers_; }
  bool is_all() const { return kind_ == Kind::All; }
  bool empty() const { return kind_ == Kind::Finite && numbers_.empty(); }
  bool contains(int n) const;

  NumberSet intersect(const NumberSet& other) const;

  /// sum over n in the set of z^n / n!
  cplx exp_series(cplx z) const;

  bool operator==(const NumberSet& other) const = default;

 private:
  Kind kind_ = Kind::All;
  std::vector<int> numbers_;
};

// ---------------------------------------------------------------------------
// Local kets

class LocalKet {
 public:
  static LocalKet fock(std::vector<cplx> amplitudes);
  static LocalKet number(int n);
  static LocalKet vacuum() { return number(0); }
  /// Pi_S |gamma>, with S = all photon numbers by default.
  static LocalKet coherent(cplx amplitude, NumberSet filter = NumberSet::all());

  bool is_coherent() const { return std::holds_alternative<Coherent>(data_); }
  bool is_fock() const { return !is_coherent(); }

  cplx amplitude() const;
  const NumberSet& filter() const;
  const std::vector<cplx>& amplitudes() const;

  /// True for a Fock ket proportional to |0> or an unfiltered coherent ket with zero amplitude.
  bool is_vacuum_like() const;

  /// Fock coefficients 0..cutoff. Throws CutoffInsufficientError if an unfiltered
  /// coherent state loses more than `tolerance` weight, or if a Fock ket has
  /// support above the cutoff.
  std::vector<cplx> fock_amplitudes(int cutoff, double tolerance = kTruncationTolerance) const;

  LocalKet projected(const NumberSet& set) const;
  double norm() const;

  /// Entrywise comparison (coherent amplitudes, or Fock coefficients with zero padding).
  bool approx_equal(const LocalKet& other, double tolerance = kKetMergeTolerance) const;
  bool operator==(const LocalKet& other) const;

 private:
  struct Fock {
    std::vector<cplx> amps;
  };
  struct Coherent {
    cplx amplitude;
    NumberSet filter;
  };
  explicit LocalKet(std::variant<Fock, Coherent> d) : data_(std::move(d)) {}
  std::variant<Fock, Coherent> data_;
};

/// Fock coefficients e^{-|g|^2/2} g^n / sqrt(n!) for n = 0..cutoff.
std::vector<cplx> coherent_fock_coefficients(cplx amplitude, int cutoff);

/// <bra|ket>, exact for every representation pair.
cplx inner(const LocalKet& bra, const LocalKet& ket);
/// <bra| Pi_S |ket>.
cplx inner(const LocalKet& bra, const LocalKet& ket, const NumberSet& middle);

// ---------------------------------------------------------------------------
// Backends

enum class Backend { TruncatedFock, CoherentAlgebra };

struct BackendChoice {
  Backend kind = Backend::CoherentAlgebra;
  /// Comparison tolerance for results computed with this backend.
  double tolerance = 1e-10;

  BackendChoice() = default;
  BackendChoice(Backend k, double tol);
  static BackendChoice coherent_algebra() { return {Backend::CoherentAlgebra, 1e-10}; }
  static BackendChoice truncated_fock() { return {Backend::TruncatedFock, 1e-6}; }
};

std::string to_string(Backend backend);

/// <a|b> for two kets of one mode. TruncatedFock expands both kets to `cutoff`.
cplx overlap(const LocalKet& a, const LocalKet& b, const BackendChoice& backend, int cutoff);

// ---------------------------------------------------------------------------
// Pure states

struct KetTerm {
  cplx coeff;
  std::vector<LocalKet> kets;
};

class KetSum {
 public:
  KetSum() = default;
  explicit KetSum(ModeLayout layout) : layout_(std::move(layout)) {}
  KetSum(ModeLayout layout, std::vector<KetTerm> terms);

  const ModeLayout& layout() const { return layout_; }
  const std::vector<KetTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  void add_term(cplx coeff, std::vector<LocalKet> kets);

  cplx inner(const KetSum& ket) const;  // <*this|ket>
  double norm() const;
  KetSum scaled(cplx factor) const;
  KetSum operator+(const KetSum& other) const;
  KetSum operator-(const KetSum& other) const { return *this + other.scaled(-1.0); }
  KetSum tensor(const KetSum& other) const;
  /// Same ket with the modes reordered to `layout` (which must hold the same modes).
  KetSum reordered(const ModeLayout& layout) const;
  KetSum canonicalized() const;

 private:
  ModeLayout layout_;
  std::vector<KetTerm> terms_;
};

// ---------------------------------------------------------------------------
// Operators

struct Term {
  cplx coeff;
  std::vector<LocalKet> left;
  std::vector<LocalKet> right;
};

class TermSum {
 public:
  TermSum() = default;
  explicit TermSum(ModeLayout layout) : layout_(std::move(layout)) {}
  TermSum(ModeLayout layout, std::vector<Term> terms);

  /// |ket><bra|
  static TermSum outer(const KetSum& ket, const KetSum& bra);
  static TermSum projector(const KetSum& ket) { return outer(ket, ket); }

  const ModeLayout& layout() const { return layout_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  void add_term(cplx coeff, std::vector<LocalKet> left, std::vector<LocalKet> right);

  cplx trace() const;
  TermSum adjoint() const;
  TermSum scaled(cplx factor) const;
  TermSum operator+(const TermSum& other) const;
  TermSum operator-(const TermSum& other) const { return *this + other.scaled(-1.0); }
  TermSum tensor(const TermSum& other) const;
  TermSum reordered(const ModeLayout& layout) const;

  /// Normalizes local kets into the coefficients, merges terms whose kets
  /// coincide within kKetMergeTolerance and drops negligible terms.
  TermSum canonicalized() const;

 private:
  ModeLayout layout_;
  std::vector<Term> terms_;
};

/// Re-expresses every coherent ket as a Fock vector at its mode's cutoff when
/// the backend is TruncatedFock; returns the input unchanged otherwise.
TermSum to_backend(const TermSum& s, const BackendChoice& backend);
KetSum to_backend(const KetSum& s, const BackendChoice& backend);

// ---------------------------------------------------------------------------
// Beam splitter  U_{i,j}: i^dag -> (i^dag - j^dag)/sqrt2, j^dag -> (i^dag + j^dag)/sqrt2,
// so that U|a>_i|b>_j = |(a+b)/sqrt2>_i |(b-a)/sqrt2>_j.

TermSum apply_beam_splitter(const TermSum& s, std::string_view i, std::string_view j,
                            double tolerance = kTruncationTolerance);
KetSum apply_beam_splitter(const KetSum& s, std::string_view i, std::string_view j,
                           double tolerance = kTruncationTolerance);

/// Dense beam-splitter unitary on the two-mode states with n_i + n_j <= max_total,
/// basis ordered by (total, n_i).
CMatrix beam_splitter_block_unitary(int max_total);

// ---------------------------------------------------------------------------
// Projectors

struct ProductProjector {
  double weight = 1.0;
  std::vector<NumberSet> factors;  // one per mode of the owning ProjectorSum
};

/// sum_k w_k (x)_m Pi_{S_{k,m}} over a list of modes.
struct ProjectorSum {
  std::vector<std::string> modes;
  std::vector<ProductProjector> components;
};

/// P s P^dag, unnormalized.
TermSum project(const TermSum& s, const ProjectorSum& p);

TermSum partial_trace(const TermSum& s, const std::vector<std::string>& keep);

/// partial_trace(project(s, p), keep) without forming the projected operator.
/// Requires the projector's modes to be traced out and its components to be
/// mutually orthogonal.
TermSum project_and_trace(const TermSum& s, const ProjectorSum& p,
                          const std::vector<std::string>& keep);

/// Tr[ P s ] for the full layout.
cplx projector_weight(const TermSum& s, const ProjectorSum& p);

// ---------------------------------------------------------------------------
// Contractions and norms

/// <psi| s |psi>
cplx expectation(const TermSum& s, const KetSum& psi);
/// <bra| s |ket>
cplx matrix_element(const KetSum& bra, const TermSum& s, const KetSum& ket);

/// (<bra| (x) 1) |ket>: contracts the modes of `bra` and returns a ket on the rest.
KetSum contract_bra(const KetSum& bra, const KetSum& ket);

/// Trace norm ||s||_1 through the Gram matrix of the distinct product kets.
double trace_norm(const TermSum& s);
double trace_distance(const TermSum& a, const TermSum& b);
/// Tr s^2 (s assumed Hermitian).
double purity(const TermSum& s);

/// Dense matrix in the product Fock basis (first mode most significant).
CMatrix to_dense(const TermSum& s, std::size_t entry_limit = kDenseEntryLimit);
CVector to_dense(const KetSum& s, std::size_t entry_limit = kDenseEntryLimit);

}  // namespace hybridtele
