#include "hybridtele/bell_measurement.hpp"

#include <algorithm>
#include <cmath>

namespace hybridtele {

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::One:
      return "1";
    case Outcome::Two:
      return "2";
    case Outcome::Three:
      return "3";
    case Outcome::Four:
      return "4";
    case Outcome::Fail:
      return "e";
    case Outcome::Other:
      return "x";
  }
  return "?";
}

Outcome parse_outcome(const std::string& text) {
  for (auto o : {Outcome::One, Outcome::Two, Outcome::Three, Outcome::Four, Outcome::Fail, Outcome::Other})
    if (to_string(o) == text) return o;
  throw ContractViolation("unknown outcome '" + text + "'");
}

std::vector<std::string> default_modes(MeasurementFamily family) {
  switch (family) {
    case MeasurementFamily::BAlpha:
      return {"A", "B"};
    case MeasurementFamily::BsTypeI:
      return {"a_H", "a_V", "b_H", "b_V"};
    case MeasurementFamily::BsTypeII:
      return {"a", "b"};
  }
  return {};
}

std::vector<Outcome> outcomes(MeasurementFamily family) {
  if (family == MeasurementFamily::BAlpha)
    return {Outcome::One, Outcome::Two, Outcome::Three, Outcome::Four, Outcome::Fail, Outcome::Other};
  return {Outcome::One, Outcome::Two, Outcome::Fail, Outcome::Other};
}

bool valid_outcome(MeasurementFamily family, Outcome o) {
  const auto all = outcomes(family);
  return std::find(all.begin(), all.end(), o) != all.end();
}

namespace {

using Pattern = std::vector<int>;

ProductProjector number_pattern(const Pattern& p) {
  ProductProjector c;
  for (int n : p) c.factors.push_back(NumberSet::only(n));
  return c;
}

std::vector<ProductProjector> listed_components(MeasurementFamily family, Outcome o) {
  const auto vac = NumberSet::only(0);
  std::vector<ProductProjector> out;
  if (family == MeasurementFamily::BAlpha) {
    switch (o) {
      case Outcome::One:
        return {{1.0, {NumberSet::even_positive(), vac}}};
      case Outcome::Two:
        return {{1.0, {NumberSet::odd(), vac}}};
      case Outcome::Three:
        return {{1.0, {vac, NumberSet::even_positive()}}};
      case Outcome::Four:
        return {{1.0, {vac, NumberSet::odd()}}};
      case Outcome::Fail:
        return {{1.0, {vac, vac}}};
      default:
        return {};
    }
  }
  std::vector<Pattern> patterns;
  if (family == MeasurementFamily::BsTypeI) {
    // (a_H, a_V, b_H, b_V)
    switch (o) {
      case Outcome::One:
        patterns = {{1, 1, 0, 0}, {0, 0, 1, 1}};
        break;
      case Outcome::Two:
        patterns = {{1, 0, 0, 1}, {0, 1, 1, 0}};
        break;
      case Outcome::Fail:
        patterns = {{2, 0, 0, 0}, {0, 2, 0, 0}, {0, 0, 2, 0}, {0, 0, 0, 2}};
        break;
      default:
        break;
    }
  } else {
    switch (o) {
      case Outcome::One:
        patterns = {{0, 1}};
        break;
      case Outcome::Two:
        patterns = {{1, 0}};
        break;
      case Outcome::Fail:
        patterns = {{0, 0}, {0, 2}, {2, 0}};
        break;
      default:
        break;
    }
  }
  for (const auto& p : patterns) out.push_back(number_pattern(p));
  return out;
}

}  // namespace

ProjectorSum projector(const ProjectorSpec& spec) {
  if (!valid_outcome(spec.family, spec.outcome)) throw ContractViolation("outcome not valid for this measurement family");
  ProjectorSum p;
  p.modes = spec.modes.empty() ? default_modes(spec.family) : spec.modes;
  if (p.modes.size() != default_modes(spec.family).size())
    throw ContractViolation("wrong number of modes for this measurement family");
  if (spec.outcome != Outcome::Other) {
    p.components = listed_components(spec.family, spec.outcome);
    return p;
  }
  p.components.push_back({1.0, std::vector<NumberSet>(p.modes.size(), NumberSet::all())});
  for (auto o : outcomes(spec.family)) {
    if (o == Outcome::Other) continue;
    for (auto c : listed_components(spec.family, o)) {
      c.weight = -c.weight;
      p.components.push_back(std::move(c));
    }
  }
  return p;
}

MeasurementFamily single_photon_family(HybridType type) {
  return type == HybridType::TypeI ? MeasurementFamily::BsTypeI : MeasurementFamily::BsTypeII;
}

std::string to_string(const OutcomeLabel& label) {
  return "(" + to_string(label.s) + "," + to_string(label.alpha) + ")";
}

std::vector<OutcomeLabel> enumerate_outcomes(HybridType type) {
  std::vector<OutcomeLabel> out;
  for (auto s : outcomes(single_photon_family(type)))
    for (auto a : outcomes(MeasurementFamily::BAlpha)) out.push_back({s, a});
  return out;
}

ProjectorSum joint_projector(HybridType type, const OutcomeLabel& label) {
  const auto ps = projector({single_photon_family(type), label.s, {}});
  const auto pa = projector({MeasurementFamily::BAlpha, label.alpha, {}});
  ProjectorSum out;
  out.modes = ps.modes;
  out.modes.insert(out.modes.end(), pa.modes.begin(), pa.modes.end());
  for (const auto& cs : ps.components)
    for (const auto& ca : pa.components) {
      ProductProjector c{cs.weight * ca.weight, cs.factors};
      c.factors.insert(c.factors.end(), ca.factors.begin(), ca.factors.end());
      out.components.push_back(std::move(c));
    }
  return out;
}

std::optional<Pauli> correction_lookup(HybridType type, const OutcomeLabel& label) {
  if (!valid_outcome(single_photon_family(type), label.s) || !valid_outcome(MeasurementFamily::BAlpha, label.alpha))
    throw ContractViolation("outcome label not valid for this hybrid type");
  using O = Outcome;
  struct Entry {
    O s, a;
    Pauli p;
  };
  static const std::vector<Entry> type1 = {
      {O::One, O::Two, Pauli::I},   {O::Fail, O::One, Pauli::I},   {O::One, O::One, Pauli::Z},
      {O::One, O::Fail, Pauli::Z},  {O::Fail, O::Two, Pauli::Z},   {O::Two, O::Four, Pauli::X},
      {O::Fail, O::Three, Pauli::X}, {O::Two, O::Three, Pauli::XZ}, {O::Two, O::Fail, Pauli::XZ},
      {O::Fail, O::Four, Pauli::XZ},
  };
  static const std::vector<Entry> type2 = {
      {O::One, O::Two, Pauli::I},    {O::Two, O::One, Pauli::I},    {O::Fail, O::One, Pauli::I},
      {O::One, O::One, Pauli::Z},    {O::Two, O::Two, Pauli::Z},    {O::Fail, O::Two, Pauli::Z},
      {O::One, O::Fail, Pauli::Z},   {O::One, O::Three, Pauli::X},  {O::Two, O::Four, Pauli::X},
      {O::Fail, O::Three, Pauli::X}, {O::One, O::Four, Pauli::XZ},  {O::Two, O::Three, Pauli::XZ},
      {O::Fail, O::Four, Pauli::XZ}, {O::Two, O::Fail, Pauli::XZ},
  };
  for (const auto& e : type == HybridType::TypeI ? type1 : type2)
    if (e.s == label.s && e.a == label.alpha) return e.p;
  return std::nullopt;
}

double balpha_success_probability(double alpha, double t) {
  if (!(alpha > 0.0)) throw ContractViolation("alpha must be positive");
  return 1.0 - std::exp(-2.0 * t * t * alpha * alpha);
}

}  // namespace hybridtele
