#pragma once

// Measurement families: coherent-part BSM (parity-resolving detection on A, B),
// polarization BSM (TypeI, modes a_H a_V b_H b_V) and vacuum/one-photon BSM
// (TypeII, modes a b). Each is applied after the corresponding beam splitter.

#include <optional>
#include <string>
#include <vector>

#include "hybridtele/hybrid_encoding.hpp"
#include "hybridtele/state_engine.hpp"

namespace hybridtele {

enum class MeasurementFamily { BAlpha, BsTypeI, BsTypeII };

/// `Fail` is the listed failure pattern (both detectors silent / bunching);
/// `Other` is the complement of every listed projector.
enum class Outcome { One, Two, Three, Four, Fail, Other };

std::string to_string(Outcome o);  // "1".."4", "e", "x"
Outcome parse_outcome(const std::string& text);

struct ProjectorSpec {
  MeasurementFamily family;
  Outcome outcome;
  /// Modes the projector acts on; empty selects the family's default modes.
  std::vector<std::string> modes;
};

std::vector<std::string> default_modes(MeasurementFamily family);
std::vector<Outcome> outcomes(MeasurementFamily family);
bool valid_outcome(MeasurementFamily family, Outcome o);

ProjectorSum projector(const ProjectorSpec& spec);

MeasurementFamily single_photon_family(HybridType type);

struct OutcomeLabel {
  Outcome s;      // single-photon part
  Outcome alpha;  // coherent part
  bool operator==(const OutcomeLabel&) const = default;
};

std::string to_string(const OutcomeLabel& label);  // "(1,e)"

/// Every joint outcome, s-outcome major.
std::vector<OutcomeLabel> enumerate_outcomes(HybridType type);

/// Tensor product of the two families' projectors.
ProjectorSum joint_projector(HybridType type, const OutcomeLabel& label);

/// Correction for a joint outcome, or nullopt when the outcome is a failure.
std::optional<Pauli> correction_lookup(HybridType type, const OutcomeLabel& label);

/// 1 - exp(-2 t^2 alpha^2)
double balpha_success_probability(double alpha, double t);

}  // namespace hybridtele
