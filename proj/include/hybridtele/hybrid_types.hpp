#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hybridtele/state_engine.hpp"

namespace hybridtele {

enum class HybridType { TypeI, TypeII };

std::string to_string(HybridType type);  // "I" / "II"
HybridType parse_hybrid_type(std::string_view text);

/// Modes carrying one hybrid qubit. Slots 'a' (input), 'b' (Alice's channel
/// half) and 'c' (Bob). TypeI uses two polarization modes x_H, x_V; TypeII a
/// single mode x. The coherent mode is the upper-case slot letter.
struct QubitModes {
  std::vector<std::string> photonic;
  std::string coherent;
  std::vector<std::string> all() const;
};

QubitModes qubit_modes(HybridType type, char slot);

/// Cutoff for coherent-carrying modes of a protocol run at amplitude alpha.
/// The largest amplitude reached is sqrt2*alpha, after the coherent beam splitter.
int coherent_cutoff(double alpha);

ModeLayout qubit_layout(HybridType type, char slot, double alpha);
/// Layout over the given slots in order, e.g. "abc".
ModeLayout protocol_layout(HybridType type, double alpha, std::string_view slots = "abc");

}  // namespace hybridtele
