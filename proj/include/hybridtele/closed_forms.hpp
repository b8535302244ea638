#pragma once

// Closed-form results: success probabilities and average fidelities for both
// hybrid types, and the TypeII per-group teleported states, probabilities and
// fidelities.

#include <vector>

#include "hybridtele/bell_measurement.hpp"
#include "hybridtele/hybrid_encoding.hpp"
#include "hybridtele/state_engine.hpp"
#include "hybridtele/teleport.hpp"

namespace hybridtele {

/// TypeII success outcomes sharing one teleported state.
struct AppendixGroup {
  int index;
  std::vector<OutcomeLabel> members;
};

const std::vector<AppendixGroup>& appendix_groups();

double p_formula(int i, double alpha, double t, const BlochAngles& angles);
/// f_5 includes the -|mu|^2|nu|^2 t^2 r^2 e^{-2 alpha^2 t^2} term needed for
/// consistency with rho_T(5); see f5_as_printed.
double f_formula(int i, double alpha, double t, const BlochAngles& angles);
/// f_5 without that term.
double f5_as_printed(double alpha, double t, const BlochAngles& angles);

/// Normalized teleported state of group i over slot c (TypeII).
TermSum rho_T(int i, double alpha, double t, const BlochAngles& angles);
/// Outcome-independent TypeI teleported state over slot c.
TermSum rho_T_type1(double alpha, double t, const BlochAngles& angles);

double P_I(double alpha, double t);
double F_I(double alpha, double t);
double P_II(double alpha, double t);

/// Sphere average of sum_i p_i f_i / sum_i p_i.
double F_II_numeric(double alpha, double t, const SphereQuadrature& quad);
/// Sphere average of sum_i p_i.
double P_II_numeric(double alpha, double t, const SphereQuadrature& quad);

/// |sphere average of sum_i p_i - P_II|.
double appendix_consistency(double alpha, double t, const SphereQuadrature& quad);
/// Also compares every p_i with the summed first-principles traces of its
/// group at each quadrature node.
double appendix_consistency(double alpha, double t, const SphereQuadrature& quad, const TransferMap& map);

}  // namespace hybridtele
