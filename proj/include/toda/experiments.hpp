#pragma once

#include "toda/config.hpp"
#include "toda/report.hpp"

namespace toda {

// Exact Cartan identities, the Step-4 table and the Step-1 coefficient.
Report run_cartan_identities(const ExperimentConfig& c);
// Bubble masses, truncated masses, planar integrals and kernel integrals.
Report run_quadrature_identities(const ExperimentConfig& c);
// Robin values and closed-form vs numeric Green functions.
Report run_green(const ExperimentConfig& c);
// Projected bubbles and projected kernel profiles against their expansions.
Report run_project(const ExperimentConfig& c);
// Limit-operator kernel and the k-symmetric restriction.
Report run_kernel(const ExperimentConfig& c);
// Interaction-function cancellation and the doubled-d control.
Report run_theta(const ExperimentConfig& c);
// Residual and exponential-vs-bubble difference rates.
Report run_residual_rates(const ExperimentConfig& c);
// Inverse-norm growth of the linearised operator.
Report run_invnorm(const ExperimentConfig& c);
// Fixed-point solve with mass diagnostics.
Report run_solve(const ExperimentConfig& c);

// Dispatch on c.preset ("identities" runs both identity groups).
Report run_preset(const ExperimentConfig& c);

}  // namespace toda
