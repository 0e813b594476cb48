#pragma once

#include "dhc/conic/problem.hpp"
#include "dhc/fairness/scenario.hpp"

#include <cstddef>
#include <vector>

namespace dhc::fair {

/// (1 - eps + eps sqrt(N)), the factor on ||w|| in the fairness cone.
double fairness_factor(double epsilon, std::size_t n);

/// Adds  k ||w||_2 <= sum(w)  with w_i = p_i (uniform) or p_i / alpha_i
/// (proportional). alpha is ignored in uniform mode. At epsilon = 1 the cone is
/// the ray w = t 1, t >= 0, and is stated as those linear rows instead, since a
/// cone without interior leaves the dual unattained.
/// Throws ModelError for epsilon outside [0, 1] or a nonpositive weight.
void epsilon_constraint(conic::ConicProblem& problem, const FairnessSpec& spec, const std::vector<conic::AffineExpr>& p,
                        const std::vector<double>& alpha = {});

/// Demand shares alpha_i = p_d,i / sum(p_d), signed demand kept as is.
/// All zero when the sum is zero.
std::vector<double> demand_weights(const std::vector<double>& p_d);

}  // namespace dhc::fair
