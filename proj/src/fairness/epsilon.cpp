#include "dhc/fairness/epsilon.hpp"

#include "dhc/common/error.hpp"

#include <cmath>
#include <numeric>

#include <fmt/core.h>

namespace dhc::fair {

double fairness_factor(double epsilon, std::size_t n) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw ModelError(fmt::format("epsilon must lie in [0, 1], got {}", epsilon));
    }
    return 1.0 - epsilon + epsilon * std::sqrt(static_cast<double>(n));
}

void epsilon_constraint(conic::ConicProblem& problem, const FairnessSpec& spec, const std::vector<conic::AffineExpr>& p,
                        const std::vector<double>& alpha) {
    if (p.empty()) {
        throw ModelError("fairness constraint needs at least one allocation variable");
    }
    const double k = fairness_factor(spec.epsilon, p.size());
    if (spec.mode == FairnessMode::proportional && alpha.size() != p.size()) {
        throw ModelError(fmt::format("proportional fairness needs {} weights, got {}", p.size(), alpha.size()));
    }
    std::vector<conic::AffineExpr> u, w;
    conic::AffineExpr total;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double scale = 1.0;
        if (spec.mode == FairnessMode::proportional) {
            if (!(alpha[i] > 0.0) || !std::isfinite(alpha[i])) {
                throw ModelError(fmt::format("proportional fairness needs positive weights; weight {} is {}", i,
                                             alpha[i]));
            }
            scale = 1.0 / alpha[i];
        }
        u.push_back(k * scale * p[i]);
        w.push_back(scale * p[i]);
        total += scale * p[i];
    }
    const auto label = fmt::format("{}-fairness eps={}", to_string(spec.mode), spec.epsilon);
    if (spec.epsilon == 1.0) {
        for (std::size_t i = 1; i < w.size(); ++i) {
            problem.add_equality(w[i], w[0], label);
        }
        problem.add_greater_equal(total, {}, label);
        return;
    }
    problem.add_soc(std::move(u), total, label);
}

std::vector<double> demand_weights(const std::vector<double>& p_d) {
    const double total = std::accumulate(p_d.begin(), p_d.end(), 0.0);
    std::vector<double> alpha(p_d.size(), 0.0);
    if (total != 0.0) {
        for (std::size_t i = 0; i < p_d.size(); ++i) {
            alpha[i] = p_d[i] / total;
        }
    }
    return alpha;
}

}  // namespace dhc::fair
