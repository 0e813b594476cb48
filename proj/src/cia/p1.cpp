#include "dhc/cia/p1.hpp"

#include "dhc/common/error.hpp"
#include "dhc/fairness/epsilon.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace dhc::cia {

using conic::AffineExpr;

std::string_view to_string(Direction d) { return d == Direction::upper ? "upper" : "lower"; }

std::vector<double> scenario_weights(const net::Network& net, const fair::Scenario& scenario,
                                     const Eigen::VectorXd& p_d) {
    const auto& gens = net.generator_buses();
    if (scenario.weights == fair::WeightMode::uniform) {
        return std::vector<double>(gens.size(), 1.0);
    }
    std::vector<double> demand;
    for (auto bus : gens) {
        demand.push_back(p_d(static_cast<Eigen::Index>(bus - 1)));
    }
    auto alpha = fair::demand_weights(demand);
    if (std::all_of(alpha.begin(), alpha.end(), [](double a) { return a == 0.0; })) {
        throw ModelError("demand weights are undefined: total demand at the generation nodes is zero");
    }
    return alpha;
}

namespace {

/// sum_j M(k, j) * x_j for the block x, skipping structural zeros.
AffineExpr row_times(const Eigen::MatrixXd& M, Eigen::Index k, const conic::VarBlock& x, double scale = 1.0) {
    AffineExpr e;
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
        if (M(k, j) != 0.0) {
            e.add_term(x.index(static_cast<std::size_t>(j)), scale * M(k, j));
        }
    }
    return e;
}

/// Rank-revealing factor F with F'F = He.
Eigen::MatrixXd psd_factor(const Eigen::Matrix3d& He) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(He);
    const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
    std::vector<Eigen::RowVector3d> rows;
    for (int i = 0; i < 3; ++i) {
        const double lam = es.eigenvalues()(i);
        if (lam > 1e-12 * top && lam > 0.0) {
            rows.emplace_back(std::sqrt(lam) * es.eigenvectors().col(i).transpose());
        }
    }
    Eigen::MatrixXd F(static_cast<Eigen::Index>(rows.size()), 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        F.row(static_cast<Eigen::Index>(i)) = rows[i];
    }
    return F;
}

}  // namespace

P1Model build_p1(const net::Network& net, const net::CompactMatrices& m, const Linearization& lin,
                 const fair::Scenario& scenario, BoundVariant variant, Direction direction) {
    const auto n = net.branch_count();
    const auto N = static_cast<Eigen::Index>(n);
    if (lin.size() != n) {
        throw ModelError("linearization does not match the network");
    }
    if (m.D_R.minCoeff() < 0.0) {
        throw ModelError("D_R has a negative entry; the proxy bounds would not be valid");
    }
    const auto& gens = net.generator_buses();
    if (gens.empty()) {
        throw ModelError("network has no generation nodes");
    }

    P1Model model;
    auto& prob = model.problem;
    const double lo = direction == Direction::upper ? 0.0 : -conic::kInf;
    const double hi = direction == Direction::upper ? conic::kInf : 0.0;
    model.pg = prob.add_variable("pg", gens.size(), lo, hi);
    model.l_plus = prob.add_variable("l_plus", n);
    model.l_minus = prob.add_variable("l_minus", n);
    model.P_plus = prob.add_variable("P_plus", n);
    model.P_minus = prob.add_variable("P_minus", n);
    model.Q_plus = prob.add_variable("Q_plus", n);
    model.Q_minus = prob.add_variable("Q_minus", n);
    model.V_plus = prob.add_variable("V_plus", n);
    model.V_minus = prob.add_variable("V_minus", n);

    // net injection p = p_g - p_d as affine expressions; q = -q_d is constant
    std::vector<AffineExpr> p(n);
    for (std::size_t k = 0; k < n; ++k) {
        p[k] = AffineExpr(-lin.p_d(static_cast<Eigen::Index>(k)));
    }
    for (std::size_t g = 0; g < gens.size(); ++g) {
        p[gens[g] - 1] += model.pg[g];
    }
    const Eigen::VectorXd q = -lin.q_d;
    const Eigen::VectorXd Cq = m.C * q;
    const Eigen::VectorXd Mq_q = m.M_q * q;

    auto times_p = [&](const Eigen::MatrixXd& M, Eigen::Index k) {
        AffineExpr e;
        for (Eigen::Index j = 0; j < N; ++j) {
            if (M(k, j) != 0.0) {
                e += M(k, j) * p[static_cast<std::size_t>(j)];
            }
        }
        return e;
    };

    for (Eigen::Index k = 0; k < N; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const auto label = [&](const char* what) { return fmt::format("{} branch {}", what, k); };
        const AffineExpr Cp = times_p(m.C, k);
        const AffineExpr Vlin = AffineExpr(net.v0() + Mq_q(k)) + times_p(m.M_p, k);
        prob.add_equality(model.P_plus[kk], Cp - row_times(m.D_R, k, model.l_minus), label("P+"));
        prob.add_equality(model.P_minus[kk], Cp - row_times(m.D_R, k, model.l_plus), label("P-"));
        prob.add_equality(model.Q_plus[kk],
                          AffineExpr(Cq(k)) - row_times(m.D_X_pos, k, model.l_minus) -
                              row_times(m.D_X_neg, k, model.l_plus),
                          label("Q+"));
        prob.add_equality(model.Q_minus[kk],
                          AffineExpr(Cq(k)) - row_times(m.D_X_pos, k, model.l_plus) -
                              row_times(m.D_X_neg, k, model.l_minus),
                          label("Q-"));
        prob.add_equality(model.V_plus[kk],
                          Vlin - row_times(m.H_pos, k, model.l_minus) - row_times(m.H_neg, k, model.l_plus),
                          label("V+"));
        prob.add_equality(model.V_minus[kk],
                          Vlin - row_times(m.H_pos, k, model.l_plus) - row_times(m.H_neg, k, model.l_minus),
                          label("V-"));
    }

    auto delta = [&](Eigen::Index k, const AffineExpr& P, const AffineExpr& Q, const AffineExpr& V) {
        return std::array<AffineExpr, 3>{P - lin.P0(k), Q - lin.Q0(k), V - lin.v0(k)};
    };
    auto dot = [](const Eigen::RowVector3d& a, const std::array<AffineExpr, 3>& d) {
        AffineExpr e;
        for (int i = 0; i < 3; ++i) {
            if (a(i) != 0.0) {
                e += a(i) * d[static_cast<std::size_t>(i)];
            }
        }
        return e;
    };

    if (variant == BoundVariant::conservative) {
        model.w = prob.add_variable("w", n);
    }
    for (Eigen::Index k = 0; k < N; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const auto dp = delta(k, model.P_plus[kk], model.Q_plus[kk], model.V_plus[kk]);
        const auto dm = delta(k, model.P_minus[kk], model.Q_minus[kk], model.V_minus[kk]);
        prob.add_equality(model.l_minus[kk],
                          AffineExpr(lin.l0(k)) + dot(lin.J_pos.row(k), dm) + dot(lin.J_neg.row(k), dp),
                          fmt::format("l- branch {}", k));

        if (variant == BoundVariant::soc) {
            const AffineExpr l = model.l_plus[kk];
            const AffineExpr v = model.V_minus[kk];
            for (const auto& P : {model.P_plus[kk], model.P_minus[kk]}) {
                for (const auto& Q : {model.Q_plus[kk], model.Q_minus[kk]}) {
                    prob.add_soc({2.0 * P, 2.0 * Q, l - v}, l + v, fmt::format("soc branch {}", k));
                    ++model.soc_blocks;
                }
            }
        } else {
            const AffineExpr w = (*model.w)[kk];
            prob.add_equality(model.l_plus[kk], AffineExpr(lin.l0(k)) + w, fmt::format("l+ branch {}", k));
            const AffineExpr first = dot(lin.J_pos.row(k), dp) + dot(lin.J_neg.row(k), dm);
            prob.add_greater_equal(w, 2.0 * first, fmt::format("w >= 2 lin branch {}", k));
            prob.add_greater_equal(w, -2.0 * first, fmt::format("w >= -2 lin branch {}", k));
            // d' He d <= w as a rotated cone ||(F d, (w - 1) / 2)|| <= (w + 1) / 2
            const Eigen::MatrixXd F = psd_factor(lin.He[kk]);
            for (const auto& P : {model.P_plus[kk], model.P_minus[kk]}) {
                for (const auto& Q : {model.Q_plus[kk], model.Q_minus[kk]}) {
                    for (const auto& V : {model.V_plus[kk], model.V_minus[kk]}) {
                        const auto d = delta(k, P, Q, V);
                        std::vector<AffineExpr> u;
                        for (Eigen::Index r = 0; r < F.rows(); ++r) {
                            u.push_back(dot(F.row(r), d));
                        }
                        u.push_back(0.5 * (w - 1.0));
                        prob.add_soc(std::move(u), 0.5 * (w + 1.0), fmt::format("corner branch {}", k));
                        ++model.quadratic_corners;
                    }
                }
            }
        }
    }

    // operating limits on the proxies
    for (std::size_t k = 0; k < n; ++k) {
        prob.add_less_equal(model.V_plus[k], net.v_hi(), fmt::format("V+ <= v_hi branch {}", k));
        prob.add_greater_equal(model.V_minus[k], net.v_lo(), fmt::format("V- >= v_lo branch {}", k));
        if (std::isfinite(net.p_max(k))) {
            prob.add_less_equal(model.P_plus[k], net.p_max(k));
            prob.add_greater_equal(model.P_minus[k], -net.p_max(k));
        }
        if (std::isfinite(net.q_max(k))) {
            prob.add_less_equal(model.Q_plus[k], net.q_max(k));
            prob.add_greater_equal(model.Q_minus[k], -net.q_max(k));
        }
        if (std::isfinite(net.l_max(k))) {
            prob.add_less_equal(model.l_plus[k], net.l_max(k));
        }
    }

    model.weights = scenario_weights(net, scenario, lin.p_d);
    AffineExpr objective;
    for (std::size_t g = 0; g < gens.size(); ++g) {
        objective += model.weights[g] * model.pg[g];
    }
    if (direction == Direction::lower) {
        prob.set_objective(conic::Sense::minimize, objective);
        return model;
    }
    if (scenario.form == fair::ObjectiveForm::linear) {
        prob.set_objective(conic::Sense::maximize, objective);
    } else {
        prob.set_objective(conic::Sense::maximize, {});
        for (std::size_t g = 0; g < gens.size(); ++g) {
            // single-node linearized voltage headroom, widened, sets the grid range
            const auto b = static_cast<Eigen::Index>(gens[g] - 1);
            const double headroom = std::max(net.v_hi() - lin.v0(b), 1e-6);
            const double x_max = m.M_p(b, b) > 0.0 ? std::max(4.0 * headroom / m.M_p(b, b), 1e-6) : 10.0;
            if (model.weights[g] > 0.0) {
                prob.add_log_term(model.weights[g], model.pg[g], x_max);
            }
        }
    }
    if (scenario.fairness) {
        std::vector<AffineExpr> alloc;
        for (std::size_t g = 0; g < gens.size(); ++g) {
            alloc.push_back(model.pg[g]);
        }
        const auto alpha = scenario.fairness->mode == fair::FairnessMode::proportional
                               ? scenario_weights(net, fair::Scenario{"", {}, fair::WeightMode::demand, {}}, lin.p_d)
                               : std::vector<double>{};
        fair::epsilon_constraint(prob, *scenario.fairness, alloc, alpha);
    }
    return model;
}

}  // namespace dhc::cia
