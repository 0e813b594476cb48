#include "dhc/conic/solver.hpp"

#include "dhc/common/error.hpp"
#include "dhc/conic/ipm.hpp"

#include <algorithm>
#include <cmath>

namespace dhc::conic {

std::string_view to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::optimal:
        return "optimal";
    case SolveStatus::infeasible:
        return "infeasible";
    case SolveStatus::unbounded:
        return "unbounded";
    case SolveStatus::numerical_failure:
        return "numerical_failure";
    }
    return "unknown";
}

Eigen::VectorXd ConicSolution::value(const VarBlock& b) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(b.size));
    for (std::size_t i = 0; i < b.size; ++i) {
        v(static_cast<Eigen::Index>(i)) = x.at(b.offset + i);
    }
    return v;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

/// Accumulates rows of one block (equalities or cone rows) in order.
struct RowBuilder {
    Triplets trips;
    std::vector<double> rhs;

    /// Adds the row  sign * (coefs of e) with right-hand side value.
    void add(const AffineExpr& e, double sign, double value) {
        const auto r = static_cast<int>(rhs.size());
        for (const auto& [i, c] : e.terms()) {
            trips.emplace_back(r, static_cast<int>(i), sign * c);
        }
        rhs.push_back(value);
    }
    void add_unit(std::size_t col, double coef, double value) {
        trips.emplace_back(static_cast<int>(rhs.size()), static_cast<int>(col), coef);
        rhs.push_back(value);
    }
};

/// Points of the chord grid: geometric on [lo, hi].
std::vector<double> geometric_grid(double lo, double hi, int segments) {
    std::vector<double> g(static_cast<std::size_t>(segments) + 1);
    const double ratio = std::log(hi / lo) / segments;
    for (int k = 0; k <= segments; ++k) {
        g[static_cast<std::size_t>(k)] = lo * std::exp(ratio * k);
    }
    g.back() = hi;
    return g;
}

struct Lowered {
    StandardForm form;
    std::size_t user_vars = 0;
};

Lowered lower(const ConicProblem& prob, const std::vector<std::vector<double>>& grids) {
    const std::size_t nv = prob.variable_count();
    std::vector<std::size_t> epi;  // epigraph variable per log term (or npos)
    std::size_t n = nv;
    for (const auto& t : prob.log_terms()) {
        epi.push_back(t.weight > 0.0 ? n++ : static_cast<std::size_t>(-1));
    }

    Lowered out;
    out.user_vars = nv;
    auto& f = out.form;
    f.c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    const double sgn = prob.sense() == Sense::maximize ? -1.0 : 1.0;
    for (const auto& [i, c] : prob.linear_objective().terms()) {
        f.c(static_cast<Eigen::Index>(i)) += sgn * c;
    }
    for (std::size_t k = 0; k < prob.log_terms().size(); ++k) {
        if (epi[k] != static_cast<std::size_t>(-1)) {
            f.c(static_cast<Eigen::Index>(epi[k])) = -prob.log_terms()[k].weight;
        }
    }

    RowBuilder eq;
    for (const auto& r : prob.equalities()) {
        eq.add(r.expr, 1.0, -r.expr.constant());
    }
    RowBuilder lin;  // G x <= h rows of the orthant
    for (std::size_t i = 0; i < nv; ++i) {
        const double lo = prob.lower_bound(i);
        const double hi = prob.upper_bound(i);
        if (lo == hi) {
            eq.add_unit(i, 1.0, lo);
            continue;
        }
        if (std::isfinite(lo)) {
            lin.add_unit(i, -1.0, -lo);
        }
        if (std::isfinite(hi)) {
            lin.add_unit(i, 1.0, hi);
        }
    }
    for (const auto& r : prob.inequalities()) {
        lin.add(r.expr, 1.0, -r.expr.constant());
    }
    for (std::size_t k = 0; k < prob.log_terms().size(); ++k) {
        const auto& t = prob.log_terms()[k];
        // floor: floor - arg <= 0
        lin.add(t.arg, -1.0, t.arg.constant() - ConicProblem::kLogFloor);
        if (epi[k] == static_cast<std::size_t>(-1)) {
            continue;
        }
        const auto& g = grids[k];
        for (std::size_t j = 0; j + 1 < g.size(); ++j) {
            // t <= log(a) + slope (arg - a)
            const double a = g[j];
            const double slope = (std::log(g[j + 1]) - std::log(a)) / (g[j + 1] - a);
            const double offset = std::log(a) - slope * a + slope * t.arg.constant();
            const auto r = static_cast<int>(lin.rhs.size());
            lin.trips.emplace_back(r, static_cast<int>(epi[k]), 1.0);
            for (const auto& [i, c] : t.arg.terms()) {
                lin.trips.emplace_back(r, static_cast<int>(i), -slope * c);
            }
            lin.rhs.push_back(offset);
        }
    }
    f.orthant = lin.rhs.size();
    // cones: s = h - G x = (t, u)
    for (const auto& cone : prob.cones()) {
        lin.add(cone.t, -1.0, cone.t.constant());
        for (const auto& e : cone.u) {
            lin.add(e, -1.0, e.constant());
        }
        f.soc_dims.push_back(cone.u.size() + 1);
    }

    f.A.resize(static_cast<Eigen::Index>(eq.rhs.size()), static_cast<Eigen::Index>(n));
    f.A.setFromTriplets(eq.trips.begin(), eq.trips.end());
    f.b = Eigen::Map<Eigen::VectorXd>(eq.rhs.data(), static_cast<Eigen::Index>(eq.rhs.size()));
    f.G.resize(static_cast<Eigen::Index>(lin.rhs.size()), static_cast<Eigen::Index>(n));
    f.G.setFromTriplets(lin.trips.begin(), lin.trips.end());
    f.h = Eigen::Map<Eigen::VectorXd>(lin.rhs.data(), static_cast<Eigen::Index>(lin.rhs.size()));
    return out;
}

SolveStatus map_status(IpmStatus s) {
    switch (s) {
    case IpmStatus::optimal:
        return SolveStatus::optimal;
    case IpmStatus::primal_infeasible:
        return SolveStatus::infeasible;
    case IpmStatus::dual_infeasible:
        return SolveStatus::unbounded;
    default:
        return SolveStatus::numerical_failure;
    }
}

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolverOptions& options) {
    if (problem.variable_count() == 0) {
        throw ModelError("problem has no variables");
    }
    if (!(options.tolerance > 0.0) || options.log_segments < 64) {
        throw ModelError("solver options: tolerance must be positive and log_segments at least 64");
    }
    IpmSettings settings;
    settings.feastol = settings.abstol = settings.reltol = options.tolerance;
    settings.max_iterations = options.max_iterations;
    settings.verbose = options.verbose;

    const auto& terms = problem.log_terms();
    std::vector<std::vector<double>> grids(terms.size());
    for (std::size_t k = 0; k < terms.size(); ++k) {
        // one chord covers [floor, x_max * 1e-6]; spreading breakpoints down to the floor
        // puts slopes near 1e9 into the constraint matrix
        const double knee = std::max(ConicProblem::kLogFloor, terms[k].x_max * 1e-6);
        grids[k] = geometric_grid(knee, terms[k].x_max, options.log_segments - 1);
        if (knee > ConicProblem::kLogFloor) {
            grids[k].insert(grids[k].begin(), ConicProblem::kLogFloor);
        }
    }
    const auto coarse = grids;
    const bool has_logs = std::any_of(terms.begin(), terms.end(), [](const LogTerm& t) { return t.weight > 0.0; });
    const int passes = has_logs ? 1 + options.log_refinements : 1;

    ConicSolution sol;
    std::vector<double> previous;
    for (int pass = 0; pass < passes; ++pass) {
        const auto lowered = lower(problem, grids);
        const auto r = solve_ipm(lowered.form, settings);
        sol.stats.iterations += r.iterations;
        sol.stats.passes = pass + 1;
        sol.stats.primal_residual = r.primal_residual;
        sol.stats.dual_residual = r.dual_residual;
        sol.stats.gap = r.gap;
        sol.status = map_status(r.status);
        sol.x.assign(r.x.data(), r.x.data() + static_cast<Eigen::Index>(lowered.user_vars));
        if (sol.status != SolveStatus::optimal || !has_logs) {
            break;
        }
        // refine: dense breakpoints in a shrinking window around each argument
        std::vector<double> args(terms.size());
        bool settled = !previous.empty();
        for (std::size_t k = 0; k < terms.size(); ++k) {
            args[k] = std::max(terms[k].arg.evaluate(sol.x), ConicProblem::kLogFloor);
            if (settled && std::abs(args[k] - previous[k]) > 1e-9 * std::max(1.0, args[k])) {
                settled = false;
            }
        }
        if (settled) {
            break;
        }
        previous = args;
        const double window = std::pow(1.25, std::pow(0.25, pass));
        for (std::size_t k = 0; k < terms.size(); ++k) {
            const double lo = std::max(ConicProblem::kLogFloor, args[k] / window);
            // dropping breakpoints keeps every chord below log, so later passes
            // thin the global grid and spend their rows on the local window
            std::vector<double> g;
            for (std::size_t i = 0; i < coarse[k].size(); ++i) {
                if (i % 4 == 0 || i + 1 == coarse[k].size()) {
                    g.push_back(coarse[k][i]);
                }
            }
            auto local = geometric_grid(lo, args[k] * window, 24);
            g.insert(g.end(), local.begin(), local.end());
            std::sort(g.begin(), g.end());
            g.erase(std::unique(g.begin(), g.end(), [](double a, double b) { return b - a <= 1e-12 * b; }), g.end());
            grids[k] = std::move(g);
        }
    }

    if (!sol.x.empty() && std::all_of(sol.x.begin(), sol.x.end(), [](double v) { return std::isfinite(v); })) {
        sol.stats.max_violation = problem.max_violation(sol.x);
        sol.objective = problem.objective_value(sol.x);
    } else {
        sol.stats.max_violation = std::numeric_limits<double>::infinity();
    }
    if (sol.status == SolveStatus::optimal && !(sol.stats.max_violation <= options.violation_limit)) {
        sol.status = SolveStatus::numerical_failure;
    }
    return sol;
}

}  // namespace dhc::conic
