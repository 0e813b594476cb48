#include "dhc/cia/mae.hpp"

#include "dhc/common/error.hpp"
#include "dhc/common/parallel.hpp"
#include "dhc/loadflow/loadflow.hpp"

#include <fmt/core.h>

namespace dhc::cia {

namespace {

double max_over(const std::vector<MaeSample>& samples, Eigen::VectorXd MaeSample::*bound) {
    double worst = 0.0;
    for (const auto& s : samples) {
        worst = std::max(worst, (s.l_actual - s.*bound).cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace

double MaeReport::mean_soc() const {
    double sum = 0.0;
    for (const auto& s : samples) {
        sum += s.mae_soc;
    }
    return samples.empty() ? 0.0 : sum / static_cast<double>(samples.size());
}

double MaeReport::mean_conservative() const {
    double sum = 0.0;
    for (const auto& s : samples) {
        sum += s.mae_conservative;
    }
    return samples.empty() ? 0.0 : sum / static_cast<double>(samples.size());
}

double MaeReport::max_deviation_soc() const { return max_over(samples, &MaeSample::l_soc); }
double MaeReport::max_deviation_conservative() const { return max_over(samples, &MaeSample::l_conservative); }

MaeReport envelope_mae(const net::Network& net, const net::CompactMatrices& m, const Linearization& lin,
                       const MaeSweep& sweep, std::size_t workers) {
    const std::size_t bus = net.bus_index(sweep.bus_id);
    if (!net.is_generator(bus)) {
        throw NetworkError(fmt::format("MAE sweep bus {} is not a generator", sweep.bus_id));
    }
    if (sweep.points < 1 || !(sweep.min_mw <= sweep.max_mw)) {
        throw InputError("MAE sweep needs at least one point and min <= max");
    }
    const auto n = static_cast<Eigen::Index>(net.branch_count());

    MaeReport report;
    report.bus_id = sweep.bus_id;
    report.samples.resize(static_cast<std::size_t>(sweep.points));
    parallel_for(report.samples.size(), workers, [&](std::size_t i) {
        MaeSample& s = report.samples[i];
        s.pg_mw = sweep.points == 1 ? sweep.min_mw
                                    : sweep.min_mw + (sweep.max_mw - sweep.min_mw) * static_cast<double>(i) /
                                                         static_cast<double>(sweep.points - 1);
        Eigen::VectorXd p_g = Eigen::VectorXd::Zero(n);
        p_g(static_cast<Eigen::Index>(bus) - 1) = net.mw_to_pu(s.pg_mw);
        const Eigen::VectorXd p = p_g - lin.p_d;
        const Eigen::VectorXd q = -lin.q_d;
        const auto op = lf::solve_loadflow(net, p, q);
        lf::require_converged(op);
        s.l_actual = op.l;

        const auto soc = envelope_fixed_point(m, net.v0(), lin, BoundVariant::soc, p, q, op.l);
        const auto cons = envelope_fixed_point(m, net.v0(), lin, BoundVariant::conservative, p, q, op.l);
        s.l_soc = soc.l_plus;
        s.l_conservative = cons.l_plus;
        s.mae_soc = (s.l_actual - s.l_soc).cwiseAbs().mean();
        s.mae_conservative = (s.l_actual - s.l_conservative).cwiseAbs().mean();
    });

    report.branch_mae_soc = Eigen::VectorXd::Zero(n);
    report.branch_mae_conservative = Eigen::VectorXd::Zero(n);
    for (const auto& s : report.samples) {
        report.branch_mae_soc += (s.l_actual - s.l_soc).cwiseAbs();
        report.branch_mae_conservative += (s.l_actual - s.l_conservative).cwiseAbs();
    }
    report.branch_mae_soc /= static_cast<double>(report.samples.size());
    report.branch_mae_conservative /= static_cast<double>(report.samples.size());
    return report;
}

}  // namespace dhc::cia
