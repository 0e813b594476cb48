#include "dhc/cia/audit.hpp"

#include "dhc/common/error.hpp"
#include "dhc/common/parallel.hpp"
#include "dhc/loadflow/loadflow.hpp"

#include <limits>
#include <mutex>
#include <random>

namespace dhc::cia {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

AuditReport audit_hyperrectangle(const net::Network& net, const Hyperrectangle& box, const Eigen::VectorXd& p_d,
                                 const Eigen::VectorXd& q_d, std::size_t samples, std::uint64_t seed, double slack,
                                 std::size_t workers) {
    const auto& gens = net.generator_buses();
    if (box.size() != gens.size()) {
        throw InputError("hyperrectangle does not match the network's generation nodes");
    }
    for (std::size_t g = 0; g < gens.size(); ++g) {
        if (box.bus_ids[g] != net.bus_id(gens[g])) {
            throw InputError("hyperrectangle node order differs from the network's generation nodes");
        }
    }
    const Eigen::VectorXd q_g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.branch_count()));
    AuditReport report;
    report.samples = samples;
    std::mutex mutex;
    parallel_for(samples, workers, [&](std::size_t i) {
        std::mt19937_64 gen(splitmix(seed ^ splitmix(i)));
        Eigen::VectorXd pg_mw(static_cast<Eigen::Index>(gens.size()));
        for (Eigen::Index g = 0; g < pg_mw.size(); ++g) {
            const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
            pg_mw(g) = box.p_minus_mw(g) + u * (box.p_plus_mw(g) - box.p_minus_mw(g));
        }
        const auto op = lf::solve_loadflow(net, generation_vector(net, pg_mw), q_g, p_d, q_d);
        bool bad = false;
        bool diverged = false;
        double excess = 0.0;
        if (!op.converged) {
            bad = diverged = true;
            excess = std::numeric_limits<double>::infinity();
        } else {
            const auto adm = lf::check_admissible(net, op, slack);
            bad = !adm.admissible;
            excess = adm.worst_violation;
        }
        if (bad) {
            std::lock_guard lock(mutex);
            ++report.violations;
            report.nonconverged += diverged ? 1 : 0;
            if (excess > report.worst_violation || report.worst_sample_mw.size() == 0) {
                report.worst_violation = excess;
                report.worst_sample_mw = pg_mw;
            }
        }
    });
    return report;
}

}  // namespace dhc::cia
