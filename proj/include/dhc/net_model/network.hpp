#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace dhc::net {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// One bus as it appears in a feeder description. Demand is in kW / kvar.
struct BusSpec {
    int id = 0;
    double p_demand_kw = 0.0;
    double q_demand_kvar = 0.0;
    bool is_generator = false;
};

/// One line as it appears in a feeder description. Impedance in per unit.
struct BranchSpec {
    int from = 0;
    int to = 0;
    double r_pu = 0.0;
    double x_pu = 0.0;
    std::optional<double> current_limit_pu;  // magnitude |I|, squared internally
    std::optional<double> p_limit_pu;
    std::optional<double> q_limit_pu;
};

/// Raw feeder description. The first bus is the substation.
struct FeederSpec {
    std::string name;
    double s_base_mva = 1.0;
    double v_base_kv = 1.0;
    double v0_pu = 1.0;
    double v_lo_pu = 0.95;
    double v_hi_pu = 1.05;
    std::vector<BusSpec> buses;
    std::vector<BranchSpec> branches;
};

/// Validated balanced radial feeder.
///
/// Buses are stored in topological order from the substation (internal index 0).
/// Branch k always feeds bus k + 1 from its parent, so every per-branch vector is
/// also indexed by the downstream bus minus one. Quantities are per unit; voltages
/// and currents are squared magnitudes, matching the DistFlow variables.
class Network {
public:
    const std::string& name() const { return name_; }
    double s_base_mva() const { return s_base_mva_; }
    double v_base_kv() const { return v_base_kv_; }

    std::size_t bus_count() const { return bus_ids_.size(); }
    std::size_t branch_count() const { return parent_.size(); }

    double v0() const { return v0_; }
    double v_lo() const { return v_lo_; }
    double v_hi() const { return v_hi_; }

    /// External id of internal bus index.
    int bus_id(std::size_t bus) const { return bus_ids_.at(bus); }
    /// Internal index of an external id; throws NetworkError when unknown.
    std::size_t bus_index(int id) const;
    const std::vector<int>& bus_ids() const { return bus_ids_; }

    /// Parent bus (internal index) of the branch feeding bus k + 1.
    std::size_t parent_bus(std::size_t branch) const { return parent_.at(branch); }
    double r(std::size_t branch) const { return r_[branch]; }
    double x(std::size_t branch) const { return x_[branch]; }
    double z2(std::size_t branch) const { return r_[branch] * r_[branch] + x_[branch] * x_[branch]; }
    const std::vector<double>& r() const { return r_; }
    const std::vector<double>& x() const { return x_; }

    /// Squared current limit per branch, +inf when absent.
    double l_max(std::size_t branch) const { return l_max_[branch]; }
    double p_max(std::size_t branch) const { return p_max_[branch]; }
    double q_max(std::size_t branch) const { return q_max_[branch]; }

    /// Nominal demand at buses 1..N (length N), per unit.
    const std::vector<double>& p_demand() const { return p_demand_; }
    const std::vector<double>& q_demand() const { return q_demand_; }

    /// Internal bus indices (1..N) eligible for hosting-capacity allocation.
    const std::vector<std::size_t>& generator_buses() const { return generators_; }
    bool is_generator(std::size_t bus) const;

    /// Children of a bus (internal indices).
    const std::vector<std::size_t>& children(std::size_t bus) const { return children_.at(bus); }

    double kw_to_pu(double kw) const { return kw / (1000.0 * s_base_mva_); }
    double pu_to_mw(double pu) const { return pu * s_base_mva_; }
    double mw_to_pu(double mw) const { return mw / s_base_mva_; }

private:
    friend Network build_network(const FeederSpec& spec);

    std::string name_;
    double s_base_mva_ = 1.0;
    double v_base_kv_ = 1.0;
    double v0_ = 1.0;
    double v_lo_ = 0.9025;
    double v_hi_ = 1.1025;
    std::vector<int> bus_ids_;
    std::vector<std::size_t> parent_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<double> r_, x_, l_max_, p_max_, q_max_;
    std::vector<double> p_demand_, q_demand_;
    std::vector<std::size_t> generators_;
};

/// Validates a feeder description and orders buses from the substation.
///
/// Throws NetworkError on: duplicate bus ids, unknown branch endpoints, self loops,
/// duplicate branches, cycles, disconnected buses, r < 0 or |z| = 0, inconsistent
/// voltage limits, or a generator at the substation.
Network build_network(const FeederSpec& spec);

}  // namespace dhc::net
