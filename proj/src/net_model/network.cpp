#include "dhc/net_model/network.hpp"

#include "dhc/common/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_map>
#include <utility>

#include <fmt/core.h>

namespace dhc::net {

namespace {

struct DisjointSet {
    std::vector<std::size_t> parent;
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return false;
        }
        parent[b] = a;
        return true;
    }
};

}  // namespace

std::size_t Network::bus_index(int id) const {
    auto it = std::find(bus_ids_.begin(), bus_ids_.end(), id);
    if (it == bus_ids_.end()) {
        throw NetworkError(fmt::format("unknown bus id {}", id));
    }
    return static_cast<std::size_t>(it - bus_ids_.begin());
}

bool Network::is_generator(std::size_t bus) const {
    return std::find(generators_.begin(), generators_.end(), bus) != generators_.end();
}

Network build_network(const FeederSpec& spec) {
    const std::size_t n_bus = spec.buses.size();
    if (n_bus < 2) {
        throw NetworkError("a feeder needs the substation and at least one more bus");
    }
    if (!(spec.s_base_mva > 0.0) || !(spec.v_base_kv > 0.0)) {
        throw NetworkError("base quantities must be positive");
    }
    if (!(spec.v_lo_pu > 0.0 && spec.v_lo_pu < spec.v0_pu && spec.v0_pu < spec.v_hi_pu)) {
        throw NetworkError(fmt::format("voltage limits must satisfy 0 < v_lo < v0 < v_hi (got {}, {}, {})",
                                       spec.v_lo_pu, spec.v0_pu, spec.v_hi_pu));
    }

    std::unordered_map<int, std::size_t> position;
    for (std::size_t i = 0; i < n_bus; ++i) {
        if (!position.emplace(spec.buses[i].id, i).second) {
            throw NetworkError(fmt::format("duplicate bus id {}", spec.buses[i].id));
        }
    }

    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency(n_bus);  // (neighbor, branch spec)
    for (std::size_t k = 0; k < spec.branches.size(); ++k) {
        const auto& b = spec.branches[k];
        auto from = position.find(b.from);
        auto to = position.find(b.to);
        if (from == position.end() || to == position.end()) {
            throw NetworkError(fmt::format("branch {}-{} references an unknown bus", b.from, b.to));
        }
        if (from->second == to->second) {
            throw NetworkError(fmt::format("branch {}-{} is a self loop", b.from, b.to));
        }
        if (!(b.r_pu >= 0.0) || !std::isfinite(b.x_pu)) {
            throw NetworkError(fmt::format("branch {}-{} has negative or invalid resistance", b.from, b.to));
        }
        if (!(b.r_pu * b.r_pu + b.x_pu * b.x_pu > 0.0)) {
            throw NetworkError(fmt::format("branch {}-{} has nonpositive impedance magnitude", b.from, b.to));
        }
        auto key = std::minmax(from->second, to->second);
        if (!seen.insert(key).second) {
            throw NetworkError(fmt::format("duplicate branch {}-{}", b.from, b.to));
        }
        adjacency[from->second].emplace_back(to->second, k);
        adjacency[to->second].emplace_back(from->second, k);
    }

    DisjointSet sets(n_bus);
    for (const auto& b : spec.branches) {
        if (!sets.unite(position[b.from], position[b.to])) {
            throw NetworkError(fmt::format("cycle detected at branch {}-{}: the feeder is not radial", b.from, b.to));
        }
    }
    for (std::size_t i = 1; i < n_bus; ++i) {
        if (sets.find(i) != sets.find(0)) {
            throw NetworkError(fmt::format("bus {} is disconnected from the substation", spec.buses[i].id));
        }
    }

    // Keep the given order when it is already topological, else fall back to BFS.
    std::vector<std::size_t> order;
    std::vector<std::size_t> parent_of(n_bus, n_bus);
    std::vector<std::size_t> branch_of(n_bus, spec.branches.size());
    {
        std::vector<bool> visited(n_bus, false);
        std::queue<std::size_t> queue;
        queue.push(0);
        visited[0] = true;
        while (!queue.empty()) {
            const auto u = queue.front();
            queue.pop();
            for (auto [v, k] : adjacency[u]) {
                if (!visited[v]) {
                    visited[v] = true;
                    parent_of[v] = u;
                    branch_of[v] = k;
                    queue.push(v);
                }
            }
        }
        bool topological = true;
        for (std::size_t i = 1; i < n_bus; ++i) {
            if (parent_of[i] >= i) {
                topological = false;
                break;
            }
        }
        if (topological) {
            order.resize(n_bus);
            std::iota(order.begin(), order.end(), 0);
        } else {
            order.push_back(0);
            for (std::size_t head = 0; head < order.size(); ++head) {
                const auto u = order[head];
                for (auto [v, k] : adjacency[u]) {
                    if (parent_of[v] == u) {
                        order.push_back(v);
                    }
                }
            }
        }
    }
    std::vector<std::size_t> internal(n_bus);
    for (std::size_t i = 0; i < n_bus; ++i) {
        internal[order[i]] = i;
    }

    Network net;
    net.name_ = spec.name;
    net.s_base_mva_ = spec.s_base_mva;
    net.v_base_kv_ = spec.v_base_kv;
    net.v0_ = spec.v0_pu * spec.v0_pu;
    net.v_lo_ = spec.v_lo_pu * spec.v_lo_pu;
    net.v_hi_ = spec.v_hi_pu * spec.v_hi_pu;

    const std::size_t n = n_bus - 1;
    net.bus_ids_.resize(n_bus);
    net.children_.assign(n_bus, {});
    net.parent_.resize(n);
    net.r_.resize(n);
    net.x_.resize(n);
    net.l_max_.assign(n, kUnbounded);
    net.p_max_.assign(n, kUnbounded);
    net.q_max_.assign(n, kUnbounded);
    net.p_demand_.resize(n);
    net.q_demand_.resize(n);

    for (std::size_t i = 0; i < n_bus; ++i) {
        const auto& bus = spec.buses[order[i]];
        net.bus_ids_[i] = bus.id;
        if (i == 0) {
            if (bus.is_generator) {
                throw NetworkError("the substation bus cannot be a generation node");
            }
            continue;
        }
        const auto k = i - 1;
        const auto& br = spec.branches[branch_of[order[i]]];
        net.parent_[k] = internal[parent_of[order[i]]];
        net.children_[net.parent_[k]].push_back(i);
        net.r_[k] = br.r_pu;
        net.x_[k] = br.x_pu;
        if (br.current_limit_pu) {
            net.l_max_[k] = *br.current_limit_pu * *br.current_limit_pu;
        }
        if (br.p_limit_pu) {
            net.p_max_[k] = *br.p_limit_pu;
        }
        if (br.q_limit_pu) {
            net.q_max_[k] = *br.q_limit_pu;
        }
        net.p_demand_[k] = net.kw_to_pu(bus.p_demand_kw);
        net.q_demand_[k] = net.kw_to_pu(bus.q_demand_kvar);
        if (bus.is_generator) {
            net.generators_.push_back(i);
        }
    }
    return net;
}

}  // namespace dhc::net
