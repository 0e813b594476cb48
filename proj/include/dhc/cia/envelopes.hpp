#pragma once

#include "dhc/cia/linearization.hpp"
#include "dhc/net_model/compact_matrices.hpp"

#include <Eigen/Dense>

#include <string_view>

namespace dhc::cia {

enum class BoundVariant { soc, conservative };

std::string_view to_string(BoundVariant v);
BoundVariant bound_variant_from_string(std::string_view s);

/// Upper and lower proxies for flows and squared voltages (length N each).
struct ProxyBox {
    Eigen::VectorXd P_plus, P_minus, Q_plus, Q_minus, V_plus, V_minus;
};

/// Proxy system for net injections (p, q) and current bounds (l_plus, l_minus).
ProxyBox proxy_box(const net::CompactMatrices& m, double v0, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                   const Eigen::VectorXd& l_plus, const Eigen::VectorXd& l_minus);

/// First-order lower bound l0 + J+ d- + J- d+.
Eigen::VectorXd current_lower_bound(const Linearization& lin, const ProxyBox& box);

/// Tightest l+ satisfying the four cones ||(2P, 2Q, l - V-)|| <= l + V-.
Eigen::VectorXd soc_upper_bound(const ProxyBox& box);

/// l0 + max(2 |J+ d+ + J- d-|, max over the eight proxy corners of d' He d).
Eigen::VectorXd conservative_upper_bound(const Linearization& lin, const ProxyBox& box);

Eigen::VectorXd upper_bound(BoundVariant variant, const Linearization& lin, const ProxyBox& box);

/// Self-consistent current envelope for a fixed injection: starting from
/// l_start on both sides, alternately evaluates the proxies and the bounds.
struct EnvelopePoint {
    Eigen::VectorXd l_minus, l_plus;
    ProxyBox box;
    int iterations = 0;
    bool converged = false;
};

EnvelopePoint envelope_fixed_point(const net::CompactMatrices& m, double v0, const Linearization& lin,
                                   BoundVariant variant, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                                   const Eigen::VectorXd& l_start, int max_iterations = 1000,
                                   double tolerance = 1e-12);

}  // namespace dhc::cia
