#include "dhc/fairness/jfi.hpp"

#include "dhc/common/error.hpp"
#include "dhc/fairness/epsilon.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace dhc::fair {

double jfi(const std::vector<double>& values) {
    if (values.empty()) {
        throw ModelError("Jain index of an empty vector");
    }
    double sum = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
            throw ModelError(fmt::format("Jain index needs nonnegative values; entry {} is {}", i, values[i]));
        }
        sum += values[i];
        peak = std::max(peak, values[i]);
    }
    if (peak == 0.0) {
        return 0.0;
    }
    // scaling by the peak keeps the squares away from underflow
    double sq = 0.0;
    double l1 = 0.0;
    for (double v : values) {
        l1 += v / peak;
        sq += (v / peak) * (v / peak);
    }
    return l1 * l1 / (static_cast<double>(values.size()) * sq);
}

double jfi_lower_bound(double epsilon, std::size_t n) {
    if (n == 0) {
        throw ModelError("Jain bound needs at least one node");
    }
    const double k = fairness_factor(epsilon, n);
    return k * k / static_cast<double>(n);
}

}  // namespace dhc::fair
