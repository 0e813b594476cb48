#pragma once

#include <cstddef>
#include <vector>

namespace dhc::fair {

/// Jain index ||p||_1^2 / (N ||p||_2^2), in [1/N, 1]; 0 for an all-zero vector.
/// Throws ModelError on an empty input or a negative or non-finite entry.
double jfi(const std::vector<double>& values);

/// (1 - eps + eps sqrt(N))^2 / N, the Jain index floor implied by epsilon-fairness.
double jfi_lower_bound(double epsilon, std::size_t n);

}  // namespace dhc::fair
