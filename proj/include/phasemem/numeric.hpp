#pragma once

#include <span>

namespace phasemem {

/// Pairwise (cascade) summation; result depends only on the order of the input.
double pairwise_sum(std::span<const double> x) noexcept;

struct MeanStderr {
    double mean;
    double stderr_of_mean;  ///< sample standard deviation / sqrt(n); 0 for n < 2
};

MeanStderr mean_and_stderr(std::span<const double> x) noexcept;

}  // namespace phasemem
