#include "phasemem/numeric.hpp"

#include <cmath>
#include <vector>

namespace phasemem {

double pairwise_sum(std::span<const double> x) noexcept {
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

MeanStderr mean_and_stderr(std::span<const double> x) noexcept {
    const std::size_t n = x.size();
    if (n == 0) return {0.0, 0.0};
    const double mean = pairwise_sum(x) / static_cast<double>(n);
    if (n < 2) return {mean, 0.0};
    std::vector<double> dev(n);
    for (std::size_t i = 0; i < n; ++i) dev[i] = (x[i] - mean) * (x[i] - mean);
    const double var = pairwise_sum(dev) / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace phasemem
