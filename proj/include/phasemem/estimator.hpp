#pragma once

#include <string>
#include <variant>
#include <vector>

#include "phasemem/acf_model.hpp"

namespace phasemem {

/// Cross section sampled on a uniform, strictly increasing energy grid (MeV).
struct ExcitationFunction {
    std::vector<double> energies;
    std::vector<double> sigma;
    std::string channel_label;

    /// Checks lengths (>= 16), grid uniformity (1e-6 relative) and sigma >= 0.
    void validate() const;
    double step() const;
    double span() const { return energies.back() - energies.front(); }
};

struct PolyDetrend {
    int order = 1;
};

struct MovingAverageDetrend {
    double window_mev = 2.0;
    double expected_gamma = 0.0;  ///< if > 0, the window must be at least 5x this
};

using DetrendMethod = std::variant<PolyDetrend, MovingAverageDetrend>;

struct DetrendResult {
    std::vector<double> fluctuation;
    std::vector<double> trend;
};

/// Splits sigma into trend + fluctuation (sum reproduces the input).
DetrendResult detrend(const ExcitationFunction& xf, const DetrendMethod& method);

/// C(eps_l) = <sigma(E + eps_l) sigma(E)> / (<sigma(E + eps_l)> <sigma(E)>) - 1, each mean taken
/// over the grid points admissible at lag l. Lags run over the data step up to eps_max, which
/// may not exceed a quarter of the span.
CorrelationSeries sample_acf(const ExcitationFunction& xf, double eps_max);

/// ACF of a detrended series, <d(E + eps) d(E)> / (<trend(E + eps)> <trend(E)>).
CorrelationSeries detrended_acf(const ExcitationFunction& xf, const DetrendMethod& method, double eps_max);

/// Pointwise mean over channels; stderr is the across-channel standard error.
CorrelationSeries average_channels(const std::vector<CorrelationSeries>& series);

}  // namespace phasemem
