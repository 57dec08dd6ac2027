#pragma once

#include <complex>
#include <functional>
#include <cstdint>
#include <optional>
#include <vector>

#include "phasemem/acf_model.hpp"
#include "phasemem/estimator.hpp"
#include "phasemem/kinematics.hpp"
#include "phasemem/rng.hpp"
#include "phasemem/specfun.hpp"

namespace phasemem {

/// Energies e_min, e_min + step, ... up to e_max (MeV).
struct EnergyGrid {
    double e_min = 49.0;
    double e_max = 57.0;
    double step = 0.025;

    std::vector<double> values() const;
};

/// n_samples points t_m = m * t_max / n_samples, in hbar/MeV.
struct TimeGrid {
    int n_samples = 8192;
    double t_max = 0.0;

    double step() const { return t_max / n_samples; }
};

struct EnsembleConfig {
    ModelParams params;  ///< gamma, beta and hbar_omega drive the synthesis; d is not used
    SpinWindow window = SpinWindow::truncated(36.0, 1.0);
    double phi = 0.0;
    EnergyGrid e_grid;
    TimeGrid t_grid;
    double sigma_d = 0.0;
    int n_realizations = 400;
    std::uint64_t base_seed = 1;
    /// When set, the window center follows I(E) from the linearized kinematics.
    std::optional<WindowKinematics> center_drift;

    /// Throws ConfigError on inconsistent grids or parameters. hbar_omega = 0 is accepted here.
    void validate() const;

    /// Spin range covered by the synthesized S-matrix (union of all windows when drifting).
    std::pair<int, int> spin_range() const;

    /// Smallest power-of-two grid with t_max = 10 hbar/Gamma satisfying the step bounds.
    static TimeGrid default_time_grid(const ModelParams& params, const SpinWindow& window);
};

/// One realization of dS^J(E_k) for J in [j_min, j_max].
struct SMatrixRealization {
    int j_min = 0;
    int j_max = 0;
    std::vector<double> energies;
    std::vector<std::complex<double>> values;  ///< row-major [J - j_min][k]

    std::complex<double> at(int j, std::size_t k) const {
        return values[static_cast<std::size_t>(j - j_min) * energies.size() + k];
    }
};

/// theta_rot(t_m): theta_rot(0) = 0 with independent Cauchy increments of scale beta * dt.
std::vector<double> cauchy_phase_path(const TimeGrid& grid, double beta, CounterRng& rng);

/// Holds the time-to-energy transform table so realizations can be drawn repeatedly.
class SMatrixSynthesizer {
public:
    explicit SMatrixSynthesizer(EnsembleConfig config);

    SMatrixRealization realization(std::uint64_t index) const;
    const EnsembleConfig& config() const noexcept { return config_; }

private:
    EnsembleConfig config_;
    std::vector<double> energies_;
    std::vector<std::complex<double>> transform_;  // [k][m]: sqrt(Gamma) dt e^{i E_k t_m - Gamma t_m / 2}
};

SMatrixRealization synth_smatrix(const EnsembleConfig& config, std::uint64_t realization_index);

/// sigma(E_k) = sigma_d + |df+|^2 + |df-|^2 at scattering angle theta (radians).
ExcitationFunction synth_excitation(const SMatrixRealization& smatrix, const EnsembleConfig& config,
                                    double theta);

struct EnsembleAcf {
    CorrelationSeries mean;                       ///< across-realization mean with stderr
    std::vector<std::vector<double>> per_realization;
};

/// Sample ACF of each realization's excitation function, averaged over realizations.
/// Realizations are distributed over n_threads workers; the result does not depend on n_threads.
EnsembleAcf ensemble_acf(const EnsembleConfig& config, double theta, double eps_max, int n_threads = 1);

/// Empirical <dS^{J+dJ}(E + eps) dS^J(E)*>, averaged over energies and spin pairs within each
/// realization, then over realizations.
struct KernelEstimate {
    std::vector<int> delta_j;
    std::vector<double> epsilon;
    // [dJ][lag]
    std::vector<std::vector<std::complex<double>>> mean;
    std::vector<std::vector<double>> stderr_re;
    std::vector<std::vector<double>> stderr_im;
};

KernelEstimate empirical_kernel(const EnsembleConfig& config, int max_delta_j, double eps_max,
                                int n_threads = 1);

/// Runs fn(i) for i in [0, n) on up to n_threads workers.
void parallel_for(std::size_t n, int n_threads, const std::function<void(std::size_t)>& fn);

}  // namespace phasemem
