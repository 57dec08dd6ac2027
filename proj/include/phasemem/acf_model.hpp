#pragma once

#include <complex>
#include <optional>
#include <string_view>
#include <vector>

namespace phasemem {

/// Phase constant multiplying the exponents of the analytic ACF.
/// `as_printed_pi` oscillates with period 2*hbar_omega; `two_pi` with period hbar_omega.
enum class PhaseConstant { as_printed_pi, two_pi };

double phase_constant_value(PhaseConstant pc) noexcept;
PhaseConstant parse_phase_constant(std::string_view text);
std::string_view to_string(PhaseConstant pc) noexcept;

/// Correlation model parameters. Energies in MeV, d dimensionless.
struct ModelParams {
    double gamma = 0.15;       ///< total decay width
    double beta = 0.1;         ///< spin phase relaxation width
    double hbar_omega = 0.75;  ///< rotational quantum
    double d = 5.0;            ///< effective window width
    PhaseConstant phase_constant = PhaseConstant::as_printed_pi;

    /// Throws DomainError unless gamma > 0, beta >= 0, hbar_omega > 0, d >= 1.
    void validate() const;
};

/// C(epsilon) samples on a lag grid starting at zero.
struct CorrelationSeries {
    std::vector<double> epsilon;
    std::vector<double> c;
    std::vector<double> stderr_values;  ///< empty when absent

    bool has_stderr() const noexcept { return !stderr_values.empty(); }
    std::size_t size() const noexcept { return epsilon.size(); }
    void validate() const;
};

/// <dS^J(E+eps) dS^J'(E)*> = Gamma / (Gamma + beta|dJ| + i hw dJ - i eps).
std::complex<double> smatrix_kernel(int delta_j, double epsilon, const ModelParams& params);

/// Normalized cross-section energy autocorrelation, C(0) = 1.
double model_acf(double epsilon, const ModelParams& params);

/// model_acf with the Gaussian envelope divided out.
double envelope_free_acf(double epsilon, const ModelParams& params);

/// Random-matrix limit 1 / (1 + (eps/Gamma)^2). Throws DomainError for gamma <= 0.
double lorentzian_acf(double epsilon, double gamma);

struct Peak {
    double epsilon;
    double height;
};

/// Local maxima of envelope_free_acf on (0, scan_range], refined by parabolic interpolation.
std::vector<Peak> envelope_free_maxima(const ModelParams& params, double scan_range, double scan_step);

/// Mean spacing of consecutive envelope-free maxima; nullopt with fewer than two maxima.
std::optional<double> peak_spacing(const ModelParams& params, double scan_range, double scan_step);

}  // namespace phasemem
