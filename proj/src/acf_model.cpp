#include "phasemem/acf_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "phasemem/errors.hpp"

namespace phasemem {

using cplx = std::complex<double>;

double phase_constant_value(PhaseConstant pc) noexcept {
    return pc == PhaseConstant::two_pi ? 2.0 * std::numbers::pi : std::numbers::pi;
}

PhaseConstant parse_phase_constant(std::string_view text) {
    if (text == "pi" || text == "as_printed_pi") return PhaseConstant::as_printed_pi;
    if (text == "two_pi") return PhaseConstant::two_pi;
    throw DomainError("unknown phase constant '" + std::string(text) + "' (expected pi or two_pi)");
}

std::string_view to_string(PhaseConstant pc) noexcept {
    return pc == PhaseConstant::two_pi ? "two_pi" : "pi";
}

void ModelParams::validate() const {
    if (!(gamma > 0.0)) throw DomainError("gamma must be > 0");
    if (!(beta >= 0.0)) throw DomainError("beta must be >= 0");
    if (!(hbar_omega > 0.0)) throw DomainError("hbar_omega must be > 0");
    if (!(d >= 1.0)) throw DomainError("d must be >= 1");
    if (!std::isfinite(gamma) || !std::isfinite(beta) || !std::isfinite(hbar_omega) || !std::isfinite(d))
        throw DomainError("model parameters must be finite");
}

void CorrelationSeries::validate() const {
    if (epsilon.empty()) throw DomainError("correlation series is empty");
    if (c.size() != epsilon.size()) throw DomainError("correlation series columns differ in length");
    if (has_stderr() && stderr_values.size() != epsilon.size())
        throw DomainError("stderr column length differs from epsilon column");
    if (epsilon.front() != 0.0) throw DomainError("correlation series must start at epsilon = 0");
    for (std::size_t i = 1; i < epsilon.size(); ++i)
        if (!(epsilon[i] > epsilon[i - 1])) throw DomainError("epsilon grid not strictly increasing");
    for (double s : stderr_values)
        if (!(s >= 0.0)) throw DomainError("stderr values must be nonnegative");
}

cplx smatrix_kernel(int delta_j, double epsilon, const ModelParams& p) {
    const double dj = delta_j;
    const cplx denom(p.gamma + p.beta * std::abs(dj), p.hbar_omega * dj - epsilon);
    return p.gamma / denom;
}

namespace {

// Re X(eps) / Re Y for the geometric series factor; |ratio of exponentials| < 1 for gamma > 0.
double trig_factor(double epsilon, const ModelParams& p) {
    const double kc = phase_constant_value(p.phase_constant);
    const double ae = std::abs(epsilon);
    const cplx z(p.hbar_omega, -p.beta);
    const cplx i(0.0, 1.0);
    const cplx x = std::exp(i * kc * ae / z) / (1.0 - std::exp(i * kc * cplx(ae, p.gamma) / z));
    const cplx y = 1.0 / (1.0 - std::exp(-kc * p.gamma / z));
    return x.real() / y.real();
}

}  // namespace

double envelope_free_acf(double epsilon, const ModelParams& params) {
    params.validate();
    return trig_factor(epsilon, params);
}

double model_acf(double epsilon, const ModelParams& params) {
    params.validate();
    const double s = epsilon / (params.hbar_omega * params.d);
    return std::exp(-0.5 * s * s) * trig_factor(epsilon, params);
}

double lorentzian_acf(double epsilon, double gamma) {
    if (!(gamma > 0.0)) throw DomainError("lorentzian width must be > 0");
    const double u = epsilon / gamma;
    return 1.0 / (1.0 + u * u);
}

std::vector<Peak> envelope_free_maxima(const ModelParams& params, double scan_range, double scan_step) {
    params.validate();
    if (!(scan_range > 0.0)) throw DomainError("scan range must be > 0");
    if (!(scan_step > 0.0) || !(scan_step < params.hbar_omega / 20.0))
        throw DomainError("scan step must be in (0, hbar_omega/20)");

    const auto n = static_cast<std::size_t>(std::floor(scan_range / scan_step));
    std::vector<double> f(n + 1);
    for (std::size_t i = 0; i <= n; ++i) f[i] = trig_factor(scan_step * static_cast<double>(i), params);

    std::vector<Peak> peaks;
    for (std::size_t i = 1; i < n; ++i) {
        if (!(f[i] > f[i - 1] && f[i] >= f[i + 1])) continue;
        // vertex of the parabola through the three samples
        const double curv = f[i - 1] - 2.0 * f[i] + f[i + 1];
        double offset = 0.0;
        if (curv < 0.0) offset = 0.5 * (f[i - 1] - f[i + 1]) / curv;
        const double eps = scan_step * (static_cast<double>(i) + offset);
        peaks.push_back({eps, trig_factor(eps, params)});
    }
    return peaks;
}

std::optional<double> peak_spacing(const ModelParams& params, double scan_range, double scan_step) {
    const auto peaks = envelope_free_maxima(params, scan_range, scan_step);
    if (peaks.size() < 2) return std::nullopt;
    return (peaks.back().epsilon - peaks.front().epsilon) / static_cast<double>(peaks.size() - 1);
}

}  // namespace phasemem
