#include "phasemem/tps.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "phasemem/errors.hpp"

namespace phasemem {

void RotorParams::validate() const {
    if (!(gamma > 0.0)) throw DomainError("gamma must be > 0");
    if (!(beta >= 0.0)) throw DomainError("beta must be >= 0");
    if (!(hbar_omega > 0.0)) throw DomainError("hbar_omega must be > 0");
    window.validate();
}

double revolution_period(double hbar_omega) {
    if (!(hbar_omega > 0.0)) throw DomainError("hbar_omega must be > 0");
    return 2.0 * std::numbers::pi / hbar_omega;
}

namespace {

// Window-weighted Legendre amplitudes sqrt(W_J) P_J(cos theta) for J in the window.
void weighted_legendre(double theta, const SpinWindow& w, const std::vector<double>& sqrt_weights,
                       std::vector<double>& out) {
    const auto pl = legendre_all(std::clamp(std::cos(theta), -1.0, 1.0), w.j_max);
    out.resize(sqrt_weights.size());
    for (std::size_t k = 0; k < sqrt_weights.size(); ++k) out[k] = sqrt_weights[k] * pl[w.j_min + k];
}

std::vector<double> sqrt_weights(const SpinWindow& w) {
    auto v = window_weights(w);
    for (double& x : v) x = std::sqrt(x);
    return v;
}

// Sum_{J,J'} a_J a_J' r^{|J-J'|} cos(phi (J-J')).
// r^{|k|} is the covariance of a unit AR(1) chain, so the quadratic form is evaluated as a
// sum of squared moduli of its innovation coefficients: nonnegative term by term.
using cplx = std::complex<double>;

std::vector<cplx> rotor_phases(const SpinWindow& w, double phase) {
    std::vector<cplx> out(static_cast<std::size_t>(w.size()));
    for (int j = w.j_min; j <= w.j_max; ++j) out[j - w.j_min] = std::polar(1.0, phase * j);
    return out;
}

double coherent_sum(const std::vector<double>& a, const std::vector<cplx>& phases, double decay) {
    const double r = std::exp(-decay);
    const double innov = -std::expm1(-2.0 * decay);
    cplx s(0.0, 0.0);
    double tail = 0.0;
    for (std::size_t k = a.size(); k-- > 0;) {
        s = a[k] * phases[k] + r * s;
        if (k > 0) tail += std::norm(s);
    }
    return std::norm(s) + innov * tail;
}

double diagonal_sum(const std::vector<double>& a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return s;
}

}  // namespace

double time_power_spectrum(double t, double theta, const RotorParams& params) {
    params.validate();
    if (t < 0.0) return 0.0;
    std::vector<double> a;
    weighted_legendre(theta, params.window, sqrt_weights(params.window), a);
    const auto phases = rotor_phases(params.window, params.phi - params.hbar_omega * t);
    return std::exp(-params.gamma * t) * coherent_sum(a, phases, params.beta * t);
}

double diagonal_spectrum(double t, double theta, const RotorParams& params) {
    params.validate();
    if (t < 0.0) return 0.0;
    std::vector<double> a;
    weighted_legendre(theta, params.window, sqrt_weights(params.window), a);
    return std::exp(-params.gamma * t) * diagonal_sum(a);
}

TimePowerSpectrum compute_spectrum(const std::vector<double>& t_values, const AngleGrid& grid,
                                   const RotorParams& params) {
    params.validate();
    TimePowerSpectrum out{t_values, grid, {}, {}, {}};
    const std::size_t nt = t_values.size(), nth = grid.size();
    out.p.assign(nt * nth, 0.0);
    out.p_diag.assign(nt * nth, 0.0);
    out.ratio.assign(nt * nth, 0.0);

    const auto sw = sqrt_weights(params.window);
    std::vector<std::vector<cplx>> phase_rows;
    for (double t : t_values)
        phase_rows.push_back(rotor_phases(params.window, params.phi - params.hbar_omega * t));
    std::vector<double> a;
    for (std::size_t ith = 0; ith < nth; ++ith) {
        weighted_legendre(grid.values()[ith], params.window, sw, a);
        const double diag = diagonal_sum(a);
        for (std::size_t it = 0; it < nt; ++it) {
            const double t = t_values[it];
            if (t < 0.0) continue;
            const double damp = std::exp(-params.gamma * t);
            const std::size_t idx = it * nth + ith;
            out.p[idx] = damp * coherent_sum(a, phase_rows[it], params.beta * t);
            out.p_diag[idx] = damp * diag;
            if (out.p_diag[idx] > 0.0) out.ratio[idx] = out.p[idx] / out.p_diag[idx];
        }
    }
    return out;
}

double fringe_visibility(double t, std::pair<double, double> theta_window, const RotorParams& params,
                         int n_theta) {
    const auto [lo, hi] = theta_window;
    if (!(lo > 0.0 && hi < std::numbers::pi && lo < hi))
        throw DomainError("visibility window must be a nonempty subinterval of (0, pi)");
    if (n_theta < 16) throw DomainError("visibility needs at least 16 angles");
    const auto spec = compute_spectrum({t}, AngleGrid::uniform(lo, hi, n_theta), params);

    double rmin = 0.0, rmax = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < spec.theta_grid.size(); ++i) {
        if (!(spec.p_diag[i] > 0.0)) continue;
        const double r = spec.ratio[i];
        if (!any) {
            rmin = rmax = r;
            any = true;
        }
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    if (!any) throw DomainError("diagonal spectrum vanishes on the whole visibility window");
    rmin = std::max(rmin, 0.0);
    if (rmax + rmin == 0.0) return 0.0;
    return (rmax - rmin) / (rmax + rmin);
}

int angular_points_for(const SpinWindow& window) {
    // Simpson's end-point error for P_J^2 sin(theta) scales like h^4 J^3.
    const double jm = std::max(1, window.j_max);
    const double h = std::pow(1e-10 / (jm * jm * jm), 0.25);
    int n = static_cast<int>(std::ceil(std::numbers::pi / h)) + 1;
    n = std::max(n, 721);
    if (n % 2 == 0) ++n;
    return n;
}

double angular_integral(double t, const RotorParams& params, int n_points) {
    if (n_points < 721 || n_points % 2 == 0) throw DomainError("Simpson rule needs an odd point count >= 721");
    params.validate();
    if (t < 0.0) return 0.0;
    const double h = std::numbers::pi / (n_points - 1);
    const auto sw = sqrt_weights(params.window);
    const auto phases = rotor_phases(params.window, params.phi - params.hbar_omega * t);
    std::vector<double> a;
    double sum = 0.0;
    for (int i = 0; i < n_points; ++i) {
        const double theta = i == n_points - 1 ? std::numbers::pi : h * i;
        const double s = std::sin(theta);
        if (s == 0.0) continue;
        weighted_legendre(theta, params.window, sw, a);
        const double f = coherent_sum(a, phases, params.beta * t) * s;
        const double wgt = (i == 0 || i == n_points - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += wgt * f;
    }
    return std::exp(-params.gamma * t) * sum * h / 3.0;
}

double angular_sum_rule(double t, const RotorParams& params) {
    params.validate();
    if (t < 0.0) return 0.0;
    double s = 0.0;
    for (int j = params.window.j_min; j <= params.window.j_max; ++j)
        s += 2.0 * gaussian_window(j, params.window) / (2.0 * j + 1.0);
    return std::exp(-params.gamma * t) * s;
}

}  // namespace phasemem
