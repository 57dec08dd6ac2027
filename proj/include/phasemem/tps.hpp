#pragma once

#include <utility>
#include <vector>

#include "phasemem/specfun.hpp"

namespace phasemem {

/// Damped quantum rotor: widths and quantum in MeV, deflection angle in radians.
/// Times are in hbar/MeV throughout.
struct RotorParams {
    double gamma = 0.15;
    double beta = 0.03;
    double hbar_omega = 0.75;
    double phi = 0.0;
    SpinWindow window = SpinWindow::truncated(36.0, 1.0);

    void validate() const;
};

/// One full revolution, T = 2 pi hbar / (hbar omega), in hbar/MeV.
double revolution_period(double hbar_omega);

/// P(t, theta) including all spin off-diagonal terms; zero for t < 0.
double time_power_spectrum(double t, double theta, const RotorParams& params);

/// Spin-diagonal limit of P(t, theta); independent of beta, omega and phi.
double diagonal_spectrum(double t, double theta, const RotorParams& params);

struct TimePowerSpectrum {
    std::vector<double> t_values;
    AngleGrid theta_grid;
    // row-major [t][theta]
    std::vector<double> p;
    std::vector<double> p_diag;
    std::vector<double> ratio;

    double at(const std::vector<double>& m, std::size_t it, std::size_t ith) const {
        return m[it * theta_grid.size() + ith];
    }
};

/// Fill P, P_diag and P/P_diag on a (t, theta) grid. Ratio is 0 where P_diag vanishes.
TimePowerSpectrum compute_spectrum(const std::vector<double>& t_values, const AngleGrid& grid,
                                   const RotorParams& params);

/// (max R - min R) / (max R + min R) for R = P / P_diag sampled on n_theta points
/// across [theta_lo, theta_hi]. Points where P_diag vanishes are skipped.
double fringe_visibility(double t, std::pair<double, double> theta_window, const RotorParams& params,
                         int n_theta = 64);

/// Composite Simpson estimate of the integral of P(t, theta) sin(theta) over [0, pi].
/// n_points must be odd and >= 721.
double angular_integral(double t, const RotorParams& params, int n_points);

/// Simpson point count that resolves the window's highest partial wave to ~1e-11 relative.
int angular_points_for(const SpinWindow& window);

/// Closed form of the angular integral: H(t) e^{-Gamma t} sum_J 2 W(J) / (2J + 1).
double angular_sum_rule(double t, const RotorParams& params);

}  // namespace phasemem
