#pragma once

#include <vector>

namespace phasemem {

/// Scattering angles in radians, strictly increasing inside [0, pi].
class AngleGrid {
public:
    explicit AngleGrid(std::vector<double> theta_values);

    /// n evenly spaced angles covering [lo, hi] inclusive.
    static AngleGrid uniform(double lo, double hi, int n);

    const std::vector<double>& values() const noexcept { return theta_; }
    std::size_t size() const noexcept { return theta_.size(); }

private:
    std::vector<double> theta_;
};

/// Gaussian J-window with center I, width g and truncation bounds.
struct SpinWindow {
    double center = 0.0;
    double width = 1.0;
    int j_min = 0;
    int j_max = 0;

    /// Window truncated at six widths on each side (edge weight <= e^-36).
    static SpinWindow truncated(double center, double width);

    void validate() const;
    int size() const noexcept { return j_max - j_min + 1; }
};

/// P_0(x) ... P_{j_max}(x) by the three-term recurrence. Throws DomainError for |x| > 1.
std::vector<double> legendre_all(double x, int j_max);

/// Unnormalized weight exp[-(j - I)^2 / g^2], zero outside [j_min, j_max].
double gaussian_window(int j, const SpinWindow& window) noexcept;

/// Weights for j_min..j_max in order.
std::vector<double> window_weights(const SpinWindow& window);

}  // namespace phasemem
