#include "phasemem/specfun.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "phasemem/errors.hpp"

namespace phasemem {

AngleGrid::AngleGrid(std::vector<double> theta_values) : theta_(std::move(theta_values)) {
    if (theta_.empty()) throw DomainError("angle grid is empty");
    for (std::size_t i = 0; i < theta_.size(); ++i) {
        const double th = theta_[i];
        if (!(th >= 0.0 && th <= std::numbers::pi))
            throw DomainError("angle " + std::to_string(th) + " outside [0, pi]");
        if (i > 0 && !(th > theta_[i - 1])) throw DomainError("angle grid not strictly increasing");
    }
}

AngleGrid AngleGrid::uniform(double lo, double hi, int n) {
    if (n < 1) throw DomainError("angle grid needs at least one point");
    if (n == 1) return AngleGrid({lo});
    std::vector<double> v(static_cast<std::size_t>(n));
    const double h = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) v[i] = lo + h * i;
    v.back() = hi;
    return AngleGrid(std::move(v));
}

SpinWindow SpinWindow::truncated(double center, double width) {
    if (!(width > 0.0)) throw DomainError("spin window width must be positive");
    SpinWindow w;
    w.center = center;
    w.width = width;
    w.j_min = std::max(0, static_cast<int>(std::floor(center - 6.0 * width)));
    w.j_max = static_cast<int>(std::ceil(center + 6.0 * width));
    w.validate();
    return w;
}

void SpinWindow::validate() const {
    if (!(width > 0.0)) throw DomainError("spin window width must be positive");
    if (j_min < 0 || j_min > j_max) throw DomainError("spin window bounds need 0 <= j_min <= j_max");
}

std::vector<double> legendre_all(double x, int j_max) {
    if (!(std::abs(x) <= 1.0)) throw DomainError("legendre argument outside [-1, 1]");
    if (j_max < 0) throw DomainError("legendre degree must be nonnegative");
    std::vector<double> p(static_cast<std::size_t>(j_max) + 1);
    p[0] = 1.0;
    if (j_max >= 1) p[1] = x;
    for (int n = 1; n < j_max; ++n)
        p[n + 1] = ((2.0 * n + 1.0) * x * p[n] - n * p[n - 1]) / (n + 1.0);
    return p;
}

double gaussian_window(int j, const SpinWindow& window) noexcept {
    if (j < window.j_min || j > window.j_max) return 0.0;
    const double u = (j - window.center) / window.width;
    return std::exp(-u * u);
}

std::vector<double> window_weights(const SpinWindow& window) {
    window.validate();
    std::vector<double> w(static_cast<std::size_t>(window.size()));
    for (int j = window.j_min; j <= window.j_max; ++j) w[j - window.j_min] = gaussian_window(j, window);
    return w;
}

}  // namespace phasemem
