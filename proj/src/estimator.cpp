#include "phasemem/estimator.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "phasemem/errors.hpp"
#include "phasemem/numeric.hpp"

namespace phasemem {

void ExcitationFunction::validate() const {
    if (energies.size() != sigma.size()) throw DomainError("energy and sigma columns differ in length");
    if (energies.size() < 16) throw DomainError("excitation function needs at least 16 points");
    const double h = (energies.back() - energies.front()) / static_cast<double>(energies.size() - 1);
    if (!(h > 0.0)) throw DomainError("energies must be strictly increasing");
    for (std::size_t i = 1; i < energies.size(); ++i) {
        const double di = energies[i] - energies[i - 1];
        if (!(di > 0.0)) throw DomainError("energies must be strictly increasing");
        if (std::abs(di - h) > 1e-6 * h) throw DomainError("energy grid is not uniform");
    }
    for (double s : sigma)
        if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("cross sections must be finite and >= 0");
}

double ExcitationFunction::step() const {
    return (energies.back() - energies.front()) / static_cast<double>(energies.size() - 1);
}

namespace {

DetrendResult poly_trend(const ExcitationFunction& xf, int order) {
    if (order < 0 || order > 3) throw DomainError("polynomial detrend order must be in [0, 3]");
    const auto n = static_cast<Eigen::Index>(xf.energies.size());
    if (n <= order + 1) throw DomainError("insufficient data for polynomial detrend");
    const double mid = 0.5 * (xf.energies.front() + xf.energies.back());
    const double half = 0.5 * xf.span();
    Eigen::MatrixXd vander(n, order + 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = (xf.energies[i] - mid) / half;
        double p = 1.0;
        for (int k = 0; k <= order; ++k, p *= x) vander(i, k) = p;
        y(i) = xf.sigma[i];
    }
    const Eigen::VectorXd coef = vander.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd fitted = vander * coef;
    DetrendResult out;
    out.trend.assign(fitted.data(), fitted.data() + n);
    out.fluctuation.resize(out.trend.size());
    for (std::size_t i = 0; i < out.trend.size(); ++i) out.fluctuation[i] = xf.sigma[i] - out.trend[i];
    return out;
}

// Centered boxcar; near the edges the half-width shrinks symmetrically so a linear trend
// is reproduced exactly everywhere.
DetrendResult moving_average_trend(const ExcitationFunction& xf, const MovingAverageDetrend& m) {
    const double span = xf.span();
    if (!(m.window_mev > 0.0)) throw DomainError("moving-average window must be > 0");
    if (m.window_mev > span / 3.0) throw DomainError("moving-average window exceeds a third of the data span");
    if (m.expected_gamma > 0.0 && m.window_mev < 5.0 * m.expected_gamma)
        throw DomainError("moving-average window is narrower than 5 x expected gamma");
    const auto n = static_cast<long>(xf.sigma.size());
    const long half = std::lround(0.5 * m.window_mev / xf.step());
    if (half < 1) throw DomainError("moving-average window is narrower than the energy step");

    std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
    for (long i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + xf.sigma[i];

    DetrendResult out;
    out.trend.resize(static_cast<std::size_t>(n));
    out.fluctuation.resize(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const long h = std::min({half, i, n - 1 - i});
        out.trend[i] = (prefix[i + h + 1] - prefix[i - h]) / static_cast<double>(2 * h + 1);
        out.fluctuation[i] = xf.sigma[i] - out.trend[i];
    }
    return out;
}

std::size_t max_lag_index(const ExcitationFunction& xf, double eps_max) {
    if (!(eps_max >= 0.0)) throw DomainError("eps_max must be >= 0");
    const double step = xf.step();
    if (eps_max > 0.25 * xf.span() * (1.0 + 1e-9)) throw DomainError("eps_max exceeds a quarter of the data span");
    return static_cast<std::size_t>(std::floor(eps_max / step + 1e-9));
}

}  // namespace

DetrendResult detrend(const ExcitationFunction& xf, const DetrendMethod& method) {
    xf.validate();
    if (const auto* p = std::get_if<PolyDetrend>(&method)) return poly_trend(xf, p->order);
    return moving_average_trend(xf, std::get<MovingAverageDetrend>(method));
}

CorrelationSeries sample_acf(const ExcitationFunction& xf, double eps_max) {
    xf.validate();
    const std::size_t lmax = max_lag_index(xf, eps_max);
    const std::size_t n = xf.sigma.size();
    const double step = xf.step();
    const auto& s = xf.sigma;

    CorrelationSeries out;
    for (std::size_t l = 0; l <= lmax; ++l) {
        const std::size_t m = n - l;
        std::vector<double> prod(m);
        for (std::size_t k = 0; k < m; ++k) prod[k] = s[k + l] * s[k];
        const double lead = pairwise_sum({s.data() + l, m}) / static_cast<double>(m);
        const double lag = pairwise_sum({s.data(), m}) / static_cast<double>(m);
        if (lead == 0.0 || lag == 0.0) throw DomainError("mean cross section is zero");
        const double num = pairwise_sum(prod) / static_cast<double>(m);
        out.epsilon.push_back(step * static_cast<double>(l));
        out.c.push_back(num / (lead * lag) - 1.0);
    }
    return out;
}

CorrelationSeries detrended_acf(const ExcitationFunction& xf, const DetrendMethod& method, double eps_max) {
    const auto parts = detrend(xf, method);
    const std::size_t lmax = max_lag_index(xf, eps_max);
    const std::size_t n = xf.sigma.size();
    const auto& f = parts.fluctuation;
    const auto& tr = parts.trend;

    CorrelationSeries out;
    for (std::size_t l = 0; l <= lmax; ++l) {
        const std::size_t m = n - l;
        std::vector<double> prod(m);
        for (std::size_t k = 0; k < m; ++k) prod[k] = f[k + l] * f[k];
        const double lead = pairwise_sum({tr.data() + l, m}) / static_cast<double>(m);
        const double lag = pairwise_sum({tr.data(), m}) / static_cast<double>(m);
        if (lead == 0.0 || lag == 0.0) throw DomainError("mean trend is zero");
        out.epsilon.push_back(xf.step() * static_cast<double>(l));
        out.c.push_back(pairwise_sum(prod) / static_cast<double>(m) / (lead * lag));
    }
    return out;
}

CorrelationSeries average_channels(const std::vector<CorrelationSeries>& series) {
    if (series.empty()) throw DomainError("no channels to average");
    const auto& ref = series.front().epsilon;
    for (const auto& s : series) {
        if (s.epsilon.size() != ref.size() || s.c.size() != ref.size())
            throw DomainError("channel series have different lag grids");
        for (std::size_t i = 0; i < ref.size(); ++i)
            if (std::abs(s.epsilon[i] - ref[i]) > 1e-9 * std::max(1.0, std::abs(ref[i])))
                throw DomainError("channel series have different lag grids");
    }
    CorrelationSeries out;
    out.epsilon = ref;
    const std::size_t k = series.size();
    std::vector<double> column(k);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        for (std::size_t j = 0; j < k; ++j) column[j] = series[j].c[i];
        const auto ms = mean_and_stderr(column);
        out.c.push_back(ms.mean);
        out.stderr_values.push_back(ms.stderr_of_mean);
    }
    return out;
}

}  // namespace phasemem
