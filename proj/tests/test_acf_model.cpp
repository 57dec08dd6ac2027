#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "phasemem/acf_model.hpp"
#include "phasemem/errors.hpp"

using namespace phasemem;

namespace {

ModelParams fitted_set() { return {0.15, 0.1, 0.75, 5.0, PhaseConstant::as_printed_pi}; }

}  // namespace

TEST_CASE("smatrix_kernel examples") {
    const auto p = fitted_set();
    const auto k0 = smatrix_kernel(0, 0.0, p);
    CHECK(k0.real() == 1.0);
    CHECK(k0.imag() == 0.0);

    const auto k1 = smatrix_kernel(0, p.gamma, p);
    CHECK(k1.real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(k1.imag() == doctest::Approx(0.5).epsilon(1e-15));

    const auto k2 = smatrix_kernel(1, 0.0, p);
    CHECK(k2.real() == doctest::Approx(0.06).epsilon(1e-14));
    CHECK(k2.imag() == doctest::Approx(-0.18).epsilon(1e-14));
}

TEST_CASE("smatrix_kernel is Hermitian and bounded") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const ModelParams p{0.01 + u(gen), u(gen), 0.1 + 2 * u(gen), 1.0, PhaseConstant::as_printed_pi};
        const int dj = static_cast<int>(u(gen) * 9) - 4;
        const double eps = 4.0 * u(gen) - 2.0;
        const auto a = smatrix_kernel(dj, eps, p);
        const auto b = smatrix_kernel(-dj, -eps, p);
        CHECK(a.real() == b.real());
        CHECK(a.imag() == -b.imag());
        if (dj != 0 || eps != 0.0) CHECK(std::abs(a) < 1.0);
    }
}

TEST_CASE("model_acf normalization and evenness") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const double gamma = 0.01 + 0.99 * u(gen);
        const ModelParams p{gamma, gamma * u(gen), 0.1 + 1.9 * u(gen), 1.0 + 9.0 * u(gen),
                            trial % 2 ? PhaseConstant::two_pi : PhaseConstant::as_printed_pi};
        CHECK(std::abs(model_acf(0.0, p) - 1.0) < 1e-10);
        const double e = 3.0 * u(gen);
        CHECK(model_acf(e, p) == model_acf(-e, p));
    }
}

TEST_CASE("model_acf agrees with an arbitrary-precision evaluation") {
    // 50-digit evaluations of the same closed form (mpmath)
    CHECK(model_acf(1.5, fitted_set()) == doctest::Approx(0.2425308752072254024).epsilon(1e-10));
    auto p = fitted_set();
    p.phase_constant = PhaseConstant::two_pi;
    CHECK(model_acf(1.5, p) == doctest::Approx(0.1304988310385385010).epsilon(1e-10));
    const ModelParams b{0.15, 0.03, 0.75, 1.0, PhaseConstant::as_printed_pi};
    CHECK(model_acf(0.6, b) == doctest::Approx(-0.1977636869360691806).epsilon(1e-10));
}

TEST_CASE("model_acf large-gamma limit") {
    const double hw = 0.75;
    const ModelParams p{100.0 * hw, 0.0, hw, 5.0, PhaseConstant::as_printed_pi};
    CHECK(model_acf(hw, p) == doctest::Approx(-std::exp(-1.0 / 50.0)).epsilon(1e-12));
    for (int i = 0; i <= 300; ++i) {
        const double e = 3.0 * hw * i / 300.0;
        const double closed = std::exp(-e * e / (2 * hw * hw * 25.0)) * std::cos(std::numbers::pi * e / hw);
        CHECK(std::abs(model_acf(e, p) - closed) < 1e-3);
    }
}

TEST_CASE("model parameters are validated") {
    CHECK_THROWS_AS(model_acf(0.1, ModelParams{0.0, 0.0, 0.75, 5.0}), DomainError);
    CHECK_THROWS_AS(model_acf(0.1, ModelParams{0.15, -0.1, 0.75, 5.0}), DomainError);
    CHECK_THROWS_AS(model_acf(0.1, ModelParams{0.15, 0.1, 0.0, 5.0}), DomainError);
    CHECK_THROWS_AS(model_acf(0.1, ModelParams{0.15, 0.1, 0.75, 0.5}), DomainError);
    CHECK(parse_phase_constant("pi") == PhaseConstant::as_printed_pi);
    CHECK(parse_phase_constant("two_pi") == PhaseConstant::two_pi);
    CHECK_THROWS_AS(parse_phase_constant("tau"), DomainError);
}

TEST_CASE("lorentzian_acf") {
    CHECK(lorentzian_acf(0.0, 0.3) == 1.0);
    CHECK(lorentzian_acf(0.3, 0.3) == 0.5);
    CHECK(lorentzian_acf(0.17, 0.085) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK_THROWS_AS(lorentzian_acf(0.1, 0.0), DomainError);
    CHECK_THROWS_AS(lorentzian_acf(0.1, -1.0), DomainError);
}

TEST_CASE("peak spacing for both phase constants") {
    ModelParams p{0.15, 0.0, 0.75, 5.0, PhaseConstant::as_printed_pi};
    const double step = 0.005;
    const auto s1 = peak_spacing(p, 7.0, step);
    REQUIRE(s1.has_value());
    CHECK(std::abs(*s1 - 1.5) <= step);

    p.phase_constant = PhaseConstant::two_pi;
    const auto s2 = peak_spacing(p, 7.0, step);
    REQUIRE(s2.has_value());
    CHECK(std::abs(*s2 - 0.75) <= step);

    CHECK_THROWS_AS(peak_spacing(p, 0.0, step), DomainError);
    CHECK_THROWS_AS(peak_spacing(p, 3.0, 0.05), DomainError);
}

TEST_CASE("peak spacing is absent for monotone decay") {
    const ModelParams p{0.15, 7.5, 0.75, 5.0, PhaseConstant::as_printed_pi};
    CHECK_FALSE(peak_spacing(p, 6.0, 0.01).has_value());
}

TEST_CASE("oscillation maxima are damped for beta > 0") {
    for (double beta : {0.01, 0.03, 0.1}) {
        const ModelParams p{0.15, beta, 0.75, 5.0, PhaseConstant::as_printed_pi};
        const auto peaks = envelope_free_maxima(p, 9.0, 0.005);
        REQUIRE(peaks.size() >= 2);
        for (std::size_t i = 1; i < peaks.size(); ++i) CHECK(peaks[i].height < peaks[i - 1].height);
    }
}

TEST_CASE("beta = 0 trigonometric factor repeats every 2 hbar_omega") {
    const ModelParams p{0.15, 0.0, 0.75, 5.0, PhaseConstant::as_printed_pi};
    for (int i = 0; i <= 100; ++i) {
        const double e = 3.0 * i / 100.0;
        CHECK(std::abs(envelope_free_acf(e + 2.0 * p.hbar_omega, p) - envelope_free_acf(e, p)) < 1e-10);
    }
}

TEST_CASE("CorrelationSeries validation") {
    CorrelationSeries s{{0.0, 0.1, 0.2}, {1.0, 0.5, 0.2}, {}};
    CHECK_NOTHROW(s.validate());
    s.epsilon[0] = 0.05;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s.epsilon = {0.0, 0.2, 0.1};
    CHECK_THROWS_AS(s.validate(), DomainError);
    s.epsilon = {0.0, 0.1, 0.2};
    s.stderr_values = {0.1, 0.1};
    CHECK_THROWS_AS(s.validate(), DomainError);
}
