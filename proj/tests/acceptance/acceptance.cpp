// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit status if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "phasemem/acf_model.hpp"
#include "phasemem/cli.hpp"
#include "phasemem/ensemble.hpp"
#include "phasemem/estimator.hpp"
#include "phasemem/fit.hpp"
#include "phasemem/io.hpp"
#include "phasemem/kinematics.hpp"
#include "phasemem/tps.hpp"

using namespace phasemem;
namespace fs = std::filesystem;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int threads() { return cli::default_thread_count(); }

void criterion_1() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(20240601);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        ModelParams p;
        p.gamma = 0.01 + 0.99 * u(gen);
        p.beta = p.gamma * u(gen);
        p.hbar_omega = 0.1 + 1.9 * u(gen);
        p.d = 1.0 + 9.0 * u(gen);
        p.phase_constant = i % 2 ? PhaseConstant::two_pi : PhaseConstant::as_printed_pi;
        worst = std::max(worst, std::abs(model_acf(0.0, p) - 1.0));
    }
    const double dt = seconds_since(t0);
    report("1", worst < 1e-10 && dt < 1.0, fmt("max |C(0) - 1| = %.3g over 1000 draws, %.3f s", worst, dt));
}

void criterion_2() {
    const auto t0 = Clock::now();
    ModelParams p;
    p.hbar_omega = 0.75;
    p.gamma = 100.0 * p.hbar_omega;
    p.beta = 0.0;
    p.d = 5.0;
    double worst = 0.0;
    const int n = 3000;
    for (int i = 0; i <= n; ++i) {
        const double e = 3.0 * p.hbar_omega * i / n;
        const double closed = std::exp(-e * e / (2.0 * std::pow(p.hbar_omega * p.d, 2))) *
                              std::cos(std::numbers::pi * e / p.hbar_omega);
        worst = std::max(worst, std::abs(model_acf(e, p) - closed));
    }
    const double dt = seconds_since(t0);
    report("2", worst < 1e-3 && dt < 1.0, fmt("max deviation from the large-Gamma form = %.3g, %.3f s", worst, dt));
}

EnsembleConfig oracle_config() {
    EnsembleConfig c;
    c.params.gamma = 0.15;
    c.params.beta = 0.03;
    c.params.hbar_omega = 0.75;
    c.params.d = 1.0;
    c.window = SpinWindow::truncated(36.0, 1.0);
    c.phi = 0.0;
    c.e_grid = EnergyGrid{49.0, 57.0, 0.025};
    c.t_grid = EnsembleConfig::default_time_grid(c.params, c.window);
    c.sigma_d = 0.0;
    c.n_realizations = 400;
    c.base_seed = 1;
    return c;
}

// Ensemble ACF of the criterion 3 configuration, shared with criterion 6(b).
CorrelationSeries oracle_acf;

void criterion_3() {
    const auto t0 = Clock::now();
    const auto cfg = oracle_config();
    const double theta = 90.0 * kDeg;

    const auto kernel = empirical_kernel(cfg, 4, 2.0, threads());
    int total = 0, outside = 0;
    double worst_sigma = 0.0;
    for (std::size_t dj = 0; dj < kernel.delta_j.size(); ++dj) {
        for (std::size_t l = 0; l < kernel.epsilon.size(); ++l) {
            const auto model = smatrix_kernel(kernel.delta_j[dj], kernel.epsilon[l], cfg.params);
            const double zr = std::abs(kernel.mean[dj][l].real() - model.real()) / kernel.stderr_re[dj][l];
            const double zi = std::abs(kernel.mean[dj][l].imag() - model.imag()) / kernel.stderr_im[dj][l];
            total += 2;
            outside += (zr > 3.0) + (zi > 3.0);
            worst_sigma = std::max({worst_sigma, zr, zi});
        }
    }
    // A 3-sigma band holds 99.73% of Gaussian deviations; the band test allows 1% excursions.
    const double frac = static_cast<double>(outside) / total;
    report("3a", frac <= 0.01,
           fmt("%d of %d kernel components (dJ <= 4, eps <= 2 MeV) outside 3 sigma (%.2f%%), largest %.2f sigma",
               outside, total, 100.0 * frac, worst_sigma));

    const auto acf = ensemble_acf(cfg, theta, 2.0, threads());
    oracle_acf = acf.mean;
    const double c0 = acf.mean.c.front();
    double ss = 0.0;
    for (std::size_t l = 0; l < acf.mean.size(); ++l) {
        const double r = acf.mean.c[l] / c0 - model_acf(acf.mean.epsilon[l], cfg.params);
        ss += r * r;
    }
    const double rms = std::sqrt(ss / static_cast<double>(acf.mean.size()));
    const double dt = seconds_since(t0);
    report("3b", rms < 0.05 && dt <= 120.0,
           fmt("RMS(normalized ensemble ACF - model ACF) on [0, 2] MeV = %.4f; ensemble C(0) = %.4f; %.1f s total",
               rms, c0, dt));
}

void criterion_4() {
    const auto t0 = Clock::now();
    double worst_neg = 0.0, worst_rule = 0.0, spread = 0.0;
    for (double g : {1.0, 5.0}) {
        for (double beta : {0.0, 0.03, 0.1}) {
            RotorParams p;
            p.gamma = 0.15;
            p.beta = beta;
            p.hbar_omega = 0.75;
            p.phi = 0.0;
            p.window = SpinWindow::truncated(36.0, g);
            const double period = revolution_period(p.hbar_omega);
            std::vector<double> ts;
            for (int i = 0; i <= 40; ++i) ts.push_back(2.0 * period * i / 40.0);
            const auto grid = AngleGrid::uniform(0.0, std::numbers::pi, 721);
            const auto spec = compute_spectrum(ts, grid, p);
            for (std::size_t it = 0; it < ts.size(); ++it)
                for (std::size_t k = 0; k < grid.size(); ++k) {
                    const double floor = 1e-12 * spec.at(spec.p, 0, k);
                    worst_neg = std::max(worst_neg, -(spec.at(spec.p, it, k) + floor));
                }

            const int n = angular_points_for(p.window);
            for (int i = 0; i <= 8; ++i) {
                const double t = 2.0 * period * i / 8.0;
                const double exact = angular_sum_rule(t, p);
                double lo = INFINITY, hi = -INFINITY;
                for (double hw : {0.75, 1.9}) {
                    for (double phi : {0.0, 1.0}) {
                        auto q = p;
                        q.hbar_omega = hw;
                        q.phi = phi;
                        const double v = angular_integral(t, q, n);
                        worst_rule = std::max(worst_rule, std::abs(v - exact) / exact);
                        lo = std::min(lo, v);
                        hi = std::max(hi, v);
                    }
                }
                spread = std::max(spread, (hi - lo) / exact);
            }
        }
    }
    const double dt = seconds_since(t0);
    report("4", worst_neg <= 0.0 && worst_rule < 1e-9 && spread < 2e-9 && dt < 30.0,
           fmt("largest negativity beyond tolerance %.3g; sum rule rel. error %.3g; spread over (omega, phi) %.3g; %.1f s",
               std::max(worst_neg, 0.0), worst_rule, spread, dt));
}

void criterion_5() {
    RotorParams a;
    a.gamma = 0.15;
    a.hbar_omega = 0.75;
    a.phi = 0.0;
    a.beta = 0.03;
    a.window = SpinWindow::truncated(36.0, 1.0);
    auto b = a;
    b.beta = 0.1;
    b.window = SpinWindow::truncated(36.0, 5.0);
    const double t = 0.25 * revolution_period(0.75);
    const double va = fringe_visibility(t, {80 * kDeg, 100 * kDeg}, a);
    const double vb = fringe_visibility(t, {80 * kDeg, 100 * kDeg}, b);
    report("5", va > vb, fmt("visibility at T/4: beta=0.03, g=1 -> %.4f; beta=0.1, g=5 -> %.4f", va, vb));
}

CorrelationSeries model_series(const ModelParams& p, double eps_max, double step) {
    CorrelationSeries s;
    const int n = static_cast<int>(std::lround(eps_max / step));
    for (int l = 0; l <= n; ++l) {
        s.epsilon.push_back(step * l);
        s.c.push_back(model_acf(step * l, p));
    }
    return s;
}

void criterion_6() {
    const auto t0 = Clock::now();
    ModelParams truth;
    truth.gamma = 0.15;
    truth.beta = 0.1;
    truth.hbar_omega = 0.75;
    truth.d = 5.0;
    const auto self = fit_acf(model_series(truth, 3.0, 0.05), FitConfig{});
    const auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    const double worst = std::max({rel(self.params.gamma, truth.gamma), rel(self.params.beta, truth.beta),
                                   rel(self.params.hbar_omega, truth.hbar_omega), rel(self.params.d, truth.d)});
    report("6a", worst < 0.01,
           fmt("self-fit: Gamma %.5f beta %.5f hw %.5f d %.4f; worst relative error %.2g", self.params.gamma,
               self.params.beta, self.params.hbar_omega, self.params.d, worst));

    const auto oracle = oracle_config();
    for (auto pc : {PhaseConstant::as_printed_pi, PhaseConstant::two_pi}) {
        FitConfig fc;
        fc.phase_constant = pc;
        const auto r = fit_acf(oracle_acf, fc);
        const double eg = rel(r.params.gamma, oracle.params.gamma);
        const double ew = rel(r.params.hbar_omega, oracle.params.hbar_omega);
        const std::string detail =
            fmt("fit to the ensemble ACF (%s): Gamma %.4f (%.1f%%), hw %.4f (%.1f%%), beta %.4f, d %.3f",
                std::string(to_string(pc)).c_str(), r.params.gamma, 100 * eg, r.params.hbar_omega, 100 * ew,
                r.params.beta, r.params.d);
        if (pc == FitConfig{}.phase_constant)
            report("6b", eg < 0.2 && ew < 0.05, detail);
        else
            std::printf("       info: %s\n", detail.c_str());
    }

    // Data-like target: the midpoint of the two reference curves plus white estimator noise of
    // standard deviation sqrt(Gamma / span) for an 8 MeV excitation function. Objectives are
    // averaged over 256 fixed-seed noise draws; single-draw spread is reported alongside.
    ModelParams a = truth, b = truth;
    b.beta = 0.03;
    b.d = 1.0;
    const double noise = std::sqrt(0.15 / 8.0);
    const int n_draws = 256;
    double sum_a = 0.0, sum_b = 0.0;
    int within = 0;
    for (int r = 0; r < n_draws; ++r) {
        CounterRng rng(2024, static_cast<std::uint64_t>(r), StreamRole::gaussian_noise);
        CorrelationSeries target;
        for (int l = 0; l <= 80; ++l) {
            const double e = 0.025 * l;
            target.epsilon.push_back(e);
            target.c.push_back(0.5 * (model_acf(e, a) + model_acf(e, b)) + noise * rng.normal());
        }
        const double oa = acf_objective(target, a, WeightMode::uniform);
        const double ob = acf_objective(target, b, WeightMode::uniform);
        sum_a += oa;
        sum_b += ob;
        within += std::abs(oa - ob) / std::min(oa, ob) < 0.1;
    }
    const double oa = sum_a / n_draws, ob = sum_b / n_draws;
    const double diff = std::abs(oa - ob) / std::min(oa, ob);
    const double dt = seconds_since(t0);
    report("6c", diff < 0.1 && dt <= 300.0,
           fmt("data-like target, mean objectives %.4f (beta=0.1, d=5) vs %.4f (beta=0.03, d=1): %.1f%% apart; "
               "%d of %d single draws within 10%%; %.1f s",
               oa, ob, 100 * diff, within, n_draws, dt));
}

void criterion_7() {
    ModelParams p;
    p.gamma = 0.15;
    p.beta = 0.0;
    p.hbar_omega = 0.75;
    p.d = 5.0;
    const double step = 0.005;
    p.phase_constant = PhaseConstant::as_printed_pi;
    const auto s_pi = peak_spacing(p, 7.0, step);
    p.phase_constant = PhaseConstant::two_pi;
    const auto s_2pi = peak_spacing(p, 7.0, step);
    const bool ok = s_pi && s_2pi && std::abs(*s_pi - 2.0 * p.hbar_omega) <= step &&
                    std::abs(*s_2pi - p.hbar_omega) <= step;
    report("7", ok,
           fmt("envelope-free peak spacing (hw = 0.75 MeV): as_printed_pi %.5f MeV, two_pi %.5f MeV",
               s_pi.value_or(NAN), s_2pi.value_or(NAN)));
}

void criterion_8() {
    const double period = 0.5, a = 0.2;
    ExcitationFunction xf;
    for (int k = 0; k <= 320; ++k) {
        const double e = 49.0 + 0.025 * k;
        xf.energies.push_back(e);
        xf.sigma.push_back(1.0 + a * std::sin(2.0 * std::numbers::pi * e / period));
    }
    const auto acf = sample_acf(xf, 0.25 * xf.span());
    double worst = 0.0;
    for (std::size_t l = 0; l < acf.size(); ++l)
        worst = std::max(worst, std::abs(acf.c[l] - 0.02 * std::cos(2.0 * std::numbers::pi * acf.epsilon[l] / period)));
    report("8", worst < 0.02 * 0.02,
           fmt("max |C - 0.02 cos(2 pi eps / L)| = %.3g (%.2f%% of the amplitude) over %zu lags", worst,
               100 * worst / 0.02, acf.size()));
}

void criterion_9() {
    const auto r = rotor_frequency(RotorGeometry{}, 36.0);
    report("9", r.hbar_omega >= 1.5 && r.hbar_omega <= 2.3,
           fmt("touching-spheres rotor (24 + 28, r0 = 1.2 fm, J = 36): hw = %.3f MeV; ratio to 0.75 MeV = %.2f",
               r.hbar_omega, r.hbar_omega / 0.75));
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "phasemem");
    std::ostringstream out, err;
    const int code = cli::execute(args, out, err);
    if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
    return code;
}

void criterion_10() {
    const auto dir = fs::temp_directory_path() / ("phasemem_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    io::write_atomic(dir / "cfg.json",
                     R"({"gamma_MeV": 0.15, "beta_MeV": 0.03, "hbar_omega_MeV": 0.75, "d": 1, "g": 1, "i_bar": 36,
  "phi_rad": 0, "e_min_MeV": 49, "e_max_MeV": 57, "de_MeV": 0.025, "sigma_d": 0,
  "n_realizations": 16, "seed": 7, "theta_deg": 90}
)");
    const int n_threads = std::max(4, threads());
    bool ok = true;
    std::vector<std::vector<std::string>> runs;
    for (const auto& [tag, nt] : std::vector<std::pair<std::string, int>>{{"a", 1}, {"b", 1}, {"c", n_threads}}) {
        const auto sim = dir / ("sim_" + tag);
        const auto acf = dir / ("acf_" + tag + ".csv");
        const auto fit = dir / ("fit_" + tag + ".json");
        ok &= run_cli({"simulate", "--config", (dir / "cfg.json").string(), "--out-dir", sim.string(), "--threads",
                       std::to_string(nt)}) == 0;
        std::vector<std::string> acf_args{"acf", "--out", acf.string()};
        for (int r = 0; r < 16; ++r) {
            char name[64];
            std::snprintf(name, sizeof name, "excitation_r%04d.csv", r);
            acf_args.push_back("--in");
            acf_args.push_back((sim / name).string());
        }
        ok &= run_cli(acf_args) == 0;
        ok &= run_cli({"fit", "--in", acf.string(), "--out", fit.string()}) == 0;
        if (!ok) break;
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(sim))
            if (entry.path().extension() == ".csv") files.push_back(entry.path().filename().string());
        std::sort(files.begin(), files.end());
        std::vector<std::string> bytes;
        for (const auto& f : files) bytes.push_back(f + "\n" + io::read_file(sim / f));
        bytes.push_back(io::read_file(acf));
        bytes.push_back(io::read_file(fit));
        runs.push_back(std::move(bytes));
    }
    fs::remove_all(dir);
    const bool same = ok && runs.size() == 3 && runs[0] == runs[1] && runs[0] == runs[2];
    report("10", same,
           fmt("simulate -> acf -> fit, seed 7, 16 realizations: %zu data files compared across two runs and "
               "thread counts 1 and %d: %s",
               runs.empty() ? std::size_t{0} : runs[0].size(), n_threads, same ? "byte-identical" : "DIFFERENT"));
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void()>>> criteria{
        {"1", criterion_1}, {"2", criterion_2}, {"3", criterion_3}, {"4", criterion_4},  {"5", criterion_5},
        {"6", criterion_6}, {"7", criterion_7}, {"8", criterion_8}, {"9", criterion_9}, {"10", criterion_10}};
    for (const auto& [id, fn] : criteria) {
        try {
            fn();
        } catch (const std::exception& e) {
            report(id, false, std::string("threw: ") + e.what());
        }
    }
    std::printf("%d criterion check(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
