#include "phasemem/ensemble.hpp"

#include <atomic>
#include <mutex>
#include <bit>
#include <cmath>
#include <numbers>
#include <thread>

#include "phasemem/errors.hpp"
#include "phasemem/numeric.hpp"

namespace phasemem {

using cplx = std::complex<double>;

std::vector<double> EnergyGrid::values() const {
    const auto n = static_cast<std::size_t>(std::llround((e_max - e_min) / step)) + 1;
    std::vector<double> e(n);
    for (std::size_t k = 0; k < n; ++k) e[k] = e_min + step * static_cast<double>(k);
    return e;
}

namespace {

double max_time_step(const ModelParams& p, int j_max) {
    double dt = 1.0 / (10.0 * p.gamma);
    if (p.hbar_omega > 0.0 && j_max > 0)
        dt = std::min(dt, std::numbers::pi / (10.0 * p.hbar_omega * j_max));
    return dt;
}

}  // namespace

std::pair<int, int> EnsembleConfig::spin_range() const {
    if (!center_drift) return {window.j_min, window.j_max};
    const double lo = window_center(*center_drift, e_grid.e_min);
    const double hi = window_center(*center_drift, e_grid.e_max);
    const auto a = SpinWindow::truncated(std::min(lo, hi), window.width);
    const auto b = SpinWindow::truncated(std::max(lo, hi), window.width);
    return {std::min(a.j_min, window.j_min), std::max(b.j_max, window.j_max)};
}

void EnsembleConfig::validate() const {
    const auto& p = params;
    if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) throw ConfigError("gamma must be > 0");
    if (!(p.beta >= 0.0) || !std::isfinite(p.beta)) throw ConfigError("beta must be >= 0");
    if (!(p.hbar_omega >= 0.0) || !std::isfinite(p.hbar_omega)) throw ConfigError("hbar_omega must be >= 0");
    try {
        window.validate();
        if (center_drift) center_drift->validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (!(e_grid.e_max > e_grid.e_min)) throw ConfigError("energy grid needs e_max > e_min");
    if (!(e_grid.step > 0.0)) throw ConfigError("energy step must be > 0");
    if (t_grid.n_samples < 1024 || !std::has_single_bit(static_cast<unsigned>(t_grid.n_samples)))
        throw ConfigError("time grid needs a power-of-two sample count >= 1024");
    if (!(t_grid.t_max >= 10.0 / p.gamma * (1.0 - 1e-12)))
        throw ConfigError("t_max too small: need t_max >= 10 hbar/Gamma");
    const double dt_max = max_time_step(p, spin_range().second);
    if (t_grid.step() > dt_max * (1.0 + 1e-12))
        throw ConfigError("time step too coarse: need dt <= " + std::to_string(dt_max) + " hbar/MeV");
    if (!(sigma_d >= 0.0)) throw ConfigError("sigma_d must be >= 0");
    if (n_realizations < 1) throw ConfigError("n_realizations must be >= 1");
}

TimeGrid EnsembleConfig::default_time_grid(const ModelParams& params, const SpinWindow& window) {
    TimeGrid g;
    g.t_max = 10.0 / params.gamma;
    const double dt = max_time_step(params, window.j_max);
    const auto need = static_cast<unsigned>(std::ceil(g.t_max / dt));
    g.n_samples = static_cast<int>(std::bit_ceil(std::max(1024u, need)));
    return g;
}

std::vector<double> cauchy_phase_path(const TimeGrid& grid, double beta, CounterRng& rng) {
    if (!(beta >= 0.0)) throw DomainError("beta must be >= 0");
    std::vector<double> path(static_cast<std::size_t>(grid.n_samples), 0.0);
    if (beta == 0.0) return path;
    const double scale = beta * grid.step();
    for (std::size_t m = 1; m < path.size(); ++m) path[m] = path[m - 1] + rng.cauchy(scale);
    return path;
}

SMatrixSynthesizer::SMatrixSynthesizer(EnsembleConfig config) : config_(std::move(config)) {
    config_.validate();
    energies_ = config_.e_grid.values();
    const auto nt = static_cast<std::size_t>(config_.t_grid.n_samples);
    const double dt = config_.t_grid.step();
    const double gamma = config_.params.gamma;
    const double norm = std::sqrt(gamma) * dt;
    transform_.resize(energies_.size() * nt);
    for (std::size_t k = 0; k < energies_.size(); ++k) {
        for (std::size_t m = 0; m < nt; ++m) {
            const double t = dt * static_cast<double>(m);
            transform_[k * nt + m] = std::polar(norm * std::exp(-0.5 * gamma * t), energies_[k] * t);
        }
    }
}

SMatrixRealization SMatrixSynthesizer::realization(std::uint64_t index) const {
    const auto nt = static_cast<std::size_t>(config_.t_grid.n_samples);
    const double dt = config_.t_grid.step();
    CounterRng noise_rng(config_.base_seed, index, StreamRole::gaussian_noise);
    CounterRng phase_rng(config_.base_seed, index, StreamRole::cauchy_phase);

    const double sd = std::sqrt(0.5 / dt);
    std::vector<cplx> noise(nt);
    for (auto& c : noise) {
        const double re = noise_rng.normal();
        const double im = noise_rng.normal();
        c = cplx(sd * re, sd * im);
    }
    const auto theta = cauchy_phase_path(config_.t_grid, config_.params.beta, phase_rng);
    std::vector<double> rot(nt);
    for (std::size_t m = 0; m < nt; ++m)
        rot[m] = config_.params.hbar_omega * dt * static_cast<double>(m) + theta[m];

    const auto [j_min, j_max] = config_.spin_range();
    SMatrixRealization out;
    out.j_min = j_min;
    out.j_max = j_max;
    out.energies = energies_;
    const std::size_t ne = energies_.size();
    out.values.resize(static_cast<std::size_t>(j_max - j_min + 1) * ne);

    std::vector<double> b_re(nt), b_im(nt);
    for (int j = j_min; j <= j_max; ++j) {
        for (std::size_t m = 0; m < nt; ++m) {
            const cplx b = noise[m] * std::polar(1.0, -j * rot[m]);
            b_re[m] = b.real();
            b_im[m] = b.imag();
        }
        for (std::size_t k = 0; k < ne; ++k) {
            const cplx* row = transform_.data() + k * nt;
            // four fixed accumulators: the summation order is part of the reproducibility contract
            double re[4] = {0, 0, 0, 0}, im[4] = {0, 0, 0, 0};
            for (std::size_t m = 0; m < nt; m += 4) {
                for (std::size_t u = 0; u < 4; ++u) {
                    const double tr = row[m + u].real(), ti = row[m + u].imag();
                    re[u] += tr * b_re[m + u] - ti * b_im[m + u];
                    im[u] += tr * b_im[m + u] + ti * b_re[m + u];
                }
            }
            out.values[static_cast<std::size_t>(j - j_min) * ne + k] =
                cplx((re[0] + re[1]) + (re[2] + re[3]), (im[0] + im[1]) + (im[2] + im[3]));
        }
    }
    return out;
}

SMatrixRealization synth_smatrix(const EnsembleConfig& config, std::uint64_t realization_index) {
    return SMatrixSynthesizer(config).realization(realization_index);
}

ExcitationFunction synth_excitation(const SMatrixRealization& s, const EnsembleConfig& config, double theta) {
    const std::size_t ne = s.energies.size();
    const int nj = s.j_max - s.j_min + 1;
    std::vector<cplx> plus(static_cast<std::size_t>(nj)), minus(static_cast<std::size_t>(nj));
    for (int j = s.j_min; j <= s.j_max; ++j) {
        plus[j - s.j_min] = std::polar(1.0, j * (config.phi + theta));
        minus[j - s.j_min] = std::polar(1.0, j * (config.phi - theta));
    }

    ExcitationFunction xf;
    xf.energies = s.energies;
    xf.sigma.resize(ne);
    xf.channel_label = "synthetic";
    for (std::size_t k = 0; k < ne; ++k) {
        SpinWindow w = config.window;
        if (config.center_drift) w = SpinWindow::truncated(window_center(*config.center_drift, s.energies[k]), w.width);
        const int lo = std::max(w.j_min, s.j_min), hi = std::min(w.j_max, s.j_max);
        cplx fp(0.0, 0.0), fm(0.0, 0.0);
        for (int j = lo; j <= hi; ++j) {
            const cplx amp = (2.0 * j + 1.0) * std::sqrt(gaussian_window(j, w)) * s.at(j, k);
            fp += amp * plus[j - s.j_min];
            fm += amp * minus[j - s.j_min];
        }
        xf.sigma[k] = config.sigma_d + std::norm(fp) + std::norm(fm);
    }
    return xf;
}

void parallel_for(std::size_t n, int n_threads, const std::function<void(std::size_t)>& fn) {
    const auto workers = static_cast<std::size_t>(std::max(1, n_threads));
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

EnsembleAcf ensemble_acf(const EnsembleConfig& config, double theta, double eps_max, int n_threads) {
    if (config.n_realizations < 2) throw ConfigError("ensemble ACF needs at least two realizations");
    const SMatrixSynthesizer synth(config);
    const auto n = static_cast<std::size_t>(config.n_realizations);

    EnsembleAcf out;
    out.per_realization.resize(n);
    std::vector<double> lags;
    std::mutex lag_mutex;
    parallel_for(n, n_threads, [&](std::size_t r) {
        const auto xf = synth_excitation(synth.realization(r), config, theta);
        auto acf = sample_acf(xf, eps_max);
        if (r == 0) {
            std::lock_guard lock(lag_mutex);
            lags = acf.epsilon;
        }
        out.per_realization[r] = std::move(acf.c);
    });

    out.mean.epsilon = lags;
    std::vector<double> column(n);
    for (std::size_t l = 0; l < lags.size(); ++l) {
        for (std::size_t r = 0; r < n; ++r) column[r] = out.per_realization[r][l];
        const auto ms = mean_and_stderr(column);
        out.mean.c.push_back(ms.mean);
        out.mean.stderr_values.push_back(ms.stderr_of_mean);
    }
    return out;
}

KernelEstimate empirical_kernel(const EnsembleConfig& config, int max_delta_j, double eps_max, int n_threads) {
    if (config.n_realizations < 2) throw ConfigError("kernel estimate needs at least two realizations");
    if (max_delta_j < 0) throw DomainError("max_delta_j must be >= 0");
    const SMatrixSynthesizer synth(config);
    const auto n = static_cast<std::size_t>(config.n_realizations);
    const auto energies = config.e_grid.values();
    const auto n_lag = static_cast<std::size_t>(std::floor(eps_max / config.e_grid.step + 1e-9)) + 1;
    if (n_lag >= energies.size()) throw DomainError("eps_max exceeds the energy grid");
    const auto [j_min, j_max] = config.spin_range();
    if (max_delta_j > j_max - j_min) throw DomainError("max_delta_j exceeds the spin range");
    const auto ndj = static_cast<std::size_t>(max_delta_j) + 1;

    // per realization: [dJ][lag]
    std::vector<std::vector<cplx>> per(n);
    parallel_for(n, n_threads, [&](std::size_t r) {
        const auto s = synth.realization(r);
        std::vector<cplx> est(ndj * n_lag);
        const std::size_t ne = energies.size();
        for (std::size_t dj = 0; dj < ndj; ++dj) {
            for (std::size_t l = 0; l < n_lag; ++l) {
                cplx acc(0.0, 0.0);
                std::size_t count = 0;
                for (int j = j_min; j + static_cast<int>(dj) <= j_max; ++j) {
                    for (std::size_t k = 0; k + l < ne; ++k) {
                        acc += s.at(j + static_cast<int>(dj), k + l) * std::conj(s.at(j, k));
                        ++count;
                    }
                }
                est[dj * n_lag + l] = acc / static_cast<double>(count);
            }
        }
        per[r] = std::move(est);
    });

    KernelEstimate out;
    for (std::size_t dj = 0; dj < ndj; ++dj) out.delta_j.push_back(static_cast<int>(dj));
    for (std::size_t l = 0; l < n_lag; ++l) out.epsilon.push_back(config.e_grid.step * static_cast<double>(l));
    out.mean.assign(ndj, std::vector<cplx>(n_lag));
    out.stderr_re.assign(ndj, std::vector<double>(n_lag));
    out.stderr_im.assign(ndj, std::vector<double>(n_lag));
    std::vector<double> re(n), im(n);
    for (std::size_t dj = 0; dj < ndj; ++dj) {
        for (std::size_t l = 0; l < n_lag; ++l) {
            for (std::size_t r = 0; r < n; ++r) {
                re[r] = per[r][dj * n_lag + l].real();
                im[r] = per[r][dj * n_lag + l].imag();
            }
            const auto mr = mean_and_stderr(re), mi = mean_and_stderr(im);
            out.mean[dj][l] = cplx(mr.mean, mi.mean);
            out.stderr_re[dj][l] = mr.stderr_of_mean;
            out.stderr_im[dj][l] = mi.stderr_of_mean;
        }
    }
    return out;
}

}  // namespace phasemem
