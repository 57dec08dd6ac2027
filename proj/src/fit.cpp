#include "phasemem/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "phasemem/errors.hpp"

namespace phasemem {

void FitConfig::validate() const {
    const auto check = [](const ParamRange& r, const char* name) {
        if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
            throw ConfigError(std::string("empty or non-finite bounds for ") + name);
    };
    check(gamma, "gamma");
    check(beta, "beta");
    check(hbar_omega, "hbar_omega");
    check(d, "d");
    if (!(gamma.lo > 0.0)) throw ConfigError("gamma lower bound must be > 0");
    if (!(beta.lo >= 0.0)) throw ConfigError("beta lower bound must be >= 0");
    if (!(hbar_omega.lo > 0.0)) throw ConfigError("hbar_omega lower bound must be > 0");
    if (!(d.lo >= 1.0)) throw ConfigError("d lower bound must be >= 1");
    if (grid_points < 2) throw ConfigError("grid_points must be >= 2");
    if (n_refine < 1) throw ConfigError("n_refine must be >= 1");
    if (!(rel_tol > 0.0)) throw ConfigError("rel_tol must be > 0");
    if (max_evaluations < 10) throw ConfigError("max_evaluations must be >= 10");
}

namespace {

constexpr std::size_t kDims = 4;  // gamma, beta, hbar_omega, d
using Vec = std::array<double, kDims>;

// Target rescaled by max|c| so the search path does not depend on the overall scale.
struct Problem {
    std::vector<double> eps;
    std::vector<double> target;
    std::vector<double> weight;
    double unit = 1.0;
};

Problem make_problem(const CorrelationSeries& t, WeightMode mode) {
    t.validate();
    Problem p;
    p.eps = t.epsilon;
    double unit = 0.0;
    for (double c : t.c) {
        if (!std::isfinite(c)) throw DomainError("target contains non-finite values");
        unit = std::max(unit, std::abs(c));
    }
    if (unit == 0.0) throw DomainError("target is identically zero");
    p.unit = unit;
    p.target.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) p.target[i] = t.c[i] / unit;

    bool inverse = mode == WeightMode::inverse_variance;
    if (mode == WeightMode::automatic)
        inverse = t.has_stderr() && std::all_of(t.stderr_values.begin(), t.stderr_values.end(),
                                                [](double s) { return s > 0.0; });
    p.weight.assign(t.size(), 1.0);
    if (inverse) {
        if (!t.has_stderr()) throw DomainError("inverse-variance weights need stderr values");
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double s = t.stderr_values[i] / unit;
            if (!(s > 0.0)) throw DomainError("inverse-variance weights need positive stderr values");
            p.weight[i] = 1.0 / (s * s);
        }
    }
    return p;
}

struct Eval {
    double objective;
    double scale;
};

Eval profiled(const Problem& pb, const std::vector<double>& model) {
    double tm = 0.0, mm = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) {
        tm += pb.weight[i] * pb.target[i] * model[i];
        mm += pb.weight[i] * model[i] * model[i];
    }
    double a = mm > 0.0 ? tm / mm : 0.0;
    if (!(a > 0.0)) a = 0.0;
    double obj = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) {
        const double r = pb.target[i] - a * model[i];
        obj += pb.weight[i] * r * r;
    }
    return {obj, a};
}

enum class ModelKind { correlation, lorentzian };

struct Searcher {
    const Problem& pb;
    ModelKind kind;
    PhaseConstant pc;
    Vec lo, hi;
    std::array<bool, kDims> free{};
    long evaluations = 0;
    std::vector<double> buffer;

    Vec clamp(Vec x) const {
        for (std::size_t k = 0; k < kDims; ++k) x[k] = std::clamp(x[k], lo[k], hi[k]);
        return x;
    }

    Eval evaluate(const Vec& raw) {
        ++evaluations;
        const Vec x = clamp(raw);
        buffer.resize(pb.eps.size());
        if (kind == ModelKind::lorentzian) {
            for (std::size_t i = 0; i < pb.eps.size(); ++i) buffer[i] = lorentzian_acf(pb.eps[i], x[0]);
        } else {
            const ModelParams mp{x[0], x[1], x[2], x[3], pc};
            for (std::size_t i = 0; i < pb.eps.size(); ++i) buffer[i] = model_acf(pb.eps[i], mp);
        }
        const Eval e = profiled(pb, buffer);
        return std::isfinite(e.objective) ? e : Eval{std::numeric_limits<double>::infinity(), 0.0};
    }
};

bool lex_less(double fa, const Vec& a, double fb, const Vec& b) {
    if (fa != fb) return fa < fb;
    return a < b;
}

struct LocalResult {
    Vec x;
    double f;
    bool converged;
};

// Bounded Nelder-Mead in coordinates scaled to the box; points are clamped before evaluation.
// Restarts from the best vertex until a restart no longer improves the objective.
LocalResult nelder_mead(Searcher& s, const Vec& start, double f_start, double initial_step, double rel_tol,
                        int max_evals) {
    std::vector<std::size_t> dims;
    for (std::size_t k = 0; k < kDims; ++k)
        if (s.free[k] && s.hi[k] > s.lo[k]) dims.push_back(k);
    const std::size_t n = dims.size();
    if (n == 0) return {start, f_start, true};

    const auto to_x = [&](const std::vector<double>& u) {
        Vec x = start;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = dims[i];
            x[k] = s.lo[k] + std::clamp(u[i], 0.0, 1.0) * (s.hi[k] - s.lo[k]);
        }
        return x;
    };
    std::vector<double> u0(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = dims[i];
        u0[i] = (start[k] - s.lo[k]) / (s.hi[k] - s.lo[k]);
    }

    const long budget_end = s.evaluations + max_evals;
    double best_f = f_start;
    std::vector<double> best_u = u0;
    bool converged = false;
    double step = initial_step;

    for (int restart = 0; restart < 20 && s.evaluations < budget_end; ++restart) {
        std::vector<std::vector<double>> simplex(n + 1, best_u);
        std::vector<double> f(n + 1, best_f);
        for (std::size_t i = 0; i < n; ++i) {
            simplex[i + 1][i] += best_u[i] + step <= 1.0 ? step : -step;
            f[i + 1] = s.evaluate(to_x(simplex[i + 1])).objective;
        }
        bool local_conv = false;
        while (s.evaluations < budget_end) {
            std::vector<std::size_t> order(n + 1);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
            const std::size_t ib = order.front(), iw = order.back(), isw = order[n - 1];

            double extent = 0.0;
            for (std::size_t v = 0; v <= n; ++v)
                for (std::size_t i = 0; i < n; ++i)
                    extent = std::max(extent, std::abs(simplex[v][i] - simplex[ib][i]));
            const double spread = f[iw] - f[ib];
            if (spread <= rel_tol * std::abs(f[ib]) || extent < 1e-12 || spread <= 1e-300) {
                local_conv = true;
                break;
            }

            std::vector<double> centroid(n, 0.0);
            for (std::size_t v = 0; v <= n; ++v)
                if (v != iw)
                    for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v][i] / static_cast<double>(n);
            const auto along = [&](double coef) {
                std::vector<double> p(n);
                for (std::size_t i = 0; i < n; ++i)
                    p[i] = std::clamp(centroid[i] + coef * (simplex[iw][i] - centroid[i]), 0.0, 1.0);
                return p;
            };

            auto xr = along(-1.0);
            const double fr = s.evaluate(to_x(xr)).objective;
            if (fr < f[ib]) {
                auto xe = along(-2.0);
                const double fe = s.evaluate(to_x(xe)).objective;
                if (fe < fr) {
                    simplex[iw] = xe;
                    f[iw] = fe;
                } else {
                    simplex[iw] = xr;
                    f[iw] = fr;
                }
                continue;
            }
            if (fr < f[isw]) {
                simplex[iw] = xr;
                f[iw] = fr;
                continue;
            }
            const bool outside = fr < f[iw];
            auto xc = along(outside ? -0.5 : 0.5);
            const double fc = s.evaluate(to_x(xc)).objective;
            if (fc < (outside ? fr : f[iw])) {
                simplex[iw] = xc;
                f[iw] = fc;
                continue;
            }
            for (std::size_t v = 0; v <= n; ++v) {
                if (v == ib) continue;
                for (std::size_t i = 0; i < n; ++i) simplex[v][i] = simplex[ib][i] + 0.5 * (simplex[v][i] - simplex[ib][i]);
                f[v] = s.evaluate(to_x(simplex[v])).objective;
            }
        }

        std::size_t ib = 0;
        for (std::size_t v = 1; v <= n; ++v)
            if (f[v] < f[ib]) ib = v;
        const double improvement = best_f - f[ib];
        if (f[ib] < best_f) {
            best_f = f[ib];
            best_u = simplex[ib];
        }
        converged = local_conv;
        if (!local_conv) break;
        if (!(improvement > rel_tol * std::abs(best_f)) || best_f <= 1e-300) break;
        step = std::max(1e-6, step * 0.5);
    }
    return {to_x(best_u), best_f, converged};
}

struct SearchOutcome {
    Vec x;
    double f;
    double scale;
    long evaluations;
    bool converged;
};

// Full grid over the free axes, then local refinement from the n_refine best grid points.
SearchOutcome multistart(Searcher& s, const Vec& fixed, int grid_points, int n_refine, double rel_tol,
                         int max_evals) {
    std::vector<std::size_t> dims;
    for (std::size_t k = 0; k < kDims; ++k)
        if (s.free[k]) dims.push_back(k);

    std::vector<std::vector<double>> axis(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const std::size_t k = dims[i];
        for (int g = 0; g < grid_points; ++g)
            axis[i].push_back(g == grid_points - 1 ? s.hi[k]
                                                   : s.lo[k] + (s.hi[k] - s.lo[k]) * g / (grid_points - 1.0));
    }

    struct Start {
        Vec x;
        double f;
    };
    std::vector<Start> grid;
    std::vector<std::size_t> idx(dims.size(), 0);
    for (;;) {
        Vec x = fixed;
        for (std::size_t i = 0; i < dims.size(); ++i) x[dims[i]] = axis[i][idx[i]];
        grid.push_back({x, s.evaluate(x).objective});
        std::size_t i = 0;
        for (; i < dims.size(); ++i) {
            if (++idx[i] < axis[i].size()) break;
            idx[i] = 0;
        }
        if (i == dims.size()) break;
    }
    std::sort(grid.begin(), grid.end(), [](const Start& a, const Start& b) { return lex_less(a.f, a.x, b.f, b.x); });

    const double initial_step = 0.5 / (grid_points - 1.0);
    Vec best_x = grid.front().x;
    double best_f = grid.front().f;
    bool best_conv = false;
    const std::size_t n_starts = std::min<std::size_t>(static_cast<std::size_t>(n_refine), grid.size());
    for (std::size_t i = 0; i < n_starts; ++i) {
        const auto r = nelder_mead(s, grid[i].x, grid[i].f, initial_step, rel_tol, max_evals);
        const Vec rx = s.clamp(r.x);
        if (lex_less(r.f, rx, best_f, best_x) || (i == 0 && r.f == best_f)) {
            best_x = rx;
            best_f = r.f;
            best_conv = r.converged;
        }
    }
    const Eval e = s.evaluate(best_x);
    return {best_x, e.objective, e.scale, s.evaluations, best_conv && e.scale > 0.0};
}

Searcher make_searcher(const Problem& pb, const FitConfig& c, ModelKind kind) {
    Searcher s{pb, kind, c.phase_constant, {}, {}, {}, 0, {}};
    s.lo = {c.gamma.lo, c.beta.lo, c.hbar_omega.lo, c.d.lo};
    s.hi = {c.gamma.hi, c.beta.hi, c.hbar_omega.hi, c.d.hi};
    s.free = {true, true, true, true};
    return s;
}

}  // namespace

double acf_objective(const CorrelationSeries& target, const ModelParams& params, WeightMode weights, double* scale) {
    params.validate();
    const Problem pb = make_problem(target, weights);
    std::vector<double> model(pb.eps.size());
    for (std::size_t i = 0; i < model.size(); ++i) model[i] = model_acf(pb.eps[i], params);
    const Eval e = profiled(pb, model);
    if (scale) *scale = e.scale * pb.unit;
    return e.objective * pb.unit * pb.unit;
}

FitResult fit_acf(const CorrelationSeries& target, const FitConfig& config) {
    config.validate();
    if (target.size() < 8) throw DomainError("fit needs at least 8 lags");
    const Problem pb = make_problem(target, config.weights);
    Searcher s = make_searcher(pb, config, ModelKind::correlation);
    const auto out = multistart(s, s.lo, config.grid_points, config.n_refine, config.rel_tol, config.max_evaluations);

    FitResult r;
    r.params = {out.x[0], out.x[1], out.x[2], out.x[3], config.phase_constant};
    r.scale = out.scale * pb.unit;
    r.objective = out.f * pb.unit * pb.unit;
    r.n_evaluations = out.evaluations;
    r.converged = out.converged;
    return r;
}

LorentzianFit fit_lorentzian(const CorrelationSeries& target, const FitConfig& config) {
    config.validate();
    if (target.size() < 8) throw DomainError("fit needs at least 8 lags");
    const Problem pb = make_problem(target, config.weights);
    Searcher s = make_searcher(pb, config, ModelKind::lorentzian);
    s.free = {true, false, false, false};
    const int points = std::max(config.grid_points, 64);
    const auto out = multistart(s, s.lo, points, config.n_refine, config.rel_tol, config.max_evaluations);
    return {out.x[0], out.scale * pb.unit, out.f * pb.unit * pb.unit, out.evaluations, out.converged};
}

DegeneracyScan degeneracy_scan(const CorrelationSeries& target, const std::vector<double>& beta_grid,
                               const FitConfig& config, double degeneracy_threshold) {
    config.validate();
    if (beta_grid.empty()) throw DomainError("beta grid is empty");
    if (target.size() < 8) throw DomainError("fit needs at least 8 lags");
    const Problem pb = make_problem(target, config.weights);

    DegeneracyScan scan;
    for (double beta : beta_grid) {
        if (!(beta >= config.beta.lo && beta <= config.beta.hi))
            throw DomainError("beta grid value outside the configured bounds");
        Searcher s = make_searcher(pb, config, ModelKind::correlation);
        s.free = {true, false, true, true};
        Vec fixed = s.lo;
        fixed[1] = beta;
        s.lo[1] = s.hi[1] = beta;
        const auto out = multistart(s, fixed, config.grid_points, config.n_refine, config.rel_tol,
                                    config.max_evaluations);
        scan.profile.push_back({beta, out.f * pb.unit * pb.unit, out.x[0], out.x[2], out.x[3],
                                out.scale * pb.unit, out.converged});
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& p : scan.profile) {
        lo = std::min(lo, p.objective);
        hi = std::max(hi, p.objective);
    }
    scan.relative_variation = lo > 0.0 ? (hi - lo) / lo : (hi > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    scan.degenerate = scan.relative_variation < degeneracy_threshold;
    return scan;
}

}  // namespace phasemem
