#pragma once

#include <vector>

#include "phasemem/acf_model.hpp"

namespace phasemem {

struct ParamRange {
    double lo;
    double hi;
};

enum class WeightMode { automatic, uniform, inverse_variance };

struct FitConfig {
    ParamRange gamma{0.01, 1.0};
    ParamRange beta{0.0, 1.0};
    ParamRange hbar_omega{0.1, 2.0};
    ParamRange d{1.0, 10.0};
    int grid_points = 12;          ///< multistart points per axis
    int n_refine = 5;              ///< local refinements from the best grid points
    double rel_tol = 1e-8;         ///< simplex stopping tolerance on the objective
    int max_evaluations = 10000;   ///< per local refinement
    WeightMode weights = WeightMode::automatic;
    PhaseConstant phase_constant = PhaseConstant::as_printed_pi;

    /// Throws ConfigError for empty ranges, a nonpositive gamma bound, or d below 1.
    void validate() const;
};

struct FitResult {
    ModelParams params;
    double scale = 1.0;       ///< A, the epsilon = 0 normalization
    double objective = 0.0;   ///< sum_l w_l (target_l - A C(eps_l))^2
    long n_evaluations = 0;
    bool converged = false;
};

/// Least-squares fit of A * model_acf to target over the configured bounds.
FitResult fit_acf(const CorrelationSeries& target, const FitConfig& config);

/// Weighted objective of A * model_acf(params) with A profiled out; fills scale if non-null.
double acf_objective(const CorrelationSeries& target, const ModelParams& params, WeightMode weights,
                     double* scale = nullptr);

struct LorentzianFit {
    double gamma = 0.0;
    double scale = 1.0;
    double objective = 0.0;
    long n_evaluations = 0;
    bool converged = false;
};

/// Fit of A / (1 + (eps/Gamma)^2) with Gamma inside config.gamma.
LorentzianFit fit_lorentzian(const CorrelationSeries& target, const FitConfig& config);

struct ScanPoint {
    double beta;
    double objective;
    double gamma;
    double hbar_omega;
    double d;
    double scale;
    bool converged;
};

struct DegeneracyScan {
    std::vector<ScanPoint> profile;
    double relative_variation = 0.0;  ///< (max - min) / min of the profile objective
    bool degenerate = false;          ///< relative_variation below the threshold
};

/// Profile objective over a grid of fixed beta values; the other parameters are reoptimized.
DegeneracyScan degeneracy_scan(const CorrelationSeries& target, const std::vector<double>& beta_grid,
                               const FitConfig& config, double degeneracy_threshold = 0.1);

}  // namespace phasemem
