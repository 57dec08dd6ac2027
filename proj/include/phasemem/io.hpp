#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phasemem/acf_model.hpp"
#include "phasemem/ensemble.hpp"
#include "phasemem/estimator.hpp"
#include "phasemem/tps.hpp"

namespace phasemem::io {

/// A parsed CSV table: '#' comment lines and blank lines skipped, first remaining row is the header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by header name; nullopt if absent.
    std::optional<std::size_t> column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

/// Shortest text with 17 significant digits (round-trip safe).
std::string format_number(double value);

/// Writes content to a sibling temporary file, then renames it over path.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(const std::string& bytes);

/// Excitation functions in `E_cm_MeV,sigma,channel` form, grouped by channel in file order.
std::vector<ExcitationFunction> read_excitation_csv(const std::filesystem::path& path);
std::string excitation_csv(const ExcitationFunction& xf);

/// `epsilon_MeV,C[,stderr]`.
CorrelationSeries read_acf_csv(const std::filesystem::path& path);
std::string acf_csv(const CorrelationSeries& series);

/// Run configuration as a single JSON document (keys as in the README).
struct RunConfig {
    double gamma_mev = 0.15;
    double beta_mev = 0.1;
    double hbar_omega_mev = 0.75;
    double d = 5.0;
    double g = 1.0;
    double i_bar = 36.0;
    double phi_rad = 0.0;
    double e_bar_mev = 53.0;
    std::optional<double> barrier_mev;
    double e_min_mev = 49.0;
    double e_max_mev = 57.0;
    double de_mev = 0.025;
    double sigma_d = 0.0;
    int n_realizations = 400;
    std::uint64_t seed = 1;
    PhaseConstant phase_constant = PhaseConstant::as_printed_pi;
    double theta_deg = 90.0;
    std::optional<int> n_time_samples;
    std::optional<double> t_max_hbar_per_mev;
    bool energy_dependent_window = false;

    ModelParams model_params() const;
    RotorParams rotor_params() const;
    WindowKinematics window_kinematics() const;  ///< throws DomainError without barrier_MeV
    EnsembleConfig ensemble_config() const;
};

/// Parses and validates the JSON text; unknown keys and wrong types throw DomainError.
RunConfig parse_config(const std::string& json_text);

}  // namespace phasemem::io
