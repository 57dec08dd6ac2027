#include "phasemem/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include "json.hpp"
#include <numbers>
#include <set>
#include <sstream>

#include "phasemem/errors.hpp"

namespace phasemem::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DomainError("not a number: '" + s + "' in " + where);
    }
}

std::size_t require_column(const CsvTable& t, const std::string& name) {
    const auto c = t.column(name);
    if (!c) throw DomainError("missing column '" + name + "'");
    return *c;
}

}  // namespace

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    return std::nullopt;
}

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::stringstream ss(text);
    std::string line;
    bool have_header = false;
    while (std::getline(ss, line)) {
        const std::string s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        auto cells = split_row(s);
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size())
            throw DomainError("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    if (!have_header) throw DomainError("CSV has no header row");
    return t;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

std::string format_number(double value) {
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", value);
    return buf.data();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DomainError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw DomainError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string sha256_hex(const std::string& bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

std::vector<ExcitationFunction> read_excitation_csv(const std::filesystem::path& path) {
    const auto t = read_csv(path);
    const auto ce = require_column(t, "E_cm_MeV");
    const auto cs = require_column(t, "sigma");
    const auto cc = t.column("channel");
    std::vector<ExcitationFunction> out;
    for (const auto& row : t.rows) {
        const std::string label = cc ? row[*cc] : std::string("default");
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& x) { return x.channel_label == label; });
        if (it == out.end()) {
            out.push_back({{}, {}, label});
            it = std::prev(out.end());
        }
        it->energies.push_back(parse_double(row[ce], path.string()));
        it->sigma.push_back(parse_double(row[cs], path.string()));
    }
    if (out.empty()) throw DomainError("no excitation data in " + path.string());
    for (const auto& xf : out) xf.validate();
    return out;
}

std::string excitation_csv(const ExcitationFunction& xf) {
    std::string s = "E_cm_MeV,sigma,channel\n";
    for (std::size_t i = 0; i < xf.energies.size(); ++i)
        s += format_number(xf.energies[i]) + "," + format_number(xf.sigma[i]) + "," + xf.channel_label + "\n";
    return s;
}

CorrelationSeries read_acf_csv(const std::filesystem::path& path) {
    const auto t = read_csv(path);
    const auto ce = require_column(t, "epsilon_MeV");
    const auto cc = require_column(t, "C");
    const auto cs = t.column("stderr");
    CorrelationSeries s;
    for (const auto& row : t.rows) {
        s.epsilon.push_back(parse_double(row[ce], path.string()));
        s.c.push_back(parse_double(row[cc], path.string()));
        if (cs) s.stderr_values.push_back(parse_double(row[*cs], path.string()));
    }
    s.validate();
    return s;
}

std::string acf_csv(const CorrelationSeries& series) {
    std::string s = series.has_stderr() ? "epsilon_MeV,C,stderr\n" : "epsilon_MeV,C\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        s += format_number(series.epsilon[i]) + "," + format_number(series.c[i]);
        if (series.has_stderr()) s += "," + format_number(series.stderr_values[i]);
        s += "\n";
    }
    return s;
}

ModelParams RunConfig::model_params() const {
    ModelParams p{gamma_mev, beta_mev, hbar_omega_mev, d, phase_constant};
    p.validate();
    return p;
}

RotorParams RunConfig::rotor_params() const {
    RotorParams r;
    r.gamma = gamma_mev;
    r.beta = beta_mev;
    r.hbar_omega = hbar_omega_mev;
    r.phi = phi_rad;
    r.window = SpinWindow::truncated(i_bar, g);
    r.validate();
    return r;
}

WindowKinematics RunConfig::window_kinematics() const {
    if (!barrier_mev) throw DomainError("barrier_MeV is required for window kinematics");
    WindowKinematics k{i_bar, e_bar_mev, *barrier_mev, g};
    k.validate();
    return k;
}

EnsembleConfig RunConfig::ensemble_config() const {
    EnsembleConfig c;
    c.params = ModelParams{gamma_mev, beta_mev, hbar_omega_mev, d, phase_constant};
    c.window = SpinWindow::truncated(i_bar, g);
    c.phi = phi_rad;
    c.e_grid = {e_min_mev, e_max_mev, de_mev};
    if (energy_dependent_window) c.center_drift = window_kinematics();
    c.sigma_d = sigma_d;
    c.n_realizations = n_realizations;
    c.base_seed = seed;
    if (c.params.gamma > 0.0) {
        SpinWindow span = c.window;
        span.j_max = c.spin_range().second;
        c.t_grid = EnsembleConfig::default_time_grid(c.params, span);
    }
    if (n_time_samples) c.t_grid.n_samples = *n_time_samples;
    if (t_max_hbar_per_mev) c.t_grid.t_max = *t_max_hbar_per_mev;
    c.validate();
    return c;
}

RunConfig parse_config(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw DomainError("config must be a JSON object");

    static const std::set<std::string> known = {
        "gamma_MeV", "beta_MeV", "hbar_omega_MeV", "d", "g", "i_bar", "phi_rad", "e_bar_MeV",
        "barrier_MeV", "e_min_MeV", "e_max_MeV", "de_MeV", "sigma_d", "n_realizations", "seed",
        "phase_constant", "theta_deg", "n_time_samples", "t_max_hbar_per_MeV", "energy_dependent_window"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw DomainError("unknown config key '" + key + "'");

    RunConfig c;
    try {
        const auto num = [&](const char* key, double& dst) {
            if (j.contains(key)) dst = j.at(key).get<double>();
        };
        num("gamma_MeV", c.gamma_mev);
        num("beta_MeV", c.beta_mev);
        num("hbar_omega_MeV", c.hbar_omega_mev);
        num("d", c.d);
        num("g", c.g);
        num("i_bar", c.i_bar);
        num("phi_rad", c.phi_rad);
        num("e_bar_MeV", c.e_bar_mev);
        num("e_min_MeV", c.e_min_mev);
        num("e_max_MeV", c.e_max_mev);
        num("de_MeV", c.de_mev);
        num("sigma_d", c.sigma_d);
        num("theta_deg", c.theta_deg);
        if (j.contains("barrier_MeV")) c.barrier_mev = j.at("barrier_MeV").get<double>();
        if (j.contains("n_realizations")) c.n_realizations = j.at("n_realizations").get<int>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("phase_constant")) c.phase_constant = parse_phase_constant(j.at("phase_constant").get<std::string>());
        if (j.contains("n_time_samples")) c.n_time_samples = j.at("n_time_samples").get<int>();
        if (j.contains("t_max_hbar_per_MeV")) c.t_max_hbar_per_mev = j.at("t_max_hbar_per_MeV").get<double>();
        if (j.contains("energy_dependent_window"))
            c.energy_dependent_window = j.at("energy_dependent_window").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("bad config value: ") + e.what());
    }
    if (!(c.theta_deg >= 0.0 && c.theta_deg <= 180.0)) throw DomainError("theta_deg must lie in [0, 180]");
    return c;
}

}  // namespace phasemem::io
