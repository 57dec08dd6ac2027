#include "phasemem/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "phasemem/acf_model.hpp"
#include "phasemem/ensemble.hpp"
#include "phasemem/errors.hpp"
#include "phasemem/estimator.hpp"
#include "phasemem/fit.hpp"
#include "phasemem/io.hpp"
#include "phasemem/kinematics.hpp"
#include "phasemem/tps.hpp"

namespace phasemem::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int default_thread_count() {
    if (const char* env = std::getenv("PHASEMEM_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double angle_rad(double deg) { return std::clamp(deg * kDeg, 0.0, std::numbers::pi); }

struct Manifest {
    std::string command_line;
    std::optional<fs::path> config;
    std::uint64_t seed = 0;
    std::vector<fs::path> inputs;
    std::vector<fs::path> outputs;
};

void write_manifest(const fs::path& path, const Manifest& m, double wall_seconds) {
    json j;
    j["tool_version"] = kToolVersion;
    j["command_line"] = m.command_line;
    j["config_digest"] = m.config ? io::sha256_hex(io::read_file(*m.config)) : std::string();
    j["base_seed"] = m.seed;
    j["inputs"] = json::array();
    for (const auto& p : m.inputs)
        j["inputs"].push_back({{"path", p.string()}, {"sha256", io::sha256_hex(io::read_file(p))}});
    j["outputs"] = json::array();
    for (const auto& p : m.outputs)
        j["outputs"].push_back({{"path", p.string()}, {"sha256", io::sha256_hex(io::read_file(p))}});
    j["wall_time_s"] = wall_seconds;
    io::write_atomic(path, j.dump(2) + "\n");
}

io::RunConfig load_config(const std::optional<fs::path>& path) {
    if (!path) return {};
    return io::parse_config(io::read_file(*path));
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw DomainError("bad number '" + item + "' in list");
        }
    }
    if (v.empty()) throw DomainError("empty list");
    return v;
}

// "lo:hi:n" (n points inclusive) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text) {
    if (text.find(':') == std::string::npos) return parse_list(text);
    std::stringstream ss(text);
    std::string a, b, c;
    std::getline(ss, a, ':');
    std::getline(ss, b, ':');
    std::getline(ss, c, ':');
    double lo, hi;
    int n;
    try {
        lo = std::stod(a);
        hi = std::stod(b);
        n = std::stoi(c);
    } catch (const std::exception&) {
        throw DomainError("grid must look like lo:hi:n");
    }
    if (n < 1) throw DomainError("grid needs at least one point");
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : (i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1.0)));
    return v;
}

std::optional<DetrendMethod> parse_detrend(const std::string& text) {
    if (text.empty() || text == "none") return std::nullopt;
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    try {
        if (kind == "poly") return PolyDetrend{arg.empty() ? 1 : std::stoi(arg)};
        if (kind == "ma") return MovingAverageDetrend{std::stod(arg), 0.0};
    } catch (const std::exception&) {
    }
    throw DomainError("detrend must be none, poly:<order> or ma:<window_MeV>");
}

WeightMode parse_weights(const std::string& text) {
    if (text == "auto") return WeightMode::automatic;
    if (text == "uniform") return WeightMode::uniform;
    if (text == "inverse_variance") return WeightMode::inverse_variance;
    throw DomainError("weights must be auto, uniform or inverse_variance");
}

json params_json(const ModelParams& p) {
    return {{"gamma_MeV", p.gamma},
            {"beta_MeV", p.beta},
            {"hbar_omega_MeV", p.hbar_omega},
            {"d", p.d},
            {"phase_constant", std::string(to_string(p.phase_constant))}};
}

fs::path manifest_for(const fs::path& out) {
    auto m = out;
    m += ".manifest.json";
    return m;
}

struct Options {
    std::optional<fs::path> config;
    fs::path out;
    fs::path out_dir;
    std::vector<fs::path> inputs;
    int threads = 0;

    double eps_max = -1.0;
    double eps_step = 0.01;
    std::optional<double> lorentzian_gamma;

    std::string t_over_T = "0,0.25,0.5";
    double theta_min_deg = 0.0;
    double theta_max_deg = 180.0;
    int n_theta = 181;
    std::optional<fs::path> visibility_out;
    std::string vis_window_deg = "80,100";
    int vis_points = 64;
    bool seconds = false;

    int max_realization_files = -1;
    std::string detrend = "none";

    int grid = 12;
    std::string weights = "auto";
    std::optional<std::string> phase_constant;
    std::string beta_grid = "0.01:0.2:20";
    double threshold = 0.1;

    std::optional<double> energy;
    int a1 = 24;
    int a2 = 28;
    double r0 = 1.2;
    std::optional<double> spin;
    bool no_self_inertia = false;
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw ContractViolation(msg);
}

void run_model(const Options& o, Manifest& m) {
    const auto cfg = load_config(o.config);
    const auto p = cfg.model_params();
    const double eps_max = o.eps_max < 0.0 ? 3.0 : o.eps_max;
    if (!(o.eps_step > 0.0)) throw DomainError("eps-step must be > 0");
    const auto n = static_cast<std::size_t>(std::floor(eps_max / o.eps_step + 1e-9));
    std::string csv = o.lorentzian_gamma ? "epsilon_MeV,C,C_lorentzian\n" : "epsilon_MeV,C\n";
    for (std::size_t i = 0; i <= n; ++i) {
        const double e = o.eps_step * static_cast<double>(i);
        const double c = model_acf(e, p);
        if (i == 0) require(std::abs(c - 1.0) < 1e-10, "model ACF is not normalized at epsilon = 0");
        require(std::isfinite(c), "model ACF is not finite");
        csv += io::format_number(e) + "," + io::format_number(c);
        if (o.lorentzian_gamma) csv += "," + io::format_number(lorentzian_acf(e, *o.lorentzian_gamma));
        csv += "\n";
    }
    io::write_atomic(o.out, csv);
    m.outputs.push_back(o.out);
}

void run_tps(const Options& o, Manifest& m) {
    const auto cfg = load_config(o.config);
    const auto rp = cfg.rotor_params();
    const double period = revolution_period(rp.hbar_omega);
    const auto fractions = parse_list(o.t_over_T);
    std::vector<double> times;
    for (double f : fractions) times.push_back(f * period);
    if (o.n_theta < 1) throw DomainError("n-theta must be >= 1");
    const auto grid = AngleGrid::uniform(angle_rad(o.theta_min_deg), angle_rad(o.theta_max_deg), o.n_theta);
    const auto spec = compute_spectrum(times, grid, rp);
    const auto start = compute_spectrum({0.0}, grid, rp);

    std::string csv = "t_over_T,theta_deg,P,P_diag,ratio,t_hbar_per_MeV";
    csv += o.seconds ? ",t_s\n" : "\n";
    for (std::size_t it = 0; it < times.size(); ++it) {
        for (std::size_t ith = 0; ith < grid.size(); ++ith) {
            const double p = spec.at(spec.p, it, ith);
            require(p >= -1e-12 * start.p[ith], "time power spectrum is negative");
            csv += io::format_number(fractions[it]) + "," + io::format_number(grid.values()[ith] / kDeg) + "," +
                   io::format_number(p) + "," + io::format_number(spec.at(spec.p_diag, it, ith)) + "," +
                   io::format_number(spec.at(spec.ratio, it, ith)) + "," + io::format_number(times[it]);
            if (o.seconds) csv += "," + io::format_number(times[it] * constants::hbar_mev_s);
            csv += "\n";
        }
    }
    io::write_atomic(o.out, csv);
    m.outputs.push_back(o.out);

    if (o.visibility_out) {
        const auto w = parse_list(o.vis_window_deg);
        if (w.size() != 2) throw DomainError("vis-window-deg needs two angles");
        std::string vcsv = "t_over_T,t_hbar_per_MeV,visibility\n";
        for (std::size_t it = 0; it < times.size(); ++it) {
            const double v = fringe_visibility(times[it], {w[0] * kDeg, w[1] * kDeg}, rp, o.vis_points);
            require(v >= 0.0 && v <= 1.0, "fringe visibility outside [0, 1]");
            vcsv += io::format_number(fractions[it]) + "," + io::format_number(times[it]) + "," +
                    io::format_number(v) + "\n";
        }
        io::write_atomic(*o.visibility_out, vcsv);
        m.outputs.push_back(*o.visibility_out);
    }
}

void run_simulate(const Options& o, Manifest& m, int threads) {
    const auto cfg = load_config(o.config);
    const auto ec = cfg.ensemble_config();
    m.seed = ec.base_seed;
    const double span = ec.e_grid.e_max - ec.e_grid.e_min;
    const double eps_max = o.eps_max < 0.0 ? 0.25 * span : o.eps_max;
    const double theta = angle_rad(cfg.theta_deg);
    fs::create_directories(o.out_dir);

    const SMatrixSynthesizer synth(ec);
    const auto n = static_cast<std::size_t>(ec.n_realizations);
    const std::size_t n_files =
        o.max_realization_files < 0 ? n : std::min(n, static_cast<std::size_t>(o.max_realization_files));
    std::vector<std::vector<double>> per(n);
    std::vector<std::string> files(n_files);
    std::vector<double> lags;
    std::mutex lag_mutex;
    parallel_for(n, threads, [&](std::size_t r) {
        auto xf = synth_excitation(synth.realization(r), ec, theta);
        xf.channel_label = "synthetic";
        for (double s : xf.sigma)
            if (!std::isfinite(s) || s < ec.sigma_d) throw ContractViolation("synthetic cross section below sigma_d");
        auto acf = sample_acf(xf, eps_max);
        if (r < n_files) files[r] = io::excitation_csv(xf);
        if (r == 0) {
            std::lock_guard lock(lag_mutex);
            lags = acf.epsilon;
        }
        per[r] = std::move(acf.c);
    });

    for (std::size_t r = 0; r < n_files; ++r) {
        char name[64];
        std::snprintf(name, sizeof name, "excitation_r%04zu.csv", r);
        const auto path = o.out_dir / name;
        io::write_atomic(path, files[r]);
        m.outputs.push_back(path);
    }
    std::vector<CorrelationSeries> series;
    for (auto& c : per) series.push_back({lags, std::move(c), {}});
    auto mean = n >= 2 ? average_channels(series) : series.front();
    const auto acf_path = o.out_dir / "ensemble_acf.csv";
    io::write_atomic(acf_path, io::acf_csv(mean));
    m.outputs.push_back(acf_path);
}

void run_acf(const Options& o, Manifest& m) {
    if (o.inputs.empty()) throw DomainError("acf needs at least one --in file");
    std::vector<ExcitationFunction> all;
    for (const auto& p : o.inputs) {
        auto xs = io::read_excitation_csv(p);
        all.insert(all.end(), xs.begin(), xs.end());
        m.inputs.push_back(p);
    }
    const auto method = parse_detrend(o.detrend);
    std::vector<CorrelationSeries> series;
    for (const auto& xf : all) {
        const double eps_max = o.eps_max < 0.0 ? 0.25 * xf.span() : o.eps_max;
        series.push_back(method ? detrended_acf(xf, *method, eps_max) : sample_acf(xf, eps_max));
    }
    const auto result = series.size() == 1 ? series.front() : average_channels(series);
    io::write_atomic(o.out, io::acf_csv(result));
    m.outputs.push_back(o.out);
}

FitConfig fit_config(const Options& o, const io::RunConfig& cfg) {
    FitConfig fc;
    fc.grid_points = o.grid;
    fc.weights = parse_weights(o.weights);
    fc.phase_constant = o.phase_constant ? parse_phase_constant(*o.phase_constant) : cfg.phase_constant;
    return fc;
}

void run_fit(const Options& o, Manifest& m) {
    if (o.inputs.size() != 1) throw DomainError("fit takes exactly one --in ACF file");
    const auto target = io::read_acf_csv(o.inputs.front());
    m.inputs.push_back(o.inputs.front());
    const auto fc = fit_config(o, load_config(o.config));
    const auto r = fit_acf(target, fc);
    const auto lz = fit_lorentzian(target, fc);
    require(r.objective >= 0.0 && r.scale >= 0.0, "fit produced a negative objective or scale");

    json j;
    j["params"] = params_json(r.params);
    j["scale"] = r.scale;
    j["objective"] = r.objective;
    j["n_evaluations"] = r.n_evaluations;
    j["converged"] = r.converged;
    j["lorentzian"] = {{"gamma_MeV", lz.gamma},
                       {"scale", lz.scale},
                       {"objective", lz.objective},
                       {"n_evaluations", lz.n_evaluations},
                       {"converged", lz.converged}};
    io::write_atomic(o.out, j.dump(2) + "\n");
    m.outputs.push_back(o.out);
}

void run_scan(const Options& o, Manifest& m) {
    if (o.inputs.size() != 1) throw DomainError("scan takes exactly one --in ACF file");
    const auto target = io::read_acf_csv(o.inputs.front());
    m.inputs.push_back(o.inputs.front());
    const auto fc = fit_config(o, load_config(o.config));
    const auto scan = degeneracy_scan(target, parse_grid(o.beta_grid), fc, o.threshold);

    json j;
    j["profile"] = json::array();
    for (const auto& p : scan.profile)
        j["profile"].push_back({{"beta_MeV", p.beta},
                                {"objective", p.objective},
                                {"gamma_MeV", p.gamma},
                                {"hbar_omega_MeV", p.hbar_omega},
                                {"d", p.d},
                                {"scale", p.scale},
                                {"converged", p.converged}});
    j["relative_variation"] = scan.relative_variation;
    j["degenerate"] = scan.degenerate;
    j["threshold"] = o.threshold;
    io::write_atomic(o.out, j.dump(2) + "\n");
    m.outputs.push_back(o.out);
}

void run_kinematics(const Options& o, Manifest& m) {
    const auto cfg = load_config(o.config);
    const auto k = cfg.window_kinematics();
    const double e = o.energy.value_or(cfg.e_bar_mev);
    const auto w = spin_window_params(k, cfg.hbar_omega_mev, e);
    RotorGeometry geom{o.a1, o.a2, o.r0, !o.no_self_inertia};
    const double spin = o.spin.value_or(cfg.i_bar);
    const auto rot = rotor_frequency(geom, spin);

    json j;
    j["energy_MeV"] = e;
    j["I_E"] = w.center_spin;
    j["delta_E_MeV"] = w.delta_e;
    j["d"] = w.d;
    j["rotor"] = {{"a1", geom.a1},
                  {"a2", geom.a2},
                  {"r0_fm", geom.r0},
                  {"spin", spin},
                  {"include_sphere_self_inertia", geom.include_sphere_self_inertia},
                  {"reduced_mass_MeV", rot.reduced_mass},
                  {"separation_fm", rot.separation},
                  {"orbital_inertia_MeV_fm2", rot.orbital_inertia},
                  {"self_inertia_MeV_fm2", rot.self_inertia},
                  {"total_inertia_MeV_fm2", rot.total_inertia},
                  {"hbar_omega_MeV", rot.hbar_omega}};
    j["hbar_omega_model_MeV"] = cfg.hbar_omega_mev;
    j["rotor_to_model_ratio"] = rot.hbar_omega / cfg.hbar_omega_mev;
    io::write_atomic(o.out, j.dump(2) + "\n");
    m.outputs.push_back(o.out);
}

}  // namespace

int execute(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    const auto started = std::chrono::steady_clock::now();
    Options o;
    CLI::App app{"phasemem: spin phase-memory correlation toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    const auto add_config = [&](CLI::App* s) { s->add_option("--config", o.config, "run configuration JSON"); };
    const auto add_threads = [&](CLI::App* s) { s->add_option("--threads", o.threads, "worker threads"); };

    auto* model = app.add_subcommand("model", "evaluate the analytic ACF on an epsilon grid");
    add_config(model);
    model->add_option("--out", o.out, "output CSV")->required();
    model->add_option("--eps-max", o.eps_max, "largest lag, MeV (default 3)");
    model->add_option("--eps-step", o.eps_step, "lag step, MeV");
    model->add_option("--lorentzian-gamma", o.lorentzian_gamma, "add a Lorentzian column with this width");

    auto* tps = app.add_subcommand("tps", "time power spectrum on a (t, theta) grid");
    add_config(tps);
    tps->add_option("--out", o.out, "output CSV")->required();
    tps->add_option("--t-over-T", o.t_over_T, "comma-separated times in units of the revolution period");
    tps->add_option("--theta-min-deg", o.theta_min_deg);
    tps->add_option("--theta-max-deg", o.theta_max_deg);
    tps->add_option("--n-theta", o.n_theta);
    tps->add_option("--visibility-out", o.visibility_out, "fringe visibility CSV");
    tps->add_option("--vis-window-deg", o.vis_window_deg, "visibility window lo,hi in degrees");
    tps->add_option("--vis-points", o.vis_points);
    tps->add_flag("--seconds", o.seconds, "add a time column in seconds");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo S-matrix ensemble");
    add_config(sim);
    add_threads(sim);
    sim->add_option("--out-dir", o.out_dir, "output directory")->required();
    sim->add_option("--eps-max", o.eps_max, "largest lag, MeV (default quarter span)");
    sim->add_option("--max-realization-files", o.max_realization_files, "cap on excitation CSVs written");

    auto* acf = app.add_subcommand("acf", "sample ACF of excitation-function CSVs");
    acf->add_option("--in", o.inputs, "excitation CSV files")->required();
    acf->add_option("--out", o.out, "output CSV")->required();
    acf->add_option("--eps-max", o.eps_max, "largest lag, MeV (default quarter span)");
    acf->add_option("--detrend", o.detrend, "none | poly:<order> | ma:<window_MeV>");

    auto* fit = app.add_subcommand("fit", "fit the correlation model to an ACF CSV");
    add_config(fit);
    fit->add_option("--in", o.inputs, "ACF CSV")->required();
    fit->add_option("--out", o.out, "output JSON")->required();
    fit->add_option("--grid", o.grid, "multistart points per axis");
    fit->add_option("--weights", o.weights, "auto | uniform | inverse_variance");
    fit->add_option("--phase-constant", o.phase_constant, "pi | two_pi");

    auto* scan = app.add_subcommand("scan", "profile the objective over fixed beta values");
    add_config(scan);
    scan->add_option("--in", o.inputs, "ACF CSV")->required();
    scan->add_option("--out", o.out, "output JSON")->required();
    scan->add_option("--beta-grid", o.beta_grid, "lo:hi:n or comma list, MeV");
    scan->add_option("--grid", o.grid, "multistart points per axis");
    scan->add_option("--weights", o.weights, "auto | uniform | inverse_variance");
    scan->add_option("--phase-constant", o.phase_constant, "pi | two_pi");
    scan->add_option("--threshold", o.threshold, "relative profile variation flagged as degenerate");

    auto* kin = app.add_subcommand("kinematics", "spin-window kinematics and rotor frequency");
    add_config(kin);
    kin->add_option("--out", o.out, "output JSON")->required();
    kin->add_option("--energy", o.energy, "c.m. energy, MeV (default e_bar_MeV)");
    kin->add_option("--a1", o.a1);
    kin->add_option("--a2", o.a2);
    kin->add_option("--r0", o.r0, "radius parameter, fm");
    kin->add_option("--spin", o.spin, "spin for the rotor estimate (default i_bar)");
    kin->add_flag("--no-self-inertia", o.no_self_inertia);

    std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsageError;
    }

    Manifest m;
    for (const auto& a : argv) m.command_line += (m.command_line.empty() ? "" : " ") + a;
    m.config = o.config;
    const int threads = o.threads > 0 ? o.threads : default_thread_count();

    try {
        fs::path manifest_path;
        if (o.config) m.seed = load_config(o.config).seed;
        if (*model) run_model(o, m), manifest_path = manifest_for(o.out);
        else if (*tps) run_tps(o, m), manifest_path = manifest_for(o.out);
        else if (*sim) run_simulate(o, m, threads), manifest_path = o.out_dir / "manifest.json";
        else if (*acf) run_acf(o, m), manifest_path = manifest_for(o.out);
        else if (*fit) run_fit(o, m), manifest_path = manifest_for(o.out);
        else if (*scan) run_scan(o, m), manifest_path = manifest_for(o.out);
        else if (*kin) run_kinematics(o, m), manifest_path = manifest_for(o.out);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        write_manifest(manifest_path, m, wall);
    } catch (const ContractViolation& e) {
        err << "phasemem: contract violation: " << e.what() << "\n";
        return kContractViolation;
    } catch (const std::invalid_argument& e) {
        err << "phasemem: invalid input: " << e.what() << "\n";
        return kInputError;
    } catch (const fs::filesystem_error& e) {
        err << "phasemem: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "phasemem: " << e.what() << "\n";
        return 1;
    }
    return kSuccess;
}

}  // namespace phasemem::cli
