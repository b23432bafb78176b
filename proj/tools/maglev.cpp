// maglev: stability, phase diagram and vacuum-state tool for a levitated
// nanomagnet. Physics comes from a JSON config, geometry from flags.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "maglev/config.hpp"
#include "maglev/gaussian_state.hpp"
#include "maglev/params.hpp"
#include "maglev/quadratic_hamiltonian.hpp"
#include "maglev/stability.hpp"

#ifndef MAGLEV_VERSION
#define MAGLEV_VERSION "0.0.0"
#endif

using nlohmann::json;
using namespace maglev;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitFailure = 3;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPositiveInput:
        case ErrorCode::TransverseTrapUndefined:
        case ErrorCode::NegativeJ:
        case ErrorCode::AsymmetricInput:
        case ErrorCode::InvalidConfig:
        case ErrorCode::InvalidArgument:
            return kExitInput;
        default:
            return kExitFailure;
    }
}

std::string iso_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

unsigned resolve_threads(int flag) {
    if (flag > 0) {
        return static_cast<unsigned>(flag);
    }
    if (const char* env = std::getenv("MAGLEV_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) {
                return static_cast<unsigned>(n);
            }
        } catch (const std::exception&) {
        }
        throw Error(ErrorCode::InvalidArgument, std::string("MAGLEV_THREADS must be a positive integer, got '") + env + "'");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void check_tol(double tol) {
    if (!(tol > 0.0 && tol < 1e-4)) {
        throw Error(ErrorCode::InvalidArgument, "--tol must lie in (0, 1e-4)");
    }
}

json manifest(const std::string& command, const RunConfig& cfg, const json& args, double tol,
              const std::vector<std::string>& outputs) {
    return {
        {"command", command},
        {"args", args},
        {"params_echo", to_json(cfg)},
        {"tool_version", MAGLEV_VERSION},
        {"timestamp", iso_timestamp()},
        {"tolerances", {{"classification_tol", tol}}},
        {"outputs", outputs},
    };
}

std::string manifest_path(const std::string& out) { return out + ".manifest.json"; }

std::string borders_path(const std::string& out) {
    const auto dot = out.rfind('.');
    const auto slash = out.rfind('/');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    return (has_ext ? out.substr(0, dot) : out) + ".borders.json";
}

// ---- derive ---------------------------------------------------------------

void print_row(const char* name, double value, const char* unit) {
    std::printf("  %-14s %-24s %s\n", name, format_double(value).c_str(), unit);
}

json derived_json(const DerivedQuantities& d, const RegimeReport& r) {
    json dj = {
        {"V", d.V}, {"M", d.M}, {"I", d.I}, {"mu", d.mu}, {"S", d.S}, {"J", d.J}, {"eta", d.eta}, {"D", d.D},
        {"omega_L", d.omega_L}, {"omega_D", d.omega_D}, {"omega_I", d.omega_I}, {"omega_Z_sq", d.omega_Z_sq},
        {"omega_Z", d.omega_Z}, {"omega_T", d.omega_T}, {"omega_plus", d.omega_plus},
        {"omega_minus", d.omega_minus}, {"omega_k", d.omega_k}, {"omega_mu", d.omega_mu},
        {"omega_S", d.omega_S}, {"g_coupling", d.g_coupling}, {"sigma_T", d.sigma_T}, {"z0", d.z0},
        {"r0", d.r0}, {"z_confining", d.z_confining},
    };
    json rj = {
        {"gravity_ratio", r.gravity_ratio}, {"gravity_ok", r.gravity_ok},
        {"slow_rotation_ratio", r.slow_rotation_ratio}, {"slow_rotation_ok", r.slow_rotation_ok},
        {"macrospin_ok", r.macrospin_ok}, {"macrospin_comfortable", r.macrospin_comfortable},
        {"omega_T_real", r.omega_T_real}, {"trap_z_confining", r.trap_z_confining},
    };
    return {{"derived", dj}, {"regime", rj}};
}

int cmd_derive(const std::string& config_path, bool as_json) {
    const RunConfig cfg = load_config(config_path);
    const auto d = derive_quantities(cfg.constants, cfg.params);
    const auto r = validate_regime(cfg.constants, cfg.params, d);
    if (as_json) {
        std::cout << derived_json(d, r).dump(2) << "\n";
        return kExitOk;
    }
    std::printf("derived quantities\n");
    print_row("V", d.V, "m^3");
    print_row("M", d.M, "kg");
    print_row("I", d.I, "kg m^2");
    print_row("mu", d.mu, "J/T");
    print_row("S", d.S, "");
    print_row("J", d.J, "");
    print_row("eta", d.eta, "");
    print_row("D", d.D, "J^-1 s^-2");
    print_row("omega_L", d.omega_L, "rad/s");
    print_row("omega_D", d.omega_D, "rad/s");
    print_row("omega_I", d.omega_I, "rad/s");
    print_row("omega_Z", d.omega_Z, "rad/s");
    print_row("omega_T", d.omega_T, "rad/s");
    print_row("omega_plus", d.omega_plus, "rad/s");
    print_row("omega_minus", d.omega_minus, "rad/s");
    print_row("omega_k", d.omega_k, "rad/s");
    print_row("omega_mu", d.omega_mu, "rad/s");
    print_row("omega_S", d.omega_S, "rad/s");
    print_row("g", d.g_coupling, "rad/s");
    print_row("sigma_T", d.sigma_T, "m");
    print_row("r0", d.r0, "m");
    print_row("z0", d.z0, "m");
    std::printf("regime checks\n");
    auto flag = [](bool ok) { return ok ? "ok" : "VIOLATED"; };
    std::printf("  %-20s %-24s %s\n", "gravity_ratio", format_double(r.gravity_ratio).c_str(), flag(r.gravity_ok));
    std::printf("  %-20s %-24s %s\n", "slow_rotation_ratio", format_double(r.slow_rotation_ratio).c_str(),
                flag(r.slow_rotation_ok));
    std::printf("  %-20s %-24s %s\n", "macrospin S>=1", "", flag(r.macrospin_ok));
    std::printf("  %-20s %-24s %s\n", "macrospin S>=100", "", flag(r.macrospin_comfortable));
    std::printf("  %-20s %-24s %s\n", "omega_T real", "", flag(r.omega_T_real));
    std::printf("  %-20s %-24s %s\n", "z confining", "", flag(r.trap_z_confining));
    return kExitOk;
}

// ---- stability ------------------------------------------------------------

json matrix_json(const Mat5& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(row);
    }
    return rows;
}

json matrix_json(const Mat10c& m) {
    json re = json::array();
    json im = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json rr = json::array();
        json ri = json::array();
        for (int j = 0; j < m.cols(); ++j) {
            rr.push_back(m(i, j).real());
            ri.push_back(m(i, j).imag());
        }
        re.push_back(rr);
        im.push_back(ri);
    }
    return {{"re", re}, {"im", im}};
}

int cmd_stability(const std::string& config_path, double B0, double R, double tol, const std::string& dump) {
    check_tol(tol);
    RunConfig cfg = load_config(config_path);
    cfg.params.B0 = B0;
    cfg.params.R = R;
    const auto d = derive_quantities(cfg.constants, cfg.params);
    const auto model = build_model(d);
    const auto poly = pt_coefficients(d);
    const auto v = classify_point(d, model, tol);
    const double residual = crosscheck_spectrum(model, poly);

    if (!v.z_stable) {
        std::printf("classification: UNSTABLE (z-axis)\n");
    } else {
        std::printf("classification: %s\n", std::string(to_string(v.classification)).c_str());
    }
    std::printf("z_stable: %s\n", v.z_stable ? "true" : "false");
    std::printf("t_stable: %s\n", v.t_stable ? "true" : "false");
    std::printf("roots nu (rad/s):\n");
    for (const auto& z : v.roots_nu) {
        std::printf("  %s %+.17g i\n", format_double(z.real()).c_str(), z.imag());
    }
    std::printf("max_offaxis: %s\n", format_double(v.max_offaxis).c_str());
    std::printf("min_separation: %s\n", format_double(v.min_separation).c_str());
    std::printf("real roots (companion / Sturm): %d / %d\n", v.companion_real_count, v.sturm_real_count);
    std::printf("omega_scale: %s rad/s\n", format_double(v.omega_scale).c_str());
    std::printf("crosscheck residual: %s\n", format_double(residual).c_str());

    if (!dump.empty()) {
        const json j = {
            {"C", matrix_json(build_C(d).entries)},
            {"MT", matrix_json(model.MT)},
            {"KT", matrix_json(model.KT)},
        };
        write_file_atomic(dump, j.dump(2) + "\n");
    }
    return kExitOk;
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
    double B0_min = 1e-5;
    double B0_max = 1e-1;
    double R_min = 5e-10;
    double R_max = 1e-8;
    std::string grid = "200x200";
    std::string out;
    double tol = kDefaultTolerance;
    bool linear = false;

    json to_json() const {
        return {{"B0_min", B0_min}, {"B0_max", B0_max}, {"R_min", R_min}, {"R_max", R_max},
                {"grid", grid},     {"out", out},       {"tol", tol},     {"linear", linear}};
    }
    static SweepArgs from_json(const json& j) {
        SweepArgs a;
        a.B0_min = j.at("B0_min").get<double>();
        a.B0_max = j.at("B0_max").get<double>();
        a.R_min = j.at("R_min").get<double>();
        a.R_max = j.at("R_max").get<double>();
        a.grid = j.at("grid").get<std::string>();
        a.out = j.at("out").get<std::string>();
        a.tol = j.at("tol").get<double>();
        a.linear = j.at("linear").get<bool>();
        return a;
    }
};

std::pair<int, int> parse_grid(const std::string& grid) {
    const auto x = grid.find_first_of("xX");
    int n = 0, m = 0;
    try {
        if (x == std::string::npos) {
            throw std::invalid_argument("no separator");
        }
        std::size_t used = 0;
        n = std::stoi(grid.substr(0, x), &used);
        if (used != x) throw std::invalid_argument("trailing");
        const std::string rest = grid.substr(x + 1);
        m = std::stoi(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "--grid must look like NxM, got '" + grid + "'");
    }
    if (n < 2 || m < 2 || n > 2000 || m > 2000) {
        throw Error(ErrorCode::InvalidArgument, "--grid dimensions must lie in [2, 2000], got '" + grid + "'");
    }
    return {n, m};
}

int cmd_sweep(const RunConfig& cfg, const SweepArgs& a, unsigned threads) {
    check_tol(a.tol);
    cfg.constants.validate();
    cfg.params.validate();
    const auto [n_B0, n_R] = parse_grid(a.grid);
    SweepSpec spec;
    spec.B0_min = a.B0_min;
    spec.B0_max = a.B0_max;
    spec.R_min = a.R_min;
    spec.R_max = a.R_max;
    spec.n_B0 = n_B0;
    spec.n_R = n_R;
    spec.log_spacing = !a.linear;
    spec.tol = a.tol;
    spec.threads = threads;
    if (!(a.B0_min > 0 && a.B0_max > a.B0_min)) {
        throw Error(ErrorCode::InvalidArgument, "need 0 < --B0-min < --B0-max");
    }
    if (!(a.R_min > 0 && a.R_max > a.R_min)) {
        throw Error(ErrorCode::InvalidArgument, "need 0 < --R-min < --R-max");
    }
    if (a.out.empty()) {
        throw Error(ErrorCode::InvalidArgument, "--out is required");
    }

    const auto pd = sweep_grid(cfg.constants, cfg.params, spec);
    const std::string borders = borders_path(a.out);
    const std::string man = manifest_path(a.out);
    write_files_atomic({
        {a.out, sweep_csv(pd)},
        {borders, borders_json(pd).dump(2) + "\n"},
        {man, manifest("sweep", cfg, a.to_json(), a.tol, {a.out, borders}).dump(2) + "\n"},
    });

    int counts[4] = {0, 0, 0, 0};
    int failed = 0;
    for (const auto& c : pd.cells) {
        ++counts[static_cast<int>(c.classification)];
        failed += c.error.empty() ? 0 : 1;
    }
    std::printf("%zu cells: %d UNSTABLE, %d STABLE_EDH, %d STABLE_A, %d MARGINAL (%d recorded after errors)\n",
                pd.cells.size(), counts[0], counts[1], counts[2], counts[3], failed);
    std::printf("wrote %s, %s, %s\n", a.out.c_str(), borders.c_str(), man.c_str());
    return kExitOk;
}

// ---- state ----------------------------------------------------------------

struct StateArgs {
    double R = 2e-9;
    std::string scan;
    std::string out;
    double tol = kDefaultTolerance;
    bool linear = false;

    json to_json() const { return {{"R", R}, {"scan", scan}, {"out", out}, {"tol", tol}, {"linear", linear}}; }
    static StateArgs from_json(const json& j) {
        StateArgs a;
        a.R = j.at("R").get<double>();
        a.scan = j.at("scan").get<std::string>();
        a.out = j.at("out").get<std::string>();
        a.tol = j.at("tol").get<double>();
        a.linear = j.at("linear").get<bool>();
        return a;
    }
};

std::vector<double> parse_scan(const std::string& scan, bool linear) {
    double lo = 0, hi = 0;
    int n = 0;
    char extra = 0;
    if (std::sscanf(scan.c_str(), "%lf:%lf:%d%c", &lo, &hi, &n, &extra) != 3) {
        throw Error(ErrorCode::InvalidArgument, "--B0-scan must look like min:max:n, got '" + scan + "'");
    }
    if (n < 1 || n > 1000000) {
        throw Error(ErrorCode::InvalidArgument, "--B0-scan point count must lie in [1, 1e6]");
    }
    return make_axis(lo, hi, n, !linear);
}

int cmd_state(const RunConfig& cfg, const StateArgs& a, unsigned threads) {
    check_tol(a.tol);
    cfg.constants.validate();
    if (a.out.empty()) {
        throw Error(ErrorCode::InvalidArgument, "--out is required");
    }
    if (!(a.R > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "--R must be positive");
    }
    const auto B0_list = parse_scan(a.scan, a.linear);
    SystemParams probe = cfg.params;
    probe.R = a.R;
    probe.validate();

    const auto rows = state_scan(cfg.constants, cfg.params, a.R, B0_list, a.tol, threads);
    const std::string man = manifest_path(a.out);
    write_files_atomic({
        {a.out, state_csv(rows)},
        {man, manifest("state", cfg, a.to_json(), a.tol, {a.out}).dump(2) + "\n"},
    });

    std::size_t filled = 0;
    for (const auto& r : rows) {
        filled += r.metrics ? 1 : 0;
    }
    std::printf("%zu rows, %zu with metrics, %zu gap rows\n", rows.size(), filled, rows.size() - filled);
    // The axial mode decouples; its vacuum is the unsqueezed ground state.
    std::printf("b_Z (decoupled): purity 1, entanglement 0, squeezing 1\n");
    std::printf("wrote %s, %s\n", a.out.c_str(), man.c_str());
    if (filled == 0) {
        std::fprintf(stderr, "warning: no stable point in the scan; every row is a gap row\n");
    }
    return kExitOk;
}

// ---- replay ---------------------------------------------------------------

int cmd_replay(const std::string& manifest_file, const std::string& out_override, unsigned threads) {
    json m;
    try {
        m = json::parse(read_file(manifest_file));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, manifest_file + ": " + e.what());
    }
    try {
        const RunConfig cfg = parse_config(m.at("params_echo"));
        const std::string command = m.at("command").get<std::string>();
        if (command == "sweep") {
            auto a = SweepArgs::from_json(m.at("args"));
            if (!out_override.empty()) a.out = out_override;
            return cmd_sweep(cfg, a, threads);
        }
        if (command == "state") {
            auto a = StateArgs::from_json(m.at("args"));
            if (!out_override.empty()) a.out = out_override;
            return cmd_state(cfg, a, threads);
        }
        throw Error(ErrorCode::InvalidConfig, "manifest command '" + command + "' cannot be replayed");
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, manifest_file + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear stability and vacuum state of a magnetically levitated nanomagnet"};
    app.set_version_flag("--version", MAGLEV_VERSION);
    app.require_subcommand(1);

    std::string config;
    int threads_flag = 0;

    auto* derive = app.add_subcommand("derive", "Print derived frequencies and regime checks");
    bool as_json = false;
    derive->add_option("config", config, "JSON config")->required();
    derive->add_flag("--json", as_json, "JSON on stdout");

    auto* stability = app.add_subcommand("stability", "Classify one (B0, R) point");
    double st_B0 = 0, st_R = 0, st_tol = kDefaultTolerance;
    std::string dump;
    stability->add_option("config", config, "JSON config")->required();
    stability->add_option("--B0", st_B0, "bias field (T)")->required();
    stability->add_option("--R", st_R, "radius (m)")->required();
    stability->add_option("--tol", st_tol, "classification tolerance");
    stability->add_option("--dump-matrices", dump, "write C, M_T, K_T as JSON");

    auto* sweep = app.add_subcommand("sweep", "Phase diagram over a (B0, R) grid");
    SweepArgs sa;
    sweep->add_option("config", config, "JSON config")->required();
    sweep->add_option("--B0-min", sa.B0_min, "T")->capture_default_str();
    sweep->add_option("--B0-max", sa.B0_max, "T")->capture_default_str();
    sweep->add_option("--R-min", sa.R_min, "m")->capture_default_str();
    sweep->add_option("--R-max", sa.R_max, "m")->capture_default_str();
    sweep->add_option("--grid", sa.grid, "N_B0 x N_R, e.g. 200x200")->capture_default_str();
    sweep->add_option("--out", sa.out, "CSV output")->required();
    sweep->add_option("--tol", sa.tol, "classification tolerance");
    sweep->add_flag("--linear", sa.linear, "linear instead of log spacing");
    sweep->add_option("--threads", threads_flag, "worker cap (fallback: MAGLEV_THREADS)");

    auto* state = app.add_subcommand("state", "Vacuum-state metrics along a B0 scan");
    StateArgs ta;
    state->add_option("config", config, "JSON config")->required();
    state->add_option("--R", ta.R, "radius (m)")->capture_default_str();
    state->add_option("--B0-scan", ta.scan, "min:max:n")->required();
    state->add_option("--out", ta.out, "CSV output")->required();
    state->add_option("--tol", ta.tol, "classification tolerance");
    state->add_flag("--linear", ta.linear, "linear instead of log spacing");
    state->add_option("--threads", threads_flag, "worker cap (fallback: MAGLEV_THREADS)");

    auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    std::string manifest_file, replay_out;
    replay->add_option("manifest", manifest_file, "manifest JSON")->required();
    replay->add_option("--out", replay_out, "write the CSV here instead");
    replay->add_option("--threads", threads_flag, "worker cap (fallback: MAGLEV_THREADS)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*derive) return cmd_derive(config, as_json);
        if (*stability) return cmd_stability(config, st_B0, st_R, st_tol, dump);
        if (*sweep) return cmd_sweep(load_config(config), sa, resolve_threads(threads_flag));
        if (*state) return cmd_state(load_config(config), ta, resolve_threads(threads_flag));
        if (*replay) return cmd_replay(manifest_file, replay_out, resolve_threads(threads_flag));
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
    return kExitInput;
}
