#include "maglev/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace maglev {

namespace {

using nlohmann::json;

double number_at(const json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_number()) {
        throw Error(ErrorCode::InvalidConfig, "key '" + key + "' must be a number");
    }
    return v.get<double>();
}

struct Field {
    const char* name;
    double SystemParams::*member;
    bool required;
};

constexpr std::array<Field, 8> kParamFields = {{
    {"rho_M", &SystemParams::rho_M, true},
    {"rho_mu", &SystemParams::rho_mu, true},
    {"k_a", &SystemParams::k_a, true},
    {"R", &SystemParams::R, true},
    {"B0", &SystemParams::B0, true},
    {"Bp", &SystemParams::Bp, true},
    {"Bpp", &SystemParams::Bpp, true},
    {"omega_S", &SystemParams::omega_S, false},
}};

struct ConstantField {
    const char* name;
    double PhysicalConstants::*member;
};

constexpr std::array<ConstantField, 5> kConstantFields = {{
    {"hbar", &PhysicalConstants::hbar},
    {"mu_B", &PhysicalConstants::mu_B},
    {"amu", &PhysicalConstants::amu},
    {"gamma0", &PhysicalConstants::gamma0},
    {"g_grav", &PhysicalConstants::g_grav},
}};

}  // namespace

RunConfig parse_config(const json& j) {
    if (!j.is_object()) {
        throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
    }
    for (const auto& item : j.items()) {
        const auto& key = item.key();
        bool known = key == "constants";
        for (const auto& f : kParamFields) {
            known = known || key == f.name;
        }
        if (!known) {
            throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
        }
    }
    RunConfig cfg;
    for (const auto& f : kParamFields) {
        if (!j.contains(f.name)) {
            if (f.required) {
                throw Error(ErrorCode::InvalidConfig, std::string("missing key '") + f.name + "'");
            }
            continue;
        }
        cfg.params.*f.member = number_at(j, f.name);
    }
    if (j.contains("constants")) {
        const auto& cj = j.at("constants");
        if (!cj.is_object()) {
            throw Error(ErrorCode::InvalidConfig, "key 'constants' must be an object");
        }
        for (const auto& item : cj.items()) {
            bool found = false;
            for (const auto& f : kConstantFields) {
                if (item.key() == f.name) {
                    cfg.constants.*f.member = number_at(cj, f.name);
                    found = true;
                }
            }
            if (!found) {
                throw Error(ErrorCode::InvalidConfig, "unknown key 'constants." + item.key() + "'");
            }
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error&) {
        throw Error(ErrorCode::InvalidConfig, "cannot read config '" + path + "'");
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& cfg) {
    json j = json::object();
    for (const auto& f : kParamFields) {
        j[f.name] = cfg.params.*f.member;
    }
    json cj = json::object();
    for (const auto& f : kConstantFields) {
        cj[f.name] = cfg.constants.*f.member;
    }
    j["constants"] = cj;
    return j;
}

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string sweep_csv(const PhaseDiagram& pd) {
    std::string out = kSweepHeader;
    out += '\n';
    const std::size_t nB = pd.B0_axis.size();
    for (std::size_t iR = 0; iR < pd.R_axis.size(); ++iR) {
        for (std::size_t iB = 0; iB < nB; ++iB) {
            const auto& cell = pd.at(iR, iB);
            out += format_double(pd.B0_axis[iB]);
            out += ',';
            out += format_double(pd.R_axis[iR]);
            out += ',';
            out += std::to_string(static_cast<int>(cell.classification));
            for (double v : {cell.max_offaxis, cell.omega_L, cell.omega_D, cell.omega_I}) {
                out += ',';
                out += format_double(v);
            }
            out += '\n';
        }
    }
    return out;
}

std::string state_csv(const std::vector<StateRow>& rows) {
    std::string out = kStateHeader;
    out += '\n';
    const double nan = std::nan("");
    for (const auto& row : rows) {
        out += format_double(row.B0);
        for (int a = 0; a < kModeCount; ++a) {
            out += ',';
            out += format_double(row.metrics ? row.metrics->purities[a] : nan);
        }
        out += ',';
        out += format_double(row.metrics ? row.metrics->entanglement : nan);
        out += ',';
        out += format_double(row.metrics ? row.metrics->squeezing : nan);
        out += '\n';
    }
    return out;
}

json borders_json(const PhaseDiagram& pd) {
    json samples = json::array();
    for (double B0 : pd.B0_axis) {
        samples.push_back({B0, pd.borders.R_c(B0)});
    }
    return {{"B_c1", pd.borders.B_c1}, {"B_c2", pd.borders.B_c2}, {"R_c_samples", samples}};
}

namespace {

std::filesystem::path staging_path(const std::string& path) {
    std::filesystem::path tmp(path);
    tmp += ".tmp." + std::to_string(::getpid());
    return tmp;
}

void stage(const std::filesystem::path& tmp, const std::string& content) {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw Error(ErrorCode::IoFailure, "cannot open '" + tmp.string() + "' for writing");
    }
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
        throw Error(ErrorCode::IoFailure, "write to '" + tmp.string() + "' failed");
    }
}

}  // namespace

void write_files_atomic(const std::vector<std::pair<std::string, std::string>>& files) {
    namespace fs = std::filesystem;
    std::vector<fs::path> staged;
    auto cleanup = [&] {
        std::error_code ignored;
        for (const auto& t : staged) {
            fs::remove(t, ignored);
        }
    };
    try {
        for (const auto& [path, content] : files) {
            staged.push_back(staging_path(path));
            stage(staged.back(), content);
        }
    } catch (...) {
        cleanup();
        throw;
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
        std::error_code ec;
        fs::rename(staged[i], files[i].first, ec);
        if (ec) {
            // earlier renames already landed; remove them too
            std::error_code ignored;
            for (std::size_t j = 0; j < i; ++j) {
                fs::remove(files[j].first, ignored);
            }
            staged.erase(staged.begin(), staged.begin() + static_cast<std::ptrdiff_t>(i));
            cleanup();
            throw Error(ErrorCode::IoFailure, "cannot move output into '" + files[i].first + "': " + ec.message());
        }
    }
}

void write_file_atomic(const std::string& path, const std::string& content) {
    write_files_atomic({{path, content}});
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw Error(ErrorCode::IoFailure, "cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace maglev
