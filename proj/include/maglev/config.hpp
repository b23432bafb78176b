#pragma once

// JSON configs, CSV/JSON artifacts and run manifests.

#include <string>
#include <vector>

#include "json.hpp"

#include "maglev/gaussian_state.hpp"
#include "maglev/params.hpp"
#include "maglev/stability.hpp"

namespace maglev {

struct RunConfig {
    PhysicalConstants constants;
    SystemParams params;
};

/// Required keys: rho_M, rho_mu, k_a, R, B0, Bp, Bpp. Optional: omega_S
/// (default 0) and a `constants` object overriding any of hbar, mu_B, amu,
/// gamma0, g_grav. Unknown keys, missing keys and non-numeric values throw
/// InvalidConfig naming the key. Values are not physics-validated here.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& cfg);

/// Shortest round-trip representation; "nan", "inf", "-inf" otherwise.
std::string format_double(double x);

inline constexpr const char* kSweepHeader = "B0_T,R_m,classification,max_offaxis,omega_L,omega_D,omega_I";
inline constexpr const char* kStateHeader = "B0_T,P_bR,P_bL,P_m,P_k,P_s,entanglement,squeezing";

/// Rows ordered R-major (all B0 for the first R, then the next R).
std::string sweep_csv(const PhaseDiagram& pd);
std::string state_csv(const std::vector<StateRow>& rows);

/// {B_c1, B_c2, R_c_samples: [[B0, R_c], ...]} sampled on the B0 axis.
nlohmann::json borders_json(const PhaseDiagram& pd);

/// Writes through a temporary file in the same directory and renames it into
/// place, so a failure never leaves a partial file. Throws IoFailure.
void write_file_atomic(const std::string& path, const std::string& content);

/// All-or-nothing variant: every file is staged before any is renamed.
void write_files_atomic(const std::vector<std::pair<std::string, std::string>>& files);

std::string read_file(const std::string& path);

}  // namespace maglev
