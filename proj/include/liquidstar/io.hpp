#pragma once

#include <json.hpp>
#include <string>

#include "liquidstar/analysis.hpp"
#include "liquidstar/mode_energy.hpp"
#include "liquidstar/profile.hpp"
#include "liquidstar/spectral.hpp"

namespace liquidstar {

using json = nlohmann::ordered_json;

// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

// Writes to path.tmp, then renames over path.
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

json profile_to_json(const StarProfile& p);
// Throws GridMismatch on a nonuniform or inconsistent grid.
StarProfile profile_from_json(const json& j);
void save_profile(const StarProfile& p, const std::string& path);
StarProfile load_profile(const std::string& path);

json to_json(const ModeEnergy& e);
json to_json(const SpectralResult& s, bool with_vector = false);
json to_json(const CheckReport& r);
json to_json(const ScanRecord& r);

// Columns gamma,rho_c,R,l,lambda_min,sign,residual after a `# schema=1` line; sign
// changes follow as `# transition ...` comment lines, failed points as `# error ...`.
std::string scan_csv(const ScanResult& s);

// Columns t,energy,norm,chi_R (chi at the surface node).
std::string trajectory_csv(const Trajectory& t);

}  // namespace liquidstar
