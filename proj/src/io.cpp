#include "liquidstar/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "liquidstar/errors.hpp"

namespace liquidstar {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

json vec(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd vec(const json& a, const char* name) {
    if (!a.is_array()) throw std::invalid_argument(std::string("profile field '") + name + "' must be an array");
    Eigen::VectorXd v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v(i) = a[i].get<double>();
    return v;
}

}  // namespace

json profile_to_json(const StarProfile& p) {
    json j;
    j["gamma"] = p.params.gamma;
    j["rho_c"] = p.params.rho_c;
    j["R"] = p.R;
    j["tol"] = p.tol;
    j["nodes"] = vec(p.r);
    j["rho"] = vec(p.rho);
    j["drho"] = vec(p.drho);
    j["dpgamma"] = vec(p.dpgamma);
    return j;
}

StarProfile profile_from_json(const json& j) {
    StarProfile p;
    try {
        p.params.gamma = j.at("gamma").get<double>();
        p.params.rho_c = j.at("rho_c").get<double>();
        p.R = j.at("R").get<double>();
        p.tol = j.value("tol", 0.0);
        p.r = vec(j.at("nodes"), "nodes");
        p.rho = vec(j.at("rho"), "rho");
        p.drho = vec(j.at("drho"), "drho");
        p.dpgamma = vec(j.at("dpgamma"), "dpgamma");
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed profile: ") + e.what());
    }
    const Eigen::Index n = p.r.size();
    if (p.rho.size() != n || p.drho.size() != n || p.dpgamma.size() != n)
        throw GridMismatch("profile arrays differ in length");
    check_uniform_grid(p.r, p.R);
    finish_profile(p);
    return p;
}

void save_profile(const StarProfile& p, const std::string& path) {
    write_atomic(path, profile_to_json(p).dump(1) + "\n");
}

StarProfile load_profile(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("cannot parse " + path + ": " + e.what());
    }
    return profile_from_json(j);
}

json to_json(const ModeEnergy& e) {
    json j;
    j["l"] = e.l;
    j["m"] = e.m;
    j["route"] = route_name(e.route);
    j["lambda"] = e.lambda;
    j["gamma_term"] = e.gamma_term;
    j["total"] = e.total;
    j["g_l2"] = e.g_l2;
    j["g_boundary_sq"] = e.g_boundary_sq;
    return j;
}

json to_json(const SpectralResult& s, bool with_vector) {
    json j;
    j["lambda_min"] = s.lambda_min;
    j["classification"] = sign_name(s.classification);
    j["residual"] = s.residual;
    j["zero_band"] = s.zero_band;
    j["solver"] = s.dense ? "dense" : "sturm";
    j["iterations"] = s.iterations;
    if (with_vector) j["eigvec"] = vec(s.eigvec);
    return j;
}

json to_json(const CheckReport& r) {
    json j;
    j["check"] = r.check;
    j["pass"] = r.pass;
    j["summary"] = r.summary;
    json v = json::object();
    for (const auto& [k, x] : r.values) v[k] = std::isfinite(x) ? json(x) : json(format_double(x));
    j["values"] = v;
    return j;
}

json to_json(const ScanRecord& r) {
    json j;
    j["gamma"] = r.gamma;
    j["rho_c"] = r.rho_c;
    j["R"] = r.R;
    json modes = json::array();
    for (const auto& m : r.modes)
        modes.push_back({{"l", m.l}, {"lambda_min", m.lambda_min}, {"sign", sign_name(m.sign)},
                         {"residual", m.residual}});
    j["modes"] = modes;
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

std::string scan_csv(const ScanResult& s) {
    std::string out = "# schema=1\ngamma,rho_c,R,l,lambda_min,sign,residual\n";
    for (const auto& rec : s.records) {
        if (!rec.error.empty()) {
            out += "# error gamma=" + format_double(rec.gamma) + " rho_c=" + format_double(rec.rho_c) + " " +
                   rec.error + "\n";
            continue;
        }
        for (const auto& m : rec.modes) {
            out += format_double(rec.gamma) + "," + format_double(rec.rho_c) + "," + format_double(rec.R) + "," +
                   std::to_string(m.l) + "," + format_double(m.lambda_min) + "," + sign_name(m.sign) + "," +
                   format_double(m.residual) + "\n";
        }
    }
    for (const auto& t : s.transitions) {
        out += "# transition gamma=" + format_double(t.gamma) + " l=0 " + sign_name(t.from) + "->" +
               sign_name(t.to) + " rho_c in [" + format_double(t.rho_lo) + ", " + format_double(t.rho_hi) +
               "] estimate=" + format_double(t.rho_estimate) + "\n";
    }
    return out;
}

std::string trajectory_csv(const Trajectory& t) {
    std::string out = "# schema=1\nt,energy,norm,chi_R\n";
    for (Eigen::Index i = 0; i < t.times.size(); ++i) {
        const auto& s = t.states[i];
        out += format_double(t.times(i)) + "," + format_double(t.energy(i)) + "," + format_double(t.norm(i)) + "," +
               format_double(s.size() ? s(s.size() - 1) : 0.0) + "\n";
    }
    return out;
}

}  // namespace liquidstar
