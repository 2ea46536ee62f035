#include "liquidstar/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "liquidstar/analysis.hpp"
#include "liquidstar/errors.hpp"
#include "liquidstar/io.hpp"
#include "liquidstar/spectral.hpp"

namespace liquidstar {

namespace {

struct Globals {
    double tol = 1e-12;
    int grid_n = 2048;
    int threads = 0;  // 0: LIQUIDSTAR_THREADS or 1
    std::string out;
    std::string format;  // empty: json, or csv for scan and evolve
    std::string bc = "natural";
};

class UsageError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

int resolve_threads(int flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("LIQUIDSTAR_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (const std::exception&) {
        }
        throw UsageError(std::string("LIQUIDSTAR_THREADS must be a positive integer, got '") + env + "'");
    }
    return 1;
}

SolverOptions solver(const Globals& g) {
    SolverOptions o;
    o.tol = g.tol;
    o.grid_n = g.grid_n;
    return o;
}

AssemblyOptions assembly(const Globals& g, bool orthogonality = true) {
    AssemblyOptions a;
    a.boundary = g.bc == "row" ? BoundaryRows::Imposed : BoundaryRows::Natural;
    a.orthogonality = orthogonality;
    return a;
}

// Writes to --out (atomically) or stdout.
void emit(const Globals& g, const std::string& text) {
    if (g.out.empty()) std::cout << text;
    else write_atomic(g.out, text);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
    return out;
}

double to_double(const std::string& s) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw UsageError("not a number: '" + s + "'");
    }
    if (pos != s.size()) throw UsageError("not a number: '" + s + "'");
    return v;
}

ChiField chi_from_spec(const std::string& spec, int l, const StarProfile& p) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw UsageError("chi spec must be poly:..., const:C or random:SEED");
    const std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
    const BoundaryCondition bc = l == 0 ? BoundaryCondition::RadialRobin : BoundaryCondition::NeumannAtR;
    if (kind == "random") {
        const auto seed = static_cast<std::uint64_t>(to_double(arg));
        return l == 0 ? random_robin_chi(p, seed) : random_neumann_chi(l, p, seed);
    }
    Eigen::VectorXd c;
    if (kind == "const") {
        c = Eigen::VectorXd::Constant(1, to_double(arg));
    } else if (kind == "poly") {
        const auto parts = split(arg, ',');
        if (parts.empty()) throw UsageError("poly: needs coefficients");
        c.resize(parts.size());
        for (std::size_t i = 0; i < parts.size(); ++i) c(i) = to_double(parts[i]);
    } else {
        throw UsageError("unknown chi spec kind '" + kind + "'");
    }
    ChiField chi = chi_from_polynomial(l, p, c, bc);
    require_bc(chi, bc);
    return chi;
}

double rel(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0 ? 0.0 : std::abs(a - b) / s;
}

int cmd_profile(const Globals& g, double gamma, double rho_c) {
    const StarProfile p = solve_profile({gamma, rho_c}, solver(g));
    if (g.format == "csv") {
        std::string s = "# schema=1\nr,rho,drho,dpgamma\n";
        for (Eigen::Index i = 0; i < p.r.size(); ++i)
            s += format_double(p.r(i)) + "," + format_double(p.rho(i)) + "," + format_double(p.drho(i)) + "," +
                 format_double(p.dpgamma(i)) + "\n";
        emit(g, s);
    } else {
        emit(g, profile_to_json(p).dump(1) + "\n");
    }
    if (!g.out.empty()) std::cout << "R = " << format_double(p.R) << "\n";
    return kOk;
}

int cmd_energy(const Globals& g, const std::string& file, int l, int m, const std::string& spec,
               const std::string& route) {
    if (l < 0 || std::abs(m) > l) throw UsageError("need l >= 0 and |m| <= l");
    const StarProfile p = load_profile(file);
    const ChiField chi = chi_from_spec(spec, l, p);
    json routes = json::object();
    auto want = [&](const char* r) { return route == "all" || route == r; };
    if (want("direct")) routes["direct"] = to_json(energy_direct(l, m, g_from_chi(chi, p), p));
    if (l >= 1) {
        if (want("chi1")) routes["chi1"] = to_json(energy_chi_one(chi, p, m));
        if (want("chi2")) routes["chi2"] = to_json(energy_chi_two(chi, p, m));
    } else if (route == "chi1" || route == "chi2") {
        throw UsageError("routes chi1/chi2 need l >= 1; use radial for l = 0");
    }
    if (l == 0 && want("radial")) {
        json r;
        r["route"] = "radial";
        r["total"] = radial_energy(chi, p);
        routes["radial"] = r;
    } else if (l >= 1 && route == "radial") {
        throw UsageError("route radial needs l = 0");
    }
    json out;
    out["l"] = l;
    out["m"] = m;
    out["chi_spec"] = spec;
    out["routes"] = routes;
    json deltas = json::object();
    double max_delta = 0;
    std::vector<std::pair<std::string, double>> t;
    for (auto& [name, rec] : routes.items()) t.emplace_back(name, rec["total"].get<double>());
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = i + 1; j < t.size(); ++j) {
            const double d = rel(t[i].second, t[j].second);
            deltas[t[i].first + "_vs_" + t[j].first] = d;
            max_delta = std::max(max_delta, d);
        }
    out["deltas"] = deltas;
    out["max_delta"] = max_delta;
    emit(g, out.dump(2) + "\n");
    return kOk;
}

DiscreteOperator build_operator(const Globals& g, const StarProfile& p, int l, int n, bool unconstrained) {
    if (l < 0) throw UsageError("l must be >= 0");
    return l == 0 ? assemble_radial(p, n, assembly(g)) : assemble_mode(p, l, n, assembly(g, !unconstrained));
}

int cmd_eig(const Globals& g, const std::string& file, int l, int n, bool unconstrained, bool with_vector) {
    const StarProfile p = load_profile(file);
    const DiscreteOperator op = build_operator(g, p, l, n, unconstrained);
    const SpectralResult s = min_rayleigh(op);
    json out;
    out["l"] = l;
    out["n"] = n;
    out["bc"] = g.bc;
    out["orthogonality"] = l == 1 && !unconstrained;
    const json sj = to_json(s, with_vector);
    for (auto& [k, v] : sj.items()) out[k] = v;
    emit(g, out.dump(2) + "\n");
    return kOk;
}

int cmd_scan(const Globals& g, const std::string& gspec, const std::string& rspec, const std::string& lspec, int n) {
    ScanOptions o;
    o.n = n;
    o.threads = resolve_threads(g.threads);
    o.profile = solver(g);
    o.assembly = assembly(g);
    const ScanResult s = stability_scan(parse_range(gspec, false), parse_range(rspec, true), parse_int_list(lspec), o);
    if (g.format == "json") {
        json out;
        json recs = json::array();
        for (const auto& r : s.records) recs.push_back(to_json(r));
        out["records"] = recs;
        json tr = json::array();
        for (const auto& t : s.transitions)
            tr.push_back({{"gamma", t.gamma}, {"rho_lo", t.rho_lo}, {"rho_hi", t.rho_hi},
                          {"rho_estimate", t.rho_estimate}, {"from", sign_name(t.from)}, {"to", sign_name(t.to)}});
        out["transitions"] = tr;
        emit(g, out.dump(2) + "\n");
    } else {
        emit(g, scan_csv(s));
    }
    if (!g.out.empty()) {
        for (const auto& t : s.transitions)
            std::cout << "gamma=" << format_double(t.gamma) << ": l=0 sign change near rho_c="
                      << format_double(t.rho_estimate) << " (bracket " << format_double(t.rho_lo) << ", "
                      << format_double(t.rho_hi) << ")\n";
        if (s.transitions.empty()) std::cout << "no sign change in l=0\n";
    }
    for (const auto& r : s.records)
        if (!r.error.empty()) return kNumerical;
    return kOk;
}

int cmd_evolve(const Globals& g, const std::string& file, int l, const std::string& init, double t_max, double dt,
               int n, bool unconstrained) {
    if (!(dt > 0) || !(t_max >= 0)) throw UsageError("need dt > 0 and t-max >= 0");
    const auto colon = init.find(':');
    if (colon == std::string::npos) throw UsageError("init must be mode:K or velocity:K");
    const std::string kind = init.substr(0, colon);
    if (kind != "mode" && kind != "velocity") throw UsageError("init must be mode:K or velocity:K");
    const int k = static_cast<int>(to_double(init.substr(colon + 1)));
    const StarProfile p = load_profile(file);
    const DiscreteOperator op = build_operator(g, p, l, n, unconstrained);
    const ModalBasis mb = modal_basis(op);
    if (k < 0 || k >= mb.eigenvalues.size()) throw UsageError("mode index out of range");
    const Eigen::VectorXd v = mb.vectors.col(k), zero = Eigen::VectorXd::Zero(v.size());
    const Eigen::Index steps = static_cast<Eigen::Index>(std::floor(t_max / dt + 1e-9)) + 1;
    Eigen::VectorXd times(steps);
    for (Eigen::Index i = 0; i < steps; ++i) times(i) = i * dt;
    const Trajectory tr = kind == "mode" ? evolve_mode(op, mb, v, zero, times) : evolve_mode(op, mb, zero, v, times);
    if (g.format == "json") {
        json out;
        out["l"] = l;
        out["mode"] = k;
        out["lambda"] = mb.eigenvalues(k);
        out["times"] = std::vector<double>(tr.times.data(), tr.times.data() + tr.times.size());
        out["energy"] = std::vector<double>(tr.energy.data(), tr.energy.data() + tr.energy.size());
        out["norm"] = std::vector<double>(tr.norm.data(), tr.norm.data() + tr.norm.size());
        emit(g, out.dump(1) + "\n");
    } else {
        emit(g, trajectory_csv(tr));
    }
    if (!g.out.empty()) {
        const double e0 = tr.energy(0);
        const double drift = (tr.energy.array() - e0).abs().maxCoeff() / std::max(std::abs(e0), 1e-300);
        std::cout << "lambda_" << k << " = " << format_double(mb.eigenvalues(k)) << ", relative energy drift "
                  << format_double(drift) << "\n";
    }
    return kOk;
}

int cmd_verify(const Globals& g, const std::string& file, const std::string& check, std::uint64_t seed, int samples) {
    const StarProfile p = load_profile(file);
    std::vector<CheckReport> reports;
    auto want = [&](const char* c) { return check == "all" || check == c; };
    if (want("translations"))
        for (int axis = 0; axis < 3; ++axis) reports.push_back(check_translation_zero(p, axis));
    if (want("kernel")) reports.push_back(check_kernel_default(p, seed));
    if (want("hardy")) {
        CheckReport agg;
        agg.check = "hardy";
        agg.pass = true;
        double worst = 0;
        for (int s = 0; s < samples; ++s) {
            const CheckReport r = check_hardy_bound(p, random_multimode_g(p, seed + s));
            agg.pass = agg.pass && r.pass;
            worst = std::max(worst, r.get("ratio"));
        }
        agg.set("draws", samples);
        agg.set("max_ratio", worst);
        agg.summary = "max |grad Psi|^2 / (2R|g|)^2 over " + std::to_string(samples) + " draws = " + format_double(worst);
        reports.push_back(agg);
    }
    if (want("irrotational")) reports.push_back(check_irrotational_coercivity(p, samples, seed));
    if (want("derivative-failure")) reports.push_back(check_derivative_failure(p));
    if (reports.empty()) throw UsageError("unknown check '" + check + "'");
    bool pass = true;
    json arr = json::array();
    for (const auto& r : reports) {
        pass = pass && r.pass;
        arr.push_back(to_json(r));
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.check << ": " << r.summary << "\n";
    }
    json out;
    out["profile"] = file;
    out["pass"] = pass;
    out["reports"] = arr;
    if (!g.out.empty()) write_atomic(g.out, out.dump(2) + "\n");
    else if (g.format == "json") std::cout << out.dump(2) << "\n";
    return pass ? kOk : kVerification;
}

}  // namespace

std::vector<double> parse_range(const std::string& spec, bool log_spaced) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw UsageError("range must be A:B:K, got '" + spec + "'");
    const double a = to_double(parts[0]), b = to_double(parts[1]);
    const double kd = to_double(parts[2]);
    if (kd < 1 || kd != std::floor(kd)) throw UsageError("range count K must be a positive integer");
    const int k = static_cast<int>(kd);
    if (log_spaced && !(a > 0 && b > 0)) throw UsageError("log-spaced range needs positive endpoints");
    std::vector<double> v(k);
    for (int i = 0; i < k; ++i) {
        const double s = k == 1 ? 0.0 : double(i) / (k - 1);
        v[i] = log_spaced ? std::exp(std::log(a) + s * (std::log(b) - std::log(a))) : a + s * (b - a);
    }
    v.front() = a;
    if (k > 1) v.back() = b;
    return v;
}

std::vector<int> parse_int_list(const std::string& spec) {
    std::vector<int> out;
    for (const auto& s : split(spec, ',')) {
        const double v = to_double(s);
        if (v != std::floor(v) || v < 0) throw UsageError("l values must be nonnegative integers");
        out.push_back(static_cast<int>(v));
    }
    if (out.empty()) throw UsageError("empty l list");
    return out;
}

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"Liquid Lane-Emden stars: equilibria, mode energies and spectral stability"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--tol", g.tol, "profile solver tolerance")->check(CLI::PositiveNumber);
    app.add_option("--grid-n", g.grid_n, "profile grid cells")->check(CLI::Range(64, 1 << 20));
    app.add_option("--threads", g.threads, "scan worker threads (default: LIQUIDSTAR_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "output file (written atomically)");
    app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--bc", g.bc, "boundary rows: natural or row")->check(CLI::IsMember({"natural", "row"}));

    double gamma = 0, rho_c = 0;
    auto* profile = app.add_subcommand("profile", "solve the Lane-Emden equilibrium");
    profile->add_option("--gamma", gamma, "adiabatic index in [1, 2]")->required();
    profile->add_option("--rho-c", rho_c, "central density > 1")->required();

    std::string file, spec = "random:1", route = "all";
    int l = 0, m = 0, n = 512;
    auto* energy = app.add_subcommand("energy", "per-mode energy by every route");
    energy->add_option("--profile", file)->required()->check(CLI::ExistingFile);
    energy->add_option("--l", l)->required();
    energy->add_option("--m", m);
    energy->add_option("--chi-spec", spec, "poly:c0,c1,... | const:C | random:SEED (coefficients in r/R)");
    energy->add_option("--route", route)->check(CLI::IsMember({"all", "direct", "chi1", "chi2", "radial"}));

    bool unconstrained = false, with_vector = false;
    auto* eig = app.add_subcommand("eig", "smallest constrained Rayleigh quotient");
    eig->add_option("--profile", file)->required()->check(CLI::ExistingFile);
    eig->add_option("--l", l)->required();
    eig->add_option("--n", n, "finite-element cells")->check(CLI::Range(64, 1 << 20));
    eig->add_flag("--unconstrained", unconstrained, "drop the l = 1 orthogonality row");
    eig->add_flag("--vector", with_vector, "include the eigenvector");

    std::string gspec, rspec, lspec = "0";
    auto* scan = app.add_subcommand("scan", "stability scan over (gamma, rho_c)");
    scan->add_option("--gamma", gspec, "A:B:K, K linear points")->required();
    scan->add_option("--rho-c", rspec, "A:B:K, K log-spaced points")->required();
    scan->add_option("--l-set", lspec, "comma-separated l values (0 is always included)");
    scan->add_option("--n", n, "finite-element cells")->check(CLI::Range(64, 1 << 20));

    std::string init = "mode:0";
    double t_max = 10, dt = 0.1;
    int n_evolve = 256;
    auto* evolve = app.add_subcommand("evolve", "modal synthesis of the linearized flow");
    evolve->add_option("--profile", file)->required()->check(CLI::ExistingFile);
    evolve->add_option("--l", l)->required();
    evolve->add_option("--init", init, "mode:K (chi0 = K-th eigenvector) or velocity:K (chidot0)");
    evolve->add_option("--t-max", t_max);
    evolve->add_option("--dt", dt);
    evolve->add_option("--n", n_evolve, "finite-element cells")->check(CLI::Range(64, 4096));
    evolve->add_flag("--unconstrained", unconstrained, "drop the l = 1 orthogonality row");

    std::string check = "all";
    std::uint64_t seed = 1;
    int samples = 64;
    auto* verify = app.add_subcommand("verify", "run the analysis checks");
    verify->add_option("--profile", file)->required()->check(CLI::ExistingFile);
    verify->add_option("--check", check)
        ->check(CLI::IsMember({"all", "translations", "kernel", "hardy", "irrotational", "derivative-failure"}));
    verify->add_option("--seed", seed);
    verify->add_option("--samples", samples)->check(CLI::Range(1, 100000));

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    try {
        if (g.format == "csv" && (energy->parsed() || eig->parsed() || verify->parsed()))
            throw UsageError("--format csv applies to profile, scan and evolve");
        if (profile->parsed()) return cmd_profile(g, gamma, rho_c);
        if (energy->parsed()) return cmd_energy(g, file, l, m, spec, route);
        if (eig->parsed()) return cmd_eig(g, file, l, n, unconstrained, with_vector);
        if (scan->parsed()) {
            Globals gs = g;
            if (gs.format.empty()) gs.format = "csv";
            return cmd_scan(gs, gspec, rspec, lspec, n);
        }
        if (evolve->parsed()) {
            Globals ge = g;
            if (ge.format.empty()) ge.format = "csv";
            return cmd_evolve(ge, file, l, init, t_max, dt, n_evolve, unconstrained);
        }
        if (verify->parsed()) return cmd_verify(g, file, check, seed, samples);
    } catch (const BcMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const GridMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    }
    return kUsage;
}

}  // namespace liquidstar
