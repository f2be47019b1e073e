// Acceptance suite: one PASS/FAIL line per acceptance criterion; exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "horseshoe/cli.hpp"
#include "oracles.hpp"
#include "property.hpp"

using namespace horseshoe;
namespace fs = std::filesystem;

namespace {

const Parameters P{};
const HyperbolicConstants HC = hyperbolic_constants(P);

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Potential> gibbs_potentials() {
    return {Potential::constant(0.0), Potential::affine_in_y(0.0, 0.2), Potential::center_log_derivative(0.05, P.sigma)};
}

std::vector<double> rates(const oracle::Word& w) {
    std::vector<double> a;
    for (int s : w) a.push_back(HC.b[s - 1]);
    return a;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    return cli::run(args, out, err);
}

// ---------------------------------------------------------------------------

Outcome c1_word_counts() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t expected[] = {3, 5, 8, 13, 21};
    for (int n = 1; n <= 5; ++n) {
        o.require(count_words(n) == BigInt(expected[n - 1]), "N(" + std::to_string(n) + ") mismatch");
        o.require(enumerate_words(n).size() == expected[n - 1], "enumeration(" + std::to_string(n) + ") mismatch");
        o.require(oracle::count_matpow(n) == expected[n - 1], "matrix power(" + std::to_string(n) + ") mismatch");
    }
    const double rate = std::log(count_words(40).convert_to<double>()) / 40.0;
    const double target = std::log(oracle::golden_root());
    o.note("(1/40)log N(40)=" + fmt(rate) + " vs " + fmt(target) + " (diff " + fmt(rate - target) + ", tol 1e-3)");
    o.require(std::abs(rate - target) <= 1e-3, "(1/40)log N(40) off by more than 1e-3");
    const double secs = seconds_since(t0);
    o.note("runtime " + fmt(secs) + " s");
    o.require(secs < 1.0, "runtime >= 1 s");
    return o;
}

Outcome c2_golden_spectral_radius() {
    Outcome o;
    double worst = 0.0, t16 = 0.0;
    for (int d = 2; d <= 16; ++d) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto s = power_iteration(build_matrix(Potential::constant(0.0), d, P));
        if (d == 16) t16 = seconds_since(t0);
        worst = std::max(worst, std::abs(s.lambda - oracle::golden_root()));
    }
    o.note("max |lambda_d - omega| = " + fmt(worst) + ", d=16 runtime " + fmt(t16) + " s");
    o.require(worst <= 1e-9, "lambda off by more than 1e-9");
    o.require(t16 < 10.0, "d=16 runtime >= 10 s");
    return o;
}

Outcome c3_scaling() {
    Outcome o;
    double worst_lambda = 0.0, worst_vec = 0.0;
    for (const auto& phi : gibbs_potentials()) {
        const auto a = power_iteration(build_matrix(phi, 10, P));
        for (double c : {-2.0, -0.3, 0.7, 3.0}) {
            const auto b = power_iteration(build_matrix(phi.shifted(c), 10, P));
            worst_lambda = std::max(worst_lambda, std::abs(b.lambda / (std::exp(c) * a.lambda) - 1.0));
            for (std::size_t i = 0; i < a.h.size(); ++i) {
                worst_vec = std::max(worst_vec, std::abs(b.h[i] - a.h[i]) / a.h[i]);
                worst_vec = std::max(worst_vec, std::abs(b.nu[i] - a.nu[i]) / a.nu[i]);
            }
        }
    }
    o.note("lambda rel dev " + fmt(worst_lambda) + ", h/nu rel dev " + fmt(worst_vec));
    o.require(worst_lambda <= 1e-12, "lambda(phi+c) != e^c lambda(phi)");
    o.require(worst_vec <= 1e-12, "normalised h or nu changed");
    return o;
}

Outcome c4_lower_bound() {
    Outcome o;
    std::vector<Potential> grid;
    for (double a : {-1.0, 0.0, 0.5})
        for (double b : {-0.2, -0.1, 0.1, 0.2}) grid.push_back(Potential::affine_in_y(a, b));
    for (double t : {-0.1, -0.05, 0.05, 0.1}) grid.push_back(Potential::center_log_derivative(t, P.sigma));
    for (double a : {-2.0, 0.0, 1.0, 2.5}) grid.push_back(Potential::constant(a));
    int admitted = 0;
    double margin = INFINITY;
    for (const auto& phi : grid) {
        if (!admissible(phi)) continue;
        ++admitted;
        const double lam = power_iteration(build_matrix(phi, 10, P)).lambda;
        margin = std::min(margin, lam - std::exp(phi.inf() + log_golden));
    }
    o.note(std::to_string(admitted) + " admitted potentials, min margin " + fmt(margin));
    o.require(admitted >= 20, "fewer than 20 admitted potentials");
    o.require(margin >= -1e-9, "lambda below e^{inf phi + log omega}");
    return o;
}

Outcome c5_variation_gate() {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / "horseshoe_acceptance_gate";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto code_for = [&](const std::string& cfg) {
        const fs::path path = dir / "gate.cfg";
        std::ofstream(path) << cfg;
        return run_cli({"spectrum", "--config", path.string(), "--depth", "6", "--out", (dir / "out").string()});
    };
    const std::string gate = format17(variation_gate);
    struct Case {
        std::string cfg;
        int expected;
    } cases[] = {
        {"potential.family = affine_in_y\npotential.b = 0.3\n", 2},
        {"potential.family = affine_in_y\npotential.b = -0.25\n", 2},
        {"potential.family = affine_in_y\npotential.b = " + gate + "\n", 2},
        {"potential.family = center_log_derivative\npotential.t = 0.2\n", 2},
        {"potential.family = affine_in_y\npotential.b = 0.2\n", 0},
        {"potential.family = affine_in_y\npotential.b = -0.24\n", 0},
        {"potential.family = center_log_derivative\npotential.t = 0.1\n", 0},
        {"potential.family = constant\npotential.a = 5\n", 0},
    };
    int ok = 0;
    for (const auto& c : cases) {
        const int code = code_for(c.cfg);
        if (code == c.expected)
            ++ok;
        else
            o.require(false, "config [" + c.cfg.substr(0, c.cfg.size() - 1) + "] exit " + std::to_string(code));
    }
    o.note(std::to_string(ok) + "/" + std::to_string(std::size(cases)) + " gate cases as expected (gate " + gate + ")");
    return o;
}

Outcome c6_pliss_oracle() {
    Outcome o;
    std::size_t exhaustive = 0, pliss_compared = 0, random = 0, mismatches = 0;
    auto compare = [&](const oracle::Word& ow) {
        const Word w(ow.begin(), ow.end());
        const auto a = rates(ow);
        const auto ref = oracle::hyperbolic_times(a, 2 * HC.c);
        if (hyperbolic_times_of_word(w, HC) != ref) ++mismatches;
        if (is_hyperbolic_cylinder(w, HC) != (!ref.empty() && ref.back() == static_cast<int>(w.size()))) ++mismatches;
        double s = 0.0;
        for (double v : a) s += v;
        const double c2 = s / static_cast<double>(a.size());
        if (c2 > 2 * HC.c) {
            // Pliss hypotheses hold with c2 between c1 = 2c and the average rate.
            const double c2m = 0.5 * (2 * HC.c + c2);
            if (pliss_times(a, 2 * HC.c, c2m, HC.A_sup) != ref) ++mismatches;
            ++pliss_compared;
        }
    };
    for (int n = 1; n <= 14; ++n)
        for (const auto& w : oracle::words(n)) {
            compare(w);
            ++exhaustive;
        }
    prop::Gen g(2024);
    for (int i = 0; i < 10000; ++i, ++random) compare(g.word(50));
    // Real sequences satisfying the Pliss hypotheses, where pliss_times itself is defined.
    for (int i = 0; i < 10000; ++i) {
        std::vector<double> a(50);
        for (auto& v : a) v = g.uniform(-1.0, HC.A_sup);
        double s = 0.0;
        for (double v : a) s += v;
        const double c2 = s / 50.0;
        if (!(c2 > 2 * HC.c)) continue;
        if (pliss_times(a, 2 * HC.c, 0.5 * (2 * HC.c + c2), HC.A_sup) != oracle::hyperbolic_times(a, 2 * HC.c)) ++mismatches;
        ++pliss_compared;
    }
    o.note(std::to_string(exhaustive) + " exhaustive + " + std::to_string(random) + " random words, " +
           std::to_string(pliss_compared) + " sequences through pliss_times, " + std::to_string(mismatches) + " mismatches");
    o.require(mismatches == 0, "oracle mismatch");
    return o;
}

Outcome c7_hyperbolic_density() {
    Outcome o;
    std::size_t good = 0, violations = 0;
    for (int n = 1; n <= 20; ++n)
        for (const Word& w : enumerate_words(n)) {
            if (is_bad_word(w, HC.gamma)) continue;
            ++good;
            if (!(static_cast<double>(hyperbolic_times_of_word(w, HC).size()) > HC.theta * n)) ++violations;
        }
    o.note("gamma=" + fmt(HC.gamma) + ", theta=" + fmt(HC.theta) + ": " + std::to_string(good) + " good words, " +
           std::to_string(violations) + " violations");
    o.require(violations == 0, "a good word has too few hyperbolic times");
    return o;
}

Outcome c8_bad_word_bound() {
    Outcome o;
    const double gamma = bad_word_gamma(), beta = log_golden / 2.0;
    const auto rep = bad_word_exponent_check(gamma, beta, 1, 40);
    o.note("gamma=" + fmt(gamma) + ", beta=" + fmt(beta) + ", n0=" + (rep.n0 ? std::to_string(*rep.n0) : "none"));
    o.require(rep.n0.has_value(), "bound never holds through n=40");
    if (rep.n0)
        for (const auto& r : rep.rows)
            if (r.n >= *rep.n0 && !r.holds) o.require(false, "bound fails at n=" + std::to_string(r.n));
    return o;
}

Outcome c9_gibbs() {
    Outcome o;
    for (const auto& phi : gibbs_potentials()) {
        const auto rep = gibbs_check(build_equilibrium(phi, 14, P), 12);
        o.note(phi.describe() + ": max/min=" + fmt(rep.max_over_min) + " K2(12)/K2(8)=" + fmt(rep.plateau));
        o.require(rep.max_over_min < 10.0 && rep.plateau <= 1.5, phi.describe() + " fails");
    }
    return o;
}

Outcome c10_bad_mass_decay() {
    Outcome o;
    for (const auto& phi : gibbs_potentials()) {
        const auto rep = bad_mass_decay(build_equilibrium(phi, 14, P), bad_word_gamma(), 4, 12);
        o.note(phi.describe() + ": mass(4)=" + fmt(rep.rows.front().mass) + " mass(12)=" + fmt(rep.rows.back().mass));
        o.require(rep.strictly_decreasing, phi.describe() + " not strictly decreasing");
        o.require(rep.below_bound, phi.describe() + " above the explicit bound");
    }
    return o;
}

Outcome c11_pressure_identity() {
    Outcome o;
    for (const auto& phi : gibbs_potentials()) {
        const auto st = build_equilibrium(phi, 15, P);
        const auto rep = pressure_identity(st, 100, 10000, 1);
        const bool constant = phi.variation() == 0.0;
        const double tol = constant ? 1e-2 : 3e-2;
        o.note(phi.describe() + ": residual " + fmt(rep.residual) + " (Monte Carlo " + fmt(rep.residual_birkhoff) + ")");
        o.require(rep.residual <= tol && rep.residual_birkhoff <= tol, phi.describe() + " residual above " + fmt(tol));
        if (constant) {
            o.require(std::abs(rep.entropy.cylinder - log_golden) <= 1e-2, "phi=0 entropy not ~ log omega");
        }
    }
    return o;
}

Outcome c12_eigenfunction_cross_construction() {
    Outcome o;
    const auto phi = Potential::constant(0.0);
    const auto st = build_equilibrium(phi, 15, P);
    const auto u = uniqueness_crosscheck(st, 100, 1, 15);
    o.note("h_n vs h relative sup diff at n=d=15: " + fmt(u.hn_relative_sup_diff) + " (tol 5e-2)");
    o.require(u.hn_relative_sup_diff <= 5e-2, "h_n disagrees with power-iteration h");
    std::vector<PlanePoint> pts;
    for (const Word& w : enumerate_words(3)) pts.push_back(cylinder_sample(w, P));
    const auto tn = tn_recursion_residual(phi, st.lambda(), 12, pts, HC, P);
    o.note("T_n recursion residual decreasing from k0=" + std::to_string(tn.k0) + " through 12");
    o.require(tn.decreasing, "T_n residual not decreasing over [k0, 12]");
    return o;
}

Outcome c13_jacobians() {
    Outcome o;
    for (const auto& phi : gibbs_potentials()) {
        const auto u = uniqueness_crosscheck(build_equilibrium(phi, 12, P), 1000, 7, 4);
        o.note(phi.describe() + ": sum 1/J dev " + fmt(u.sum_inverse_jacobian_dev) + ", chain rule dev " + fmt(u.chain_rule_nu_dev));
        o.require(u.sum_inverse_jacobian_dev <= 1e-10, phi.describe() + " Jacobian sum");
        o.require(u.chain_rule_nu_dev <= 1e-12, phi.describe() + " chain rule");
    }
    return o;
}

Outcome c14_semiconjugacy_and_lift() {
    Outcome o;
    const double res = semiconjugacy_residual(P, 10000, 1);
    o.note("semiconjugacy residual " + fmt(res));
    o.require(res <= 1e-12, "semiconjugacy residual above 1e-12");
    const auto st = build_equilibrium(Potential::affine_in_y(0.0, 0.2), 8, P);
    Rng rng(1, 0);
    const auto orb = sample_orbit(st, 20, rng);
    std::vector<int> ns;
    for (int n = 1; n <= 20; ++n) ns.push_back(n);
    for (double eps : {fiber_length / 8, fiber_length}) {
        const auto f = fiber_separated_counts(orb.points[0], orb.itinerary, ns, eps, P);
        o.note("fiber counts at eps=" + fmt(eps) + ": " + std::to_string(f.counts.front()) + (f.constant ? " (constant)" : " (varying)"));
        o.require(f.constant, "fiber counts vary with n");
    }
    const auto lift = lift_report(build_equilibrium(Potential::affine_in_y(0.0, 0.2), 6, P), 10);
    o.note("max lifted integral difference " + fmt(lift.max_difference) + " for n <= 10");
    o.require(lift.max_difference <= 1e-6, "lifted integral differs");
    return o;
}

Outcome c15_determinism() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "horseshoe_acceptance_determinism";
    fs::remove_all(root);
    const fs::path a = root / "t1", b = root / "t4";
    run_cli({"verify", "--threads", "1", "--out", a.string()});
    run_cli({"verify", "--threads", "4", "--out", b.string()});
    std::size_t files = 0, differing = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        ++files;
        if (slurp(e.path()) != slurp(b / e.path().filename())) {
            ++differing;
            o.require(false, e.path().filename().string() + " differs");
        }
    }
    o.require(fs::exists(a / "report.json"), "no report written");
    o.note(std::to_string(files) + " output files compared for threads 1 vs 4, " + std::to_string(differing) + " differ");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"C1 word counts and entropy", c1_word_counts},
        {"C2 phi=0 spectral radius", c2_golden_spectral_radius},
        {"C3 scaling law", c3_scaling},
        {"C4 lambda lower bound", c4_lower_bound},
        {"C5 variation gate", c5_variation_gate},
        {"C6 Pliss oracle equivalence", c6_pliss_oracle},
        {"C7 hyperbolic density", c7_hyperbolic_density},
        {"C8 bad-word bound", c8_bad_word_bound},
        {"C9 Gibbs plateau", c9_gibbs},
        {"C10 bad-mass decay", c10_bad_mass_decay},
        {"C11 pressure identity", c11_pressure_identity},
        {"C12 eigenfunction cross-construction", c12_eigenfunction_cross_construction},
        {"C13 Jacobian identities", c13_jacobians},
        {"C14 semiconjugacy and lift", c14_semiconjugacy_and_lift},
        {"C15 determinism", c15_determinism},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += !o.pass;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
