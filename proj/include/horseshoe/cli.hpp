#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "horseshoe/config.hpp"
#include "horseshoe/equilibrium.hpp"
#include "horseshoe/errors.hpp"
#include "horseshoe/hyperbolic.hpp"
#include "horseshoe/lift3d.hpp"
#include "horseshoe/operator.hpp"
#include "horseshoe/report.hpp"
#include "horseshoe/symbolic.hpp"

namespace horseshoe::cli {

inline constexpr const char* version = "1.0.0";

/** \brief Exit codes of the command-line tool. */
enum ExitCode : int { ok = 0, verification_failed = 1, rejected = 2, capacity = 3 };

struct Check {
    std::string name;
    bool pass;
    double measured;
    double tolerance;
    std::string relation;  // how measured is compared against tolerance
};

inline Json check_json(const Check& c) {
    return Json{{"pass", c.pass}, {"measured", c.measured}, {"tolerance", c.tolerance}, {"relation", c.relation}};
}

/** \brief Derived seed for the k-th stochastic sub-analysis. */
inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t k) { return splitmix64(seed ^ splitmix64(k + 0x5eed)); }

inline Json provenance_json(const Config& c, const std::string& command) {
    return Json{{"tool", "horseshoe-thermo"},
                {"version", version},
                {"command", command},
                {"seed", c.seed},
                {"config",
                 {{"parameters", {{"rho", c.params.rho}, {"sigma", c.params.sigma}, {"beta", c.params.beta}, {"beta1", c.params.beta1}}},
                  {"potential",
                   {{"family", family_name(c.family)},
                    {"a", c.potential_a},
                    {"b", c.potential_b},
                    {"t", c.potential_t},
                    {"description", c.potential().describe()}}},
                  {"depth", c.depth},
                  {"n_max", c.n_max},
                  {"samples",
                   {{"orbits", c.mc_samples},
                    {"orbit_length", c.mc_length},
                    {"uniqueness_points", c.uniqueness_points},
                    {"nonlacunary_orbits", c.nonlacunary_samples},
                    {"nonlacunary_length", c.nonlacunary_length}}},
                  {"lift_n_max", c.lift_n_max},
                  {"sabotage_matrix", c.sabotage_matrix}}}};
}

inline Json hyperbolic_json(const HyperbolicConstants& hc) {
    return Json{{"gamma", hc.gamma},
                {"c", hc.c},
                {"theta", hc.theta},
                {"beta_exp", hc.beta_exp},
                {"epsilon", hc.epsilon},
                {"A_sup", hc.A_sup},
                {"b", {hc.b[0], hc.b[1], hc.b[2]}},
                {"bad_word_gamma", hc.bad_word_gamma}};
}

/** \brief Accumulates checks, the JSON report and the CSV tables of one command. */
struct Bundle {
    Json report;
    std::vector<Check> checks;
    std::vector<std::pair<std::string, std::string>> files;  // (file name, contents)

    void add(Check c) { checks.push_back(std::move(c)); }
    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    }
};

inline Check check_le(const std::string& name, double measured, double tol) {
    return {name, measured <= tol, measured, tol, "<="};
}
inline Check check_lt(const std::string& name, double measured, double tol) {
    return {name, measured < tol, measured, tol, "<"};
}
inline Check check_ge(const std::string& name, double measured, double tol) {
    return {name, measured >= tol, measured, tol, ">="};
}
inline Check check_gt(const std::string& name, double measured, double tol) {
    return {name, measured > tol, measured, tol, ">"};
}
inline Check check_flag(const std::string& name, bool ok) {
    return {name, ok, ok ? 1.0 : 0.0, 1.0, "=="};
}

// ---------------------------------------------------------------------------
// Sections

inline void spectral_section(Bundle& b, const Config& cfg, const EquilibriumState& st) {
    const Potential& phi = st.phi;
    const double bound = std::exp(phi.inf() + log_golden);
    const Check lower = check_ge("lower_bound", st.spec.lambda, bound - cfg.tol.lambda);
    b.report["spectral"] = Json{{"depth", st.depth()},
                                {"words", st.tm.size()},
                                {"nonzeros", st.tm.nnz()},
                                {"lambda", st.spec.lambda},
                                {"lambda_left", st.spec.lambda_left},
                                {"pressure", st.pressure},
                                {"iterations_right", st.spec.iterations_right},
                                {"iterations_left", st.spec.iterations_left},
                                {"residual_right", st.spec.residual_right},
                                {"residual_left", st.spec.residual_left},
                                {"potential_sup", phi.sup()},
                                {"potential_inf", phi.inf()},
                                {"potential_variation", phi.variation()},
                                {"variation_gate", variation_gate},
                                {"lower_bound", {{"value", bound}, {"check", check_json(lower)}}}};
    b.add(lower);
    Csv csv({"word", "h", "nu", "mu"});
    for (std::size_t i = 0; i < st.tm.size(); ++i)
        csv.row(to_string(st.tm.words[i]), st.spec.h[i], st.spec.nu[i], st.mu[i]);
    b.files.emplace_back("cylinders.csv", csv.str());
}

inline void combinatorics_section(Bundle& b, const HyperbolicConstants& hc, int density_n) {
    // Bad-word exponent bound: #I(gamma', n) <= e^{beta n} from n0 through 40.
    const auto bw = bad_word_exponent_check(hc.bad_word_gamma, hc.beta_exp, 1, 40);
    Csv csv({"n", "bad_words", "bound", "holds"});
    for (const auto& r : bw.rows) csv.row(r.n, r.count, r.bound, r.holds);
    b.files.emplace_back("bad_words.csv", csv.str());
    const Check bw_check = check_flag("bad_word_bound", bw.n0.has_value());
    b.report["bad_words"] = Json{{"gamma", bw.gamma},
                                 {"beta", bw.beta},
                                 {"n_range", {1, 40}},
                                 {"n0", bw.n0 ? Json(*bw.n0) : Json()},
                                 {"check", check_json(bw_check)}};
    b.add(bw_check);

    // Hyperbolic-time density: words outside I(gamma, n) have more than theta n hyperbolic prefixes.
    std::size_t tested = 0, violations = 0;
    for (int n = 1; n <= density_n; ++n)
        for (const Word& w : enumerate_words(n)) {
            if (is_bad_word(w, hc.gamma)) continue;
            ++tested;
            if (!(static_cast<double>(hyperbolic_times_of_word(w, hc).size()) > hc.theta * n)) ++violations;
        }
    const Check dens = check_le("hyperbolic_density", static_cast<double>(violations), 0.0);
    b.report["hyperbolic_density"] =
        Json{{"n_max", density_n}, {"good_words_tested", tested}, {"violations", violations}, {"check", check_json(dens)}};
    b.add(dens);
}

inline void operator_section(Bundle& b, const Config& cfg, const EquilibriumState& st) {
    const auto& hc = st.hc;
    // Distortion on hyperbolic cylinders.
    const auto dist = distortion_report(st.phi, cfg.n_max, hc, st.params);
    const Check dc = check_le("distortion", dist.max_spread, dist.bound);
    b.report["distortion"] =
        Json{{"n", dist.n}, {"cylinders", dist.cylinders}, {"max_spread", dist.max_spread}, {"check", check_json(dc)}};
    b.add(dc);

    // Limitacao: Z_n / lambda^n bounded above and Cesaro means bounded below.
    const int N = 20;
    const auto lim = limitacao_check(st.phi, st.lambda(), N, hc, st.params);
    Csv lcsv({"n", "upper", "lower"});
    for (int n = 1; n <= N; ++n)
        lcsv.row(n, lim.upper[static_cast<std::size_t>(n - 1)], lim.lower[static_cast<std::size_t>(n - 1)]);
    b.files.emplace_back("limitacao.csv", lcsv.str());
    const Check lu = check_le("limitacao_upper", *std::max_element(lim.upper.begin() + N / 2, lim.upper.end()), lim.K3_upper);
    const Check ll = check_ge("limitacao_lower", lim.lower.back(), 0.75 * lim.lower[static_cast<std::size_t>(N / 2 - 1)]);
    b.report["limitacao"] = Json{{"N", N}, {"K3_upper", lim.K3_upper}, {"upper", check_json(lu)}, {"lower", check_json(ll)}};
    b.add(lu);
    b.add(ll);

    // T_n recursion residual.
    std::vector<PlanePoint> points;
    for (const Word& w : enumerate_words(3)) points.push_back(cylinder_sample(w, st.params));
    const int kmax = 12;
    const auto tn = tn_recursion_residual(st.phi, st.lambda(), kmax, points, hc, st.params, st.threads);
    Csv tcsv({"k", "residual", "count_D", "count_A", "bound", "bound_paper"});
    Json rows = Json::array();
    for (const auto& r : tn.rows) {
        tcsv.row(r.k, r.residual, r.count_D, r.count_A, r.bound, r.bound_paper);
        rows.push_back(Json{{"k", r.k}, {"residual", r.residual}, {"bound", r.bound}});
    }
    b.files.emplace_back("tn_residual.csv", tcsv.str());
    const Check td = check_le("tn_residual_decreasing", tn.k0, kmax - 4);
    const Check tb = check_flag("tn_residual_below_bound", tn.below_bound);
    b.report["tn_recursion"] = Json{{"kmax", kmax}, {"k0", tn.k0}, {"rows", rows}, {"decreasing", check_json(td)},
                                    {"below_bound", check_json(tb)}};
    b.add(td);
    b.add(tb);
}

inline void equilibrium_section(Bundle& b, const Config& cfg, const EquilibriumState& st) {
    const auto& hc = st.hc;
    const std::uint64_t seed = cfg.seed;

    // Gibbs plateau.
    const auto g = gibbs_check(st, cfg.n_max);
    Csv gcsv({"n", "cylinders", "min_ratio", "max_ratio", "K2"});
    Json grows = Json::array();
    for (const auto& r : g.rows) {
        gcsv.row(r.n, r.cylinders, r.min_ratio, r.max_ratio, r.K2);
        grows.push_back(Json{{"n", r.n}, {"min", r.min_ratio}, {"max", r.max_ratio}, {"K2", r.K2}});
    }
    b.files.emplace_back("gibbs.csv", gcsv.str());
    const Check gm = check_lt("gibbs_max_over_min", g.max_over_min, cfg.tol.gibbs_max_over_min);
    const Check gp = check_le("gibbs_plateau", g.plateau, cfg.tol.gibbs_plateau);
    b.report["gibbs"] = Json{{"n_max", cfg.n_max}, {"n_ref", g.n_ref}, {"rows", grows},
                             {"max_over_min", check_json(gm)}, {"plateau", check_json(gp)}};
    b.add(gm);
    b.add(gp);

    // Bad-mass decay.
    const int n_lo = std::min(4, cfg.n_max);
    const auto dec = bad_mass_decay(st, hc.bad_word_gamma, n_lo, cfg.n_max);
    Csv dcsv({"n", "bad_words", "mass", "bound"});
    Json drows = Json::array();
    for (const auto& r : dec.rows) {
        dcsv.row(r.n, r.count, r.mass, r.bound);
        drows.push_back(Json{{"n", r.n}, {"mass", r.mass}, {"bound", r.bound}});
    }
    b.files.emplace_back("decay.csv", dcsv.str());
    const Check ds = check_flag("decay_strictly_decreasing", dec.strictly_decreasing);
    const Check db = check_flag("decay_below_bound", dec.below_bound);
    b.report["decay"] = Json{{"gamma", dec.gamma}, {"rows", drows}, {"strictly_decreasing", check_json(ds)},
                             {"below_bound", check_json(db)}};
    b.add(ds);
    b.add(db);

    // First hyperbolic time.
    const auto ft = first_hyperbolic_time_stats(st, cfg.n_max);
    const Check fc = check_lt("first_hyperbolic_time_increment", ft.last_increment, cfg.tol.first_time_increment);
    b.report["first_hyperbolic_time"] =
        Json{{"tail", ft.tail}, {"truncated_integral", ft.truncated_integral}, {"increment", check_json(fc)}};
    b.add(fc);

    // Non-lacunarity.
    const auto nl = nonlacunary_check(st, cfg.nonlacunary_samples, cfg.nonlacunary_length, sub_seed(seed, 1));
    const Check nc = check_le("nonlacunary_tail", nl.mean_tail_ratio - 1.0, cfg.tol.nonlacunary_tail);
    const Check nd = check_ge("hyperbolic_time_density", nl.mean_density, nl.theta);
    b.report["nonlacunary"] = Json{{"samples", nl.samples},          {"orbit_length", nl.orbit_length},
                                   {"flagged_fraction", nl.flagged_fraction}, {"tail_mean_minus_one", check_json(nc)},
                                   {"density", check_json(nd)}};
    b.add(nc);
    b.add(nd);

    // Pressure identity and entropy.
    const auto pr = pressure_identity(st, cfg.mc_samples, cfg.mc_length, sub_seed(seed, 2));
    const bool constant = st.phi.variation() == 0.0;
    const double ptol = constant ? cfg.tol.pressure_constant : cfg.tol.pressure_general;
    const Check pc = check_le("pressure_identity", pr.residual, ptol);
    const Check pe = check_le("entropy_estimators", std::abs(pr.entropy.cylinder - pr.entropy.birkhoff), cfg.tol.entropy_estimators);
    b.report["pressure"] = Json{{"log_lambda", pr.log_lambda},
                                {"entropy_cylinder", pr.entropy.cylinder},
                                {"entropy_birkhoff", pr.entropy.birkhoff},
                                {"integral_phi", pr.entropy.integral_phi},
                                {"residual_birkhoff", pr.residual_birkhoff},
                                {"residual", check_json(pc)},
                                {"estimator_gap", check_json(pe)}};
    b.add(pc);
    b.add(pe);

    // Invariance of mu.
    const double inv = invariance_residual(st);
    const Check ic = check_le("invariance", inv, cfg.tol.invariance);
    b.report["invariance"] = check_json(ic);
    b.add(ic);

    // Lyapunov exponent, plus seed stability over 10 seeds.
    const auto ly = lyapunov_estimate(st, cfg.mc_samples, cfg.mc_length, sub_seed(seed, 3));
    std::vector<double> runs;
    const int per_seed = std::max(1, cfg.mc_samples / 10);
    for (std::uint64_t k = 0; k < 10; ++k)
        runs.push_back(lyapunov_estimate(st, per_seed, cfg.mc_length, sub_seed(seed, 100 + k)).estimate);
    const auto [mn, mx] = std::minmax_element(runs.begin(), runs.end());
    const double spread = (*mx - *mn) / std::abs(ly.estimate);
    const Check lc = check_gt("lyapunov_exceeds_8c", ly.estimate, ly.threshold);
    const Check ls = check_le("lyapunov_seed_spread", spread, cfg.tol.lyapunov_seed_spread);
    b.report["lyapunov"] = Json{{"estimate", ly.estimate},
                                {"periodic_23", ly.periodic_23},
                                {"seed_runs", runs},
                                {"exceeds_8c", check_json(lc)},
                                {"seed_spread", check_json(ls)}};
    b.add(lc);
    b.add(ls);

    // Uniqueness cross-checks and Jacobian identities.
    const auto un = uniqueness_crosscheck(st, cfg.uniqueness_points, sub_seed(seed, 4), st.depth());
    const Check uj = check_le("jacobian_sum", un.sum_inverse_jacobian_dev, cfg.tol.jacobian_sum);
    const Check uc = check_le("chain_rule_nu", un.chain_rule_nu_dev, cfg.tol.chain_rule);
    const Check um = check_le("chain_rule_mu", un.chain_rule_mu_dev, 1e-10);
    const Check uh = check_le("hn_cross_construction", un.hn_relative_sup_diff, cfg.tol.hn_relative);
    b.report["uniqueness"] = Json{{"points", un.points},
                                  {"hn_n", un.hn_n},
                                  {"jensen_gap", un.jensen_gap},
                                  {"hn_tv_distance", un.hn_tv_distance},
                                  {"jacobian_sum", check_json(uj)},
                                  {"chain_rule_nu", check_json(uc)},
                                  {"chain_rule_mu", check_json(um)},
                                  {"hn_relative_sup_diff", check_json(uh)}};
    b.add(uj);
    b.add(uc);
    b.add(um);
    b.add(uh);
}

inline void lift_section(Bundle& b, const Config& cfg, const EquilibriumState& st) {
    const double sc = semiconjugacy_residual(st.params, 10000, sub_seed(cfg.seed, 5), st.threads);
    const Check scc = check_le("semiconjugacy", sc, cfg.tol.semiconjugacy);
    b.add(scc);

    // Fiber entropy witness over a mu-typical base point.
    Rng rng(sub_seed(cfg.seed, 6));
    const auto orb = sample_orbit(st, 20, rng);
    std::vector<int> ns(20);
    for (int i = 0; i < 20; ++i) ns[static_cast<std::size_t>(i)] = i + 1;
    const auto fib = fiber_separated_counts(orb.points[0], orb.itinerary, ns, fiber_length / 8.0, st.params);
    const auto fib1 = fiber_separated_counts(orb.points[0], orb.itinerary, ns, fiber_length, st.params);
    Csv fcsv({"n", "count_eps_len_over_8", "count_eps_len"});
    for (std::size_t i = 0; i < ns.size(); ++i) fcsv.row(ns[i], fib.counts[i], fib1.counts[i]);
    b.files.emplace_back("fiber.csv", fcsv.str());
    const Check fc = check_flag("fiber_counts_constant", fib.constant && fib1.constant);
    b.add(fc);
    const auto ent = entropy_equality_report(fib);

    const auto lr = lift_report(st, cfg.lift_n_max);
    Csv lcsv({"n", "lifted_phi", "difference", "alt_section", "z_integral", "invariance_gap"});
    for (const auto& r : lr.rows) lcsv.row(r.n, r.lifted, r.difference, r.alt_section, r.z_observable, r.invariance_gap);
    b.files.emplace_back("lift.csv", lcsv.str());
    const Check lc = check_le("lift_integral", lr.max_difference, cfg.tol.lift_integral);
    b.add(lc);

    const double zdev = lifted_z_deviation(st.phi, st.params, 100, 10, sub_seed(cfg.seed, 7));
    const Check zc = check_le("lift_z_independence", zdev, 0.0);
    b.add(zc);

    Json rows = Json::array();
    for (const auto& r : lr.rows)
        rows.push_back(Json{{"n", r.n}, {"lifted", r.lifted}, {"difference", r.difference}, {"invariance_gap", r.invariance_gap}});
    b.report["lift"] = Json{{"semiconjugacy", check_json(scc)},
                            {"fiber",
                             {{"epsilon", fib.epsilon},
                              {"counts", fib.counts},
                              {"counts_eps_fiber_length", fib1.counts},
                              {"constant", check_json(fc)}}},
                            {"base_integral", lr.base},
                            {"rows", rows},
                            {"integral", check_json(lc)},
                            {"z_independence", check_json(zc)},
                            {"entropy",
                             {{"n", ent.n},
                              {"word_growth", ent.word_growth},
                              {"ratio_growth", ent.ratio_growth},
                              {"fiber_entropy", ent.fiber_entropy},
                              {"htop_F", ent.htop_F},
                              {"log_omega", ent.log_omega}}}};
}

// ---------------------------------------------------------------------------
// Commands

inline EquilibriumState build_state(const Config& cfg) {
    BuildOptions opt;
    opt.threads = cfg.threads;
    opt.sabotage = cfg.sabotage_matrix;
    return build_equilibrium(cfg.potential(), cfg.depth, cfg.params, opt);
}

inline Bundle cmd_spectrum(const Config& cfg, const std::string& export_path) {
    Bundle b;
    b.report["provenance"] = provenance_json(cfg, "spectrum");
    const auto st = build_state(cfg);
    b.report["hyperbolic"] = hyperbolic_json(st.hc);
    spectral_section(b, cfg, st);
    if (!export_path.empty()) {
        std::ostringstream os;
        export_matrix(st.tm, os);
        b.files.emplace_back(export_path, os.str());
    }
    return b;
}

inline Bundle cmd_equilibrium(const Config& cfg, bool full) {
    Bundle b;
    b.report["provenance"] = provenance_json(cfg, full ? "verify" : "equilibrium");
    const auto st = build_state(cfg);
    b.report["hyperbolic"] = hyperbolic_json(st.hc);
    spectral_section(b, cfg, st);
    equilibrium_section(b, cfg, st);
    if (full) {
        combinatorics_section(b, st.hc, 20);
        operator_section(b, cfg, st);
        lift_section(b, cfg, st);
    }
    return b;
}

inline Bundle cmd_lift(const Config& cfg) {
    Bundle b;
    b.report["provenance"] = provenance_json(cfg, "lift");
    const auto st = build_state(cfg);
    b.report["hyperbolic"] = hyperbolic_json(st.hc);
    lift_section(b, cfg, st);
    Csv cloud({"x", "y", "z", "generation"});
    for (const auto& cp : generation_point_cloud(std::min(cfg.render_generations, 8), cfg.params))
        cloud.row(cp.point.x, cp.point.y, cp.point.z, cp.generation);
    b.files.emplace_back("points.csv", cloud.str());
    return b;
}

inline Bundle cmd_render(const Config& cfg, int generations) {
    if (generations < 1 || generations > 8) throw capacity_error("render supports 1..8 generations");
    Bundle b;
    b.report["provenance"] = provenance_json(cfg, "render");
    Json counts = Json::array();
    for (int n = 1; n <= generations; ++n) {
        b.files.emplace_back("generation_" + std::to_string(n) + ".svg", render_svg(n, cfg.params));
        counts.push_back(Json{{"n", n}, {"footprints", count_words(n).convert_to<std::uint64_t>()}});
    }
    b.report["render"] = Json{{"generations", generations}, {"files", counts}};
    return b;
}

inline void write_bundle(Bundle& b, const std::string& dir) {
    std::filesystem::create_directories(dir);
    if (!b.checks.empty()) {
        Json checks = Json::object();
        for (const auto& c : b.checks) checks[c.name] = check_json(c);
        b.report["checks"] = checks;
        b.report["all_pass"] = b.all_pass();
    }
    write_text_file((std::filesystem::path(dir) / "report.json").string(), dump_json(b.report));
    for (const auto& [name, content] : b.files) {
        const std::filesystem::path path = std::filesystem::path(name).is_absolute() ? std::filesystem::path(name)
                                                                                     : std::filesystem::path(dir) / name;
        write_text_file(path.string(), content);
    }
}

inline void print_checks(const Bundle& b, std::ostream& out) {
    for (const auto& c : b.checks)
        out << (c.pass ? "PASS " : "FAIL ") << std::left << std::setw(34) << c.name << " measured=" << format17(c.measured)
            << ' ' << c.relation << ' ' << format17(c.tolerance) << '\n';
}

/** \brief Entry point of `horseshoe-thermo`; returns the process exit code. */
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Equilibrium states of the projected partially hyperbolic horseshoe", "horseshoe-thermo"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> depth;
    std::optional<unsigned> threads;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file (key = value)");
        sub->add_option("--seed", seed, "64-bit RNG seed");
        sub->add_option("--depth", depth, "cylinder depth d");
        sub->add_option("--threads", threads, "worker threads (results do not depend on it)");
        sub->add_option("--out", out_dir, "output directory");
    };

    auto* words = app.add_subcommand("words", "count, enumerate or bound admissible words");
    int wn = 0;
    double wgamma = 0.5;
    bool wcount = false, wenum = false, wbad = false;
    words->add_option("--n", wn, "word length")->required();
    words->add_option("--gamma", wgamma, "fraction threshold for --bad");
    auto* oc = words->add_flag("--count", wcount, "print N(n)");
    auto* oe = words->add_flag("--enumerate", wenum, "list all words of length n");
    auto* ob = words->add_flag("--bad", wbad, "exact #I(gamma,n) and its binomial bound");
    oc->excludes(oe)->excludes(ob);
    oe->excludes(ob);
    add_common(words);

    auto* spectrum = app.add_subcommand("spectrum", "spectral radius, pressure, h and nu");
    std::string export_path;
    spectrum->add_option("--export-matrix", export_path, "write the transfer matrix as 'row col value' lines");
    add_common(spectrum);
    auto* equilibrium = app.add_subcommand("equilibrium", "equilibrium state reports");
    add_common(equilibrium);
    auto* verify = app.add_subcommand("verify", "run every verification check");
    add_common(verify);
    auto* lift = app.add_subcommand("lift", "3D lift: semiconjugacy, fiber entropy, lifted integrals");
    add_common(lift);
    auto* render = app.add_subcommand("render", "SVG renders of cylinder generations");
    std::optional<int> generations;
    render->add_option("--generations,--n", generations, "number of generations (<= 8)");
    add_common(render);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : rejected;
    }

    try {
        Config cfg = config_path.empty() ? Config{} : load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (depth) cfg.depth = *depth;
        if (threads) cfg.threads = *threads;
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (depth && !cfg.n_max_set) cfg.n_max = std::min(12, cfg.depth);

        if (words->parsed()) {
            if (wn < 1) throw config_error("--n must be >= 1");
            Bundle b;
            if (wbad) {
                if (!(wgamma > 0.0 && wgamma < 1.0)) throw config_error("--gamma must lie in (0,1)");
                Csv csv({"n", "gamma", "exact", "bound", "corrected_bound"});
                csv.row(wn, wgamma, count_bad_words(wn, wgamma), bad_words_upper_bound(wn, wgamma),
                        bad_words_upper_bound_corrected(wn, wgamma));
                b.files.emplace_back("words.csv", csv.str());
            } else if (wenum) {
                Csv csv({"word"});
                for (const Word& w : enumerate_words(wn)) csv.row(to_string(w));
                b.files.emplace_back("words.csv", csv.str());
            } else {
                Csv csv({"n", "count"});
                csv.row(wn, count_words(wn));
                b.files.emplace_back("words.csv", csv.str());
            }
            out << b.files.front().second;
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                write_text_file((std::filesystem::path(out_dir) / "words.csv").string(), b.files.front().second);
            }
            return ok;
        }

        cfg.validate();
        if (render->parsed()) {
            auto b = cmd_render(cfg, generations.value_or(cfg.render_generations));
            write_bundle(b, cfg.output_dir);
            out << "rendered " << b.report["render"]["generations"].get<int>() << " generations to " << cfg.output_dir << '\n';
            return ok;
        }
        if (spectrum->parsed()) {
            auto b = cmd_spectrum(cfg, export_path);
            write_bundle(b, cfg.output_dir);
            out << "lambda = " << format17(b.report["spectral"]["lambda"].get<double>())
                << "\npressure = " << format17(b.report["spectral"]["pressure"].get<double>()) << '\n';
            print_checks(b, out);
            return ok;
        }
        if (equilibrium->parsed()) {
            auto b = cmd_equilibrium(cfg, false);
            write_bundle(b, cfg.output_dir);
            print_checks(b, out);
            return ok;
        }
        if (lift->parsed()) {
            auto b = cmd_lift(cfg);
            write_bundle(b, cfg.output_dir);
            print_checks(b, out);
            return ok;
        }
        if (verify->parsed()) {
            auto b = cmd_equilibrium(cfg, true);
            write_bundle(b, cfg.output_dir);
            print_checks(b, out);
            const std::size_t failed =
                static_cast<std::size_t>(std::count_if(b.checks.begin(), b.checks.end(), [](const Check& c) { return !c.pass; }));
            out << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
            return failed == 0 ? ok : verification_failed;
        }
        return rejected;
    } catch (const config_error& e) {  // includes admissibility_error
        err << "error: " << e.what() << '\n';
        return rejected;
    } catch (const capacity_error& e) {
        err << "error: " << e.what() << '\n';
        return capacity;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return verification_failed;
    }
}

}  // namespace horseshoe::cli
