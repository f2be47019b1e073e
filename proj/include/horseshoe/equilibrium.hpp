#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "horseshoe/hyperbolic.hpp"
#include "horseshoe/maps.hpp"
#include "horseshoe/operator.hpp"
#include "horseshoe/parallel.hpp"
#include "horseshoe/potential.hpp"
#include "horseshoe/symbolic.hpp"

namespace horseshoe {

/**
 * \brief Discretised equilibrium state at depth d: mu = h nu on depth-d cylinders together with
 * the mu-Markov transitions P(b -> a) = nu_a M_ab / (lambda nu_b), which extend mu to deeper cylinders.
 */
struct EquilibriumState {
    Parameters params;
    Potential phi = Potential::constant(0.0);
    HyperbolicConstants hc{};
    unsigned threads = 1;
    TransferMatrix tm;
    Spectrum spec;
    double pressure = 0.0;          // log lambda
    std::vector<double> mu;         // depth-d masses
    std::vector<double> mu_cum;     // cumulative masses for sampling
    std::vector<double> prob;       // per CSR entry e (row a, column b): P(b -> a)
    WordIndex index{1};
    WordIndex index_ext{2};         // depth d+1

    int depth() const noexcept { return tm.depth; }
    double lambda() const noexcept { return spec.lambda; }
};

inline EquilibriumState build_equilibrium(const Potential& phi, int depth, const Parameters& params,
                                          const BuildOptions& opt = {}) {
    EquilibriumState st;
    st.params = params;
    st.phi = phi;
    st.hc = hyperbolic_constants(params);
    st.threads = opt.threads;
    st.tm = build_matrix(phi, depth, params, opt);
    st.spec = power_iteration(st.tm, 1e-12, 100000, opt.threads);
    st.pressure = std::log(st.spec.lambda);
    st.index = WordIndex(depth);
    st.index_ext = WordIndex(depth + 1);
    const std::size_t n = st.tm.size();
    st.mu.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += (st.mu[i] = st.spec.h[i] * st.spec.nu[i]);
    if (!(std::abs(total - 1.0) < 1e-9)) throw integrity_error("mu does not have unit mass");
    st.mu_cum.resize(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        st.mu[i] /= total;
        st.mu_cum[i] = (acc += st.mu[i]);
    }
    st.prob.resize(st.tm.nnz());
    for (std::size_t e = 0; e < st.tm.nnz(); ++e) {
        const auto a = st.tm.row[e], b = st.tm.col[e];
        st.prob[e] = st.spec.nu[a] * st.tm.val[e] / (st.spec.lambda * st.spec.nu[b]);
    }
    for (std::size_t b = 0; b < n; ++b) {
        double s = 0.0;
        for (auto k = st.tm.col_ptr[b]; k < st.tm.col_ptr[b + 1]; ++k) s += st.prob[st.tm.entry_of[k]];
        if (!(std::abs(s - 1.0) < 1e-9)) throw integrity_error("transition probabilities do not sum to one");
    }
    return st;
}

/** \brief max_v |mu(G^{-1}[v]) - mu([v])| over depth-(d-1) cylinders v. */
inline double invariance_residual(const EquilibriumState& st) {
    const int d = st.depth();
    const WordIndex idx(d - 1);
    std::vector<double> pre(idx.size(), 0.0), cur(idx.size(), 0.0);
    for (std::size_t i = 0; i < st.tm.size(); ++i) {
        const Word& w = st.tm.words[i];
        pre[idx.rank(w.begin() + 1)] += st.mu[i];  // mass of G^{-1}[w_1..w_{d-1}]
        cur[idx.rank(w.begin())] += st.mu[i];      // mass of [w_0..w_{d-2}]
    }
    double r = 0.0;
    for (std::size_t v = 0; v < idx.size(); ++v) r = std::max(r, std::abs(pre[v] - cur[v]));
    return r;
}

// ---------------------------------------------------------------------------
// Jacobians

/** \brief CSR entry of M for the depth-(d+1) word u = (b, j): row sigma(u), column u_0..u_{d-1}. */
inline std::uint32_t entry_for(const EquilibriumState& st, const Word& u) {
    const int d = st.depth();
    if (static_cast<int>(u.size()) < d + 1) throw domain_error("entry lookup needs an itinerary of length d+1");
    const auto a = st.index.rank(u.begin() + 1);
    for (auto e = st.tm.row_ptr[a]; e < st.tm.row_ptr[a + 1]; ++e)
        if (st.tm.source[e] == u[0]) return e;
    throw transition_error("inadmissible itinerary");
}

/** \brief h at the depth-d cylinder of an itinerary. */
inline double h_of(const EquilibriumState& st, const Word& u) { return st.spec.h[st.index.rank(u.begin())]; }

/** \brief log J_mu G on the depth-(d+1) cylinder u: log lambda + log h(G) - log h - log(matrix weight). */
inline double log_jacobian_mu(const EquilibriumState& st, const Word& u) {
    const auto e = entry_for(st, u);
    return st.pressure + std::log(st.spec.h[st.tm.row[e]]) - std::log(st.spec.h[st.tm.col[e]]) - std::log(st.tm.val[e]);
}

/** \brief J_mu G(p) = lambda h(G p)/h(p) e^{-phi_d(p)}, with h and phi read on the cylinders of p. */
inline double jacobian_mu(const EquilibriumState& st, const PlanePoint& p) {
    return std::exp(log_jacobian_mu(st, itinerary(p, st.depth() + 1, st.params)));
}

/** \brief J_nu G^n(p) = lambda^n e^{-S_n phi(p)} (pointwise potential). */
inline double jacobian_nu(const EquilibriumState& st, const PlanePoint& p, int n = 1) {
    return std::pow(st.lambda(), n) * std::exp(-birkhoff_sum(st.phi, p, n, st.params));
}

// ---------------------------------------------------------------------------
// mu-sampling

/** \brief Itinerary of length len >= d: a depth-d word drawn by mass, extended by the mu-transitions. */
inline Word sample_itinerary(const EquilibriumState& st, int len, Rng& rng) {
    const int d = st.depth();
    if (len < d) throw domain_error("sample_itinerary requires len >= depth");
    const double u = rng.uniform() * st.mu_cum.back();
    std::size_t cur = static_cast<std::size_t>(std::upper_bound(st.mu_cum.begin(), st.mu_cum.end(), u) - st.mu_cum.begin());
    cur = std::min(cur, st.mu.size() - 1);
    Word w = st.tm.words[cur];
    w.reserve(static_cast<std::size_t>(len));
    while (static_cast<int>(w.size()) < len) {
        double v = rng.uniform(), acc = 0.0;
        const auto lo = st.tm.col_ptr[cur], hi = st.tm.col_ptr[cur + 1];
        std::uint32_t pick = st.tm.entry_of[hi - 1];
        for (auto k = lo; k < hi; ++k) {
            acc += st.prob[st.tm.entry_of[k]];
            if (v < acc) {
                pick = st.tm.entry_of[k];
                break;
            }
        }
        cur = st.tm.row[pick];
        w.push_back(st.tm.words[cur].back());
    }
    return w;
}

/** \brief Extra symbols appended before pulling back, so that the first `len` orbit points are well resolved. */
inline constexpr int sample_tail = 48;

struct SampledOrbit {
    Word itinerary;                 // length len + sample_tail
    std::vector<PlanePoint> points; // length len + sample_tail; points[j] = G^j points[0]
};

inline SampledOrbit sample_orbit(const EquilibriumState& st, int len, Rng& rng) {
    SampledOrbit s;
    s.itinerary = sample_itinerary(st, std::max(len + sample_tail, st.depth()), rng);
    s.points = cylinder_orbit(s.itinerary, st.params);
    return s;
}

// ---------------------------------------------------------------------------
// Gibbs property and bad-cylinder decay

struct GibbsRow {
    int n;
    std::size_t cylinders;
    double min_ratio;
    double max_ratio;
    double K2;  // max(max_ratio, 1/min_ratio)
};

struct GibbsReport {
    std::vector<GibbsRow> rows;
    double max_over_min = 0.0;
    double plateau = 0.0;  // K2(n_max) / K2(n_ref)
    int n_ref = 8;
    bool pass = false;     // max_over_min < 10 and plateau <= 1.5
};

/** \brief nu(R^n) / exp(S_n phi(x) - P n) over hyperbolic cylinders, x the cylinder sample. */
inline GibbsReport gibbs_check(const EquilibriumState& st, int n_max) {
    if (n_max < 1 || n_max > st.depth()) throw domain_error("gibbs_check requires 1 <= n_max <= depth");
    GibbsReport rep;
    rep.n_ref = std::min(8, n_max);
    double gmin = INFINITY, gmax = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const auto marg = prefix_marginal(st.tm.words, st.spec.nu, n);
        const WordIndex idx(n);
        GibbsRow row{n, 0, INFINITY, 0.0, 0.0};
        for (const Word& w : hyperbolic_words(n, st.hc)) {
            double S = 0.0;
            for (const PlanePoint& q : cylinder_orbit(w, st.params)) S += st.phi(q);
            const double r = marg[idx.rank(w.begin())] / std::exp(S - st.pressure * n);
            row.min_ratio = std::min(row.min_ratio, r);
            row.max_ratio = std::max(row.max_ratio, r);
            ++row.cylinders;
        }
        if (row.cylinders == 0) {
            row.min_ratio = row.max_ratio = row.K2 = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.K2 = std::max(row.max_ratio, 1.0 / row.min_ratio);
            gmin = std::min(gmin, row.min_ratio);
            gmax = std::max(gmax, row.max_ratio);
        }
        rep.rows.push_back(row);
    }
    rep.max_over_min = gmax / gmin;
    rep.plateau = rep.rows.back().K2 / rep.rows[static_cast<std::size_t>(rep.n_ref) - 1].K2;
    rep.pass = rep.max_over_min < 10.0 && rep.plateau <= 1.5;
    return rep;
}

struct BadMassRow {
    int n;
    BigInt count;  // #I(gamma, n)
    double mass;   // nu of the union of bad n-cylinders
    double bound;  // lambda^{-n} e^{n sup phi} #I(gamma, n)
};

struct BadMassReport {
    double gamma = 0.0;
    std::vector<BadMassRow> rows;
    bool strictly_decreasing = false;
    bool below_bound = false;
};

inline BadMassReport bad_mass_decay(const EquilibriumState& st, double gamma, int n_lo, int n_hi) {
    if (n_lo < 1 || n_hi < n_lo || n_hi > st.depth()) throw domain_error("bad_mass_decay range must lie in [1, depth]");
    BadMassReport rep;
    rep.gamma = gamma;
    rep.strictly_decreasing = rep.below_bound = true;
    for (int n = n_lo; n <= n_hi; ++n) {
        const auto marg = prefix_marginal(st.tm.words, st.spec.nu, n);
        const auto words = enumerate_words(n);
        BadMassRow row{n, 0, 0.0, 0.0};
        for (std::size_t i = 0; i < words.size(); ++i)
            if (exceeds_fraction(count_one_three(words[i]), n, gamma)) {
                row.mass += marg[i];
                row.count += 1;
            }
        row.bound = std::exp(n * st.phi.sup()) * row.count.convert_to<double>() / std::pow(st.lambda(), n);
        if (row.mass > row.bound * (1.0 + 1e-12)) rep.below_bound = false;
        if (!rep.rows.empty() && !(row.mass < rep.rows.back().mass)) rep.strictly_decreasing = false;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

struct FirstHyperbolicTimeStats {
    std::vector<double> tail;      // tail[n] = nu{n_1 > n}, n = 0..n_max (tail[0] = 1)
    double truncated_integral = 0.0;  // sum_{n=0}^{n_max-1} tail[n]
    double last_increment = 0.0;      // tail[n_max - 1]
};

inline FirstHyperbolicTimeStats first_hyperbolic_time_stats(const EquilibriumState& st, int n_max) {
    if (n_max < 1 || n_max > st.depth()) throw domain_error("n_max must lie in [1, depth]");
    FirstHyperbolicTimeStats s;
    s.tail.push_back(1.0);
    // First hyperbolic time of each depth-d word (0 if none within the word).
    std::vector<int> first(st.tm.size(), 0);
    for (std::size_t i = 0; i < st.tm.size(); ++i) {
        const auto t = hyperbolic_times_of_word(st.tm.words[i], st.hc);
        first[i] = t.empty() ? 0 : t.front();
    }
    for (int n = 1; n <= n_max; ++n) {
        double m = 0.0;
        for (std::size_t i = 0; i < st.tm.size(); ++i)
            if (first[i] == 0 || first[i] > n) m += st.spec.nu[i];
        s.tail.push_back(m);
    }
    for (int n = 0; n < n_max; ++n) s.truncated_integral += s.tail[static_cast<std::size_t>(n)];
    s.last_increment = s.tail[static_cast<std::size_t>(n_max) - 1];
    return s;
}

struct NonlacunaryReport {
    int samples = 0;
    int orbit_length = 0;
    double flagged_fraction = 0.0;  // samples with fewer than 3 hyperbolic times
    double mean_tail_ratio = 0.0;   // mean of n_{i+1}/n_i over the later half of each sample's times
    double mean_density = 0.0;      // mean of (#hyperbolic times)/orbit_length
    double theta = 0.0;
};

inline NonlacunaryReport nonlacunary_check(const EquilibriumState& st, int samples, int orbit_length,
                                           std::uint64_t seed) {
    NonlacunaryReport rep;
    rep.samples = samples;
    rep.orbit_length = orbit_length;
    rep.theta = st.hc.theta;
    struct Out {
        bool flagged;
        double ratio;
        double density;
    };
    std::vector<Out> out(static_cast<std::size_t>(samples));
    parallel_for(out.size(), st.threads, [&](std::size_t i) {
        Rng rng(seed, i);
        const Word w = sample_itinerary(st, std::max(orbit_length, st.depth()), rng);
        const auto t = hyperbolic_times_of_word(Word(w.begin(), w.begin() + orbit_length), st.hc);
        Out o{t.size() < 3, 0.0, static_cast<double>(t.size()) / orbit_length};
        if (!o.flagged) {
            const std::size_t start = t.size() / 2;
            double s = 0.0;
            int c = 0;
            for (std::size_t j = std::max<std::size_t>(start, 1); j < t.size(); ++j, ++c)
                s += static_cast<double>(t[j]) / t[j - 1];
            o.ratio = c ? s / c : 1.0;
        }
        out[i] = o;
    });
    int flagged = 0;
    double ratio = 0.0, density = 0.0;
    for (const Out& o : out) {
        flagged += o.flagged;
        if (!o.flagged) ratio += o.ratio;
        density += o.density;
    }
    rep.flagged_fraction = static_cast<double>(flagged) / samples;
    rep.mean_tail_ratio = flagged == samples ? std::numeric_limits<double>::quiet_NaN() : ratio / (samples - flagged);
    rep.mean_density = density / samples;
    return rep;
}

// ---------------------------------------------------------------------------
// Entropy, pressure and Lyapunov exponent

struct EntropyReport {
    double cylinder = 0.0;      // sum over depth-(d+1) cylinders of mu log J_mu
    double birkhoff = 0.0;      // Monte Carlo time average of log J_mu along mu-orbits
    double integral_phi = 0.0;  // sum over depth-(d+1) cylinders of mu phi(sample)
};

inline EntropyReport rokhlin_entropy(const EquilibriumState& st, int samples, int orbit_length, std::uint64_t seed) {
    EntropyReport rep;
    for (std::size_t e = 0; e < st.tm.nnz(); ++e) {
        const auto a = st.tm.row[e], b = st.tm.col[e];
        const double m = st.mu[b] * st.prob[e];
        const double logJ = st.pressure + std::log(st.spec.h[a]) - std::log(st.spec.h[b]) - std::log(st.tm.val[e]);
        rep.cylinder += m * logJ;
        rep.integral_phi += m * st.tm.phi[e];
    }
    std::vector<double> avg(static_cast<std::size_t>(samples));
    parallel_for(avg.size(), st.threads, [&](std::size_t i) {
        Rng rng(seed, i);
        const Word w = sample_itinerary(st, orbit_length + st.depth() + 1, rng);
        double s = 0.0;
        for (int j = 0; j < orbit_length; ++j)
            s += log_jacobian_mu(st, Word(w.begin() + j, w.begin() + j + st.depth() + 1));
        avg[i] = s / orbit_length;
    });
    for (double v : avg) rep.birkhoff += v;
    rep.birkhoff /= samples;
    return rep;
}

struct PressureReport {
    double log_lambda = 0.0;
    EntropyReport entropy;
    double residual = 0.0;           // |h_mu + int phi - log lambda| (cylinder estimator)
    double residual_birkhoff = 0.0;  // same with the Monte Carlo entropy
};

inline PressureReport pressure_identity(const EquilibriumState& st, int samples, int orbit_length, std::uint64_t seed) {
    PressureReport rep;
    rep.log_lambda = st.pressure;
    rep.entropy = rokhlin_entropy(st, samples, orbit_length, seed);
    rep.residual = std::abs(rep.entropy.cylinder + rep.entropy.integral_phi - st.pressure);
    rep.residual_birkhoff = std::abs(rep.entropy.birkhoff + rep.entropy.integral_phi - st.pressure);
    return rep;
}

struct LyapunovReport {
    double estimate = 0.0;   // mean of -log ||DG^{-1}|E^c|| along mu-orbits
    double threshold = 0.0;  // 8c
    bool exceeds = false;
    double periodic_23 = 0.0;  // symbolic exponent of the period-(2,3) orbit
};

inline LyapunovReport lyapunov_estimate(const EquilibriumState& st, int samples, int orbit_length, std::uint64_t seed) {
    LyapunovReport rep;
    std::vector<double> avg(static_cast<std::size_t>(samples));
    parallel_for(avg.size(), st.threads, [&](std::size_t i) {
        Rng rng(seed, i);
        const auto orb = sample_orbit(st, orbit_length, rng);
        double s = 0.0;
        for (int j = 0; j < orbit_length; ++j) s -= std::log(dG_inverse_center_norm(orb.points[static_cast<std::size_t>(j)], st.params));
        avg[i] = s / orbit_length;
    });
    for (double v : avg) rep.estimate += v;
    rep.estimate /= samples;
    rep.threshold = 8.0 * st.hc.c;
    rep.exceeds = rep.estimate > rep.threshold;
    rep.periodic_23 = symbolic_periodic_exponent({2, 3}, st.hc);
    return rep;
}

// ---------------------------------------------------------------------------
// Uniqueness cross-checks

struct UniquenessReport {
    int points = 0;
    double sum_inverse_jacobian_dev = 0.0;  // max |sum_{y in G^{-1}x} 1/J_mu(y) - 1|
    double chain_rule_nu_dev = 0.0;         // max relative |J_nu G^2 - J_nu G(x) J_nu G(Gx)|
    double chain_rule_mu_dev = 0.0;         // same for the discretised J_mu
    double jensen_gap = 0.0;                // max Jensen gap for eta = mu
    int hn_n = 0;
    double hn_relative_sup_diff = 0.0;      // |h_n - h| / |h| after normalising both to int . dnu = 1
    double hn_tv_distance = 0.0;            // total variation between mu and h_n nu
    bool hn_agrees = false;                 // relative sup difference <= 5%
};

/** \brief h_n (T_n path) at the depth-d cylinder samples, normalised so that sum h_n nu = 1. */
inline std::vector<double> hn_on_cylinders(const EquilibriumState& st, int n) {
    std::vector<double> v(st.tm.size());
    parallel_for(v.size(), st.threads, [&](std::size_t i) {
        v[i] = hn_value(st.phi, cylinder_sample(st.tm.words[i], st.params), n, st.lambda(), st.hc, st.params);
    });
    double pairing = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) pairing += v[i] * st.spec.nu[i];
    for (double& x : v) x /= pairing;
    return v;
}

inline UniquenessReport uniqueness_crosscheck(const EquilibriumState& st, int n_points, std::uint64_t seed, int hn_n) {
    UniquenessReport rep;
    rep.points = n_points;
    rep.hn_n = hn_n;
    const int d = st.depth();
    struct Out {
        double inv, cn, cm, jg;
    };
    std::vector<Out> out(static_cast<std::size_t>(n_points));
    parallel_for(out.size(), st.threads, [&](std::size_t i) {
        Rng rng(seed, i);
        const auto orb = sample_orbit(st, d + 2, rng);
        const PlanePoint& x = orb.points[0];
        Out o{0.0, 0.0, 0.0, 0.0};
        // Preimages of x: p_i = 1/J_mu(y_i) from the Jacobian, g(y_i) = h(y_i) e^{phi_d(y_i)} / (lambda h(x)).
        double s = 0.0, mean_q = 0.0, mean_logq = 0.0;
        for (int src = 1; src <= 3; ++src) {
            if (!allowed(src, x.rect)) continue;
            const PlanePoint y = inverse_branch(x, src, st.params);
            const Word uy = itinerary(y, d + 1, st.params);
            const double J = std::exp(log_jacobian_mu(st, uy));
            const auto e = entry_for(st, uy);
            const double g = st.spec.h[st.tm.col[e]] * st.tm.val[e] / (st.lambda() * st.spec.h[st.tm.row[e]]);
            const double p = 1.0 / J, q = g * J;
            s += p;
            mean_q += p * q;
            mean_logq += p * std::log(q);
        }
        o.inv = std::abs(s - 1.0);
        o.jg = std::abs(std::log(mean_q) - mean_logq);
        // Chain rules.
        const PlanePoint& gx = orb.points[1];
        const double jn2 = jacobian_nu(st, x, 2), jn1 = jacobian_nu(st, x, 1) * jacobian_nu(st, gx, 1);
        o.cn = std::abs(jn2 - jn1) / jn2;
        const Word u = itinerary(x, d + 2, st.params);
        const Word u1(u.begin(), u.begin() + d + 1), u2(u.begin() + 1, u.begin() + d + 2);
        const auto e1 = entry_for(st, u1), e2 = entry_for(st, u2);
        const double direct = 2.0 * st.pressure + std::log(st.spec.h[st.tm.row[e2]]) - std::log(st.spec.h[st.tm.col[e1]]) -
                              std::log(st.tm.val[e1]) - std::log(st.tm.val[e2]);
        const double product = log_jacobian_mu(st, u1) + log_jacobian_mu(st, u2);
        o.cm = std::abs(std::exp(direct) - std::exp(product)) / std::exp(direct);
        out[i] = o;
    });
    for (const Out& o : out) {
        rep.sum_inverse_jacobian_dev = std::max(rep.sum_inverse_jacobian_dev, o.inv);
        rep.chain_rule_nu_dev = std::max(rep.chain_rule_nu_dev, o.cn);
        rep.chain_rule_mu_dev = std::max(rep.chain_rule_mu_dev, o.cm);
        rep.jensen_gap = std::max(rep.jensen_gap, o.jg);
    }
    const auto hn = hn_on_cylinders(st, hn_n);
    double diff = 0.0, hmax = 0.0, tv = 0.0;
    for (std::size_t i = 0; i < hn.size(); ++i) {
        diff = std::max(diff, std::abs(hn[i] - st.spec.h[i]));
        hmax = std::max(hmax, st.spec.h[i]);
        tv += std::abs(hn[i] - st.spec.h[i]) * st.spec.nu[i];
    }
    rep.hn_relative_sup_diff = diff / hmax;
    rep.hn_tv_distance = 0.5 * tv;
    rep.hn_agrees = rep.hn_relative_sup_diff <= 0.05;
    return rep;
}

}  // namespace horseshoe
