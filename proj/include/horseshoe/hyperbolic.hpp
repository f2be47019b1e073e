#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "horseshoe/maps.hpp"
#include "horseshoe/symbolic.hpp"

namespace horseshoe {

/** \brief Constants of the hyperbolic-time machinery derived from the parameters. */
struct HyperbolicConstants {
    double gamma;           // hyperbolic-time fraction threshold (1/2) log(1/sigma)/(log(1/sigma)+1)
    double c;               // (1/8)((1-gamma) log(1/sigma) - gamma)
    double theta;           // Pliss density 2c/(A_sup - 2c)
    double epsilon;         // min rectangle side / 4
    double A_sup;           // log(1/sigma)
    std::array<double, 3> b;  // symbolic lower bounds of log ||DG^{-1}||^{-1} on R1, R2, R3
    double beta_exp;        // log(omega)/2, the bad-word exponent
    double bad_word_gamma;  // 1 - alpha_0 from the bad-cylinder counting proposition
};

inline double default_gamma(double sigma) {
    const double L = std::log(1.0 / sigma);
    return 0.5 * L / (L + 1.0);
}

inline double choose_c(double gamma, double sigma) {
    const double L = std::log(1.0 / sigma);
    return ((1.0 - gamma) * L - gamma) / 8.0;
}

inline HyperbolicConstants hyperbolic_constants(const Parameters& p) {
    p.validate();
    const double L = std::log(1.0 / p.sigma);
    HyperbolicConstants hc{};
    hc.gamma = default_gamma(p.sigma);
    hc.c = choose_c(hc.gamma, p.sigma);
    hc.A_sup = L;
    hc.theta = 2.0 * hc.c / (hc.A_sup - 2.0 * hc.c);
    hc.epsilon = std::min(p.rho, p.sigma) / 4.0;
    hc.b = {-1.0, L, -1.0};
    hc.beta_exp = log_golden / 2.0;
    hc.bad_word_gamma = bad_word_gamma();
    return hc;
}

namespace detail {
/** Indices m in 1..n with sum_{j=k}^{m-1} a_j >= c1 (m-k) for all k < m (running-record form). */
inline std::vector<int> record_times(std::span<const double> a, double c1) {
    std::vector<int> out;
    double s = 0.0, best = 0.0;
    for (std::size_t m = 1; m <= a.size(); ++m) {
        s += a[m - 1] - c1;
        if (s >= best) {
            out.push_back(static_cast<int>(m));
            best = s;
        }
    }
    return out;
}
}  // namespace detail

/**
 * \brief Pliss times: every n_i with a_k + ... + a_{n_i - 1} >= c1 (n_i - k) for all 0 <= k < n_i.
 * Preconditions (a_t <= A_sup, sum a > c2 n, c1 < c2) raise constraint_error when violated.
 */
inline std::vector<int> pliss_times(std::span<const double> a, double c1, double c2, double A_sup) {
    if (a.empty()) throw constraint_error("Pliss: empty sequence");
    if (!(c1 < c2)) throw constraint_error("Pliss: requires c1 < c2");
    if (!(c2 <= A_sup)) throw constraint_error("Pliss: requires c2 <= A_sup");
    double total = 0.0;
    for (double v : a) {
        if (v > A_sup) throw constraint_error("Pliss: a_t exceeds A_sup");
        total += v;
    }
    if (!(total > c2 * static_cast<double>(a.size()))) throw constraint_error("Pliss: sum does not exceed c2 n");
    return detail::record_times(a, c1);
}

inline std::vector<double> symbolic_rates(const Word& w, const HyperbolicConstants& hc) {
    std::vector<double> a(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        check_symbol(w[j]);
        a[j] = hc.b[w[j] - 1];
    }
    return a;
}

/** \brief R^n(w) is hyperbolic: sum_{j=k}^{n-1} b_{a_j} >= 2c (n-k) for every k. */
inline bool is_hyperbolic_cylinder(const Word& w, const HyperbolicConstants& hc) {
    if (!is_admissible(w)) throw transition_error("is_hyperbolic_cylinder requires an admissible word");
    double s = 0.0;
    for (std::size_t k = w.size(); k-- > 0;) {
        s += hc.b[w[k] - 1] - 2.0 * hc.c;
        if (s < 0.0) return false;
    }
    return true;
}

/** \brief Prefix lengths m for which R^m(w_0..w_{m-1}) is hyperbolic. */
inline std::vector<int> hyperbolic_times_of_word(const Word& w, const HyperbolicConstants& hc) {
    if (!is_admissible(w)) throw transition_error("hyperbolic_times_of_word requires an admissible word");
    const auto a = symbolic_rates(w, hc);
    return detail::record_times(a, 2.0 * hc.c);
}

/** \brief Average of b over one period of a periodic itinerary. */
inline double symbolic_periodic_exponent(const Word& period, const HyperbolicConstants& hc) {
    if (period.empty()) throw domain_error("empty period");
    double s = 0.0;
    for (double v : symbolic_rates(period, hc)) s += v;
    return s / static_cast<double>(period.size());
}

}  // namespace horseshoe
