#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "horseshoe/hyperbolic.hpp"
#include "horseshoe/maps.hpp"
#include "horseshoe/parallel.hpp"
#include "horseshoe/potential.hpp"
#include "horseshoe/symbolic.hpp"

namespace horseshoe {

struct BuildOptions {
    unsigned threads = 1;
    /** Fault injection for verification tests: entries with source symbol 2 are scaled by e^3. */
    bool sabotage = false;
};

/**
 * \brief Truncated transfer operator on functions constant on depth-d cylinders.
 * Row a (target word) holds, for each source i with A[i][a_0] = 1, the entry
 * e^{phi(cylinder_sample(i a))} in column (i, a_0, ..., a_{d-2}).
 */
struct TransferMatrix {
    int depth = 0;
    Parameters params;
    std::vector<Word> words;
    std::vector<std::uint32_t> row_ptr;
    std::vector<std::uint32_t> col;
    std::vector<double> val;
    std::vector<double> phi;          // phi at the depth-(d+1) sample of each entry
    std::vector<Symbol> source;       // source symbol of each entry
    std::vector<std::uint32_t> row;   // row (target word) of each entry
    // Transpose (CSC) view, rows ascending inside each column.
    std::vector<std::uint32_t> col_ptr;
    std::vector<std::uint32_t> entry_of;  // CSC slot -> CSR entry

    std::size_t size() const noexcept { return words.size(); }
    std::size_t nnz() const noexcept { return val.size(); }

    /** y = M x */
    void multiply(const std::vector<double>& x, std::vector<double>& y, unsigned threads) const {
        y.assign(size(), 0.0);
        parallel_for(size(), threads, [&](std::size_t a) {
            double s = 0.0;
            for (std::uint32_t e = row_ptr[a]; e < row_ptr[a + 1]; ++e) s += val[e] * x[col[e]];
            y[a] = s;
        });
    }

    /** y = M^T x */
    void multiply_transpose(const std::vector<double>& x, std::vector<double>& y, unsigned threads) const {
        y.assign(size(), 0.0);
        parallel_for(size(), threads, [&](std::size_t b) {
            double s = 0.0;
            for (std::uint32_t k = col_ptr[b]; k < col_ptr[b + 1]; ++k) {
                const std::uint32_t e = entry_of[k];
                s += val[e] * x[row[e]];
            }
            y[b] = s;
        });
    }

};

inline TransferMatrix build_matrix(const Potential& phi, int depth, const Parameters& params,
                                   const BuildOptions& opt = {}) {
    params.validate();
    require_admissible(phi);
    if (depth < 2) throw domain_error("build_matrix requires depth >= 2");
    TransferMatrix tm;
    tm.depth = depth;
    tm.params = params;
    tm.words = enumerate_words(depth);
    const WordIndex index(depth);
    const std::size_t n = tm.words.size();

    tm.row_ptr.assign(n + 1, 0);
    for (std::size_t a = 0; a < n; ++a) tm.row_ptr[a + 1] = tm.row_ptr[a] + (tm.words[a][0] == 3 ? 1u : 2u);
    const std::size_t nnz = tm.row_ptr[n];
    tm.col.resize(nnz);
    tm.val.resize(nnz);
    tm.phi.resize(nnz);
    tm.source.resize(nnz);
    tm.row.resize(nnz);

    parallel_for(n, opt.threads, [&](std::size_t a) {
        const Word& w = tm.words[a];
        Word ext(static_cast<std::size_t>(depth) + 1);
        std::copy(w.begin(), w.end(), ext.begin() + 1);
        std::uint32_t e = tm.row_ptr[a];
        for (int i = 1; i <= 3; ++i) {
            if (!allowed(i, w[0])) continue;
            ext[0] = static_cast<Symbol>(i);
            const double v = phi(cylinder_sample(ext, params));
            tm.col[e] = static_cast<std::uint32_t>(index.rank(ext.begin()));
            tm.phi[e] = v;
            tm.val[e] = std::exp(v) * (opt.sabotage && i == 2 ? std::exp(3.0) : 1.0);
            tm.source[e] = static_cast<Symbol>(i);
            tm.row[e] = static_cast<std::uint32_t>(a);
            ++e;
        }
    });

    // Counting sort into CSC; rows are visited in ascending order so each column is row-sorted.
    tm.col_ptr.assign(n + 1, 0);
    for (std::uint32_t c : tm.col) ++tm.col_ptr[c + 1];
    for (std::size_t b = 0; b < n; ++b) tm.col_ptr[b + 1] += tm.col_ptr[b];
    tm.entry_of.resize(nnz);
    std::vector<std::uint32_t> fill(tm.col_ptr.begin(), tm.col_ptr.end() - 1);
    for (std::uint32_t e = 0; e < nnz; ++e) tm.entry_of[fill[tm.col[e]]++] = e;
    return tm;
}

/** \brief Writes one "row_word col_word value" line per nonzero entry. */
inline void export_matrix(const TransferMatrix& tm, std::ostream& os) {
    char buf[64];
    for (std::size_t a = 0; a < tm.size(); ++a)
        for (std::uint32_t e = tm.row_ptr[a]; e < tm.row_ptr[a + 1]; ++e) {
            std::snprintf(buf, sizeof buf, "%.17g", tm.val[e]);
            os << to_string(tm.words[a]) << ' ' << to_string(tm.words[tm.col[e]]) << ' ' << buf << '\n';
        }
}

struct Spectrum {
    double lambda = 0.0;       // from the right iteration
    double lambda_left = 0.0;  // from the left iteration
    std::vector<double> h;     // right eigenvector, normalised so that sum h nu = 1
    std::vector<double> nu;    // left eigenvector, mass 1
    int iterations_right = 0;
    int iterations_left = 0;
    double residual_right = 0.0;  // ||M h - lambda h||_inf / (lambda ||h||_inf)
    double residual_left = 0.0;   // ||M^T nu - lambda nu||_inf / (lambda ||nu||_inf)
};

namespace detail {
/**
 * Normalised power iteration. Once the residual is below tol the iteration keeps polishing
 * while the residual still decreases, so the result sits at rounding level.
 */
template <class Step, class Normalise>
int power_loop(std::vector<double>& v, double& lam, double& res, double tol, int max_iter, Step step,
               Normalise normalise) {
    std::vector<double> y;
    double prev = INFINITY;
    for (int it = 1; it <= max_iter; ++it) {
        step(v, y);
        lam = normalise(y);
        double r = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            r = std::max(r, std::abs(y[i] - v[i]));
            scale = std::max(scale, std::abs(y[i]));
        }
        r /= scale;
        v.swap(y);
        res = r;
        if (r <= tol && (r >= prev || r == 0.0)) return it;
        prev = r;
    }
    return max_iter;
}
}  // namespace detail

inline Spectrum power_iteration(const TransferMatrix& tm, double tol = 1e-12, int max_iter = 100000,
                                unsigned threads = 1) {
    const std::size_t n = tm.size();
    Spectrum s;
    std::vector<double> h(n, 1.0), nu(n, 1.0 / static_cast<double>(n));
    double res_r = INFINITY, res_l = INFINITY;
    s.iterations_right = detail::power_loop(
        h, s.lambda, res_r, tol, max_iter, [&](const auto& x, auto& y) { tm.multiply(x, y, threads); },
        [](std::vector<double>& y) {
            const double m = *std::max_element(y.begin(), y.end());
            for (double& v : y) v /= m;
            return m;
        });
    s.iterations_left = detail::power_loop(
        nu, s.lambda_left, res_l, tol, max_iter, [&](const auto& x, auto& y) { tm.multiply_transpose(x, y, threads); },
        [](std::vector<double>& y) {
            double m = 0.0;
            for (double v : y) m += v;
            for (double& v : y) v /= m;
            return m;
        });

    // Residuals of the returned vectors.
    std::vector<double> y;
    tm.multiply(h, y, threads);
    double r = 0.0, hmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r = std::max(r, std::abs(y[i] - s.lambda * h[i]));
        hmax = std::max(hmax, h[i]);
    }
    s.residual_right = r / (s.lambda * hmax);
    tm.multiply_transpose(nu, y, threads);
    r = 0.0;
    double numax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r = std::max(r, std::abs(y[i] - s.lambda * nu[i]));
        numax = std::max(numax, nu[i]);
    }
    s.residual_left = r / (s.lambda * numax);
    const double worst = std::max(s.residual_right, s.residual_left);
    if (!(worst <= tol)) throw convergence_error("power iteration did not reach tolerance", worst);

    double pairing = 0.0;
    for (std::size_t i = 0; i < n; ++i) pairing += h[i] * nu[i];
    for (double& v : h) v /= pairing;
    s.h = std::move(h);
    s.nu = std::move(nu);
    return s;
}

/** \brief Sums `values` (indexed by depth-d words) over common prefixes of length n. */
inline std::vector<double> prefix_marginal(const std::vector<Word>& words, const std::vector<double>& values, int n) {
    const WordIndex idx(n);
    std::vector<double> out(idx.size(), 0.0);
    for (std::size_t i = 0; i < words.size(); ++i) out[idx.rank(words[i].begin())] += values[i];
    return out;
}

/** \brief (L_phi psi)(x) = sum over the one or two preimages y of x of e^{phi(y)} psi(y). */
template <class Psi>
double apply_L_pointwise(const Potential& phi, const Psi& psi, const PlanePoint& x, const Parameters& p) {
    require_inside(x, p);
    double s = 0.0;
    for (int i = 1; i <= 3; ++i) {
        if (!allowed(i, x.rect)) continue;
        const PlanePoint y = inverse_branch(x, i, p);
        s += std::exp(phi(y)) * psi(y);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Hyperbolic preimage sums T_n and partition sums Z_n

namespace detail {
inline void tn_visit(const Potential& phi, const HyperbolicConstants& hc, const Parameters& p, int n,
                     std::vector<double>& T, const PlanePoint& x, int depth, double suffix, double S) {
    if (depth == n) return;
    for (int i = 1; i <= 3; ++i) {
        if (!allowed(i, x.rect)) continue;
        // Prepending symbol i creates one new suffix sum; all shorter ones are already non-negative.
        const double s = suffix + hc.b[i - 1] - 2.0 * hc.c;
        if (s < 0.0) continue;
        const PlanePoint y = inverse_branch(x, i, p);
        const double S2 = S + phi(y);
        T[static_cast<std::size_t>(depth) + 1] += std::exp(S2);
        tn_visit(phi, hc, p, n, T, y, depth + 1, s, S2);
    }
}
}  // namespace detail

/**
 * \brief T_0(x), ..., T_n(x): sums of e^{S_k phi(y)} over preimages y in G^{-k}(x) whose k-cylinder is hyperbolic.
 * T_0 = 1. Branches are pruned as soon as a suffix sum turns negative (no extension can recover).
 */
inline std::vector<double> tn_values(const Potential& phi, const PlanePoint& x, int n, const HyperbolicConstants& hc,
                                     const Parameters& p) {
    if (n < 0) throw domain_error("tn_values requires n >= 0");
    require_inside(x, p);
    std::vector<double> T(static_cast<std::size_t>(n) + 1, 0.0);
    T[0] = 1.0;
    detail::tn_visit(phi, hc, p, n, T, x, 0, 0.0, 0.0);
    return T;
}

inline double tn_value(const Potential& phi, const PlanePoint& x, int n, const HyperbolicConstants& hc,
                       const Parameters& p) {
    return tn_values(phi, x, n, hc, p).back();
}

/** \brief h_n(x) = (1/n) sum_{i=0}^{n-1} lambda^{-i} T_i(x). */
inline double hn_value(const Potential& phi, const PlanePoint& x, int n, double lambda, const HyperbolicConstants& hc,
                       const Parameters& p) {
    if (n < 1) throw domain_error("hn_value requires n >= 1");
    const auto T = tn_values(phi, x, n - 1, hc, p);
    double s = 0.0, w = 1.0;
    for (int i = 0; i < n; ++i, w /= lambda) s += w * T[static_cast<std::size_t>(i)];
    return s / n;
}

/** \brief All hyperbolic admissible words of length n (built backwards with pruning), lexicographic. */
inline std::vector<Word> hyperbolic_words(int n, const HyperbolicConstants& hc) {
    if (n < 1) throw domain_error("hyperbolic_words requires n >= 1");
    std::vector<Word> out;
    Word w(static_cast<std::size_t>(n));
    auto rec = [&](auto&& self, int pos, double suffix) -> void {
        if (pos < 0) {
            out.push_back(w);
            return;
        }
        for (int s = 1; s <= 3; ++s) {
            if (pos + 1 < n && !allowed(s, w[static_cast<std::size_t>(pos) + 1])) continue;
            const double v = suffix + hc.b[s - 1] - 2.0 * hc.c;
            if (v < 0.0) continue;
            w[static_cast<std::size_t>(pos)] = static_cast<Symbol>(s);
            self(self, pos - 1, v);
        }
    };
    rec(rec, n - 1, 0.0);
    std::sort(out.begin(), out.end());
    return out;
}

/** \brief Distortion allowance for y-Hoelder potentials on a hyperbolic n-cylinder. */
inline double distortion_constant(const Potential& phi, int n, const HyperbolicConstants& hc) {
    // Backwards along a hyperbolic suffix of length m the vertical distance is at most
    // min(1, e^{A_sup - 2 c m}) (the last symbol may contribute at most A_sup).
    double s = 0.0;
    for (int m = 1; m <= n; ++m) s += std::pow(std::min(1.0, std::exp(hc.A_sup - 2.0 * hc.c * m)), phi.holder_delta());
    return phi.holder_C() * s;
}

struct ZnRow {
    int n;
    std::size_t hyperbolic_count;
    double unpadded;  // sum of e^{S_n phi(sample)}
    double padded;    // unpadded * e^{K_0}
};

inline std::vector<ZnRow> zn_values(const Potential& phi, int n_max, const HyperbolicConstants& hc,
                                    const Parameters& p) {
    std::vector<ZnRow> rows;
    for (int n = 1; n <= n_max; ++n) {
        ZnRow r{n, 0, 0.0, 0.0};
        for (const Word& w : hyperbolic_words(n, hc)) {
            double S = 0.0;
            for (const PlanePoint& q : cylinder_orbit(w, p)) S += phi(q);
            r.unpadded += std::exp(S);
            ++r.hyperbolic_count;
        }
        r.padded = r.unpadded * std::exp(distortion_constant(phi, n, hc));
        rows.push_back(r);
    }
    return rows;
}

struct LimitacaoReport {
    std::vector<double> upper;  // lambda^{-n} Z_n, n = 1..N
    std::vector<double> lower;  // (1/n) sum_{j<n} lambda^{-j} Z_j with Z_0 = 1, n = 1..N
    double K3_upper = 0.0;      // max of upper over the first half
    bool upper_bounded = false; // second half never exceeds the first-half maximum
    bool lower_persistent = false;  // lower(N) >= 0.75 lower(N/2)
};

/** \brief Finite check of the two-sided bound on lambda^{-n} Z_n. */
inline LimitacaoReport limitacao_check(const Potential& phi, double lambda, int N, const HyperbolicConstants& hc,
                                       const Parameters& p) {
    if (N < 4) throw domain_error("limitacao_check requires N >= 4");
    const auto rows = zn_values(phi, N, hc, p);
    LimitacaoReport rep;
    double cum = 1.0;  // j = 0 term
    for (int n = 1; n <= N; ++n) {
        rep.upper.push_back(rows[static_cast<std::size_t>(n) - 1].unpadded / std::pow(lambda, n));
        rep.lower.push_back(cum / n);
        cum += rep.upper.back();
    }
    const int half = N / 2;
    for (int n = 1; n <= half; ++n) rep.K3_upper = std::max(rep.K3_upper, rep.upper[static_cast<std::size_t>(n) - 1]);
    rep.upper_bounded = true;
    for (int n = half + 1; n <= N; ++n)
        if (rep.upper[static_cast<std::size_t>(n) - 1] > rep.K3_upper) rep.upper_bounded = false;
    rep.lower_persistent = rep.lower.back() >= 0.75 * rep.lower[static_cast<std::size_t>(half) - 1];
    return rep;
}

struct TnResidualRow {
    int k;
    double residual;        // max_x lambda^{-k} |L T_k(x) - T_{k+1}(x)|
    std::size_t count_D;    // (k+1)-words whose k-prefix and full word differ in hyperbolicity
    std::size_t count_A;    // the paper's A_{k+1}: not hyperbolic, last k symbols hyperbolic
    double bound;           // lambda^{-k} #D e^{(k+1) sup phi}
    double bound_paper;     // lambda^{-k} #A e^{(k+1) sup phi}
};

struct TnResidualReport {
    std::vector<TnResidualRow> rows;
    int k0 = 0;            // first k from which the residual strictly decreases through kmax
    bool decreasing = false;  // k0 <= kmax - 4
    bool below_bound = false;
};

inline TnResidualReport tn_recursion_residual(const Potential& phi, double lambda, int kmax,
                                              const std::vector<PlanePoint>& points, const HyperbolicConstants& hc,
                                              const Parameters& p, unsigned threads = 1) {
    if (kmax < 1) throw domain_error("tn_recursion_residual requires kmax >= 1");
    TnResidualReport rep;
    std::vector<std::vector<double>> per_point(points.size());
    parallel_for(points.size(), threads, [&](std::size_t i) {
        const PlanePoint& x = points[i];
        const auto Tx = tn_values(phi, x, kmax + 1, hc, p);
        std::vector<double> LT(static_cast<std::size_t>(kmax) + 1, 0.0);
        for (int s = 1; s <= 3; ++s) {
            if (!allowed(s, x.rect)) continue;
            const PlanePoint y = inverse_branch(x, s, p);
            const auto Ty = tn_values(phi, y, kmax, hc, p);
            const double w = std::exp(phi(y));
            for (int k = 0; k <= kmax; ++k) LT[static_cast<std::size_t>(k)] += w * Ty[static_cast<std::size_t>(k)];
        }
        std::vector<double> r(static_cast<std::size_t>(kmax) + 1);
        for (int k = 0; k <= kmax; ++k)
            r[static_cast<std::size_t>(k)] =
                std::abs(LT[static_cast<std::size_t>(k)] - Tx[static_cast<std::size_t>(k) + 1]) / std::pow(lambda, k);
        per_point[i] = std::move(r);
    });
    rep.below_bound = true;
    for (int k = 0; k <= kmax; ++k) {
        TnResidualRow row{k, 0.0, 0, 0, 0.0, 0.0};
        for (const auto& r : per_point) row.residual = std::max(row.residual, r[static_cast<std::size_t>(k)]);
        for (const Word& u : enumerate_words(k + 1)) {
            const bool full = is_hyperbolic_cylinder(u, hc);
            const bool head = k == 0 || is_hyperbolic_cylinder(Word(u.begin(), u.end() - 1), hc);
            const bool tail = k == 0 || is_hyperbolic_cylinder(Word(u.begin() + 1, u.end()), hc);
            row.count_D += (full != head);
            row.count_A += (!full && tail);
        }
        const double scale = std::exp((k + 1) * phi.sup()) / std::pow(lambda, k);
        row.bound = scale * static_cast<double>(row.count_D);
        row.bound_paper = scale * static_cast<double>(row.count_A);
        if (row.residual > row.bound * (1.0 + 1e-12)) rep.below_bound = false;
        rep.rows.push_back(row);
    }
    rep.k0 = kmax;
    while (rep.k0 > 0 && rep.rows[static_cast<std::size_t>(rep.k0) - 1].residual > rep.rows[static_cast<std::size_t>(rep.k0)].residual)
        --rep.k0;
    rep.decreasing = rep.k0 <= kmax - 4;
    return rep;
}

struct DistortionReport {
    int n;
    std::size_t cylinders;
    double max_spread;  // max |S_n phi(x) - S_n phi(x')| over two in-cylinder points
    double bound;       // distortion_constant(phi, n)
};

/** \brief Birkhoff-sum spread on hyperbolic n-cylinders, at the sample and at a second in-cylinder point. */
inline DistortionReport distortion_report(const Potential& phi, int n, const HyperbolicConstants& hc,
                                          const Parameters& p) {
    DistortionReport rep{n, 0, 0.0, distortion_constant(phi, n, hc)};
    for (const Word& w : hyperbolic_words(n, hc)) {
        const Box b = rect_box(w.back(), p);
        const PlanePoint other{w.back(), b.x0 + 0.2 * b.width(), b.y0 + 0.8 * b.height()};
        double s1 = 0.0, s2 = 0.0;
        for (const PlanePoint& q : cylinder_orbit(w, p)) s1 += phi(q);
        for (const PlanePoint& q : cylinder_orbit_from(w, other, p)) s2 += phi(q);
        rep.max_spread = std::max(rep.max_spread, std::abs(s1 - s2));
        ++rep.cylinders;
    }
    return rep;
}

}  // namespace horseshoe
