#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "horseshoe/equilibrium.hpp"
#include "horseshoe/maps.hpp"
#include "horseshoe/parallel.hpp"
#include "horseshoe/symbolic.hpp"

namespace horseshoe {

/**
 * \brief max over samples of |pi(F^{-1}(Y)) - G(pi(Y))|, with Y = F(X) for X drawn uniformly in a slab box.
 * Samples whose image leaves the slabs or the rectangles are redrawn. A plane mismatch counts as infinity.
 */
inline double semiconjugacy_residual(const Parameters& p, int n_samples, std::uint64_t seed, unsigned threads = 1) {
    p.validate();
    std::vector<double> res(static_cast<std::size_t>(n_samples));
    parallel_for(res.size(), threads, [&](std::size_t i) {
        Rng rng(seed, i);
        for (;;) {
            const int branch = rng.uniform() < 0.5 ? 0 : 1;
            const double z = branch == 0 ? rng.uniform(0.0, slab0_hi) : rng.uniform(slab1_lo, 1.0);
            const Point3 X{rng.uniform(), rng.uniform(), z};
            const Point3 Y = apply_F(X, p);
            if (slab_of(Y.z) < 0) continue;
            const auto base = locate(project_pi(Y), p);
            if (!base) continue;
            const PlaneCoords lhs = project_pi(apply_F_inverse(Y, F_branch_for_rect(base->rect), p));
            const PlaneCoords rhs = G_coords(*base, p);
            res[i] = lhs.plane != rhs.plane ? INFINITY : std::max(std::abs(lhs.x - rhs.x), std::abs(lhs.y - rhs.y));
            return;
        }
    });
    return *std::max_element(res.begin(), res.end());
}

/** \brief Section of pi: z = 1/12 over P0 and z = 11/12 over P1 (or custom heights). */
inline Point3 section_point(const PlanePoint& X, double z0 = 1.0 / 12.0, double z1 = 11.0 / 12.0) {
    const double z = plane_of(X.rect) == Plane::P0 ? z0 : z1;
    if (slab_of(z) != (plane_of(X.rect) == Plane::P0 ? 0 : 1)) throw lift_error("section height outside its slab");
    return {X.x, X.y, z};
}

/** \brief Fiber length: every fiber pi^{-1}(X) is a vertical segment of length 1/6. */
inline constexpr double fiber_length = 1.0 / 6.0;

struct FiberReport {
    double epsilon = 0.0;
    std::vector<int> n_values;
    std::vector<int> counts;  // maximal (n, eps)-separated subsets of the fiber (greedy on a grid)
    bool constant = false;
};

/**
 * \brief (n, eps)-separated counts in the fiber over X under F^{-1}, following the itinerary of X.
 * Points are separated when max_{0<=j<n} |F^{-j} Y - F^{-j} Y'| > eps.
 */
inline FiberReport fiber_separated_counts(const PlanePoint& X, const Word& itin, const std::vector<int>& n_values,
                                          double eps, const Parameters& p, int grid = 4001) {
    if (itin.empty() || itin[0] != X.rect) throw lift_error("itinerary does not start at the base point");
    FiberReport rep;
    rep.epsilon = eps;
    rep.n_values = n_values;
    const double z_lo = plane_of(X.rect) == Plane::P0 ? 0.0 : slab1_lo;
    for (int n : n_values) {
        if (n < 1 || n > static_cast<int>(itin.size())) throw lift_error("itinerary too short for the fiber depth");
        // Orbits of all grid points of the fiber (one vector of z's per step; x, y are shared).
        std::vector<std::vector<double>> zs(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(grid)));
        for (int g = 0; g < grid; ++g) {
            Point3 Y{X.x, X.y, z_lo + fiber_length * g / (grid - 1)};
            for (int j = 0; j < n; ++j) {
                zs[static_cast<std::size_t>(j)][static_cast<std::size_t>(g)] = Y.z;
                if (j + 1 < n) {
                    Y = apply_F_inverse(Y, F_branch_for_rect(itin[static_cast<std::size_t>(j)]), p);
                    if (slab_of(Y.z) < 0) throw lift_error("fiber orbit left the slabs");
                }
            }
        }
        int count = 1, last = 0;
        for (int g = 1; g < grid; ++g) {
            double dn = 0.0;
            for (int j = 0; j < n; ++j)
                dn = std::max(dn, std::abs(zs[static_cast<std::size_t>(j)][static_cast<std::size_t>(g)] -
                                           zs[static_cast<std::size_t>(j)][static_cast<std::size_t>(last)]));
            if (dn > eps) {
                ++count;
                last = g;
            }
        }
        rep.counts.push_back(count);
    }
    rep.constant = std::all_of(rep.counts.begin(), rep.counts.end(), [&](int c) { return c == rep.counts.front(); });
    return rep;
}

using Observable3 = std::function<double(const Point3&)>;

namespace detail {
/** Visits every chain path of length d + extra with its mu-weight. */
template <class Visit>
void for_each_path(const EquilibriumState& st, int extra, Visit&& visit) {
    const int d = st.depth();
    Word u(static_cast<std::size_t>(d + extra));
    auto rec = [&](auto&& self, std::size_t state, int len, double w) -> void {
        if (len == d + extra) {
            visit(u, w);
            return;
        }
        for (auto k = st.tm.col_ptr[state]; k < st.tm.col_ptr[state + 1]; ++k) {
            const auto e = st.tm.entry_of[k];
            const std::size_t next = st.tm.row[e];
            u[static_cast<std::size_t>(len)] = st.tm.words[next].back();
            self(self, next, len + 1, w * st.prob[e]);
        }
    };
    for (std::size_t b = 0; b < st.tm.size(); ++b) {
        std::copy(st.tm.words[b].begin(), st.tm.words[b].end(), u.begin());
        rec(rec, b, d, st.mu[b]);
    }
}

inline Point3 lift_point(const std::vector<PlanePoint>& orbit, const Word& u, int n, const Parameters& p, double z0,
                         double z1) {
    Point3 Q = section_point(orbit[0], z0, z1);
    for (int j = 0; j < n; ++j) {
        Q = apply_F_inverse(Q, F_branch_for_rect(u[static_cast<std::size_t>(j)]), p);
        if (slab_of(Q.z) < 0) throw lift_error("lifted point left the slabs");
    }
    const PlanePoint& base = orbit[static_cast<std::size_t>(n)];
    if (slab_of(Q.z) != (plane_of(base.rect) == Plane::P0 ? 0 : 1) || std::abs(Q.x - base.x) > 1e-9 ||
        std::abs(Q.y - base.y) > 1e-9)
        throw lift_error("branch sequence inconsistent with the base orbit");
    return Q;
}
}  // namespace detail

/**
 * \brief int psi d mu*_n: expectation over X ~ mu of psi(F^{-n}(section(X))), by exact quadrature over
 * the mu-chain paths of length d + 1 + n (X is the sample point of each path's cylinder).
 */
inline double lift_integral(const EquilibriumState& st, const Observable3& psi, int n, double z0 = 1.0 / 12.0,
                            double z1 = 11.0 / 12.0) {
    if (n < 0) throw domain_error("lift depth must be >= 0");
    double total = 0.0;
    detail::for_each_path(st, 1 + n, [&](const Word& u, double w) {
        const auto orbit = cylinder_orbit(u, st.params);
        total += w * psi(detail::lift_point(orbit, u, n, st.params, z0, z1));
    });
    return total;
}

/** \brief int (psi o F^{-1}) d mu*_n, with F^{-1} taken on the branch of the base rectangle. */
inline double lift_integral_pullback(const EquilibriumState& st, const Observable3& psi, int n) {
    double total = 0.0;
    detail::for_each_path(st, 1 + n, [&](const Word& u, double w) {
        const auto orbit = cylinder_orbit(u, st.params);
        const Point3 Q = detail::lift_point(orbit, u, n, st.params, 1.0 / 12.0, 11.0 / 12.0);
        total += w * psi(apply_F_inverse(Q, F_branch_for_rect(u[static_cast<std::size_t>(n)]), st.params));
    });
    return total;
}

/** \brief The base integral int phi d mu at cylinder level (same discretisation as the pressure identity). */
inline double base_integral_phi(const EquilibriumState& st) {
    double s = 0.0;
    for (std::size_t e = 0; e < st.tm.nnz(); ++e) s += st.mu[st.tm.col[e]] * st.prob[e] * st.tm.phi[e];
    return s;
}

struct LiftRow {
    int n;
    double lifted;       // int phi o pi d mu*_n
    double difference;   // |lifted - int phi d mu|
    double alt_section;  // same integral with the section z = 0.02 / 0.9
    double z_observable; // int z d mu*_n
    double invariance_gap;  // |int z d mu*_{n+1} - int z o F^{-1} d mu*_n|
};

struct LiftReport {
    double base = 0.0;
    std::vector<LiftRow> rows;
    double max_difference = 0.0;
};

inline LiftReport lift_report(const EquilibriumState& st, int n_max) {
    LiftReport rep;
    rep.base = base_integral_phi(st);
    const Observable3 phi_pi = [&](const Point3& Q) {
        const auto b = locate(project_pi(Q), st.params);
        if (!b) throw lift_error("lifted point projects outside the rectangles");
        return st.phi(*b);
    };
    const Observable3 zfun = [](const Point3& Q) { return Q.z; };
    std::vector<double> zint;
    for (int n = 0; n <= n_max + 1; ++n) zint.push_back(lift_integral(st, zfun, n));
    for (int n = 0; n <= n_max; ++n) {
        LiftRow r{};
        r.n = n;
        r.lifted = lift_integral(st, phi_pi, n);
        r.difference = std::abs(r.lifted - rep.base);
        r.alt_section = lift_integral(st, phi_pi, n, 0.02, 0.9);
        r.z_observable = zint[static_cast<std::size_t>(n)];
        r.invariance_gap = std::abs(zint[static_cast<std::size_t>(n) + 1] - lift_integral_pullback(st, zfun, n));
        rep.max_difference = std::max(rep.max_difference, r.difference);
        rep.rows.push_back(r);
    }
    return rep;
}

/** \brief The lifted potential phi o pi (independent of z inside each slab). */
inline Observable3 lifted_potential(const Potential& phi, const Parameters& p) {
    return [phi, p](const Point3& Q) {
        const auto b = locate(project_pi(Q), p);
        if (!b) throw lift_error("point projects outside the rectangles");
        return phi(*b);
    };
}

/**
 * \brief z-independence certificate: max |phi~(x,y,z1) - phi~(x,y,z2)| over `pairs` random (x,y) in the
 * rectangles and `z_values` heights per slab. Exactly 0 for a lift through pi.
 */
inline double lifted_z_deviation(const Potential& phi, const Parameters& p, int pairs, int z_values, std::uint64_t seed) {
    const auto lift = lifted_potential(phi, p);
    double dev = 0.0;
    for (int i = 0; i < pairs; ++i) {
        Rng rng(seed, static_cast<std::uint64_t>(i));
        const int rect = 1 + static_cast<int>(rng.next() % 3);
        const Box b = rect_box(rect, p);
        const double x = rng.uniform(b.x0, b.x1), y = rng.uniform(b.y0, b.y1);
        const double lo = plane_of(rect) == Plane::P0 ? 0.0 : slab1_lo;
        const double ref = lift({x, y, lo});
        for (int k = 1; k < z_values; ++k)
            dev = std::max(dev, std::abs(lift({x, y, lo + fiber_length * k / (z_values - 1)}) - ref));
    }
    return dev;
}

struct CloudPoint {
    Point3 point;
    int generation;
};

/** \brief 3D point cloud of horseshoe generations 1..n: the section lift of every cylinder sample point. */
inline std::vector<CloudPoint> generation_point_cloud(int n, const Parameters& p) {
    check_depth(n, 12);
    std::vector<CloudPoint> out;
    for (int g = 1; g <= n; ++g)
        for (const Word& w : enumerate_words(g)) out.push_back({section_point(cylinder_sample(w, p)), g});
    return out;
}

struct EntropyEqualityReport {
    int n = 40;
    double word_growth = 0.0;     // (1/n) log N(n)
    double ratio_growth = 0.0;    // log(N(n+1)/N(n))
    double log_omega = log_golden;
    double fiber_entropy = 0.0;   // growth rate of fiber separated counts (0 when counts are constant)
    double htop_F = 0.0;          // h_top(G) + fiber entropy, from the ratio estimate
};

inline EntropyEqualityReport entropy_equality_report(const FiberReport& fiber, int n = 40) {
    EntropyEqualityReport rep;
    rep.n = n;
    const BigInt Nn = count_words(n), Nn1 = count_words(n + 1);
    rep.word_growth = std::log(Nn.convert_to<double>()) / n;
    rep.ratio_growth = std::log(Nn1.convert_to<double>() / Nn.convert_to<double>());
    if (fiber.counts.size() >= 2) {
        const int n0 = fiber.n_values.front(), n1 = fiber.n_values.back();
        rep.fiber_entropy = (std::log(fiber.counts.back()) - std::log(fiber.counts.front())) / (n1 - n0);
    }
    rep.htop_F = rep.ratio_growth + rep.fiber_entropy;
    return rep;
}

}  // namespace horseshoe
