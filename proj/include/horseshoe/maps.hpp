#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "horseshoe/errors.hpp"
#include "horseshoe/symbolic.hpp"

namespace horseshoe {

/** \brief Geometric parameters of the horseshoe: 0<rho<1/3, 0<sigma<1/3, beta>6, 3<beta1<4. */
struct Parameters {
    double rho = 0.25;
    double sigma = 0.25;
    double beta = 6.5;
    double beta1 = 3.5;

    double alpha() const noexcept { return 1.0 / rho; }

    void validate() const {
        auto fail = [](const std::string& m) { throw config_error("parameter constraint violated: " + m); };
        if (!(rho > 0.0 && rho < 1.0 / 3.0)) fail("0 < rho < 1/3");
        if (!(sigma > 0.0 && sigma < 1.0 / 3.0)) fail("0 < sigma < 1/3");
        if (!(beta > 6.0)) fail("beta > 6");
        if (!(beta1 > 3.0 && beta1 < 4.0)) fail("3 < beta1 < 4");
    }
};

enum class Plane { P0, P1 };

/** \brief Plane carrying rectangle r: R1, R2 lie in P0 (z = 0), R3 in P1 (z = 5/6). */
constexpr Plane plane_of(int rect) noexcept { return rect == 3 ? Plane::P1 : Plane::P0; }

/** \brief A point of R1 u R2 u R3; y is local (R3 is stored with y - 2). */
struct PlanePoint {
    int rect;
    double x;
    double y;
};

/** \brief Raw plane coordinates before rectangle membership is decided. */
struct PlaneCoords {
    Plane plane;
    double x;
    double y;
};

struct Box {
    double x0, x1, y0, y1;
    double width() const noexcept { return x1 - x0; }
    double height() const noexcept { return y1 - y0; }
    bool contains(double x, double y) const noexcept { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

/** \brief Local-coordinate bounds of rectangle r. */
inline Box rect_box(int rect, const Parameters& p) {
    switch (rect) {
        case 1:
        case 3: return {0.0, p.rho, 0.0, 1.0};
        case 2: return {0.75 - p.rho, 0.75, 0.0, p.sigma};
        default: throw invalid_symbol_error("rectangle index must be 1, 2 or 3");
    }
}

/** \brief Center of rectangle r (the anchor used for cylinder samples). */
inline PlanePoint anchor(int rect, const Parameters& p) {
    const Box b = rect_box(rect, p);
    return {rect, 0.5 * (b.x0 + b.x1), 0.5 * (b.y0 + b.y1)};
}

namespace detail {
// Closed forms continuous on [0,1]; the public wrappers enforce the stated open domains.
inline double f_ext(double y) noexcept { return euler_e * y / (y * (euler_e - 1.0) + 1.0); }
inline double g0_ext(double y) noexcept { return y / (y * (1.0 - euler_e) + euler_e); }
}  // namespace detail

/** \brief f(y) = 1/(1 - (1 - 1/y) e^{-1}) on (0,1]. */
inline double f_map(double y) {
    if (!(y > 0.0)) throw domain_error("f_map requires y > 0");
    return 1.0 / (1.0 - (1.0 - 1.0 / y) / euler_e);
}

/** \brief g0(y) = y/(y(1-e)+e), the inverse of f. */
inline double g0(double y) {
    if (!(y > 0.0)) throw domain_error("g0 requires y > 0");
    return detail::g0_ext(y);
}

/** \brief g1(y) = 1 - y/sigma on [0, sigma]. */
inline double g1(double y, double sigma) {
    if (y < 0.0 || y > sigma) throw domain_error("g1 requires 0 <= y <= sigma");
    return 1.0 - y / sigma;
}

inline double f_prime(double y) noexcept {
    const double d = y * (euler_e - 1.0) + 1.0;
    return euler_e / (d * d);
}

inline double g0_prime(double y) noexcept {
    const double d = y * (1.0 - euler_e) + euler_e;
    return euler_e / (d * d);
}

/** \brief Rectangle containing (x,y) in the given plane; ties go to the lower index. */
inline std::optional<PlanePoint> locate(PlaneCoords c, const Parameters& p) {
    if (c.plane == Plane::P0) {
        if (rect_box(1, p).contains(c.x, c.y)) return PlanePoint{1, c.x, c.y};
        if (rect_box(2, p).contains(c.x, c.y)) return PlanePoint{2, c.x, c.y};
        return std::nullopt;
    }
    if (rect_box(3, p).contains(c.x, c.y)) return PlanePoint{3, c.x, c.y};
    return std::nullopt;
}

inline void require_inside(const PlanePoint& q, const Parameters& p) {
    if (!rect_box(q.rect, p).contains(q.x, q.y))
        throw domain_error("point lies outside rectangle R" + std::to_string(q.rect));
}

/** \brief Raw image of q under the branch of G for its rectangle. */
inline PlaneCoords G_coords(const PlanePoint& q, const Parameters& p) {
    require_inside(q, p);
    if (q.rect == 2) return {Plane::P1, p.alpha() * (0.75 - q.x), 1.0 - q.y / p.sigma};
    return {Plane::P0, p.alpha() * q.x, detail::g0_ext(q.y)};
}

/** \brief G(q); std::nullopt when the image escapes every rectangle. */
inline std::optional<PlanePoint> apply_G(const PlanePoint& q, const Parameters& p) {
    return locate(G_coords(q, p), p);
}

/** \brief Preimage of q lying in rectangle `source` (requires A[source][q.rect] = 1). */
inline PlanePoint inverse_branch(const PlanePoint& q, int source, const Parameters& p) {
    check_symbol(source);
    check_symbol(q.rect);
    if (!allowed(source, q.rect))
        throw transition_error("transition " + std::to_string(source) + "->" + std::to_string(q.rect) +
                               " is not allowed");
    require_inside(q, p);
    if (source == 2) return {2, 0.75 - p.rho * q.x, p.sigma * (1.0 - q.y)};
    return {source, p.rho * q.x, detail::f_ext(q.y)};
}

/**
 * \brief Orbit of the point of the cylinder R^n(w) obtained by pulling `end` back along w.
 * Entry j is G^j of the returned sample; entry n-1 is `end`, which must lie in R_{w_{n-1}}.
 */
inline std::vector<PlanePoint> cylinder_orbit_from(const Word& w, const PlanePoint& end, const Parameters& p) {
    if (w.empty()) throw domain_error("cylinder word must be non-empty");
    for (Symbol s : w) check_symbol(s);
    if (end.rect != w.back()) throw domain_error("end point is not in the last rectangle of the word");
    std::vector<PlanePoint> orbit(w.size());
    orbit.back() = end;
    for (std::size_t j = w.size() - 1; j-- > 0;) orbit[j] = inverse_branch(orbit[j + 1], w[j], p);
    return orbit;
}

inline std::vector<PlanePoint> cylinder_orbit(const Word& w, const Parameters& p) {
    if (w.empty()) throw domain_error("cylinder word must be non-empty");
    return cylinder_orbit_from(w, anchor(w.back(), p), p);
}

/** \brief Representative point of R^n(w): the anchor of R_{w_{n-1}} pulled back along w. */
inline PlanePoint cylinder_sample(const Word& w, const Parameters& p) { return cylinder_orbit(w, p).front(); }

/** \brief Geometric footprint of R^n(w): branches act coordinatewise and monotonically, so corners suffice. */
inline Box cylinder_footprint(const Word& w, const Parameters& p) {
    const Box b = rect_box(w.back(), p);
    const auto lo = cylinder_orbit_from(w, {w.back(), b.x0, b.y0}, p).front();
    const auto hi = cylinder_orbit_from(w, {w.back(), b.x1, b.y1}, p).front();
    return {std::min(lo.x, hi.x), std::max(lo.x, hi.x), std::min(lo.y, hi.y), std::max(lo.y, hi.y)};
}

/** \brief First n symbols of the itinerary of q; escape_error if the orbit leaves the rectangles. */
inline Word itinerary(PlanePoint q, int n, const Parameters& p) {
    Word w;
    w.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        w.push_back(static_cast<Symbol>(q.rect));
        if (j + 1 == n) break;
        auto next = apply_G(q, p);
        if (!next) throw escape_error("orbit escapes at step " + std::to_string(j + 1), j + 1);
        q = *next;
    }
    return w;
}

/** \brief S_n phi(q) = sum_{j<n} phi(G^j q). */
template <class Phi>
double birkhoff_sum(const Phi& phi, PlanePoint q, int n, const Parameters& p) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
        s += phi(q);
        if (j + 1 == n) break;
        auto next = apply_G(q, p);
        if (!next) throw escape_error("orbit escapes at step " + std::to_string(j + 1), j + 1);
        q = *next;
    }
    return s;
}

/** \brief ||DG(q)^{-1}|| restricted to the center (vertical) direction. */
inline double dG_inverse_center_norm(const PlanePoint& q, const Parameters& p) {
    require_inside(q, p);
    if (q.rect == 2) return p.sigma;
    return 1.0 / g0_prime(q.y);
}

// ---------------------------------------------------------------------------
// The 3D map F on the slabs z in [0,1/6] and z in [5/6,1].

struct Point3 {
    double x, y, z;
};

inline constexpr double slab0_hi = 1.0 / 6.0;
inline constexpr double slab1_lo = 5.0 / 6.0;

/** \brief Slab index (0 or 1) containing z, or -1. */
constexpr int slab_of(double z) noexcept {
    if (z >= 0.0 && z <= slab0_hi) return 0;
    if (z >= slab1_lo && z <= 1.0) return 1;
    return -1;
}

/** \brief F0 on slab 0, F1 on slab 1. */
inline Point3 apply_F(const Point3& X, const Parameters& p) {
    if (!(X.x >= 0.0 && X.x <= 1.0 && X.y >= 0.0 && X.y <= 1.0))
        throw domain_error("apply_F requires (x,y) in the unit square");
    switch (slab_of(X.z)) {
        case 0: return {p.rho * X.x, detail::f_ext(X.y), p.beta * X.z};
        case 1: return {0.75 - p.rho * X.x, p.sigma * (1.0 - X.y), p.beta1 * (X.z - slab1_lo)};
        default: throw domain_error("apply_F requires z in [0,1/6] or [5/6,1]");
    }
}

/** \brief Image box of branch b of F. */
inline std::array<double, 6> F_image_bounds(int branch, const Parameters& p) {
    if (branch == 0) return {0.0, p.rho, 0.0, 1.0, 0.0, p.beta / 6.0};
    if (branch == 1) return {0.75 - p.rho, 0.75, 0.0, p.sigma, 0.0, p.beta1 / 6.0};
    throw domain_error("F branch must be 0 or 1");
}

/** \brief Inverse of branch b of F; Y must lie in that branch's image. */
inline Point3 apply_F_inverse(const Point3& Y, int branch, const Parameters& p) {
    const auto b = F_image_bounds(branch, p);
    if (!(Y.x >= b[0] && Y.x <= b[1] && Y.y >= b[2] && Y.y <= b[3] && Y.z >= b[4] && Y.z <= b[5]))
        throw domain_error("point is outside the image of branch " + std::to_string(branch));
    if (branch == 0) return {p.alpha() * Y.x, detail::g0_ext(Y.y), Y.z / p.beta};
    return {p.alpha() * (0.75 - Y.x), 1.0 - Y.y / p.sigma, Y.z / p.beta1 + slab1_lo};
}

/** \brief Branch of F^{-1} that realises G on a point of rectangle r. */
constexpr int F_branch_for_rect(int rect) noexcept { return rect == 2 ? 1 : 0; }

/** \brief Projection pi: forget z, landing in P0 for slab 0 and P1 for slab 1. */
inline PlaneCoords project_pi(const Point3& Y) {
    switch (slab_of(Y.z)) {
        case 0: return {Plane::P0, Y.x, Y.y};
        case 1: return {Plane::P1, Y.x, Y.y};
        default: throw domain_error("project_pi requires z in [0,1/6] or [5/6,1]");
    }
}

}  // namespace horseshoe
