#pragma once

#include <cmath>
#include <algorithm>
#include <sstream>
#include <string>

#include "horseshoe/maps.hpp"

namespace horseshoe {

enum class PotentialFamily { constant, affine_in_y, center_log_derivative };

inline std::string family_name(PotentialFamily f) {
    switch (f) {
        case PotentialFamily::constant: return "constant";
        case PotentialFamily::affine_in_y: return "affine_in_y";
        case PotentialFamily::center_log_derivative: return "center_log_derivative";
    }
    return "unknown";
}

inline PotentialFamily parse_family(const std::string& s) {
    if (s == "constant") return PotentialFamily::constant;
    if (s == "affine_in_y") return PotentialFamily::affine_in_y;
    if (s == "center_log_derivative") return PotentialFamily::center_log_derivative;
    throw config_error("unknown potential family '" + s + "'");
}

/** \brief Variation gate: sup phi - inf phi must stay below log(omega)/2. */
inline constexpr double variation_gate = log_golden / 2.0;

/**
 * \brief Hoelder potential on the rectangles.
 *  - constant:               phi = a
 *  - affine_in_y:            phi = a + b y   (local y)
 *  - center_log_derivative:  phi = a + t log |J^c G|, with J^c = g0'(y) on R1, R3 and 1/sigma on R2
 * sup/inf are certified over the rectangle domains, which contain Lambda.
 */
class Potential {
public:
    static Potential constant(double a) { return Potential(PotentialFamily::constant, a, 0.0, 0.0, 0.25); }
    static Potential affine_in_y(double a, double b) {
        return Potential(PotentialFamily::affine_in_y, a, b, 0.0, 0.25);
    }
    static Potential center_log_derivative(double t, double sigma) {
        if (!(sigma > 0.0 && sigma < 1.0)) throw domain_error("sigma must lie in (0,1)");
        return Potential(PotentialFamily::center_log_derivative, 0.0, 0.0, t, sigma);
    }

    PotentialFamily family() const noexcept { return family_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double t() const noexcept { return t_; }

    double operator()(const PlanePoint& q) const noexcept {
        switch (family_) {
            case PotentialFamily::constant: return a_;
            case PotentialFamily::affine_in_y: return a_ + b_ * q.y;
            case PotentialFamily::center_log_derivative:
                return a_ + (q.rect == 2 ? t_ * std::log(1.0 / sigma_) : t_ * std::log(g0_prime(q.y)));
        }
        return 0.0;
    }

    double sup() const noexcept { return bounds().second; }
    double inf() const noexcept { return bounds().first; }
    double variation() const noexcept { return sup() - inf(); }

    /** \brief Hoelder constant C and exponent delta (overridable from configuration). */
    double holder_C() const noexcept { return holder_C_; }
    double holder_delta() const noexcept { return holder_delta_; }
    void set_holder(double C, double delta) {
        if (!(C >= 0.0) || !(delta > 0.0 && delta <= 1.0)) throw config_error("invalid Hoelder constants");
        holder_C_ = C;
        holder_delta_ = delta;
    }

    /** \brief phi + c (same family, shifted level). */
    Potential shifted(double c) const {
        Potential q = *this;
        q.a_ += c;
        return q;
    }

    std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        os << family_name(family_);
        switch (family_) {
            case PotentialFamily::constant: os << "(a=" << a_ << ")"; break;
            case PotentialFamily::affine_in_y: os << "(a=" << a_ << ", b=" << b_ << ")"; break;
            case PotentialFamily::center_log_derivative: os << "(t=" << t_ << ")"; break;
        }
        return os.str();
    }

private:
    Potential(PotentialFamily f, double a, double b, double t, double sigma)
        : family_(f), a_(a), b_(b), t_(t), sigma_(sigma) {
        switch (f) {
            case PotentialFamily::constant: holder_C_ = 0.0; break;
            case PotentialFamily::affine_in_y: holder_C_ = std::abs(b); break;
            // |d/dy log g0'(y)| = 2(e-1)/(y(1-e)+e) <= 2(e-1) on [0,1]
            case PotentialFamily::center_log_derivative: holder_C_ = std::abs(t) * 2.0 * (euler_e - 1.0); break;
        }
    }

    std::pair<double, double> bounds() const noexcept {
        switch (family_) {
            case PotentialFamily::constant: return {a_, a_};
            case PotentialFamily::affine_in_y: return {a_ + std::min(b_, 0.0), a_ + std::max(b_, 0.0)};
            case PotentialFamily::center_log_derivative: {
                // log g0' ranges over [-1, 1] on [0,1]; log(1/sigma) > 1 on R2.
                const double lo = -1.0, hi = std::log(1.0 / sigma_);
                return t_ >= 0.0 ? std::pair{a_ + t_ * lo, a_ + t_ * hi} : std::pair{a_ + t_ * hi, a_ + t_ * lo};
            }
        }
        return {0.0, 0.0};
    }

    PotentialFamily family_;
    double a_, b_, t_, sigma_;
    double holder_C_ = 0.0;
    double holder_delta_ = 1.0;
};

inline bool admissible(const Potential& phi) noexcept { return phi.variation() < variation_gate; }

/** \brief Same gate under its descriptive name: sup phi - inf phi < log(omega)/2. */
inline bool check_variation(const Potential& phi) noexcept { return admissible(phi); }

inline void require_admissible(const Potential& phi) {
    if (!admissible(phi)) {
        std::ostringstream os;
        os.precision(10);
        os << "potential " << phi.describe() << " rejected: sup - inf = " << phi.variation()
           << " is not below log(omega)/2 = " << variation_gate
           << " (small-variation condition, eq. variacaopequena)";
        throw admissibility_error(os.str());
    }
}

}  // namespace horseshoe
