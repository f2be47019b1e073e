#pragma once

#include <stdexcept>
#include <string>

namespace horseshoe {

/** \brief Root of every error raised by the library. */
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** \brief A symbol outside {1,2,3}. */
struct invalid_symbol_error : error {
    using error::error;
};

/** \brief Enumeration or storage would exceed the configured depth cap. */
struct capacity_error : error {
    using error::error;
};

/** \brief Argument outside the mathematical domain of an operation. */
struct domain_error : error {
    using error::error;
};

/** \brief A forbidden transition was requested (A[i][j] = 0). */
struct transition_error : error {
    using error::error;
};

/** \brief An orbit left the rectangles; `step` is the first iterate outside. */
struct escape_error : error {
    escape_error(const std::string& what, int step_) : error(what), step(step_) {}
    int step;
};

/** \brief Preconditions of a lemma (e.g. Pliss) are violated. */
struct constraint_error : error {
    using error::error;
};

/** \brief Power iteration did not reach its tolerance. */
struct convergence_error : error {
    convergence_error(const std::string& what, double residual_) : error(what), residual(residual_) {}
    double residual;
};

/** \brief Internal consistency check failed (e.g. masses do not sum to one). */
struct integrity_error : error {
    using error::error;
};

/** \brief Lifting to the 3D map failed (section outside slab, branch mismatch). */
struct lift_error : error {
    using error::error;
};

/** \brief Malformed configuration or parameter constraint violation. */
struct config_error : error {
    using error::error;
};

/** \brief Potential rejected by the variation gate. */
struct admissibility_error : config_error {
    using config_error::config_error;
};

}  // namespace horseshoe
