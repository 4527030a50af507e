#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace idealclock {

/** Base class for all library-specific failures. */
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Input state violates a constraint required by the operation. */
struct constraint_violation : error {
    using error::error;
};

/** Projective points coincide where the operation needs them distinct. */
struct degenerate_configuration : error {
    using error::error;
};

/** Mathisson pseudovector vanishes, no spin axis available. */
struct spin_degenerate : error {
    using error::error;
};

/** Velocity-to-momentum map is not invertible for these multipliers. */
struct singular_transformation : error {
    using error::error;
};

/** All multipliers vanish, no regime defined. */
struct null_multiplier : error {
    using error::error;
};

/** Constraint projection failed to converge within the iteration budget. */
struct projection_failure : error {
    std::size_t step_index;
    projection_failure(const std::string& what, std::size_t step)
        : error(what), step_index(step) {}
};

/** Phase samples too sparse to unwrap the winding unambiguously. */
struct unwrap_ambiguity : error {
    using error::error;
};

/** Operation requires a free (constant-momentum) window of the trajectory. */
struct not_applicable : error {
    using error::error;
};

/** Lagrangian radicand left its domain of definition. */
struct evaluation_domain_error : error {
    using error::error;
};

/** Tangent has no time component along the momentum direction. */
struct invalid_tangent : error {
    using error::error;
};

/** Degenerate scalar input to the third-kind evaluation. */
struct third_kind_degenerate : error {
    using error::error;
};

}  // namespace idealclock
