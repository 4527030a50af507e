#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "idealclock/minkowski.hpp"

namespace idealclock {

/** Relative residual below which a state counts as on shell. */
inline constexpr double on_shell_tolerance = 1e-9;

/**
 * Physical parameters of a rotator clock: mass m > 0, size parameter l > 0
 * and the branch sign distinguishing the two clock solutions.
 */
struct ClockParams {
    double mass = 1.0;
    double length = 1.0;
    int spin_sign = +1;

    ClockParams() = default;
    ClockParams(double m, double l, int sigma) : mass(m), length(l), spin_sign(sigma) {
        if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("mass must be positive");
        if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("length must be positive");
        if (sigma != +1 && sigma != -1) throw std::invalid_argument("spin_sign must be +1 or -1");
    }
};

/** Point of the 16-dimensional phase space (x, p, k, Pi). */
struct PhaseSpacePoint {
    FourVector x, p, k, pi;
};

inline bool is_finite(const PhaseSpacePoint& pt) {
    return is_finite(pt.x) && is_finite(pt.p) && is_finite(pt.k) && is_finite(pt.pi);
}

inline void require_finite(const PhaseSpacePoint& pt) {
    if (!is_finite(pt)) throw std::invalid_argument("phase-space point has non-finite components");
}

/**
 * Residuals of the four first-class constraints together with the two
 * conserved Casimir scalars. weak_identity_gap is the difference between
 * <w,w> evaluated from the pseudovector and its on-surface reduction
 * <p,k>^2 <Pi,Pi>; it vanishes when psi3 and psi4 do.
 */
struct ConstraintReport {
    std::array<double, 4> psi{};
    double casimir_pp = 0.0;
    double casimir_ww = 0.0;
    double weak_identity_gap = 0.0;
    double max_relative_violation = 0.0;
};

/**
 * Natural scale of each constraint residual, used to decide "on shell".
 * The psi3 and psi4 scales follow the state itself so that the verdict is
 * unchanged under the gauge rescaling k -> s k, Pi -> Pi / s.
 */
inline std::array<double, 4> constraint_scales(const PhaseSpacePoint& pt, const ClockParams& cp) {
    const double m = cp.mass, l = cp.length;
    const double kp = dot(pt.k, pt.p);
    const double pipi = dot(pt.pi, pt.pi);
    const double floor = 1e-12 * m * m;
    std::array<double, 4> s{};
    s[0] = m * m;
    s[1] = m * m * m * m * l * l;
    s[2] = std::max(std::abs(kp) / m * std::sqrt(std::max(-pipi, 0.0)), 0.5 * m * l);
    s[3] = std::max(kp * kp / (m * m), floor);
    for (double& v : s) v = std::max(v, floor);
    return s;
}

inline ConstraintReport constraints(const PhaseSpacePoint& pt, const ClockParams& cp) {
    const double m = cp.mass, l = cp.length;
    ConstraintReport r;
    const FourVector w = mathisson(pt.p, pt.k, pt.pi);
    const double ww = dot(w, w);
    const double kp = dot(pt.k, pt.p);
    r.casimir_pp = dot(pt.p, pt.p);
    r.casimir_ww = ww;
    r.weak_identity_gap = ww - kp * kp * dot(pt.pi, pt.pi);
    r.psi[0] = r.casimir_pp - m * m;
    r.psi[1] = ww + 0.25 * m * m * m * m * l * l;
    r.psi[2] = dot(pt.k, pt.pi);
    r.psi[3] = dot(pt.k, pt.k);
    const auto scales = constraint_scales(pt, cp);
    for (int i = 0; i < 4; ++i)
        r.max_relative_violation = std::max(r.max_relative_violation, std::abs(r.psi[i]) / scales[i]);
    return r;
}

inline bool on_shell(const ConstraintReport& r, double tol = on_shell_tolerance) {
    return r.max_relative_violation <= tol;
}

namespace detail {

inline void require_orthonormal_pair(const std::array<double, 3>& n, const std::array<double, 3>& t) {
    auto d3 = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    };
    if (std::abs(d3(n, n) - 1.0) > 1e-9 || std::abs(d3(t, t) - 1.0) > 1e-9 ||
        std::abs(d3(n, t)) > 1e-9)
        throw std::invalid_argument("seed directions must be orthonormal spatial unit vectors");
}

}  // namespace detail

/**
 * Rest-frame seed on the constraint surface: x = 0, p = (m,0,0,0),
 * k = p/m + n0 and Pi = sigma (m l / 2) t0, where n0 is the initial radial
 * direction and t0 the initial transverse direction of the rotation.
 */
inline PhaseSpacePoint seed_cm_state(const ClockParams& cp,
                                     const std::array<double, 3>& n0 = {1.0, 0.0, 0.0},
                                     const std::array<double, 3>& t0 = {0.0, 1.0, 0.0}) {
    detail::require_orthonormal_pair(n0, t0);
    const double m = cp.mass;
    const double s = 0.5 * cp.mass * cp.length * cp.spin_sign;
    PhaseSpacePoint pt;
    pt.x = FourVector{0.0, 0.0, 0.0, 0.0};
    pt.p = FourVector{m, 0.0, 0.0, 0.0};
    pt.k = FourVector{1.0, n0[0], n0[1], n0[2]};
    pt.pi = FourVector{0.0, s * t0[0], s * t0[1], s * t0[2]};
    return pt;
}

/** Poincare action on a state: momenta rotate, the position also shifts. */
inline PhaseSpacePoint transform_state(const PhaseSpacePoint& pt, const LorentzTransform& L,
                                       const FourVector& shift = FourVector{}) {
    PhaseSpacePoint out;
    out.x = apply(L, pt.x) + shift;
    out.p = apply(L, pt.p);
    out.k = apply(L, pt.k);
    out.pi = apply(L, pt.pi);
    return out;
}

}  // namespace idealclock
