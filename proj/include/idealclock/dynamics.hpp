#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "idealclock/errors.hpp"
#include "idealclock/state.hpp"

namespace idealclock {

/** Lagrange multipliers (u1, u2, u3, u4) of the total Hamiltonian. */
struct Multipliers {
    double u1 = 0.0, u2 = 0.0, u3 = 0.0, u4 = 0.0;
};

/**
 * Multiplier choice along a run, evaluated per step. Policies are named so a
 * trajectory records how it was generated.
 */
struct MultiplierPolicy {
    std::string name;
    std::function<Multipliers(double tau, const PhaseSpacePoint&)> eval;
};

inline MultiplierPolicy constant_policy(const Multipliers& u) {
    return {"constant", [u](double, const PhaseSpacePoint&) { return u; }};
}

/** Gauge fixed by <p,Pi> = 0, <k,p> = m, <p,xdot> = m: u = (1, sigma, 0, sigma m/2). */
inline Multipliers cm_gauge_multipliers(const ClockParams& cp) {
    const double s = static_cast<double>(cp.spin_sign);
    return Multipliers{1.0, s, 0.0, 0.5 * s * cp.mass};
}

inline MultiplierPolicy cm_gauge_policy(const ClockParams& cp) {
    const Multipliers u = cm_gauge_multipliers(cp);
    return {"cm-gauge", [u](double, const PhaseSpacePoint&) { return u; }};
}

/**
 * Total Hamiltonian of the constrained system,
 *   H = (u1/2m)(<p,p> - m^2)
 *     + (u2/2m)(<p,p> + (4/l^2 m^2) <k,p>^2 <Pi,Pi>)
 *     + u3 <k,Pi> + u4 <k,k>.
 * Vanishes on the constraint surface for every multiplier choice.
 */
inline double hamiltonian(const PhaseSpacePoint& pt, const Multipliers& u, const ClockParams& cp) {
    const double m = cp.mass, l = cp.length;
    const double pp = dot(pt.p, pt.p);
    const double kp = dot(pt.k, pt.p);
    const double pipi = dot(pt.pi, pt.pi);
    return (u.u1 / (2.0 * m)) * (pp - m * m) +
           (u.u2 / (2.0 * m)) * (pp + 4.0 / (l * l * m * m) * kp * kp * pipi) +
           u.u3 * dot(pt.k, pt.pi) + u.u4 * dot(pt.k, pt.k);
}

/** Phase-space velocity (xdot, pdot, kdot, pidot). */
struct Tangent {
    FourVector xdot, pdot, kdot, pidot;
};

/**
 * Canonical equations generated by the total Hamiltonian:
 *   xdot  =  (u1 + u2) p/m + u2 (4 <k,p> <Pi,Pi> / l^2 m^3) k
 *   kdot  =  u2 (4 <k,p>^2 / l^2 m^3) Pi + u3 k
 *   pdot  =  0
 *   pidot = -u2 (4 <k,p> <Pi,Pi> / l^2 m^3) p - u3 Pi - 2 u4 k
 */
inline Tangent eom(const PhaseSpacePoint& pt, const Multipliers& u, const ClockParams& cp) {
    const double m = cp.mass, l = cp.length;
    const double kp = dot(pt.k, pt.p);
    const double pipi = dot(pt.pi, pt.pi);
    const double g = 4.0 / (l * l * m * m * m);
    Tangent t;
    t.xdot = ((u.u1 + u.u2) / m) * pt.p + (u.u2 * g * kp * pipi) * pt.k;
    t.kdot = (u.u2 * g * kp * kp) * pt.pi + u.u3 * pt.k;
    t.pdot = FourVector{};
    t.pidot = (-u.u2 * g * kp * pipi) * pt.p - u.u3 * pt.pi - (2.0 * u.u4) * pt.k;
    return t;
}

/* ------------------------------------------------------------------ */
/* Poisson structure                                                  */
/* ------------------------------------------------------------------ */

/** Index-raised gradients of a scalar observable with respect to each block. */
struct ObservableGradients {
    FourVector x, p, k, pi;
};

/**
 * Scalar phase-space function. When no analytic gradient is attached the
 * bracket falls back to Richardson-extrapolated central differences.
 */
struct Observable {
    std::string name;
    std::function<double(const PhaseSpacePoint&)> value;
    std::function<ObservableGradients(const PhaseSpacePoint&)> gradients;
};

namespace detail {

template <typename Access>
double central_difference(const std::function<double(const PhaseSpacePoint&)>& f,
                          const PhaseSpacePoint& pt, Access access) {
    PhaseSpacePoint q = pt;
    const double base = access(q);
    const double h = 1e-6 * std::max(1.0, std::abs(base));
    auto d = [&](double step) {
        access(q) = base + step;
        const double fp = f(q);
        access(q) = base - step;
        const double fm = f(q);
        access(q) = base;
        return (fp - fm) / (2.0 * step);
    };
    const double d1 = d(h);
    const double d2 = d(0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}

inline FourVector raise_partials(const std::array<double, 4>& partials) {
    return FourVector{partials[0], -partials[1], -partials[2], -partials[3]};
}

}  // namespace detail

inline ObservableGradients numeric_gradients(const std::function<double(const PhaseSpacePoint&)>& f,
                                             const PhaseSpacePoint& pt) {
    ObservableGradients g;
    auto block = [&](FourVector PhaseSpacePoint::* member) {
        std::array<double, 4> partials{};
        for (int mu = 0; mu < 4; ++mu)
            partials[mu] = detail::central_difference(
                f, pt, [member, mu](PhaseSpacePoint& q) -> double& { return (q.*member)[mu]; });
        return detail::raise_partials(partials);
    };
    g.x = block(&PhaseSpacePoint::x);
    g.p = block(&PhaseSpacePoint::p);
    g.k = block(&PhaseSpacePoint::k);
    g.pi = block(&PhaseSpacePoint::pi);
    return g;
}

/**
 * Poisson bracket {U,V} = <dU/dx, dV/dp> - <dU/dp, dV/dx>
 *                       + <dU/dk, dV/dPi> - <dU/dPi, dV/dk>
 * on index-raised gradients, so {x^mu, p^nu} = eta^{mu nu}.
 */
inline double poisson(const Observable& U, const Observable& V, const PhaseSpacePoint& pt) {
    const ObservableGradients gu = U.gradients ? U.gradients(pt) : numeric_gradients(U.value, pt);
    const ObservableGradients gv = V.gradients ? V.gradients(pt) : numeric_gradients(V.value, pt);
    return dot(gu.x, gv.p) - dot(gu.p, gv.x) + dot(gu.k, gv.pi) - dot(gu.pi, gv.k);
}

namespace detail {

/** Analytic index-raised gradients of <w,w> expanded in scalar products. */
inline ObservableGradients ww_gradients(const PhaseSpacePoint& pt) {
    const FourVector &p = pt.p, &k = pt.k, &q = pt.pi;
    const double pp = dot(p, p), pk = dot(p, k), pq = dot(p, q);
    const double kk = dot(k, k), kq = dot(k, q), qq = dot(q, q);
    ObservableGradients g;
    g.x = FourVector{};
    g.p = 2.0 * ((kq * kq - kk * qq) * p + (pk * qq - pq * kq) * k + (pq * kk - pk * kq) * q);
    g.k = 2.0 * ((pq * pq - pp * qq) * k + (pk * qq - pq * kq) * p + (pp * kq - pk * pq) * q);
    g.pi = 2.0 * ((pk * pk - pp * kk) * q + (pp * kq - pk * pq) * k + (pq * kk - pk * kq) * p);
    return g;
}

}  // namespace detail

/** The four first-class constraints as observables with analytic gradients. */
inline std::array<Observable, 4> constraint_observables(const ClockParams& cp) {
    const double m = cp.mass, l = cp.length;
    Observable psi1{"psi1",
                    [m](const PhaseSpacePoint& pt) { return dot(pt.p, pt.p) - m * m; },
                    [](const PhaseSpacePoint& pt) {
                        ObservableGradients g;
                        g.p = 2.0 * pt.p;
                        return g;
                    }};
    Observable psi2{"psi2",
                    [m, l](const PhaseSpacePoint& pt) {
                        const FourVector w = mathisson(pt.p, pt.k, pt.pi);
                        return dot(w, w) + 0.25 * m * m * m * m * l * l;
                    },
                    [](const PhaseSpacePoint& pt) { return detail::ww_gradients(pt); }};
    Observable psi3{"psi3", [](const PhaseSpacePoint& pt) { return dot(pt.k, pt.pi); },
                    [](const PhaseSpacePoint& pt) {
                        ObservableGradients g;
                        g.k = pt.pi;
                        g.pi = pt.k;
                        return g;
                    }};
    Observable psi4{"psi4", [](const PhaseSpacePoint& pt) { return dot(pt.k, pt.k); },
                    [](const PhaseSpacePoint& pt) {
                        ObservableGradients g;
                        g.k = 2.0 * pt.k;
                        return g;
                    }};
    return {psi1, psi2, psi3, psi4};
}

enum class Block { x, p, k, pi };

/** Coordinate function z^mu of one block, with its exact gradient. */
inline Observable coordinate_observable(Block b, int mu) {
    if (mu < 0 || mu > 3) throw std::invalid_argument("component index out of range");
    auto member = [b]() -> FourVector PhaseSpacePoint::* {
        switch (b) {
            case Block::x: return &PhaseSpacePoint::x;
            case Block::p: return &PhaseSpacePoint::p;
            case Block::k: return &PhaseSpacePoint::k;
            default: return &PhaseSpacePoint::pi;
        }
    }();
    std::array<double, 4> partials{};
    partials[mu] = 1.0;
    const FourVector basis = detail::raise_partials(partials);
    Observable obs;
    obs.name = "coordinate";
    obs.value = [member, mu](const PhaseSpacePoint& pt) { return (pt.*member)[mu]; };
    obs.gradients = [b, basis](const PhaseSpacePoint&) {
        ObservableGradients g;
        switch (b) {
            case Block::x: g.x = basis; break;
            case Block::p: g.p = basis; break;
            case Block::k: g.k = basis; break;
            case Block::pi: g.pi = basis; break;
        }
        return g;
    };
    return obs;
}

inline Observable hamiltonian_observable(const Multipliers& u, const ClockParams& cp) {
    Observable obs;
    obs.name = "hamiltonian";
    obs.value = [u, cp](const PhaseSpacePoint& pt) { return hamiltonian(pt, u, cp); };
    return obs;
}

/* ------------------------------------------------------------------ */
/* Exact clock propagation                                            */
/* ------------------------------------------------------------------ */

namespace detail {

inline void require_cm_gauge(const PhaseSpacePoint& pt, const ClockParams& cp) {
    const double m = cp.mass;
    const ConstraintReport r = constraints(pt, cp);
    if (r.max_relative_violation > 1e-8)
        throw constraint_violation("exact propagation needs an on-shell state");
    if (std::abs(dot(pt.k, pt.p) - m) > 1e-8 * m)
        throw constraint_violation("exact propagation needs the gauge <k,p> = m");
    const double pi_scale = m * std::sqrt(std::max(-dot(pt.pi, pt.pi), 0.25 * m * m * cp.length * cp.length));
    if (std::abs(dot(pt.p, pt.pi)) > 1e-8 * pi_scale)
        throw constraint_violation("exact propagation needs the gauge <p,Pi> = 0");
}

}  // namespace detail

/**
 * Closed-form flow of the gauge-fixed clock. The transverse direction
 * n = k - p/m turns harmonically with angular frequency 2/l while the
 * worldline advances by (p/m) t, tracing a helix of transverse radius l/2.
 * Covariant in the sense that propagating a boosted seed equals boosting
 * the propagated state.
 */
inline PhaseSpacePoint propagate_exact(const PhaseSpacePoint& pt0, double t, const ClockParams& cp) {
    detail::require_cm_gauge(pt0, cp);
    const double m = cp.mass, l = cp.length;
    const double sigma = static_cast<double>(cp.spin_sign);
    const FourVector n0 = pt0.k - (1.0 / m) * pt0.p;
    const FourVector nd0 = (sigma * 4.0 / (m * l * l)) * pt0.pi;
    const double c = std::cos(2.0 * t / l);
    const double s = std::sin(2.0 * t / l);
    const FourVector n = c * n0 + (0.5 * l * s) * nd0;
    const FourVector nd = (-2.0 / l * s) * n0 + c * nd0;
    PhaseSpacePoint out;
    out.x = pt0.x + (t / m) * pt0.p - sigma * ((0.5 * l * s) * n0 + (0.25 * l * l * (1.0 - c)) * nd0);
    out.p = pt0.p;
    out.k = (1.0 / m) * pt0.p + n;
    out.pi = (sigma * 0.25 * m * l * l) * nd;
    return out;
}

/** Worldline derivatives of the exact flow, for curvature diagnostics. */
struct ExactDerivatives {
    FourVector x, xdot, xddot, xdddot;
};

inline ExactDerivatives exact_derivatives(const PhaseSpacePoint& pt0, double t, const ClockParams& cp) {
    const double m = cp.mass, l = cp.length;
    const double sigma = static_cast<double>(cp.spin_sign);
    const PhaseSpacePoint pt = propagate_exact(pt0, t, cp);
    const FourVector n = pt.k - (1.0 / m) * pt.p;
    const FourVector nd = (sigma * 4.0 / (m * l * l)) * pt.pi;
    ExactDerivatives d;
    d.x = pt.x;
    d.xdot = (1.0 / m) * pt.p - sigma * n;
    d.xddot = -sigma * nd;
    d.xdddot = (sigma * 4.0 / (l * l)) * n;
    return d;
}

/* ------------------------------------------------------------------ */
/* Numerical integration                                              */
/* ------------------------------------------------------------------ */

struct TrajectorySample {
    double tau = 0.0;
    PhaseSpacePoint point;
    ConstraintReport report;
};

struct Trajectory {
    ClockParams params;
    std::string integrator;
    std::string policy;
    double dt = 0.0;
    bool projection = false;
    std::vector<TrajectorySample> samples;

    std::size_t size() const { return samples.size(); }
    const TrajectorySample& operator[](std::size_t i) const { return samples[i]; }
};

namespace detail {

inline PhaseSpacePoint advance(const PhaseSpacePoint& pt, const Tangent& t, double h) {
    PhaseSpacePoint out;
    out.x = pt.x + h * t.xdot;
    out.p = pt.p + h * t.pdot;
    out.k = pt.k + h * t.kdot;
    out.pi = pt.pi + h * t.pidot;
    return out;
}

/** Gaussian elimination with partial pivoting for the 4x4 normal system. */
inline std::array<double, 4> solve4(std::array<std::array<double, 4>, 4> A, std::array<double, 4> b) {
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
        std::swap(A[col], A[pivot]);
        std::swap(b[col], b[pivot]);
        if (A[col][col] == 0.0) throw singular_transformation("projection normal system is singular");
        for (int r = col + 1; r < 4; ++r) {
            const double f = A[r][col] / A[col][col];
            for (int cc = col; cc < 4; ++cc) A[r][cc] -= f * A[col][cc];
            b[r] -= f * b[col];
        }
    }
    std::array<double, 4> out{};
    for (int r = 3; r >= 0; --r) {
        double s = b[r];
        for (int cc = r + 1; cc < 4; ++cc) s -= A[r][cc] * out[cc];
        out[r] = s / A[r][r];
    }
    return out;
}

/**
 * Euclidean-orthogonal Newton projection back onto the constraint surface in
 * the (p, k, Pi) block; the position is left untouched. Rows of the Jacobian
 * are scaled by the constraint's natural scale to keep the normal system
 * well conditioned.
 */
inline void project_onto_constraints(PhaseSpacePoint& pt, const ClockParams& cp, std::size_t step) {
    static constexpr double target = 1e-12;
    const auto obs = constraint_observables(cp);
    for (int iter = 0; iter < 5; ++iter) {
        const auto scales = constraint_scales(pt, cp);
        std::array<double, 4> residual{};
        double worst = 0.0;
        for (int i = 0; i < 4; ++i) {
            residual[i] = obs[i].value(pt) / scales[i];
            worst = std::max(worst, std::abs(residual[i]));
        }
        if (worst <= target) return;
        // Lowered gradients are the plain component partials used for the
        // Euclidean least-squares step.
        std::array<std::array<double, 12>, 4> J{};
        for (int i = 0; i < 4; ++i) {
            const ObservableGradients g = obs[i].gradients(pt);
            const auto gp = lower(g.p), gk = lower(g.k), gq = lower(g.pi);
            for (int mu = 0; mu < 4; ++mu) {
                J[i][mu] = gp[mu] / scales[i];
                J[i][4 + mu] = gk[mu] / scales[i];
                J[i][8 + mu] = gq[mu] / scales[i];
            }
        }
        std::array<std::array<double, 4>, 4> JJt{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double s = 0.0;
                for (int a = 0; a < 12; ++a) s += J[i][a] * J[j][a];
                JJt[i][j] = s;
            }
        std::array<double, 4> rhs{};
        for (int i = 0; i < 4; ++i) rhs[i] = -residual[i];
        const auto lambda = solve4(JJt, rhs);
        for (int a = 0; a < 12; ++a) {
            double dz = 0.0;
            for (int i = 0; i < 4; ++i) dz += J[i][a] * lambda[i];
            if (a < 4)
                pt.p[a] += dz;
            else if (a < 8)
                pt.k[a - 4] += dz;
            else
                pt.pi[a - 8] += dz;
        }
    }
    const ConstraintReport r = constraints(pt, cp);
    if (r.max_relative_violation > target)
        throw projection_failure("constraint projection did not converge", step);
}

}  // namespace detail

/**
 * Classic fourth-order one-step integration of the canonical equations.
 * With projection enabled every accepted step is pulled back onto the
 * constraint surface, which pins both Casimir invariants to rounding level
 * over long runs.
 */
inline Trajectory integrate(const PhaseSpacePoint& pt0, const MultiplierPolicy& policy, double dt,
                            std::size_t steps, bool projection, const ClockParams& cp) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
    require_finite(pt0);
    Trajectory traj;
    traj.params = cp;
    traj.integrator = "rk4";
    traj.policy = policy.name;
    traj.dt = dt;
    traj.projection = projection;
    traj.samples.reserve(steps + 1);
    PhaseSpacePoint pt = pt0;
    traj.samples.push_back({0.0, pt, constraints(pt, cp)});
    for (std::size_t i = 0; i < steps; ++i) {
        const double tau = static_cast<double>(i) * dt;
        auto f = [&](double t, const PhaseSpacePoint& q) { return eom(q, policy.eval(t, q), cp); };
        const Tangent k1 = f(tau, pt);
        const Tangent k2 = f(tau + 0.5 * dt, detail::advance(pt, k1, 0.5 * dt));
        const Tangent k3 = f(tau + 0.5 * dt, detail::advance(pt, k2, 0.5 * dt));
        const Tangent k4 = f(tau + dt, detail::advance(pt, k3, dt));
        PhaseSpacePoint next;
        next.x = pt.x + (dt / 6.0) * (k1.xdot + 2.0 * k2.xdot + 2.0 * k3.xdot + k4.xdot);
        next.p = pt.p + (dt / 6.0) * (k1.pdot + 2.0 * k2.pdot + 2.0 * k3.pdot + k4.pdot);
        next.k = pt.k + (dt / 6.0) * (k1.kdot + 2.0 * k2.kdot + 2.0 * k3.kdot + k4.kdot);
        next.pi = pt.pi + (dt / 6.0) * (k1.pidot + 2.0 * k2.pidot + 2.0 * k3.pidot + k4.pidot);
        if (projection) detail::project_onto_constraints(next, cp, i + 1);
        if (!is_finite(next)) throw projection_failure("integration produced non-finite state", i + 1);
        pt = next;
        traj.samples.push_back({tau + dt, pt, constraints(pt, cp)});
    }
    return traj;
}

/** Sample the closed-form flow on a uniform grid. */
inline Trajectory exact_trajectory(const PhaseSpacePoint& pt0, double dt, std::size_t steps,
                                   const ClockParams& cp) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
    Trajectory traj;
    traj.params = cp;
    traj.integrator = "exact";
    traj.policy = "cm-gauge";
    traj.dt = dt;
    traj.projection = false;
    traj.samples.reserve(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        const double tau = static_cast<double>(i) * dt;
        const PhaseSpacePoint pt = propagate_exact(pt0, tau, cp);
        traj.samples.push_back({tau, pt, constraints(pt, cp)});
    }
    return traj;
}

/* ------------------------------------------------------------------ */
/* External field hook                                                */
/* ------------------------------------------------------------------ */

/** Antisymmetric covariant field tensor F_{mu nu}. */
struct FieldTensor {
    std::array<std::array<double, 4>, 4> f{};

    static FieldTensor from_fields(const std::array<double, 3>& E, const std::array<double, 3>& B) {
        FieldTensor F;
        for (int i = 0; i < 3; ++i) {
            F.f[0][i + 1] = E[i];
            F.f[i + 1][0] = -E[i];
        }
        F.f[1][2] = -B[2];
        F.f[2][1] = B[2];
        F.f[2][3] = -B[0];
        F.f[3][2] = B[0];
        F.f[3][1] = -B[1];
        F.f[1][3] = B[1];
        return F;
    }
};

/**
 * Scalar F_{mu nu} p^mu k^nu, the quantity whose weak vanishing an external
 * electromagnetic coupling would enforce as a secondary constraint.
 */
inline double em_secondary_constraint(const PhaseSpacePoint& pt, const FieldTensor& F) {
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
            if (std::abs(F.f[mu][nu] + F.f[nu][mu]) >
                1e-12 * (1.0 + std::abs(F.f[mu][nu]) + std::abs(F.f[nu][mu])))
                throw std::invalid_argument("field tensor must be antisymmetric");
    double s = 0.0;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) s += F.f[mu][nu] * pt.p[mu] * pt.k[nu];
    return s;
}

/* ------------------------------------------------------------------ */
/* Orbit geometry helpers                                             */
/* ------------------------------------------------------------------ */

/** Component of v orthogonal to p in the Minkowski sense. */
inline FourVector project_out(const FourVector& v, const FourVector& p) {
    return v - (dot(p, v) / dot(p, p)) * p;
}

/** Mean projective position over the sampled window, the orbit axis point. */
inline FourVector orbit_center(const Trajectory& traj) {
    if (traj.samples.empty()) throw std::invalid_argument("empty trajectory");
    FourVector acc;
    for (const auto& s : traj.samples) acc += project_out(s.point.x, s.point.p);
    return (1.0 / static_cast<double>(traj.samples.size())) * acc;
}

/**
 * Ratio of the spin pseudovector to the orbital pseudovector, both projected
 * on the given spatial axis. The sign distinguishes the two clock branches:
 * their orbital sense agrees while the spin flips.
 */
inline double spin_alignment(const PhaseSpacePoint& pt, const FourVector& xdot,
                             const FourVector& center, const std::array<double, 3>& axis) {
    const FourVector a{0.0, axis[0], axis[1], axis[2]};
    const FourVector w = mathisson(pt.p, pt.k, pt.pi);
    if (dot(w, w) >= -1e-30) throw spin_degenerate("spin pseudovector vanishes");
    const FourVector x_rel = project_out(pt.x - center, pt.p);
    const FourVector w_orb = mathisson(pt.p, x_rel, xdot);
    const double denom = dot(w_orb, a);
    if (std::abs(denom) < 1e-300) throw degenerate_configuration("orbital pseudovector has no axis component");
    return dot(w, a) / denom;
}

}  // namespace idealclock
