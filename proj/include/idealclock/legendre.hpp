#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "idealclock/errors.hpp"
#include "idealclock/minkowski.hpp"
#include "idealclock/state.hpp"

namespace idealclock {

/** The five velocity-side scalars of the inverse Legendre map. */
struct ScalarVelocities {
    double xx = 0.0;    // <xdot,xdot>
    double kx = 0.0;    // <k,xdot>
    double kdx = 0.0;   // <kdot,xdot>
    double kdkd = 0.0;  // <kdot,kdot>
    double kkd = 0.0;   // <k,kdot>, zero on the image of the map
};

/** The five momentum-side scalars the map depends on. */
struct MomentumScalars {
    double u1 = 0.0, u2 = 0.0, u3 = 0.0;
    double kp = 0.0;   // <k,p>
    double ppi = 0.0;  // <p,Pi>
};

/**
 * On-shell map from momentum-side scalars to velocity scalars:
 *   xx   = u1^2 - u2^2
 *   kx   = (kp/m)(u1 + u2)
 *   kdx  = (kp/m)(4 kp pPi u2 / m^3 l^2 + u3)(u1 + u2)
 *   kdkd = -4 kp^2 u2^2 / l^2 m^2
 *   kkd  = 0
 */
inline ScalarVelocities scalar_map(const MomentumScalars& ms, const ClockParams& cp) {
    if (ms.kp == 0.0) throw std::invalid_argument("direction-momentum pairing must not vanish");
    const double m = cp.mass, l = cp.length;
    ScalarVelocities sv;
    sv.xx = ms.u1 * ms.u1 - ms.u2 * ms.u2;
    sv.kx = (ms.kp / m) * (ms.u1 + ms.u2);
    sv.kdx = (ms.kp / m) * (4.0 * ms.kp * ms.ppi * ms.u2 / (m * m * m * l * l) + ms.u3) *
             (ms.u1 + ms.u2);
    sv.kdkd = -4.0 * ms.kp * ms.kp * ms.u2 * ms.u2 / (l * l * m * m);
    sv.kkd = 0.0;
    return sv;
}

/** The invariant xi = -l^2 <kdot,kdot> / <k,xdot>^2; equals 1 on the clock. */
inline double xi(const ScalarVelocities& sv, const ClockParams& cp) {
    if (sv.kx == 0.0) throw third_kind_degenerate("velocity is orthogonal to the direction");
    return -cp.length * cp.length * sv.kdkd / (sv.kx * sv.kx);
}

/** Leading minors of the inverse-Legendre Jacobian. Both vanish off regime i. */
struct HessianMinors {
    double j1 = 0.0, j2 = 0.0;
};

inline HessianMinors hessian_minors(const MomentumScalars& ms, const ClockParams& cp) {
    if (ms.kp == 0.0) throw std::invalid_argument("direction-momentum pairing must not vanish");
    const double m = cp.mass, l = cp.length;
    HessianMinors h;
    h.j1 = (16.0 * ms.kp * ms.kp * ms.kp / (l * l * m * m * m * m)) * ms.u2 * (ms.u1 + ms.u2) *
           (ms.u2 * ms.u2 - ms.u1 * ms.u1);
    h.j2 = (4.0 * ms.kp / (l * l * m * m * m)) * ms.u2 * h.j1;
    return h;
}

enum class Regime { i, ii, iii, ii_prime };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::i: return "i";
        case Regime::ii: return "ii";
        case Regime::iii: return "iii";
        default: return "ii'";
    }
}

/** Rank sector of the inverse Legendre map with its velocity constraints. */
struct RegimeClass {
    Regime regime = Regime::i;
    int rank = 4;
    std::vector<std::string> velocity_constraints;
};

/**
 * Multiplier-plane classification. Equalities are tested relative to the
 * multiplier scale; the degenerate sectors are the two clocks (ii, iii) and
 * the free sector ii' with a frozen direction.
 */
inline RegimeClass classify(const MomentumScalars& ms, const ClockParams& cp,
                            double eps_rank = 1e-10) {
    (void)hessian_minors(ms, cp);
    const double scale = std::abs(ms.u1) + std::abs(ms.u2);
    if (scale == 0.0) throw null_multiplier("both generating multipliers vanish");
    const double tol = eps_rank * scale;
    RegimeClass rc;
    if (std::abs(ms.u2) <= tol) {
        rc.regime = Regime::ii_prime;
        rc.rank = 3;
        rc.velocity_constraints = {"<k,kd> = 0", "<kd,kd> = 0"};
    } else if (std::abs(ms.u1 - ms.u2) <= tol) {
        rc.regime = Regime::ii;
        rc.rank = 3;
        rc.velocity_constraints = {"<k,kd> = 0", "<xd,xd> = 0", "l^2 <kd,kd> + <k,xd>^2 = 0"};
    } else if (std::abs(ms.u1 + ms.u2) <= tol) {
        rc.regime = Regime::iii;
        rc.rank = 2;
        rc.velocity_constraints = {"<k,kd> = 0", "xd prop k"};
    } else {
        rc.regime = Regime::i;
        rc.rank = 4;
        rc.velocity_constraints = {"<k,kd> = 0"};
    }
    return rc;
}

/* ------------------------------------------------------------------ */
/* Momenta from velocities                                            */
/* ------------------------------------------------------------------ */

struct ReconstructedMomenta {
    FourVector p, pi;
};

/**
 * Inverse of the velocity map on the full-rank sector:
 *   p  = m/(u1+u2) xdot
 *        - l^2 m (u1+u2)^2 (<kdot,kdot> - 2 <k,kdot> u3) / (4 <k,xdot>^2 u2) k/<k,xdot>
 *   Pi = l^2 m (u1+u2)^2 / (4 <k,xdot>^2 u2) (kdot - u3 k)
 * On the degenerate sectors the map has no inverse and momenta blow up,
 * which is reported rather than returned.
 */
inline ReconstructedMomenta momenta_first_kind(const FourVector& xdot, const FourVector& k,
                                               const FourVector& kdot, double u1, double u2,
                                               double u3, const ClockParams& cp) {
    const RegimeClass rc = classify(MomentumScalars{u1, u2, u3, 1.0, 0.0}, cp);
    if (rc.regime != Regime::i)
        throw singular_transformation(std::string("velocity map is not invertible in regime ") +
                                      to_string(rc.regime));
    const double kx = dot(k, xdot);
    const double scale = std::max(1.0, max_abs(k) * max_abs(xdot));
    if (std::abs(kx) <= 1e-14 * scale)
        throw singular_transformation("velocity is orthogonal to the direction");
    const double m = cp.mass, l = cp.length;
    const double s = u1 + u2;
    const double kdkd = dot(kdot, kdot);
    const double kkd = dot(k, kdot);
    const double beta = l * l * m * s * s / (4.0 * kx * kx * u2);
    ReconstructedMomenta out;
    out.p = (m / s) * xdot - (beta * (kdkd - 2.0 * kkd * u3) / kx) * k;
    out.pi = beta * (kdot - u3 * k);
    return out;
}

/* ------------------------------------------------------------------ */
/* Lagrangian evaluators                                              */
/* ------------------------------------------------------------------ */

namespace detail {

inline void check_sign_factor(int sign, double eta) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("branch sign must be +1 or -1");
    if (eta != 1.0 && eta != -1.0) throw std::invalid_argument("eta must be +1 or -1");
}

}  // namespace detail

/**
 * First-kind Lagrangian eta m sqrt(xx (1 + sign sqrt(xi))) + lambda <k,k>.
 * The same expression covers the spacelike-velocity branch through the signs
 * of xx and 1 - sqrt(xi); only a negative radicand is out of domain.
 */
inline double lagrangian_first_kind(const ScalarVelocities& sv, double kk, int sign, double eta,
                                    double lambda, const ClockParams& cp) {
    detail::check_sign_factor(sign, eta);
    const double x = xi(sv, cp);
    if (x < 0.0) throw evaluation_domain_error("direction rate is not spacelike");
    const double radicand = sv.xx * (1.0 + sign * std::sqrt(x));
    if (radicand < 0.0)
        throw evaluation_domain_error(sign > 0
                                          ? "plus branch crossed the null-velocity boundary xx = 0"
                                          : "minus branch crossed the clock boundary xi = 1");
    return eta * cp.mass * std::sqrt(radicand) + lambda * kk;
}

inline double lagrangian_first_kind(const FourVector& xdot, const FourVector& k,
                                    const FourVector& kdot, int sign, double eta, double lambda,
                                    const ClockParams& cp) {
    const ScalarVelocities sv{dot(xdot, xdot), dot(k, xdot), dot(kdot, xdot), dot(kdot, kdot),
                              dot(k, kdot)};
    return lagrangian_first_kind(sv, dot(k, k), sign, eta, lambda, cp);
}

/** Second-kind evaluation: value, kappa derivative, and the two linear forms. */
struct SecondKindResult {
    double value = 0.0;
    double dkappa = 0.0;
    std::array<double, 2> residuals{};
};

/**
 * Second-kind Lagrangian with the auxiliary einbein kappa:
 *   L = (m kappa / 2) xx/kx + (m / 4 kappa)(l^2 kdkd / kx + kx) + lambda <k,k>.
 * Stationarity in kappa at every kappa is equivalent to both linear forms
 * vanishing, which is the clock sector.
 */
inline SecondKindResult lagrangian_second_kind(const ScalarVelocities& sv, double kk, double kappa,
                                               double lambda, const ClockParams& cp) {
    if (sv.kx == 0.0) throw std::invalid_argument("velocity is orthogonal to the direction");
    if (kappa == 0.0) throw std::invalid_argument("einbein must not vanish");
    const double m = cp.mass, l = cp.length;
    const double a = sv.xx / sv.kx;
    const double b = l * l * sv.kdkd / sv.kx + sv.kx;
    SecondKindResult r;
    r.value = 0.5 * m * kappa * a + m / (4.0 * kappa) * b + lambda * kk;
    r.dkappa = 0.5 * m * a - m / (4.0 * kappa * kappa) * b;
    r.residuals = {a, b};
    return r;
}

inline SecondKindResult lagrangian_second_kind(const FourVector& xdot, const FourVector& k,
                                               const FourVector& kdot, double kappa, double lambda,
                                               const ClockParams& cp) {
    const ScalarVelocities sv{dot(xdot, xdot), dot(k, xdot), dot(kdot, xdot), dot(kdot, kdot),
                              dot(k, kdot)};
    return lagrangian_second_kind(sv, dot(k, k), kappa, lambda, cp);
}

/** Third-kind evaluation: value and its gauge-vector dependence defect. */
struct ThirdKindResult {
    double value = 0.0;
    double e_independence_defect = 0.0;
};

/**
 * Third-kind Lagrangian with an auxiliary gauge vector e:
 *   L = eta m (-4 l^2 <xdot,e>^2 <kdot,kdot> / <e,k>^2)^(1/4) + lambda <k,k>.
 * On the null sector xdot prop k the value does not depend on e; the defect
 * samples the family e -> alpha (e + beta k) and reports the worst change.
 */
inline ThirdKindResult lagrangian_third_kind(const FourVector& xdot, const FourVector& k,
                                             const FourVector& kdot, const FourVector& e,
                                             double eta, double lambda, const ClockParams& cp) {
    if (eta != 1.0 && eta != -1.0) throw std::invalid_argument("eta must be +1 or -1");
    const double kdkd = dot(kdot, kdot);
    const double kk = dot(k, k);
    auto term = [&](const FourVector& g) {
        const double gk = dot(g, k);
        if (std::abs(gk) <= 1e-14 * std::max(1.0, max_abs(g) * max_abs(k)))
            throw third_kind_degenerate("gauge vector is orthogonal to the direction");
        const double gx = dot(xdot, g);
        const double radicand = -4.0 * cp.length * cp.length * gx * gx * kdkd / (gk * gk);
        if (radicand < 0.0) throw evaluation_domain_error("direction rate is not spacelike");
        return eta * cp.mass * std::pow(radicand, 0.25);
    };
    ThirdKindResult r;
    const double base = term(e);
    r.value = base + lambda * kk;
    for (const double alpha : {0.5, 2.0})
        for (const double beta : {-1.0, 1.0})
            r.e_independence_defect =
                std::max(r.e_independence_defect, std::abs(term(alpha * (e + beta * k)) - base));
    return r;
}

/* ------------------------------------------------------------------ */
/* Shape-function identities                                          */
/* ------------------------------------------------------------------ */

/**
 * Scalar function of xi with derivatives, closed-form when supplied and
 * otherwise by fourth-order central stencils with a step scaled to xi.
 */
struct ShapeFunction {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> ddf;

    double operator()(double x) const { return f(x); }

    double step(double x) const { return 1e-3 * std::max(std::abs(x), 1.0); }

    double d1(double x) const {
        if (df) return df(x);
        const double h = step(x);
        return (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
    }

    double d2(double x) const {
        if (ddf) return ddf(x);
        const double h = step(x);
        return (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) -
                f(x + 2.0 * h)) /
               (12.0 * h * h);
    }
};

/**
 * Residuals of the defining conditions of the projection-invariant family,
 *   F - 2 xi F' = 1  and  4 xi F'^2 = 1,
 * solved exactly by F = 1 +- sqrt(xi).
 */
inline std::array<double, 2> rotator_family(const ShapeFunction& F, double x) {
    const double f = F(x);
    const double d = F.d1(x);
    return {f - 2.0 * x * d - 1.0, 4.0 * x * d * d - 1.0};
}

/** Residual of the square-root form f' f + 2 xi (f'^2 + f'' f) = 0. */
inline double hessian_ode_residual(const ShapeFunction& f, double x) {
    const double v = f(x);
    const double d = f.d1(x);
    const double dd = f.d2(x);
    return d * v + 2.0 * x * (d * d + dd * v);
}

}  // namespace idealclock
