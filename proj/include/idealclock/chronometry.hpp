#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "idealclock/dynamics.hpp"
#include "idealclock/errors.hpp"
#include "idealclock/minkowski.hpp"
#include "idealclock/state.hpp"

namespace idealclock {

/**
 * The two invariant null directions p/sqrt<p,p> +- w/sqrt(-<w,w>) spanned by
 * the momentum and the spin pseudovector. They are fixed points of the
 * clock's direction motion and anchor the clocking phase.
 */
inline std::pair<FourVector, FourVector> null_directions(const PhaseSpacePoint& pt) {
    const double pp = dot(pt.p, pt.p);
    if (!(pp > 0.0)) throw constraint_violation("momentum must be timelike");
    const FourVector w = mathisson(pt.p, pt.k, pt.pi);
    const double ww = dot(w, w);
    if (!(-ww > 1e-24 * pp * pp)) throw spin_degenerate("spin pseudovector vanishes");
    const FourVector u = (1.0 / std::sqrt(pp)) * pt.p;
    const FourVector s = (1.0 / std::sqrt(-ww)) * w;
    return {u + s, u - s};
}

/** One instant of the clocking phase. kappa is the direction k on the sphere. */
struct PhaseSample {
    double tau = 0.0;
    double phi = 0.0;
    ProjectivePoint kappa;
};

namespace detail {

inline std::complex<double> phase_factor(const ProjectivePoint& curr, const ProjectivePoint& prev,
                                         const ProjectivePoint& plus, const ProjectivePoint& minus) {
    const std::complex<double> b = cross_ratio(curr, prev, plus, minus);
    if (std::abs(std::abs(b) - 1.0) > 1e-9)
        throw unwrap_ambiguity("cross ratio left the unit circle");
    return b;
}

}  // namespace detail

/**
 * Accumulated clocking phase along a trajectory. Each step contributes the
 * argument of the cross ratio of consecutive directions against the two
 * invariant null directions of the first sample; the product over a span
 * telescopes, so the total is additive and independent of the sampling
 * density. Steps of a quarter turn or more are rejected as unresolvable.
 */
inline std::vector<PhaseSample> phase_series(const Trajectory& traj) {
    if (traj.samples.empty()) throw std::invalid_argument("empty trajectory");
    const auto [kp, km] = null_directions(traj.samples.front().point);
    const ProjectivePoint plus = stereographic(kp);
    const ProjectivePoint minus = stereographic(km);
    std::vector<PhaseSample> out;
    out.reserve(traj.samples.size());
    double phi = 0.0;
    ProjectivePoint prev = stereographic(traj.samples.front().point.k);
    out.push_back({traj.samples.front().tau, 0.0, prev});
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const ProjectivePoint curr = stereographic(traj.samples[i].point.k);
        const double step = std::arg(detail::phase_factor(curr, prev, plus, minus));
        if (std::abs(step) >= 0.5 * std::numbers::pi_v<double>)
            throw unwrap_ambiguity("phase step of a quarter turn or more");
        phi += step;
        out.push_back({traj.samples[i].tau, phi, curr});
        prev = curr;
    }
    return out;
}

namespace detail {

inline double interpolate_phase(const std::vector<PhaseSample>& series, double tau) {
    const double lo = series.front().tau, hi = series.back().tau;
    const double slack = 1e-9 * std::max({1.0, std::abs(lo), std::abs(hi)});
    if (tau < lo - slack || tau > hi + slack)
        throw std::invalid_argument("time outside the sampled span");
    const double t = std::clamp(tau, lo, hi);
    auto it = std::lower_bound(series.begin(), series.end(), t,
                               [](const PhaseSample& s, double v) { return s.tau < v; });
    if (it == series.begin()) return it->phi;
    if (it == series.end()) return series.back().phi;
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double span = b.tau - a.tau;
    if (!(span > 0.0)) return b.phi;
    const double f = (t - a.tau) / span;
    return a.phi + f * (b.phi - a.phi);
}

}  // namespace detail

/** Phase advance between two instants, linear between samples. */
inline double phase(const Trajectory& traj, double tau0, double tau1) {
    const auto series = phase_series(traj);
    return detail::interpolate_phase(series, tau1) - detail::interpolate_phase(series, tau0);
}

/* ------------------------------------------------------------------ */
/* Clocking frequency                                                 */
/* ------------------------------------------------------------------ */

namespace detail {

inline FourVector direction_rate(const PhaseSpacePoint& pt, const Tangent& t) {
    const double pp = dot(pt.p, pt.p);
    if (!(pp > 0.0)) throw constraint_violation("momentum must be timelike");
    const double rp = std::sqrt(pp);
    const double kp = dot(pt.k, pt.p);
    if (std::abs(kp) < 1e-300) throw invalid_tangent("direction is orthogonal to the momentum");
    const double ppd = dot(pt.p, t.pdot);
    const double kpd = dot(t.kdot, pt.p) + dot(pt.k, t.pdot);
    // Derivative of n = sqrt<p,p> k / <k,p> - p / sqrt<p,p> along the flow.
    return (ppd / (rp * kp)) * pt.k + (rp / kp) * t.kdot - (rp * kpd / (kp * kp)) * pt.k -
           (1.0 / rp) * t.pdot + (ppd / (rp * pp)) * pt.p;
}

}  // namespace detail

/**
 * Angular velocity of the direction vector about the momentum, measured in
 * the proper time of the center-of-mass line:
 *   Omega^2 = -<ndot,ndot> <p,p> / <p,xdot>^2.
 */
inline double omega(const PhaseSpacePoint& pt, const Tangent& t) {
    const double px = dot(pt.p, t.xdot);
    if (std::abs(px) < 1e-300) throw invalid_tangent("worldline does not advance along the momentum");
    const FourVector nd = detail::direction_rate(pt, t);
    const double nn = std::max(-dot(nd, nd), 0.0);
    return std::sqrt(nn * dot(pt.p, pt.p)) / std::abs(px);
}

/** Equivalent form <p,p> sqrt(-<kdot,kdot>) / |<k,p><p,xdot>|; agrees on shell. */
inline double omega_direction_form(const PhaseSpacePoint& pt, const Tangent& t) {
    const double px = dot(pt.p, t.xdot);
    const double kp = dot(pt.k, pt.p);
    if (std::abs(px) < 1e-300 || std::abs(kp) < 1e-300)
        throw invalid_tangent("degenerate momentum pairing");
    const double kdkd = std::max(-dot(t.kdot, t.kdot), 0.0);
    return dot(pt.p, pt.p) * std::sqrt(kdkd) / std::abs(kp * px);
}

/**
 * Rapidity-like angle artanh(l Omega / 2) of the clocking motion. Returns
 * infinity at and beyond the clock limit l Omega / 2 >= 1.
 */
inline double lambda_angle(double omega_value, double ell) {
    const double a = 0.5 * ell * omega_value;
    if (a < 0.0) throw std::invalid_argument("negative frequency");
    if (a >= 1.0) return std::numeric_limits<double>::infinity();
    return std::atanh(a);
}

/* ------------------------------------------------------------------ */
/* Worldline shape                                                    */
/* ------------------------------------------------------------------ */

struct FrenetReport {
    double curvature = 0.0;
    double torsion_proxy = 0.0;
    double omega = 0.0;
    double lambda = 0.0;
};

namespace detail {

inline double gram2(const FourVector& u, const FourVector& v) {
    return dot(u, u) * dot(v, v) - dot(u, v) * dot(u, v);
}

inline double gram3(const FourVector& u, const FourVector& v, const FourVector& w) {
    const double uu = dot(u, u), uv = dot(u, v), uw = dot(u, w);
    const double vv = dot(v, v), vw = dot(v, w), ww = dot(w, w);
    return uu * (vv * ww - vw * vw) - uv * (uv * ww - vw * uw) + uw * (uv * vw - vv * uw);
}

inline double euclid2(const FourVector& v) {
    return v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3];
}

}  // namespace detail

/**
 * Shape invariants of a worldline window with conserved momentum: the
 * curvature and a planarity defect of the momentum-transverse projections,
 * plus the clocking frequency from the turning rate of the unit transverse
 * direction.
 */
inline FrenetReport frenet(const FourVector& p, const FourVector& xdot, const FourVector& xddot,
                           const FourVector& xdddot, double ell) {
    const FourVector d1 = project_out(xdot, p);
    const FourVector d2 = project_out(xddot, p);
    const FourVector d3 = project_out(xdddot, p);
    const double q = -dot(d1, d1);
    if (!(q > 0.0)) throw invalid_tangent("no spacelike transverse velocity");
    FrenetReport r;
    r.curvature = -detail::gram2(d1, d2) / (dot(d1, d1) * dot(d1, d1) * dot(d1, d1));
    const double norms = detail::euclid2(d1) * detail::euclid2(d2) * detail::euclid2(d3);
    r.torsion_proxy = norms > 0.0 ? detail::gram3(d1, d2, d3) / norms : 0.0;
    const FourVector nhat_dot = (1.0 / std::sqrt(q)) * d2 + (dot(d1, d2) / std::pow(q, 1.5)) * d1;
    const double rate2 = std::max(-dot(nhat_dot, nhat_dot), 0.0);
    const double px = dot(p, xdot);
    if (std::abs(px) < 1e-300) throw invalid_tangent("worldline does not advance along the momentum");
    r.omega = std::sqrt(rate2 * dot(p, p)) / std::abs(px);
    r.lambda = lambda_angle(r.omega, ell);
    return r;
}

/**
 * Same invariants from five consecutive uniform samples of a trajectory,
 * differentiated by fourth-order stencils. Demands a conserved momentum
 * across the window; otherwise the construction does not apply.
 */
inline FrenetReport frenet_sampled(const Trajectory& traj, std::size_t center) {
    if (center < 2 || center + 2 >= traj.samples.size())
        throw std::invalid_argument("stencil needs two samples on each side");
    const double h = traj.dt;
    if (!(h > 0.0)) throw std::invalid_argument("trajectory has no uniform step");
    const FourVector p = traj.samples[center].point.p;
    const double pscale = std::max(1.0, max_abs(p));
    for (std::size_t i = center - 2; i <= center + 2; ++i)
        if (max_abs(traj.samples[i].point.p - p) > 1e-9 * pscale)
            throw not_applicable("momentum is not conserved across the stencil window");
    const FourVector& fm2 = traj.samples[center - 2].point.x;
    const FourVector& fm1 = traj.samples[center - 1].point.x;
    const FourVector& f0 = traj.samples[center].point.x;
    const FourVector& fp1 = traj.samples[center + 1].point.x;
    const FourVector& fp2 = traj.samples[center + 2].point.x;
    const FourVector xdot = (1.0 / (12.0 * h)) * (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2);
    const FourVector xddot =
        (1.0 / (12.0 * h * h)) * (-1.0 * fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2);
    const FourVector xdddot = (1.0 / (2.0 * h * h * h)) * (-1.0 * fm2 + 2.0 * fm1 - 2.0 * fp1 + fp2);
    return frenet(p, xdot, xddot, xdddot, traj.params.length);
}

}  // namespace idealclock
