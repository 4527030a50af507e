#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include "idealclock/dynamics.hpp"
#include "idealclock/minkowski.hpp"
#include "idealclock/state.hpp"

namespace idealclock {

/**
 * Seeded generators for randomized property checks. Every construction is
 * exactly constraint-preserving, so generated states sit on the surface up
 * to rounding only.
 */
namespace sampling {

using Rng = std::mt19937_64;

inline std::array<double, 3> random_unit3(Rng& rng) {
    std::normal_distribution<double> gauss;
    while (true) {
        const std::array<double, 3> v{gauss(rng), gauss(rng), gauss(rng)};
        const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if (n > 1e-6) return {v[0] / n, v[1] / n, v[2] / n};
    }
}

inline std::pair<std::array<double, 3>, std::array<double, 3>> random_orthonormal_pair(Rng& rng) {
    const auto n = random_unit3(rng);
    while (true) {
        const auto v = random_unit3(rng);
        const double vn = v[0] * n[0] + v[1] * n[1] + v[2] * n[2];
        std::array<double, 3> t{v[0] - vn * n[0], v[1] - vn * n[1], v[2] - vn * n[2]};
        const double tn = std::sqrt(t[0] * t[0] + t[1] * t[1] + t[2] * t[2]);
        if (tn > 1e-6) return {n, {t[0] / tn, t[1] / tn, t[2] / tn}};
    }
}

inline ClockParams random_params(Rng& rng) {
    std::uniform_real_distribution<double> span(0.5, 2.0);
    std::uniform_int_distribution<int> coin(0, 1);
    return ClockParams{span(rng), span(rng), coin(rng) == 0 ? 1 : -1};
}

/** Boost times rotation with bounded rapidity, within rounding of the group. */
inline LorentzTransform random_lorentz(Rng& rng, double max_rapidity = 0.25) {
    std::uniform_real_distribution<double> chi(-max_rapidity, max_rapidity);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi_v<double>);
    return boost(chi(rng), random_unit3(rng)) * rotation(angle(rng), random_unit3(rng));
}

inline FourVector random_four_vector(Rng& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return FourVector{u(rng), u(rng), u(rng), u(rng)};
}

/**
 * Generic on-shell state: a randomly oriented seed pushed through a random
 * Poincare transform, then moved off the center-of-mass gauge slice by the
 * residual scalings k -> s k, Pi -> Pi/s + c k that leave every constraint
 * fixed.
 */
inline PhaseSpacePoint random_on_shell_state(Rng& rng, const ClockParams& cp) {
    const auto [n0, t0] = random_orthonormal_pair(rng);
    PhaseSpacePoint pt = seed_cm_state(cp, n0, t0);
    pt = transform_state(pt, random_lorentz(rng), random_four_vector(rng, 2.0));
    std::uniform_real_distribution<double> span(0.5, 2.0);
    std::uniform_real_distribution<double> mix(-1.0, 1.0);
    const double s = span(rng);
    pt.k = s * pt.k;
    pt.pi = (1.0 / s) * pt.pi;
    pt.pi += mix(rng) * pt.k;
    return pt;
}

inline FieldTensor random_field(Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return FieldTensor::from_fields({u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)});
}

}  // namespace sampling
}  // namespace idealclock
