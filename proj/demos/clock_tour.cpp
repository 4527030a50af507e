#include <cmath>
#include <iomanip>
#include <iostream>
#include <numbers>

#include "idealclock/idealclock.hpp"

/*
 * Tour of the clock library: seed both rotator branches, follow the exact
 * flow for one cycle and print the quantities a clock is judged by.
 */

int main() {
    using namespace idealclock;
    constexpr double pi = std::numbers::pi_v<double>;
    std::cout << std::setprecision(6);

    for (const int sigma : {+1, -1}) {
        const ClockParams cp{1.0, 1.0, sigma};
        const PhaseSpacePoint seed = seed_cm_state(cp);
        const std::size_t n = 2000;
        const Trajectory traj = exact_trajectory(seed, pi / static_cast<double>(n), n, cp);

        // The orbit centre sits at -Pi/m from the seed.
        const FourVector center = (-1.0 / cp.mass) * project_out(seed.pi, seed.p);
        const TrajectorySample& mid = traj.samples[n / 2];
        const FourVector d = project_out(mid.point.x - center, mid.point.p);
        const Tangent t0 = eom(seed, cm_gauge_multipliers(cp), cp);

        std::cout << "branch sigma = " << (sigma > 0 ? "+1" : "-1") << '\n';
        std::cout << "  transverse radius     " << std::sqrt(-dot(d, d)) << '\n';
        std::cout << "  clocking frequency    " << omega(seed, t0) << '\n';
        std::cout << "  phase over one cycle  " << phase(traj, 0.0, pi) << '\n';
        std::cout << "  spin alignment        "
                  << spin_alignment(seed, t0.xdot, center, {0.0, 0.0, 1.0}) << '\n';
        const ConstraintReport& last = traj.samples.back().report;
        std::cout << "  casimirs after a cycle  <p,p> = " << last.casimir_pp
                  << "  <w,w> = " << last.casimir_ww << '\n';
    }

    // The phase is a Lorentz scalar: a boosted observer reads the same clock.
    const ClockParams cp{1.0, 1.0, +1};
    Trajectory traj = exact_trajectory(seed_cm_state(cp), pi / 2000.0, 2000, cp);
    const double at_rest = phase(traj, 0.0, pi);
    const LorentzTransform L = boost(0.6, {0.0, 0.0, 1.0});
    for (auto& s : traj.samples) s.point = transform_state(s.point, L);
    std::cout << "phase at rest " << at_rest << ", after a boost " << phase(traj, 0.0, pi)
              << '\n';
    return 0;
}
