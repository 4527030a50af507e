#include <iostream>
#include <utility>

#include "idealclock/idealclock.hpp"

/*
 * The velocity map of the rotator: where it is invertible, what its Hessian
 * minors look like and how momenta are recovered from a full-rank flow.
 */

int main() {
    using namespace idealclock;
    const ClockParams cp{1.0, 1.0, +1};

    std::cout << "multiplier plane at <k,p> = m:\n";
    for (const auto& [u1, u2] :
         {std::pair{2.0, 1.0}, {1.0, 1.0}, {1.0, -1.0}, {1.0, 0.0}}) {
        const RankRow row = rank_row(u1, u2, cp);
        // + 0.0 folds the sign off negative zeros in the table.
        std::cout << "  (u1, u2) = (" << u1 << ", " << u2 << ")  regime " << row.regime
                  << "  rank " << row.rank << "  j1 = " << row.j1 + 0.0
                  << "  j2 = " << row.j2 + 0.0 << '\n';
    }

    const PhaseSpacePoint pt = seed_cm_state(cp);
    const Multipliers u{2.0, 1.0, 0.3, 0.0};
    const Tangent t = eom(pt, u, cp);
    const ReconstructedMomenta rec =
        momenta_first_kind(t.xdot, pt.k, t.kdot, u.u1, u.u2, u.u3, cp);
    std::cout << "round trip through the velocity map:\n";
    std::cout << "  |p - p_rec|   = " << max_abs(rec.p - pt.p) << '\n';
    std::cout << "  |Pi - Pi_rec| = " << max_abs(rec.pi - pt.pi) << '\n';
    return 0;
}
