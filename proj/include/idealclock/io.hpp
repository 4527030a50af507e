#pragma once

#include <cmath>
#include <complex>
#include <iomanip>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "idealclock/chronometry.hpp"
#include "idealclock/dynamics.hpp"
#include "idealclock/legendre.hpp"
#include "idealclock/state.hpp"

namespace idealclock {

using Metadata = std::vector<std::pair<std::string, std::string>>;

inline void to_json(nlohmann::json& j, const FourVector& v) {
    j = nlohmann::json::array({v[0], v[1], v[2], v[3]});
}

inline void from_json(const nlohmann::json& j, FourVector& v) {
    for (int mu = 0; mu < 4; ++mu) j.at(mu).get_to(v[mu]);
}

inline void to_json(nlohmann::json& j, const PhaseSpacePoint& pt) {
    j = nlohmann::json{{"x", pt.x}, {"p", pt.p}, {"k", pt.k}, {"pi", pt.pi}};
}

inline void from_json(const nlohmann::json& j, PhaseSpacePoint& pt) {
    j.at("x").get_to(pt.x);
    j.at("p").get_to(pt.p);
    j.at("k").get_to(pt.k);
    j.at("pi").get_to(pt.pi);
}

inline void to_json(nlohmann::json& j, const ConstraintReport& r) {
    j = nlohmann::json{{"psi", r.psi},
                       {"casimir_pp", r.casimir_pp},
                       {"casimir_ww", r.casimir_ww},
                       {"weak_identity_gap", r.weak_identity_gap},
                       {"max_relative_violation", r.max_relative_violation}};
}

namespace detail {

inline std::ostream& full_precision(std::ostream& os) {
    return os << std::setprecision(17);
}

inline void write_meta_line(std::ostream& os, const Metadata& meta) {
    if (meta.empty()) return;
    os << "#";
    for (const auto& [key, value] : meta) os << ' ' << key << '=' << value;
    os << '\n';
}

}  // namespace detail

/** One row per sample: evolution parameter, state blocks, constraint values. */
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const Metadata& meta) {
    detail::full_precision(os);
    detail::write_meta_line(os, meta);
    os << "tau,x0,x1,x2,x3,p0,p1,p2,p3,k0,k1,k2,k3,pi0,pi1,pi2,pi3,psi1,psi2,psi3,psi4\n";
    for (const auto& s : traj.samples) {
        os << s.tau;
        for (const FourVector* v : {&s.point.x, &s.point.p, &s.point.k, &s.point.pi})
            for (int mu = 0; mu < 4; ++mu) os << ',' << (*v)[mu];
        for (const double psi : s.report.psi) os << ',' << psi;
        os << '\n';
    }
}

inline nlohmann::json trajectory_json(const Trajectory& traj, const Metadata& meta) {
    nlohmann::json j;
    for (const auto& [key, value] : meta) j["meta"][key] = value;
    j["meta"]["integrator"] = traj.integrator;
    j["meta"]["policy"] = traj.policy;
    j["samples"] = nlohmann::json::array();
    for (const auto& s : traj.samples) {
        nlohmann::json row = s.point;
        row["tau"] = s.tau;
        row["psi"] = s.report.psi;
        j["samples"].push_back(std::move(row));
    }
    return j;
}

inline void write_trajectory_json(std::ostream& os, const Trajectory& traj, const Metadata& meta) {
    os << trajectory_json(traj, meta).dump(2) << '\n';
}

/** Phase history; the direction column goes blank when kappa is at the pole. */
inline void write_phase_csv(std::ostream& os, const std::vector<PhaseSample>& series,
                            const Metadata& meta) {
    detail::full_precision(os);
    detail::write_meta_line(os, meta);
    os << "tau,phi,re_kappa,im_kappa\n";
    for (const auto& s : series) {
        os << s.tau << ',' << s.phi << ',';
        if (s.kappa.at_infinity()) {
            os << ',';
        } else {
            const std::complex<double> z = s.kappa.affine();
            os << z.real() << ',' << z.imag();
        }
        os << '\n';
    }
}

/** One multiplier-plane cell of the rank sweep. */
struct RankRow {
    double u1 = 0.0, u2 = 0.0;
    std::string regime;
    int rank = 0;
    double j1 = 0.0, j2 = 0.0;
};

/** Classify a single multiplier-plane cell at the gauge pairing kp = m. */
inline RankRow rank_row(double u1, double u2, const ClockParams& cp) {
    RankRow row;
    row.u1 = u1;
    row.u2 = u2;
    const MomentumScalars ms{u1, u2, 0.0, cp.mass, 0.0};
    const HessianMinors h = hessian_minors(ms, cp);
    row.j1 = h.j1;
    row.j2 = h.j2;
    try {
        const RegimeClass rc = classify(ms, cp);
        row.regime = to_string(rc.regime);
        row.rank = rc.rank;
    } catch (const null_multiplier&) {
        row.regime = "error";
        row.rank = 0;
    }
    return row;
}

/**
 * Uniform sweep of the multiplier plane at the gauge pairing kp = m. Cells
 * where both multipliers vanish have no regime and are flagged as errors.
 */
inline std::vector<RankRow> rank_sweep(double lo, double hi, double step, const ClockParams& cp) {
    if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("bad sweep range");
    std::vector<RankRow> rows;
    const int n = static_cast<int>(std::lround((hi - lo) / step));
    // A range aligned with the origin is generated as exact step multiples,
    // so the axes and both diagonals land exactly on their sectors.
    const double ratio = lo / step;
    const double base = std::round(ratio);
    const bool aligned = std::abs(ratio - base) <= 1e-9 * std::max(1.0, std::abs(ratio));
    const auto coord = [&](int idx) {
        return aligned ? step * (base + idx) : lo + step * idx;
    };
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) rows.push_back(rank_row(coord(i), coord(j), cp));
    return rows;
}

inline void write_rankmap_csv(std::ostream& os, const std::vector<RankRow>& rows,
                              const Metadata& meta) {
    detail::full_precision(os);
    detail::write_meta_line(os, meta);
    os << "u1,u2,regime,rank,j1,j2\n";
    for (const auto& r : rows)
        os << r.u1 << ',' << r.u2 << ',' << r.regime << ',' << r.rank << ',' << r.j1 << ','
           << r.j2 << '\n';
}

}  // namespace idealclock
