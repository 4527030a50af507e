#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "idealclock/chronometry.hpp"
#include "idealclock/dynamics.hpp"
#include "idealclock/io.hpp"
#include "idealclock/minkowski.hpp"
#include "idealclock/state.hpp"

using namespace idealclock;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("trajectory CSV layout") {
    const ClockParams cp;
    const Trajectory traj = exact_trajectory(seed_cm_state(cp), 0.1, 5, cp);
    std::ostringstream os;
    write_trajectory_csv(os, traj, {{"mass", "1"}, {"seed", "12345"}});
    const auto lines = lines_of(os.str());
    REQUIRE(lines.size() == 2 + 6);
    CHECK(lines[0] == "# mass=1 seed=12345");
    CHECK(lines[1] ==
          "tau,x0,x1,x2,x3,p0,p1,p2,p3,k0,k1,k2,k3,pi0,pi1,pi2,pi3,psi1,psi2,psi3,psi4");
    for (std::size_t i = 2; i < lines.size(); ++i)
        CHECK(std::count(lines[i].begin(), lines[i].end(), ',') == 20);
    CHECK(lines[2].rfind("0,0,0,0,0,1,0,0,0,1,1,0,0,0,0,", 0) == 0);
}

TEST_CASE("CSV carries full precision") {
    const ClockParams cp;
    Trajectory traj = exact_trajectory(seed_cm_state(cp), 0.1, 0, cp);
    traj.samples[0].point.x[1] = 1.0 / 3.0;
    std::ostringstream os;
    write_trajectory_csv(os, traj, {});
    CHECK(os.str().find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("trajectory JSON layout and round trip") {
    const ClockParams cp;
    const Trajectory traj = exact_trajectory(seed_cm_state(cp), 0.05, 4, cp);
    const nlohmann::json j = trajectory_json(traj, {{"mass", "1"}});
    CHECK(j["meta"]["mass"] == "1");
    CHECK(j["meta"]["integrator"] == "exact");
    CHECK(j["meta"]["policy"] == "cm-gauge");
    REQUIRE(j["samples"].size() == 5);
    CHECK(j["samples"][0]["tau"] == 0.0);
    CHECK(j["samples"][2]["x"].size() == 4);
    CHECK(j["samples"][2]["psi"].size() == 4);

    const PhaseSpacePoint back = j["samples"][3].get<PhaseSpacePoint>();
    CHECK(max_abs(back.x - traj[3].point.x) == 0.0);
    CHECK(max_abs(back.p - traj[3].point.p) == 0.0);
    CHECK(max_abs(back.k - traj[3].point.k) == 0.0);
    CHECK(max_abs(back.pi - traj[3].point.pi) == 0.0);

    std::ostringstream os;
    write_trajectory_json(os, traj, {});
    CHECK(nlohmann::json::parse(os.str())["samples"].size() == 5);
}

TEST_CASE("constraint report serialization") {
    const ClockParams cp;
    const ConstraintReport r = constraints(seed_cm_state(cp), cp);
    const nlohmann::json j = r;
    CHECK(j["psi"].size() == 4);
    CHECK(j["casimir_pp"].get<double>() == Catch::Approx(1.0).margin(1e-12));
    CHECK(j["casimir_ww"].get<double>() == Catch::Approx(-0.25).margin(1e-12));
    CHECK(j.contains("weak_identity_gap"));
    CHECK(j.contains("max_relative_violation"));
}

TEST_CASE("phase CSV blanks the direction at the pole") {
    std::vector<PhaseSample> series;
    series.push_back({0.0, 0.0, ProjectivePoint(1.0, 2.0)});
    series.push_back({0.5, 1.25, ProjectivePoint(1.0, 0.0)});
    std::ostringstream os;
    write_phase_csv(os, series, {{"seed", "7"}});
    const auto lines = lines_of(os.str());
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "# seed=7");
    CHECK(lines[1] == "tau,phi,re_kappa,im_kappa");
    CHECK(lines[2] == "0,0,0.5,0");
    CHECK(lines[3] == "0.5,1.25,,");
}

TEST_CASE("rank sweep covers the multiplier plane") {
    const ClockParams cp;
    const std::vector<RankRow> rows = rank_sweep(-2.0, 2.0, 0.1, cp);
    REQUIRE(rows.size() == 41 * 41);

    std::map<std::string, int> counts;
    for (const RankRow& r : rows) ++counts[r.regime];
    CHECK(counts["error"] == 1);
    CHECK(counts["ii"] == 40);
    CHECK(counts["iii"] == 40);
    CHECK(counts["ii'"] == 40);
    CHECK(counts["i"] == 41 * 41 - 121);

    for (const RankRow& r : rows) {
        if (r.regime == "error") {
            CHECK(r.u1 == 0.0);
            CHECK(r.u2 == 0.0);
            CHECK(r.rank == 0);
        } else if (r.regime == "i") {
            CHECK(r.rank == 4);
            CHECK(r.j1 != 0.0);
        } else {
            CHECK((r.rank == 3 || r.rank == 2));
            CHECK(std::abs(r.j1) <= 1e-12);
            CHECK(std::abs(r.j2) <= 1e-12);
        }
        if (r.u1 == r.u2 && r.u1 != 0.0) CHECK(r.regime == "ii");
        if (r.u1 == -r.u2 && r.u1 != 0.0) CHECK(r.regime == "iii");
        if (r.u2 == 0.0 && r.u1 != 0.0) CHECK(r.regime == "ii'");
    }
}

TEST_CASE("rank sweep minors at spot values") {
    const ClockParams cp;
    const std::vector<RankRow> rows = rank_sweep(-2.0, 2.0, 0.1, cp);
    const auto cell = [&](double u1, double u2) {
        for (const RankRow& r : rows)
            if (std::abs(r.u1 - u1) < 1e-12 && std::abs(r.u2 - u2) < 1e-12) return r;
        FAIL("cell not found");
        return rows.front();
    };
    CHECK(cell(2.0, 1.0).j1 == Catch::Approx(-144.0).margin(1e-9));
    CHECK(cell(2.0, 1.0).j2 == Catch::Approx(-576.0).margin(1e-9));
    CHECK(cell(1.0, 2.0).j1 == Catch::Approx(288.0).margin(1e-9));
    CHECK(cell(-2.0, 1.0).j1 == Catch::Approx(48.0).margin(1e-9));
    CHECK(cell(2.0, 1.0).regime == "i");
}

TEST_CASE("rank sweep argument validation") {
    const ClockParams cp;
    CHECK_THROWS_AS(rank_sweep(0.0, 1.0, 0.0, cp), std::invalid_argument);
    CHECK_THROWS_AS(rank_sweep(1.0, 0.0, 0.1, cp), std::invalid_argument);

    const std::vector<RankRow> single = rank_sweep(0.3, 0.3, 0.1, cp);
    REQUIRE(single.size() == 1);
    CHECK(single[0].regime == "ii");
}

TEST_CASE("rankmap CSV layout") {
    const ClockParams cp;
    const std::vector<RankRow> rows = rank_sweep(-0.1, 0.1, 0.1, cp);
    std::ostringstream os;
    write_rankmap_csv(os, rows, {});
    const auto lines = lines_of(os.str());
    REQUIRE(lines.size() == 1 + 9);
    CHECK(lines[0] == "u1,u2,regime,rank,j1,j2");
    // Coordinates are written with full round-trip precision, so compare
    // the leading cell as a number and the classification as text.
    CHECK(std::stod(lines[1]) == Catch::Approx(-0.1));
    CHECK(lines[1].find(",ii,3,") != std::string::npos);
    bool error_row = false;
    for (const auto& line : lines)
        if (line.rfind("0,0,error,0,", 0) == 0) error_row = true;
    CHECK(error_row);
}
