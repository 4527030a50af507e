#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int code = -1;
    std::string output;
};

fs::path scratch_dir() {
    const fs::path dir = fs::path("cli_scratch");
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream is(path);
    REQUIRE(is.good());
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path capture = scratch_dir() / ("stdout_" + std::to_string(counter++) + ".txt");
    const std::string cmd =
        std::string(IDEALCLOCK_BIN) + " " + args + " > " + capture.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.output = slurp(capture);
    return r;
}

double value_after(const std::string& text, const std::string& prefix) {
    const auto pos = text.find(prefix);
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + prefix.size()));
}

/* tau and phi columns of a phase table, comment and header skipped. */
std::vector<std::pair<double, double>> phase_columns(const fs::path& path) {
    std::vector<std::pair<double, double>> out;
    for (const std::string& line : lines_of(slurp(path))) {
        if (line.empty() || line.front() == '#' || line.front() == 't') continue;
        std::istringstream is(line);
        double tau = 0.0, phi = 0.0;
        char comma = 0;
        is >> tau >> comma >> phi;
        out.emplace_back(tau, phi);
    }
    return out;
}

constexpr double two_pi = 2.0 * std::numbers::pi_v<double>;

}  // namespace

TEST_CASE("simulate writes the trajectory table and a summary") {
    const fs::path out = scratch_dir() / "traj.csv";
    const RunResult r = run_cli("simulate --out " + out.string());
    REQUIRE(r.code == 0);
    CHECK(r.output.find("seed: 12345") != std::string::npos);
    CHECK(r.output.find("rows: 9426") != std::string::npos);
    CHECK(r.output.find("cycles: 3\n") != std::string::npos);
    CHECK(r.output.find("omega: 2\n") != std::string::npos);
    CHECK(value_after(r.output, "max constraint violation: ") <= 1e-11);
    CHECK(r.output.find("wrote " + out.string()) != std::string::npos);

    const auto lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 9428);
    CHECK(lines[0].rfind("# mass=1 ell=1 sigma=1 dt=", 0) == 0);
    CHECK(lines[0].find("seed=12345") != std::string::npos);
    CHECK(lines[1] ==
          "tau,x0,x1,x2,x3,p0,p1,p2,p3,k0,k1,k2,k3,pi0,pi1,pi2,pi3,psi1,psi2,psi3,psi4");
    CHECK(lines[2].rfind("0,0,0,0,0,1,0,0,0,1,1,0,0,0,0,", 0) == 0);
}

TEST_CASE("simulate summary flips the alignment sign on the opposite branch") {
    const fs::path out = scratch_dir() / "traj_branch.csv";
    const RunResult plus = run_cli("simulate --cycles 1 --out " + out.string());
    const RunResult minus = run_cli("simulate --cycles 1 --sigma -1 --out " + out.string());
    REQUIRE(plus.code == 0);
    REQUIRE(minus.code == 0);
    const double a = value_after(plus.output, "spin alignment: ");
    const double b = value_after(minus.output, "spin alignment: ");
    CHECK(a > 0.9);
    CHECK(b < -0.9);
    CHECK(std::abs(a + b) <= 1e-3);
}

TEST_CASE("simulate with zero steps writes a single row") {
    const fs::path out = scratch_dir() / "single.csv";
    const RunResult r = run_cli("simulate --steps 0 --out " + out.string());
    REQUIRE(r.code == 0);
    CHECK(r.output.find("rows: 1\n") != std::string::npos);
    CHECK(lines_of(slurp(out)).size() == 3);
}

TEST_CASE("simulate exports parseable json") {
    const fs::path out = scratch_dir() / "traj.json";
    const RunResult r = run_cli("simulate --steps 50 --cycles 0.05 --format json --out " +
                                out.string());
    REQUIRE(r.code == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    CHECK(j["meta"]["integrator"] == "rk4");
    CHECK(j["meta"]["policy"] == "cm-gauge");
    CHECK(j["meta"]["seed"] == "12345");
    REQUIRE(j["samples"].size() == 51);
    CHECK(j["samples"][0]["x"].size() == 4);
    CHECK(j["samples"][50]["psi"].size() == 4);
}

TEST_CASE("phase reports a full turn per cycle") {
    const fs::path out = scratch_dir() / "phase.csv";
    const RunResult r = run_cli("phase --cycles 1 --out " + out.string());
    REQUIRE(r.code == 0);
    CHECK(std::abs(value_after(r.output, "total phase: ") - two_pi) <= 1e-6);
    CHECK(std::abs(value_after(r.output, "phase per cycle: ") - two_pi) <= 1e-6);
    CHECK(value_after(r.output, "linear fit residual: ") <= 1e-7);

    const auto lines = lines_of(slurp(out));
    CHECK(lines[1] == "tau,phi,re_kappa,im_kappa");
}

TEST_CASE("phase covers half a cycle") {
    const fs::path out = scratch_dir() / "phase_half.csv";
    const RunResult r = run_cli("phase --cycles 0.5 --out " + out.string());
    REQUIRE(r.code == 0);
    CHECK(std::abs(value_after(r.output, "total phase: ") - 0.5 * two_pi) <= 1e-6);
    CHECK(r.output.find("phase per cycle:") == std::string::npos);
}

TEST_CASE("phase series is unchanged by a boost") {
    const fs::path rest = scratch_dir() / "phase_rest.csv";
    const fs::path moving = scratch_dir() / "phase_boost.csv";
    REQUIRE(run_cli("phase --cycles 1 --out " + rest.string()).code == 0);
    REQUIRE(run_cli("phase --cycles 1 --boost 0.7 x --out " + moving.string()).code == 0);
    const auto a = phase_columns(rest);
    const auto b = phase_columns(moving);
    REQUIRE(a.size() == b.size());
    REQUIRE(a.size() > 3000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].first == b[i].first);
        CHECK(std::abs(a[i].second - b[i].second) <= 1e-8);
    }
}

TEST_CASE("verify passes on the default configuration") {
    const RunResult r = run_cli("verify");
    REQUIRE(r.code == 0);
    CHECK(r.output.find("FAIL") == std::string::npos);
    CHECK(r.output.find("all checks passed") != std::string::npos);
}

TEST_CASE("verify fails off the constraint surface") {
    const RunResult r = run_cli("verify --perturb 1e-3");
    REQUIRE(r.code == 1);
    CHECK(r.output.find("FAIL seed constraints") != std::string::npos);
}

TEST_CASE("verify without projection writes the drift history") {
    const fs::path out = scratch_dir() / "drift.csv";
    const RunResult r = run_cli("verify --no-projection --out " + out.string());
    CHECK(r.output.find("projection off") != std::string::npos);
    CHECK(r.output.find("wrote " + out.string()) != std::string::npos);
    const auto lines = lines_of(slurp(out));
    REQUIRE(lines.size() >= 3);
    CHECK(lines[0].find("projection=off") != std::string::npos);
    CHECK(lines[1] == "tau,psi1,psi2,psi3,psi4");
}

TEST_CASE("rankmap sweeps the default grid") {
    const fs::path out = scratch_dir() / "rankmap.csv";
    const RunResult r = run_cli("rankmap --out " + out.string());
    REQUIRE(r.code == 0);
    CHECK(r.output.find("cells: 1681") != std::string::npos);
    CHECK(r.output.find("regimes: i=1560 ii=40 ii'=40 iii=40 error=1") != std::string::npos);
    const auto lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 1683);
    CHECK(lines[1] == "u1,u2,regime,rank,j1,j2");
}

TEST_CASE("rankmap classifies single points") {
    const fs::path out = scratch_dir() / "rankmap_at.csv";
    const RunResult spot = run_cli("rankmap --at 2 1 --out " + out.string());
    REQUIRE(spot.code == 0);
    CHECK(spot.output.find("regime=i rank=4 j1=-144 j2=-576") != std::string::npos);
    const RunResult origin = run_cli("rankmap --at 0 0 --out " + out.string());
    REQUIRE(origin.code == 0);
    CHECK(origin.output.find("regime=error rank=0") != std::string::npos);
}

TEST_CASE("options may come from a config file and flags win") {
    const fs::path cfg = scratch_dir() / "run.cfg";
    {
        std::ofstream os(cfg);
        os << "mass=2\nell=0.5\nsigma=-1\n";
    }
    const fs::path out = scratch_dir() / "traj_cfg.csv";
    const RunResult from_file =
        run_cli("simulate --config " + cfg.string() + " --cycles 0.2 --out " + out.string());
    REQUIRE(from_file.code == 0);
    CHECK(from_file.output.find("omega: 4\n") != std::string::npos);
    CHECK(slurp(out).find("# mass=2 ell=0.5 sigma=-1") == 0);

    const RunResult overridden = run_cli("simulate --config " + cfg.string() +
                                         " --ell 2 --cycles 0.2 --out " + out.string());
    REQUIRE(overridden.code == 0);
    CHECK(overridden.output.find("omega: 1\n") != std::string::npos);
}

TEST_CASE("invalid arguments are rejected") {
    CHECK(run_cli("simulate --sigma 2").code != 0);
    CHECK(run_cli("bogus").code != 0);
    CHECK(run_cli("").code != 0);
    const RunResult axis = run_cli("simulate --boost 0.5 w");
    CHECK(axis.code != 0);
    CHECK(axis.output.find("axis must be x, y or z") != std::string::npos);
}
