#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "idealclock/idealclock.hpp"

namespace {

using namespace idealclock;

constexpr double pi = std::numbers::pi_v<double>;

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

/* Rounded to twelve significant digits, for quantities assembled from a whole
   run where the last few bits carry only accumulated rounding. */
std::string fmt_round(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

struct Options {
    double mass = 1.0;
    double ell = 1.0;
    int sigma = 1;
    double dt = 0.0;
    long long steps = -1;
    double cycles = 3.0;
    std::vector<std::string> boost_args;
    std::string projection = "on";
    bool no_projection = false;
    std::string out;
    std::string format = "csv";
    unsigned long long seed = 12345;
    double perturb = 0.0;
    double lo = -2.0;
    double hi = 2.0;
    double grid_step = 0.1;
    std::vector<double> at;
};

struct BoostSpec {
    bool active = false;
    double rapidity = 0.0;
    std::array<double, 3> axis{1.0, 0.0, 0.0};
    std::string axis_name = "x";
};

BoostSpec parse_boost(const std::vector<std::string>& args) {
    BoostSpec b;
    if (args.empty()) return b;
    b.active = true;
    try {
        std::size_t used = 0;
        b.rapidity = std::stod(args[0], &used);
        if (used != args[0].size()) throw std::invalid_argument(args[0]);
    } catch (const std::exception&) {
        throw std::invalid_argument("--boost rapidity must be a number, got '" + args[0] + "'");
    }
    b.axis_name = args[1];
    if (args[1] == "x")
        b.axis = {1.0, 0.0, 0.0};
    else if (args[1] == "y")
        b.axis = {0.0, 1.0, 0.0};
    else if (args[1] == "z")
        b.axis = {0.0, 0.0, 1.0};
    else
        throw std::invalid_argument("--boost axis must be x, y or z, got '" + args[1] + "'");
    return b;
}

/* Everything a run needs, derived once from the parsed options. When only
   --cycles is given the grid is chosen so the final sample lands on the
   requested number of periods exactly, at roughly a thousand steps per unit
   of evolution parameter. */
struct RunPlan {
    ClockParams cp;
    PhaseSpacePoint seed;
    BoostSpec boost;
    double dt = 0.0;
    std::size_t steps = 0;
    bool projection = true;
    Metadata meta;
};

RunPlan make_plan(const Options& o) {
    RunPlan plan;
    plan.cp = ClockParams(o.mass, o.ell, o.sigma);
    plan.boost = parse_boost(o.boost_args);
    const double tau_end = o.cycles * pi * o.ell;
    double dt = o.dt;
    long long steps = o.steps;
    if (steps < 0 && !(dt > 0.0)) {
        steps = std::llround(1000.0 * pi * o.cycles);
        dt = steps > 0 ? tau_end / static_cast<double>(steps) : o.ell / 1000.0;
    } else if (steps < 0) {
        steps = std::max<long long>(std::llround(tau_end / dt), 0);
    } else if (!(dt > 0.0)) {
        dt = steps > 0 ? tau_end / static_cast<double>(steps) : o.ell / 1000.0;
    }
    plan.dt = dt;
    plan.steps = static_cast<std::size_t>(steps);
    plan.projection = o.projection == "on" && !o.no_projection;
    plan.seed = seed_cm_state(plan.cp);
    if (plan.boost.active)
        plan.seed = transform_state(plan.seed, boost(plan.boost.rapidity, plan.boost.axis));
    if (o.perturb != 0.0) plan.seed.k[1] += o.perturb;
    plan.meta = {{"mass", fmt(o.mass)},
                 {"ell", fmt(o.ell)},
                 {"sigma", std::to_string(o.sigma)},
                 {"dt", fmt(dt)},
                 {"steps", std::to_string(steps)},
                 {"seed", std::to_string(o.seed)},
                 {"projection", plan.projection ? "on" : "off"}};
    if (plan.boost.active) {
        plan.meta.emplace_back("boost_rapidity", fmt(plan.boost.rapidity));
        plan.meta.emplace_back("boost_axis", plan.boost.axis_name);
    }
    if (o.perturb != 0.0) plan.meta.emplace_back("perturb", fmt(o.perturb));
    return plan;
}

std::string out_path(const Options& o, const std::string& stem) {
    if (!o.out.empty()) return o.out;
    return stem + (o.format == "json" ? ".json" : ".csv");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    return os;
}

void write_meta_comment(std::ostream& os, const Metadata& meta) {
    if (meta.empty()) return;
    os << "#";
    for (const auto& [key, value] : meta) os << ' ' << key << '=' << value;
    os << '\n';
}

double euclid_norm(const FourVector& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
}

/* Largest deviation of the accumulated phase from its own least-squares
   line, the figure of merit for "the clock ticks uniformly". */
double linear_fit_residual(const std::vector<PhaseSample>& series) {
    const double n = static_cast<double>(series.size());
    double st = 0.0, sp = 0.0, stt = 0.0, stp = 0.0;
    for (const auto& s : series) {
        st += s.tau;
        sp += s.phi;
        stt += s.tau * s.tau;
        stp += s.tau * s.phi;
    }
    const double det = n * stt - st * st;
    const double slope = det != 0.0 ? (n * stp - st * sp) / det : 0.0;
    const double intercept = (sp - slope * st) / n;
    double worst = 0.0;
    for (const auto& s : series)
        worst = std::max(worst, std::abs(s.phi - (intercept + slope * s.tau)));
    return worst;
}

int run_simulate(const Options& o) {
    const RunPlan plan = make_plan(o);
    const MultiplierPolicy policy = cm_gauge_policy(plan.cp);
    const Trajectory traj =
        integrate(plan.seed, policy, plan.dt, plan.steps, plan.projection, plan.cp);
    double worst = 0.0;
    for (const auto& s : traj.samples) worst = std::max(worst, s.report.max_relative_violation);
    const Tangent t0 = eom(plan.seed, policy.eval(0.0, plan.seed), plan.cp);

    std::cout << "seed: " << o.seed << '\n';
    std::cout << "rows: " << traj.size() << '\n';
    const double covered = static_cast<double>(plan.steps) * plan.dt / (pi * plan.cp.length);
    std::cout << "cycles: " << fmt_round(covered) << '\n';
    try {
        std::cout << "omega: " << fmt(omega(plan.seed, t0)) << '\n';
    } catch (const error& e) {
        std::cout << "omega: n/a (" << e.what() << ")\n";
    }
    std::cout << "max constraint violation: " << fmt(worst) << '\n';
    try {
        const FourVector center = orbit_center(traj);
        const double align = spin_alignment(plan.seed, t0.xdot, center, {0.0, 0.0, 1.0});
        std::cout << "spin alignment: " << fmt(align) << '\n';
    } catch (const error& e) {
        std::cout << "spin alignment: n/a (" << e.what() << ")\n";
    }
    const std::string path = out_path(o, "trajectory");
    auto os = open_out(path);
    if (o.format == "json")
        write_trajectory_json(os, traj, plan.meta);
    else
        write_trajectory_csv(os, traj, plan.meta);
    std::cout << "wrote " << path << '\n';
    return 0;
}

int run_phase(const Options& o) {
    const RunPlan plan = make_plan(o);
    const Trajectory traj =
        integrate(plan.seed, cm_gauge_policy(plan.cp), plan.dt, plan.steps, plan.projection, plan.cp);
    const std::vector<PhaseSample> series = phase_series(traj);

    std::cout << "seed: " << o.seed << '\n';
    std::cout << "total phase: " << fmt(series.back().phi) << '\n';
    const double period = pi * plan.cp.length;
    const double tau_end = series.back().tau;
    const int full = static_cast<int>(std::floor(tau_end / period + 1e-9));
    if (full > 0) {
        std::cout << "phase per cycle:";
        for (int c = 1; c <= full; ++c)
            std::cout << ' '
                      << fmt(phase(traj, static_cast<double>(c - 1) * period,
                                   static_cast<double>(c) * period));
        std::cout << '\n';
    }
    std::cout << "linear fit residual: " << fmt(linear_fit_residual(series)) << '\n';

    const std::string path = out_path(o, "phase");
    auto os = open_out(path);
    if (o.format == "json") {
        nlohmann::json j;
        for (const auto& [key, value] : plan.meta) j["meta"][key] = value;
        j["samples"] = nlohmann::json::array();
        for (const auto& s : series) {
            nlohmann::json row{{"tau", s.tau}, {"phi", s.phi}};
            if (s.kappa.at_infinity()) {
                row["kappa"] = nullptr;
            } else {
                const std::complex<double> z = s.kappa.affine();
                row["kappa"] = {z.real(), z.imag()};
            }
            j["samples"].push_back(std::move(row));
        }
        os << j.dump(2) << '\n';
    } else {
        write_phase_csv(os, series, plan.meta);
    }
    std::cout << "wrote " << path << '\n';
    return 0;
}

/* Pass/fail table for the verify subcommand. A check that throws is a
   failure carrying the exception text, not an abort of the run. */
struct CheckTable {
    int failures = 0;

    void report(const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "PASS " : "FAIL ") << name;
        if (!detail.empty()) std::cout << " (" << detail << ")";
        std::cout << '\n';
        if (!ok) ++failures;
    }

    template <typename Body>
    void run(const std::string& name, Body&& body) {
        try {
            const std::pair<bool, std::string> r = body();
            report(name, r.first, r.second);
        } catch (const std::exception& e) {
            report(name, false, e.what());
        }
    }
};

int run_verify(const Options& o) {
    const RunPlan plan = make_plan(o);
    const ClockParams cp = plan.cp;
    sampling::Rng rng(o.seed);
    std::cout << "seed: " << o.seed << '\n';
    CheckTable table;

    table.run("seed constraints", [&] {
        const ConstraintReport r = constraints(plan.seed, cp);
        return std::pair{r.max_relative_violation <= on_shell_tolerance,
                         "max relative violation " + fmt_round(r.max_relative_violation)};
    });

    table.run("constraint algebra", [&] {
        const auto obs = constraint_observables(cp);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const PhaseSpacePoint pt = sampling::random_on_shell_state(rng, cp);
            const auto scales = constraint_scales(pt, cp);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    const double b = poisson(obs[i], obs[j], pt);
                    worst = std::max(worst, std::abs(b) / std::sqrt(scales[i] * scales[j]));
                }
        }
        return std::pair{worst <= 1e-8, "max bracket " + fmt_round(worst)};
    });

    table.run("casimir invariants (exact flow)", [&] {
        const Trajectory traj = exact_trajectory(plan.seed, pi * cp.length / 50.0, 5000, cp);
        const double pp0 = cp.mass * cp.mass;
        const double ww0 = -0.25 * pp0 * pp0 * cp.length * cp.length;
        double drift = 0.0;
        for (const auto& s : traj.samples) {
            drift = std::max(drift, std::abs(s.report.casimir_pp - pp0) / pp0);
            drift = std::max(drift, std::abs(s.report.casimir_ww - ww0) / -ww0);
        }
        return std::pair{drift <= 1e-12, "relative drift " + fmt_round(drift) + " over 100 cycles"};
    });

    const std::string rk4_name =
        std::string("casimir invariants (rk4, projection ") + (plan.projection ? "on)" : "off)");
    table.run(rk4_name, [&] {
        const std::size_t n = 100000;
        const Trajectory traj =
            integrate(plan.seed, cm_gauge_policy(cp), cp.length / 1000.0, n, plan.projection, cp);
        const double pp0 = cp.mass * cp.mass;
        const double ww0 = -0.25 * pp0 * pp0 * cp.length * cp.length;
        double drift = 0.0;
        for (const auto& s : traj.samples) {
            drift = std::max(drift, std::abs(s.report.casimir_pp - pp0) / pp0);
            drift = std::max(drift, std::abs(s.report.casimir_ww - ww0) / -ww0);
        }
        if (!plan.projection) {
            const std::string path = o.out.empty() ? "drift.csv" : o.out;
            auto os = open_out(path);
            os << std::setprecision(17);
            Metadata meta = plan.meta;
            for (auto& [key, value] : meta) {
                if (key == "dt") value = fmt(cp.length / 1000.0);
                if (key == "steps") value = std::to_string(n);
            }
            write_meta_comment(os, meta);
            os << "tau,psi1,psi2,psi3,psi4\n";
            for (std::size_t i = 0; i < traj.size(); i += 100) {
                const auto& s = traj.samples[i];
                os << s.tau;
                for (const double psi : s.report.psi) os << ',' << psi;
                os << '\n';
            }
            std::cout << "wrote " << path << '\n';
        }
        return std::pair{drift <= 1e-9,
                         "relative drift " + fmt_round(drift) + " over 100000 steps"};
    });

    table.run("null worldline", [&] {
        double null_worst = 0.0, align_worst = 0.0;
        for (const int branch : {+1, -1}) {
            const ClockParams cpb(cp.mass, cp.length, branch);
            PhaseSpacePoint seed = seed_cm_state(cpb);
            if (plan.boost.active)
                seed = transform_state(seed, boost(plan.boost.rapidity, plan.boost.axis));
            const Multipliers u = cm_gauge_multipliers(cpb);
            for (const double frac : {0.0, 0.37, 1.21}) {
                const PhaseSpacePoint pt = propagate_exact(seed, frac * pi * cp.length, cpb);
                const Tangent t = eom(pt, u, cpb);
                null_worst = std::max(null_worst,
                                      std::abs(dot(t.xdot, t.xdot)) / (cp.mass * cp.mass));
                if (branch < 0) {
                    const FourVector r = t.xdot - (cp.mass / dot(pt.k, pt.p)) * pt.k;
                    align_worst = std::max(align_worst, euclid_norm(r) / euclid_norm(t.xdot));
                }
            }
        }
        return std::pair{null_worst <= 1e-11 && align_worst <= 1e-10,
                         "null defect " + fmt_round(null_worst) + ", direction defect " +
                             fmt_round(align_worst)};
    });

    table.run("clocking frequency", [&] {
        const PhaseSpacePoint seed = seed_cm_state(cp);
        const double target = 2.0 / cp.length;
        const Tangent t = eom(seed, cm_gauge_multipliers(cp), cp);
        const double w1 = omega(seed, t);
        const double w2 = omega_direction_form(seed, t);
        const Tangent th = eom(seed, Multipliers{2.0, 1.0, 0.0, 0.5 * cp.mass}, cp);
        const double wh = omega(seed, th);
        const bool ok = std::abs(w1 - target) <= 1e-9 * target &&
                        std::abs(w2 - target) <= 1e-9 * target &&
                        std::abs(wh - 0.5 * target) <= 1e-9 * target;
        return std::pair{ok, "omega " + fmt_round(w1) + ", half-gauge " + fmt_round(wh)};
    });

    table.run("worldline shape", [&] {
        const Trajectory traj = exact_trajectory(plan.seed, pi * cp.length / 2000.0, 1000, cp);
        const FrenetReport fr = frenet_sampled(traj, 500);
        const double target = 4.0 / (cp.length * cp.length);
        const bool ok = std::abs(fr.curvature - target) <= 1e-6 * target &&
                        std::abs(fr.torsion_proxy) <= 1e-8 &&
                        std::abs(fr.omega - 2.0 / cp.length) <= 1e-6 * (2.0 / cp.length);
        return std::pair{ok, "curvature " + fmt_round(fr.curvature) + ", torsion proxy " +
                                 fmt_round(fr.torsion_proxy)};
    });

    table.run("phase cycle", [&] {
        const std::size_t n = 2000;
        const Trajectory traj = exact_trajectory(plan.seed, pi * cp.length / n, n, cp);
        const double phi = phase(traj, 0.0, pi * cp.length);
        const double target = 2.0 * pi * cp.spin_sign;
        const double resid = linear_fit_residual(phase_series(traj));
        return std::pair{std::abs(phi - target) <= 1e-6 && resid <= 1e-7,
                         "cycle phase " + fmt_round(phi) + ", fit residual " + fmt_round(resid)};
    });

    table.run("multiplier regimes", [&] {
        const bool spots = rank_row(2.0, 1.0, cp).regime == "i" &&
                           rank_row(1.0, 1.0, cp).regime == "ii" &&
                           rank_row(1.0, -1.0, cp).regime == "iii" &&
                           rank_row(1.0, 0.0, cp).regime == "ii'" &&
                           rank_row(0.0, 0.0, cp).regime == "error";
        const bool signs = rank_row(2.0, 1.0, cp).j1 < 0.0 && rank_row(1.0, 2.0, cp).j1 > 0.0 &&
                           rank_row(-2.0, 1.0, cp).j1 > 0.0;
        return std::pair{spots && signs, "spot classifications and minor signs"};
    });

    table.run("field pairing", [&] {
        double worst = 0.0;
        std::uniform_real_distribution<double> span(-2.0, 2.0);
        for (int trial = 0; trial < 100; ++trial) {
            const PhaseSpacePoint pt = sampling::random_on_shell_state(rng, cp);
            const std::array<double, 3> E{span(rng), span(rng), span(rng)};
            const std::array<double, 3> B{span(rng), span(rng), span(rng)};
            const double lhs = em_secondary_constraint(pt, FieldTensor::from_fields(E, B));
            const FourVector& p = pt.p;
            const FourVector& k = pt.k;
            const std::array<double, 3> cross{p[2] * k[3] - p[3] * k[2],
                                              p[3] * k[1] - p[1] * k[3],
                                              p[1] * k[2] - p[2] * k[1]};
            double direct = 0.0;
            for (int i = 0; i < 3; ++i)
                direct += E[i] * (p[0] * k[i + 1] - k[0] * p[i + 1]) - B[i] * cross[i];
            worst = std::max(worst, std::abs(lhs - direct) / (1.0 + std::abs(direct)));
        }
        return std::pair{worst <= 1e-12, "max mismatch " + fmt_round(worst)};
    });

    if (table.failures == 0) {
        std::cout << "all checks passed\n";
        return 0;
    }
    std::cout << table.failures << " check(s) failed\n";
    return 1;
}

int run_rankmap(const Options& o) {
    const ClockParams cp(o.mass, o.ell, o.sigma);
    Metadata meta{{"mass", fmt(o.mass)}, {"ell", fmt(o.ell)}};
    std::vector<RankRow> rows;
    if (!o.at.empty()) {
        meta.emplace_back("at", fmt(o.at[0]) + ":" + fmt(o.at[1]));
        rows.push_back(rank_row(o.at[0], o.at[1], cp));
        const RankRow& r = rows.front();
        std::cout << "u1=" << fmt(r.u1) << " u2=" << fmt(r.u2) << " regime=" << r.regime
                  << " rank=" << r.rank << " j1=" << fmt(r.j1) << " j2=" << fmt(r.j2) << '\n';
    } else {
        meta.emplace_back("lo", fmt(o.lo));
        meta.emplace_back("hi", fmt(o.hi));
        meta.emplace_back("step", fmt(o.grid_step));
        rows = rank_sweep(o.lo, o.hi, o.grid_step, cp);
        std::cout << "cells: " << rows.size() << '\n';
        std::cout << "regimes:";
        for (const std::string name : {"i", "ii", "ii'", "iii", "error"}) {
            const auto count = std::count_if(rows.begin(), rows.end(),
                                             [&](const RankRow& r) { return r.regime == name; });
            std::cout << ' ' << name << '=' << count;
        }
        std::cout << '\n';
    }
    const std::string path = out_path(o, "rankmap");
    auto os = open_out(path);
    if (o.format == "json") {
        nlohmann::json j;
        for (const auto& [key, value] : meta) j["meta"][key] = value;
        j["cells"] = nlohmann::json::array();
        for (const auto& r : rows)
            j["cells"].push_back({{"u1", r.u1},
                                  {"u2", r.u2},
                                  {"regime", r.regime},
                                  {"rank", r.rank},
                                  {"j1", r.j1},
                                  {"j2", r.j2}});
        os << j.dump(2) << '\n';
    } else {
        write_rankmap_csv(os, rows, meta);
    }
    std::cout << "wrote " << path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Simulation and verification tool for relativistic rotator clocks"};
    app.fallthrough();
    app.set_config("--config", "", "Read option defaults from a key=value file");
    app.add_option("--mass", o.mass, "Clock mass")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--ell", o.ell, "Clock size parameter")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--sigma", o.sigma, "Branch sign, +1 or -1")
        ->capture_default_str()
        ->check(CLI::IsMember({1, -1}));
    app.add_option("--dt", o.dt, "Integration step; derived from --cycles when omitted")
        ->check(CLI::PositiveNumber);
    app.add_option("--steps", o.steps, "Step count; derived from --cycles when omitted")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--cycles", o.cycles, "Clock cycles to cover")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app.add_option("--boost", o.boost_args, "Boost the seed state: rapidity and axis x|y|z")
        ->expected(2);
    app.add_option("--projection", o.projection, "Pull each integration step back to the surface")
        ->capture_default_str()
        ->check(CLI::IsMember({std::string("on"), std::string("off")}));
    app.add_flag("--no-projection", o.no_projection, "Shorthand for --projection off");
    app.add_option("--out", o.out, "Output path; named after the subcommand when omitted");
    app.add_option("--format", o.format, "Output format")
        ->capture_default_str()
        ->check(CLI::IsMember({std::string("csv"), std::string("json")}));
    app.add_option("--seed", o.seed, "Seed for the randomized checks")->capture_default_str();
    app.add_option("--perturb", o.perturb, "Shift k1 of the seed state off the constraint surface");
    app.add_option("--lo", o.lo, "Rank sweep lower corner")->capture_default_str();
    app.add_option("--hi", o.hi, "Rank sweep upper corner")->capture_default_str();
    app.add_option("--step", o.grid_step, "Rank sweep grid step")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--at", o.at, "Classify a single multiplier pair instead of sweeping")
        ->expected(2);

    auto* simulate =
        app.add_subcommand("simulate", "Integrate a clock and export the trajectory");
    auto* phase_cmd =
        app.add_subcommand("phase", "Integrate a clock and export the clocking phase");
    auto* verify =
        app.add_subcommand("verify", "Run the invariant checks and report a pass/fail table");
    auto* rankmap =
        app.add_subcommand("rankmap", "Classify the multiplier plane of the velocity map");
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (simulate->parsed()) return run_simulate(o);
        if (phase_cmd->parsed()) return run_phase(o);
        if (verify->parsed()) return run_verify(o);
        if (rankmap->parsed()) return run_rankmap(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
