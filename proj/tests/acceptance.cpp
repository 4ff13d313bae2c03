// Acceptance runner: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "common.hpp"

using namespace tripwell;
using tw_test::example1;
using tw_test::example2;

namespace {

std::string cli_path;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void constants_criterion(Outcome& o, const PotentialSpec& sp, std::array<double, 4> want, bool oracle) {
    auto t0 = Clock::now();
    auto c = limit_constants(sp);
    double dt = seconds_since(t0);
    const char* names[4] = {"E0", "E1", "A0", "B0"};
    double got[4] = {c.E0, c.E1, c.A0, c.B0};
    for (int k = 0; k < 4; ++k) {
        o.detail << " " << names[k] << "=" << got[k];
        o.check(std::fabs(got[k] - want[static_cast<std::size_t>(k)]) <= 1e-3, std::string(names[k]) + " within 0.001");
    }
    if (oracle) {
        auto ex = exact_interface_energies(sp);
        auto ce = limit_constants_from(sp, ex.E0, ex.E1);
        double worst = std::max({std::fabs(c.E0 - ex.E0), std::fabs(c.E1 - ex.E1), std::fabs(c.A0 - ce.A0),
                                 std::fabs(c.B0 - ce.B0)});
        o.detail << " oracle_err=" << worst;
        o.check(worst <= 1e-6, "exact antiderivative within 1e-6");
    }
    o.detail << " time=" << dt << "s";
    o.check(dt < 1.0, "runtime < 1 s");
}

void c1(Outcome& o) { constants_criterion(o, example1(), {1.054, 0.165, 0.718, 1.883}, true); }
void c2(Outcome& o) { constants_criterion(o, example2(), {1.406, 0.073, 1.186, 2.143}, false); }

void c3(Outcome& o) {
    auto t0 = Clock::now();
    auto h1 = check_hypotheses(example1());
    auto h2 = check_hypotheses(example2());
    double dt = seconds_since(t0);
    o.check(h1.H6.holds && h1.H7.holds && h1.H8.holds, "example 1: H6, H7, H8 hold");
    o.check(h2.H6.holds, "example 2: H6 holds");
    o.check(!h2.H7.holds && std::fabs(h2.H7.worst_y - 0.585) <= 0.02, "example 2: H7 fails near 0.585");
    o.check(!h2.H8.holds && std::fabs(h2.H8.worst_y - 0.204) <= 0.02, "example 2: H8 fails near 0.204");
    o.detail << " ex2 H7.worst_y=" << h2.H7.worst_y << " H8.worst_y=" << h2.H8.worst_y << " time=" << dt << "s";
    o.check(dt < 1.0, "runtime < 1 s");
}

const std::vector<double> ladder{0.1, 0.07, 0.05};

void c4(Outcome& o) {
    auto t0 = Clock::now();
    auto sp = example1();
    auto c = limit_constants(sp);
    const double lim = 0.5385;
    o.check(std::fabs(c.A0 / c.z21 - lim) < 5e-4, "A0/z21 = 0.5385");
    double prev = INFINITY;
    for (double eps : ladder) {
        double I = energy_Ieps(build_two_well_sawtooth(sp, eps, {0.0, 1.0}, c), eps, sp).total;
        double gap = std::fabs(I - lim);
        o.detail << " I(" << eps << ")=" << I;
        o.check(I >= 0.9 * lim && I <= 1.25 * lim, "I in [0.9,1.25]*0.5385");
        o.check(gap <= prev + 0.01 * lim, "gap decreasing (1% allowance)");
        prev = gap;
    }
    double dt = seconds_since(t0);
    o.detail << " time=" << dt << "s";
    o.check(dt < 120.0, "runtime < 2 min");
}

void c5(Outcome& o) {
    auto t0 = Clock::now();
    auto sp = example1();
    MinimizeOptions opt;
    opt.starts = 3;
    opt.seed = 1;
    auto recs = epsilon_sweep(sp, ladder, opt);
    double prev = INFINITY;
    std::size_t nodes = minimization_nodes(ladder.back(), opt);
    for (const auto& r : recs) {
        double dev = std::fabs(r.lambda2 - 0.75);
        o.detail << " eps=" << r.eps << ":I=" << r.best_value << ",l2=" << r.lambda2 << ",l3=" << r.lambda3;
        o.check(r.lambda3 <= 0.05, "lambda3 <= 0.05");
        o.check(dev < prev, "|lambda2-0.75| decreasing");
        prev = dev;
        const StartResult* two = nullptr;
        const StartResult* three = nullptr;
        for (const auto& s : r.starts) {
            if (s.kind == "two-well") two = &s;
            if (s.kind == "three-well") three = &s;
        }
        o.check(two && three && two->ok && three->ok && two->result.value < three->result.value,
                "two-well seed beats three-well seed");
    }
    double dt = seconds_since(t0);
    o.detail << " nodes=" << nodes << " time=" << dt << "s";
    o.check(nodes <= 200000, "n <= 2e5 nodes");
    o.check(dt < 1800.0, "runtime < 30 min");
}

void c6(Outcome& o) {
    auto t0 = Clock::now();
    auto sp = example2();
    auto c = limit_constants(sp);
    const double e1 = 0.05, e2 = 0.025;
    for (int k = 0; k < 2; ++k) {
        double y = k == 0 ? 0.585 : 0.204;
        auto w = competitor_weights(c, y);
        double target = c.A0 * w.lambda2 + c.B0 * w.lambda3;
        auto build = [&](double eps) {
            return k == 0 ? build_h7_competitor(sp, eps, y, c) : build_h8_competitor(sp, eps, y, c);
        };
        double I1 = energy_Ieps(build(e1), e1, sp).total, I2 = energy_Ieps(build(e2), e2, sp).total;
        // I(eps) = I0 + b eps through both points
        double b = (I1 - I2) / (e1 - e2);
        double I0 = I1 - b * e1;
        const char* name = k == 0 ? "h7" : "h8";
        o.detail << " " << name << ": I(0.05)=" << I1 << " I(0.025)=" << I2 << " fit=" << I0 << " target=" << target;
        o.check(I0 < target, std::string(name) + " fitted energy below A0*l2+B0*l3");
    }
    double dt = seconds_since(t0);
    o.detail << " time=" << dt << "s";
    o.check(dt < 120.0, "runtime < 2 min");
}

void c7(Outcome& o) {
    auto t0 = Clock::now();
    auto s1 = example1();
    auto s2 = example2();
    auto k1 = limit_constants(s1);
    auto k2 = limit_constants(s2);

    double grad_err = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto g = tw_test::random_smooth(20, seed, 1.0);
        auto G = energy_gradient(g, 0.2, s1);
        for (std::size_t m = 1; m + 1 < g.size(); ++m) {
            const double h = 1e-4;
            auto at = [&](double t) {
                auto p = g;
                p.values[m] += t;
                return energy_Ieps(p, 0.2, s1).total;
            };
            double fd = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
            grad_err = std::max(grad_err, std::fabs(G[m - 1] - fd) / std::max(1.0, std::fabs(fd)));
        }
    }
    o.detail << " grad_rel=" << grad_err;
    o.check(grad_err < 1e-5, "gradient vs finite differences");

    std::vector<std::pair<GridFunction, std::pair<double, const PotentialSpec*>>> profiles;
    for (double eps : {0.1, 0.05}) {
        profiles.push_back({build_two_well_sawtooth(s1, eps, {0.0, 1.0}, k1), {eps, &s1}});
        profiles.push_back({build_three_well_profile(s1, eps, {0.0, 1.0}, k1), {eps, &s1}});
        profiles.push_back({build_mixed_profile(s1, eps, 0.5, k1), {eps, &s1}});
    }
    for (double eps : {0.05, 0.025}) {
        profiles.push_back({build_h7_competitor(s2, eps, 0.585, k2), {eps, &s2}});
        profiles.push_back({build_h8_competitor(s2, eps, 0.204, k2), {eps, &s2}});
    }
    double mm = -INFINITY, part = 0.0;
    std::mt19937_64 rng(2024);
    for (const auto& [g, ctx] : profiles) {
        const auto& [eps, sp] = ctx;
        std::size_t n = g.size();
        mm = std::max(mm, modica_mortola_violation(g, eps, *sp, 0, n - 1));
        for (int t = 0; t < 50; ++t) {
            std::size_t a = rng() % (n - 3), b = a + 2 + rng() % (n - a - 2);
            mm = std::max(mm, modica_mortola_violation(g, eps, *sp, a, b));
        }
        auto vf = volume_fractions(g, *sp, 0.1);
        part = std::max(part, std::fabs(vf.lambda[0] + vf.lambda[1] + vf.lambda[2] + vf.sigma_measure - 1.0));
    }
    o.detail << " mm_violation=" << mm << " partition_err=" << part;
    o.check(mm < 1e-6, "Modica-Mortola violation < 1e-6");
    o.check(part < 1e-12, "volume fractions partition [0,1]");

    double rearr = -INFINITY;
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        std::size_t n = 3 + rng() % 30;
        auto v = GridFunction::uniform(n);
        for (std::size_t j = 0; j < n; ++j) v.values[j + 1] = v.values[j] + 2.0 * U(rng) / static_cast<double>(n);
        auto u = rearrangement_envelope(v, {0.0, 1.0});
        for (std::size_t j = 0; j <= n; ++j) rearr = std::max(rearr, u.values[j] - v.values[j]);
    }
    o.detail << " rearrangement_max=" << rearr;
    o.check(rearr <= 1e-10, "rearrangement below the original");

    double fam = 0.0;
    for (const auto* sp : {&s1, &s2}) {
        const double top = 1.0 / (1.0 - sp->z2() / sp->z1());
        for (int t = 0; t < 1000; ++t) {
            auto f = e0_family(*sp, top * U(rng));
            fam = std::max(fam, std::fabs(f.w[0] + f.w[1] + f.w[2] - 1.0));
            fam = std::max(fam, std::fabs(f.w[0] * sp->z1() + f.w[1] * sp->z2() + f.w[2] * sp->z3()));
        }
    }
    o.detail << " e0_family_err=" << fam;
    o.check(fam < 1e-12, "e0_family identities");

    double dt = seconds_since(t0);
    o.detail << " time=" << dt << "s";
    o.check(dt < 60.0, "runtime < 1 min");
}

int run_cli(const std::string& args) {
    std::string cmd = cli_path + " " + args + " >/dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

void c8(Outcome& o) {
    if (cli_path.empty()) {
        o.check(false, "path of the tripwell executable not given");
        return;
    }
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "tripwell_acceptance_c8";
    fs::create_directories(dir);
    write_file((dir / "ex1.json").string(), R"({"kind":"polynomial-triple-well","wells":[-1,0.3333333333333333,1]})");
    std::string base = "sweep --potential " + (dir / "ex1.json").string() +
                       " --eps 0.1,0.07 --starts 3 --seed 11 --max-iters 200 --out ";
    int ra = run_cli(base + (dir / "a.csv").string());
    int rb = run_cli(base + (dir / "b.csv").string());
    o.check(ra == 0 && rb == 0, "sweep runs succeed");
    if (ra == 0 && rb == 0) {
        std::string a = read_file((dir / "a.csv").string()), b = read_file((dir / "b.csv").string());
        o.detail << " csv_digest=" << fnv1a_hex(a);
        o.check(!a.empty() && a == b, "identical CSVs");
    }
    fs::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) cli_path = argv[1];
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"constants, example 1", c1},
        {"constants, example 2", c2},
        {"hypothesis verdicts", c3},
        {"two-well upper bound along the eps ladder", c4},
        {"third-well suppression under multi-start minimization", c5},
        {"competitor strictness", c6},
        {"numerical hygiene", c7},
        {"sweep determinism", c8},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        o.detail.precision(7);
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << criteria[i].first << " |"
                  << o.detail.str() << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
