#include <gtest/gtest.h>

#include "common.hpp"

using namespace tripwell;
using tw_test::example1;

TEST(Transition, AnchoredAndBounded) {
    auto sp = example1();
    double eps = 0.1, e3 = eps * eps * eps;
    std::vector<double> x;
    for (int i = -4000; i <= 4000; ++i) x.push_back(i * e3 / 200.0);
    auto w = solve_transition_ode(sp, eps, Branch::z1_z2, x);
    EXPECT_NEAR(w[4000], 0.0, 1e-12);
    for (double v : w) {
        EXPECT_GE(v, sp.z1());
        EXPECT_LE(v, sp.z2());
    }
}

TEST(Transition, OdeResidual) {
    auto sp = example1();
    double eps = 0.1, e3 = eps * eps * eps, h = e3 / 1000.0;
    TransitionProfile p(sp, sp.z1(), sp.z2(), eps, 0.0);
    double maxslope = 0.0;
    std::vector<double> res;
    for (double x = -10 * e3; x <= 10 * e3; x += e3 / 50.0) {
        double fd = (p.value(x + h) - p.value(x - h)) / (2 * h);
        maxslope = std::max(maxslope, fd);
        res.push_back(std::fabs(e3 * fd - sqrt_W(sp, p.value(x))));
    }
    for (double r : res) EXPECT_LT(r, 1e-3 * maxslope * e3);
}

TEST(Transition, LayerEnergyIsInterfaceEnergy) {
    auto sp = example1();
    double eps = 0.1, e3 = eps * eps * eps;
    TransitionProfile p(sp, sp.z1(), sp.z2(), eps, 0.0);
    double a = p.left_extent(1e-12), b = p.right_extent(1e-12);
    int n = 200000;
    double s = 0.0, h = (b - a) / n;
    for (int i = 0; i < n; ++i) {
        double x = a + (i + 0.5) * h;
        double ws = p.slope(x);
        s += (e3 * e3 * ws * ws + eval_W(sp, p.value(x))) * h;
    }
    EXPECT_NEAR(s / e3, interface_energies(sp).E0, 1e-5);
}

TEST(Transition, WidthScalesWithEpsCubed) {
    auto sp = example1();
    double eta = 0.1;
    std::vector<double> c;
    for (double eps : {0.1, 0.05}) {
        TransitionProfile p(sp, sp.z1(), sp.z2(), eps, 0.0);
        double width = p.position(sp.z2() - eta) - p.position(sp.z1() + eta);
        c.push_back(width / std::pow(eps, 3));
    }
    EXPECT_NEAR(c[0] / c[1], 1.0, 1e-6);
}

TEST(Transition, ZeroMeanShiftIsDefinitional) {
    auto sp = example1();
    TransitionProfile p(sp, sp.z1(), sp.z2(), 0.1, 0.0);
    double l = 0.15;
    double om = zero_mean_shift(p, l);
    EXPECT_LT(std::fabs(p.primitive(l - om) - p.primitive(-om)), 1e-12);
}

TEST(Transition, BridgeJoinsTheOuterWells) {
    auto sp = example1();
    double eps = 0.05;
    auto bp = standard_bridge(eps, 2.0);
    EXPECT_NEAR(bp.mu, eps * eps, 1e-15);
    BridgedProfile w(sp, eps, bp);
    EXPECT_NEAR(w.value(w.left_extent(1e-12) - 1.0), sp.z1(), 1e-12);
    EXPECT_NEAR(w.value(w.right_extent(1e-12) + 1.0), sp.z3(), 1e-12);
    EXPECT_NEAR(w.value(w.bridge_start()), sp.z2() - bp.mu, 1e-9);
    EXPECT_NEAR(w.value(w.bridge_start() + w.bridge_width()), sp.z2() + bp.mu, 1e-9);
    // primitive is the integral of value
    double a = w.left_extent(1e-9), b = w.right_extent(1e-9);
    int n = 400000;
    double s = 0.0, h = (b - a) / n;
    for (int i = 0; i < n; ++i) s += w.value(a + (i + 0.5) * h) * h;
    EXPECT_NEAR(w.primitive(b) - w.primitive(a), s, 1e-10);
}

TEST(Transition, MatchedBridgeCostsAboutBothInterfaces) {
    auto sp = example1();
    double eps = 0.05, e3 = eps * eps * eps;
    auto w = BridgedProfile::matched(sp, eps, eps * eps);
    double a = w.left_extent(1e-12), b = w.right_extent(1e-12);
    int n = 400000;
    double s = 0.0, h = (b - a) / n;
    for (int i = 0; i < n; ++i) {
        double x = a + (i + 0.5) * h;
        double ws = w.slope(x);
        s += (e3 * e3 * ws * ws + eval_W(sp, w.value(x))) * h;
    }
    auto E = interface_energies(sp);
    EXPECT_NEAR(s / e3, E.E0 + E.E1, 1e-3);
}
