#include <gtest/gtest.h>

#include "common.hpp"

using namespace tripwell;
using tw_test::example1;
using tw_test::random_smooth;

namespace {
GridFunction sampled(std::size_t cells, double (*f)(double)) {
    auto g = GridFunction::uniform(cells);
    for (std::size_t i = 0; i < g.size(); ++i) g.values[i] = f(g.nodes[i]);
    g.values.front() = 0.0;
    g.values.back() = 0.0;
    return g;
}
double bump(double x) { return 0.1 * std::sin(M_PI * x); }
}  // namespace

TEST(Derivatives, QuadraticIsExactOnNonuniformGrids) {
    auto g = random_smooth(300, 11);
    for (std::size_t i = 0; i < g.size(); ++i) g.values[i] = g.nodes[i] * (1.0 - g.nodes[i]);
    auto d = discrete_derivatives(g);
    for (double k : d.uxx) EXPECT_NEAR(k, -2.0, 1e-8);
}

TEST(Derivatives, SineSecondDerivative) {
    auto g = sampled(2000, bump);
    auto d = discrete_derivatives(g);
    double worst = 0.0;
    for (std::size_t j = 1; j + 1 < g.size(); ++j)
        worst = std::max(worst, std::fabs(d.uxx[j - 1] + M_PI * M_PI * bump(g.nodes[j])));
    EXPECT_LT(worst, 1e-4);
}

TEST(Energy, ZeroFunction) {
    auto sp = example1();
    auto g = GridFunction::uniform(100);
    double eps = 0.1;
    double W0 = eval_W(sp, 0.0);
    EXPECT_NEAR(W0, 1.0 / 9.0, 1e-15);
    auto b = energy_Ieps(g, eps, sp);
    EXPECT_NEAR(b.total, W0 / (eps * eps), 1e-12);
    EXPECT_DOUBLE_EQ(b.interface, 0.0);
    EXPECT_DOUBLE_EQ(b.bulk_u2, 0.0);
}

TEST(Energy, ScalingBetweenEAndI) {
    auto sp = example1();
    for (std::uint64_t s = 1; s <= 5; ++s) {
        auto g = random_smooth(200, s, 2.0);
        double eps = 0.05 + 0.02 * static_cast<double>(s);
        auto E = energy_Eeps(g, eps, sp), I = energy_Ieps(g, eps, sp);
        EXPECT_NEAR(I.total * eps * eps, E.total, 1e-12 * E.total);
        EXPECT_EQ(E.scaling, Scaling::E_eps);
        EXPECT_GE(E.interface, 0.0);
        EXPECT_GE(E.bulk_W, 0.0);
        EXPECT_GE(E.bulk_u2, 0.0);
    }
}

TEST(Energy, ConvergesUnderRefinement) {
    auto sp = example1();
    double a = energy_Ieps(sampled(400, bump), 0.1, sp).total;
    double b = energy_Ieps(sampled(800, bump), 0.1, sp).total;
    EXPECT_LT(std::fabs(a - b), 0.01 * b);
}

TEST(Energy, GradientMatchesFiniteDifferences) {
    auto sp = example1();
    double eps = 0.2;
    for (std::uint64_t s = 1; s <= 5; ++s) {
        auto g = random_smooth(20, 100 + s, 1.0);
        auto G = energy_gradient(g, eps, sp);
        ASSERT_EQ(G.size(), g.size() - 2);
        for (std::size_t m = 1; m + 1 < g.size(); ++m) {
            const double h = 1e-4;
            auto at = [&](double t) {
                auto p = g;
                p.values[m] += t;
                return energy_Ieps(p, eps, sp).total;
            };
            double fd = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
            EXPECT_NEAR(G[m - 1], fd, 1e-5 * std::max(1.0, std::fabs(fd))) << "seed " << s << " node " << m;
        }
    }
}

TEST(Energy, HessianMatchesFiniteDifferences) {
    auto sp = example1();
    double eps = 0.2;
    for (std::uint64_t s = 1; s <= 3; ++s) {
        auto g = random_smooth(20, 200 + s, 2.0);
        auto H = energy_hessian(g, eps, sp);
        const std::size_t n = g.size() - 2;
        ASSERT_EQ(H.size(), n);
        auto entry = [&](std::size_t i, std::size_t k) {
            if (i > k) std::swap(i, k);
            if (k == i) return H.d[i];
            if (k == i + 1) return H.e[i];
            if (k == i + 2) return H.f[i];
            return 0.0;
        };
        double scale = 0.0;
        for (double v : H.d) scale = std::max(scale, std::fabs(v));
        for (std::size_t k = 0; k < n; ++k) {
            double h = 1e-6;
            auto p = g, q = g;
            p.values[k + 1] += h;
            q.values[k + 1] -= h;
            auto gp = energy_gradient(p, eps, sp), gq = energy_gradient(q, eps, sp);
            for (std::size_t i = 0; i < n; ++i)
                EXPECT_NEAR(entry(i, k), (gp[i] - gq[i]) / (2 * h), 1e-6 * scale) << i << "," << k;
        }
    }
}

TEST(Energy, RejectsBadInput) {
    auto sp = example1();
    auto g = GridFunction::uniform(10);
    EXPECT_THROW(energy_Ieps(g, 0.0, sp), ParameterError);
    g.nodes[3] = g.nodes[2];
    EXPECT_THROW(energy_Ieps(g, 0.1, sp), GridError);
}
