#include <gtest/gtest.h>

#include "common.hpp"

using namespace tripwell;
using tw_test::example1;
using tw_test::example2;

namespace {
// u_x = z2 on the first 3/4 of each period, z1 on the rest
GridFunction exact_sawtooth(const PotentialSpec& sp, int periods) {
    GridFunction g;
    const double P = 1.0 / periods;
    double f2 = -sp.z1() / (sp.z2() - sp.z1());
    g.nodes.push_back(0.0);
    g.values.push_back(0.0);
    for (int i = 0; i < periods; ++i) {
        double x0 = i * P;
        g.nodes.push_back(x0 + f2 * P);
        g.values.push_back(sp.z2() * f2 * P);
        g.nodes.push_back(x0 + P);
        g.values.push_back(0.0);
    }
    g.nodes.back() = 1.0;
    return g;
}
}  // namespace

TEST(Fractions, ZeroFunctionSitsInNoWell) {
    auto sp = example1();
    auto vf = volume_fractions(GridFunction::uniform(50), sp, 0.1);
    EXPECT_DOUBLE_EQ(vf.lambda[0] + vf.lambda[1] + vf.lambda[2], 0.0);
    EXPECT_NEAR(vf.sigma_measure, 1.0, 1e-14);
}

TEST(Fractions, ExactSawtooth) {
    auto sp = example1();
    auto vf = volume_fractions(exact_sawtooth(sp, 8), sp, 0.1);
    EXPECT_NEAR(vf.lambda[0], 0.25, 1e-12);
    EXPECT_NEAR(vf.lambda[1], 0.75, 1e-12);
    EXPECT_NEAR(vf.lambda[2], 0.0, 1e-12);
    EXPECT_NEAR(vf.sigma_measure, 0.0, 1e-12);
}

TEST(Fractions, StrictModeRejectsLargeEta) {
    auto sp = example1();
    double eta0 = coercivity_of(sp).eta0;
    EXPECT_THROW(volume_fractions(GridFunction::uniform(10), sp, eta0 * 1.01), ParameterError);
    EXPECT_NO_THROW(volume_fractions(GridFunction::uniform(10), sp, eta0 * 1.01, true));
}

TEST(Fractions, PartitionOfTheInterval) {
    auto sp = example1();
    auto c = limit_constants(sp);
    for (double eta : {0.05, 0.1}) {
        auto g = build_mixed_profile(sp, 0.05, 0.5, c);
        auto vf = volume_fractions(g, sp, eta);
        EXPECT_NEAR(vf.lambda[0] + vf.lambda[1] + vf.lambda[2] + vf.sigma_measure, 1.0, 1e-12);
    }
}

TEST(Layers, MonotoneRampGivesOneUpLayer) {
    auto sp = example1();
    // u_x runs linearly from z1 to z2 across the interval
    auto g = GridFunction::uniform(1000);
    double a = sp.z1(), b = sp.z2();
    for (std::size_t i = 0; i < g.size(); ++i) {
        double x = g.nodes[i];
        g.values[i] = a * x + 0.5 * (b - a) * x * x;
    }
    auto L = transition_layers(g, sp, 0.1);
    ASSERT_EQ(L.size(), 1u);
    EXPECT_EQ(L[0].kind, LayerKind::A_plus);
    EXPECT_LT(L[0].x_minus, L[0].x_plus);
}

TEST(Layers, TwoWellCounts) {
    auto sp = example1();
    auto c = limit_constants(sp);
    auto g = build_two_well_sawtooth(sp, 0.07, {0.0, 1.0}, c);
    int N = static_cast<int>(g.meta.at("N"));
    auto lc = count_layers(transition_layers(g, sp, 0.1));
    EXPECT_EQ(lc.A_plus, (N + 1) / 2);
    EXPECT_EQ(lc.A_minus, N / 2);
    EXPECT_EQ(lc.B_plus + lc.B_minus, 0);
}

TEST(DIntervals, Constructions) {
    auto s1 = example1();
    auto c1 = limit_constants(s1);
    double eps = 0.05, eta = 0.1;
    auto two = d_intervals(build_two_well_sawtooth(s1, eps, {0.0, 1.0}, c1), s1, eta);
    ASSERT_FALSE(two.empty());
    EXPECT_EQ(two.back().type, DType::Open);
    // plateaus of length eps d* with a sign change of u and no B layers
    for (std::size_t i = 0; i + 1 < two.size(); ++i) {
        EXPECT_EQ(two[i].type, DType::II);
        EXPECT_EQ(two[i].n_B, 0);
    }

    auto three = d_intervals(build_three_well_profile(s1, eps, {0.0, 1.0}, c1), s1, eta);
    int iv = 0;
    for (const auto& D : three)
        if (D.type == DType::IV) {
            ++iv;
            EXPECT_EQ(D.n_B, 2);
            EXPECT_TRUE(D.zero_in_E);
        }
    EXPECT_GT(iv, 0);

    auto s2 = example2();
    auto c2 = limit_constants(s2);
    auto h8a = d_intervals(build_h8_competitor(s2, eps, 0.204, c2), s2, eta);
    auto h8b = d_intervals(build_h8_competitor(s2, eps, 0.8, c2), s2, eta);
    auto has = [](const std::vector<DInterval>& v, DType t) {
        return std::any_of(v.begin(), v.end(), [&](const DInterval& D) { return D.type == t; });
    };
    EXPECT_TRUE(has(h8a, DType::III));
    EXPECT_TRUE(has(h8b, DType::IV));
}

TEST(Histogram, MassAndMean) {
    auto sp = example1();
    auto c = limit_constants(sp);
    auto g = build_three_well_profile(sp, 0.05, {0.0, 1.0}, c);
    auto h = empirical_young_measure(g, sp);
    ASSERT_EQ(h.masses.size(), 400u);
    ASSERT_EQ(h.edges.size(), 401u);
    double m = 0.0, first = 0.0;
    for (std::size_t k = 0; k < h.masses.size(); ++k) {
        m += h.masses[k];
        first += h.masses[k] * 0.5 * (h.edges[k] + h.edges[k + 1]);
    }
    EXPECT_NEAR(m, 1.0, 1e-12);
    EXPECT_NEAR(h.mean, 0.0, 1e-9);
    EXPECT_NEAR(first, h.mean, 0.5 * (h.edges[1] - h.edges[0]) + 1e-12);
}

TEST(E0Family, WeightsAreProbabilitiesWithZeroMean) {
    for (auto sp : {example1(), example2()}) {
        const double top = 1.0 / (1.0 - sp.z2() / sp.z1());
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> U(0.0, top);
        for (int t = 0; t < 1000; ++t) {
            double lam = t == 0 ? 0.0 : (t == 1 ? top : U(rng));
            auto f = e0_family(sp, lam);
            EXPECT_NEAR(f.w[0] + f.w[1] + f.w[2], 1.0, 1e-12);
            EXPECT_NEAR(f.w[0] * sp.z1() + f.w[1] * sp.z2() + f.w[2] * sp.z3(), 0.0, 1e-12);
            for (double w : f.w) EXPECT_GE(w, -1e-12);
        }
        EXPECT_NEAR(e0_family(sp, top).w[2], 0.0, 1e-12);
        EXPECT_THROW(e0_family(sp, top * 1.01), ParameterError);
    }
}

TEST(Rearrangement, IdentityOnSortedSlopes) {
    auto g = GridFunction::uniform(10);
    for (std::size_t i = 0; i < g.size(); ++i) g.values[i] = g.nodes[i] * g.nodes[i];
    auto r = rearrangement_envelope(g, {0.0, 1.0});
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(r.values[i], g.values[i], 1e-15);
}

TEST(Rearrangement, TwoCells) {
    GridFunction g;
    g.nodes = {0.0, 0.5, 1.0};
    g.values = {0.0, 1.0, 1.5};  // slopes 2, 1
    auto r = rearrangement_envelope(g, {0.0, 1.0});
    EXPECT_NEAR(r.values[1], 0.5, 1e-15);
    EXPECT_NEAR(r.values[2], 1.5, 1e-15);
}

TEST(Rearrangement, RandomMonotoneProperties) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        std::size_t n = 3 + rng() % 8;
        // equal cells so the rearrangement stays on the original nodes
        auto g = GridFunction::uniform(n);
        std::vector<double> sl(n);
        for (double& s : sl) s = 3.0 * U(rng);
        for (std::size_t j = 0; j < n; ++j) g.values[j + 1] = g.values[j] + sl[j] / static_cast<double>(n);
        auto r = rearrangement_envelope(g, {0.0, 1.0});
        EXPECT_DOUBLE_EQ(r.values.front(), g.values.front());
        EXPECT_NEAR(r.values.back(), g.values.back(), 1e-12);
        auto d = discrete_derivatives(r);
        std::vector<double> got = d.ux, want = sl;
        std::sort(want.begin(), want.end());
        for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(got[j], want[j], 1e-9);
        for (std::size_t j = 0; j <= n; ++j) EXPECT_LE(r.values[j], g.values[j] + 1e-12);
    }
}

TEST(Rearrangement, Preconditions) {
    auto g = GridFunction::uniform(4);
    g.values = {0.0, 0.5, 0.2, 0.3, 0.4};
    EXPECT_THROW(rearrangement_envelope(g, {0.0, 1.0}), PreconditionError);
    EXPECT_THROW(rearrangement_envelope(g, {0.1, 1.0}), ParameterError);
}

TEST(Analyze, ReportIsConsistent) {
    auto sp = example1();
    auto c = limit_constants(sp);
    auto g = build_two_well_sawtooth(sp, 0.05, {0.0, 1.0}, c);
    AnalyzeOptions o;
    auto r = analyze(g, sp, 0.1, o);
    auto lc = count_layers(r.layer_list);
    EXPECT_EQ(lc.A_plus, r.layers.A_plus);
    EXPECT_EQ(r.histogram.masses.size(), o.bins);
    EXPECT_EQ(r.d_list.size(), static_cast<std::size_t>(r.layers.A_plus));
}
