#include <gtest/gtest.h>

#include "common.hpp"

using namespace tripwell;
using tw_test::example1;

namespace {
MinimizeOptions quick() {
    MinimizeOptions o;
    o.grid_n = 3001;
    o.max_iters = 400;
    o.grad_tol = 1e-6;
    return o;
}
}  // namespace

TEST(Minimize, QuadraticPotentialGoesToZero) {
    auto sp = PotentialSpec::custom({-1.0, 0.5, 1.0}, {0.0, 0.0, 1.0});
    auto init = tw_test::random_smooth(200, 3, 1.0);
    auto r = minimize_Ieps(sp, 0.3, init, quick());
    EXPECT_TRUE(r.converged);
    EXPECT_LT(r.value, 1e-10);
    for (double v : r.u.values) EXPECT_NEAR(v, 0.0, 1e-6);
}

TEST(Minimize, DescentFromSmoothStarts) {
    auto sp = example1();
    for (auto rule : {StepRule::Newton, StepRule::QuasiNewton, StepRule::GradientArmijo}) {
        auto o = quick();
        o.step_rule = rule;
        auto init = tw_test::random_smooth(300, 7, 1.0);
        auto r = minimize_Ieps(sp, 0.3, init, o);
        ASSERT_FALSE(r.history.empty());
        EXPECT_DOUBLE_EQ(r.history.front(), energy_Ieps(init, 0.3, sp).total);
        for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1]);
        EXPECT_LE(r.value, r.initial_value);
        EXPECT_GE(r.value, 0.0);
        EXPECT_NEAR(r.value, energy_Ieps(r.u, 0.3, sp).total, 1e-10 * r.value);
        r.u.validate();
        if (r.converged) {
            double g = 0.0;
            for (double v : energy_gradient(r.u, 0.3, sp)) g = std::max(g, std::fabs(v));
            EXPECT_LE(g, o.grad_tol);
        }
    }
}

TEST(Minimize, NewtonConvergesFromTwoWellSeed) {
    auto sp = example1();
    auto c = limit_constants(sp);
    double eps = 0.1;
    auto o = quick();
    auto seed = resample_uniform(build_two_well_sawtooth(sp, eps, {0.0, 1.0}, c), minimization_nodes(eps, o));
    auto r = minimize_Ieps(sp, eps, seed, o);
    EXPECT_TRUE(r.converged) << r.message;
    EXPECT_LE(r.grad_norm, o.grad_tol);
    EXPECT_LT(r.value, energy_Ieps(seed, eps, sp).total);
}

TEST(Minimize, RejectsBadOptions) {
    auto sp = example1();
    auto g = GridFunction::uniform(10);
    MinimizeOptions o;
    o.grad_tol = 0.0;
    EXPECT_THROW(minimize_Ieps(sp, 0.1, g, o), ParameterError);
    o = MinimizeOptions{};
    o.starts = 0;
    EXPECT_THROW(multi_start(sp, 0.1, o), ParameterError);
    EXPECT_THROW(parse_step_rule("simplex"), ParameterError);
    EXPECT_EQ(parse_step_rule(to_string(StepRule::QuasiNewton)), StepRule::QuasiNewton);
    g.values[3] = 1.0;
    g.values.back() = 0.5;
    EXPECT_THROW(minimize_Ieps(sp, 0.1, g, {}), GridError);
}

TEST(MultiStart, SingleStartMatchesDirectMinimization) {
    auto sp = example1();
    auto c = limit_constants(sp);
    double eps = 0.1;
    auto o = quick();
    o.starts = 1;
    auto m = multi_start(sp, eps, o);
    auto seed = resample_uniform(build_two_well_sawtooth(sp, eps, {0.0, 1.0}, c), minimization_nodes(eps, o));
    auto r = minimize_Ieps(sp, eps, seed, o);
    EXPECT_EQ(m.start_kind, "two-well");
    EXPECT_DOUBLE_EQ(m.value, r.value);
    EXPECT_EQ(m.u.values, r.u.values);
}

TEST(MultiStart, TwoWellWinsNearTheLimit) {
    auto sp = example1();
    auto c = limit_constants(sp);
    double lim = c.A0 / c.z21;
    auto o = quick();
    o.starts = 3;
    o.seed = 4;
    auto m = multi_start(sp, 0.1, o);
    ASSERT_EQ(m.starts.size(), 3u);
    EXPECT_EQ(m.start_kind, "two-well");
    EXPECT_GE(m.value, 0.9 * lim);
    EXPECT_LE(m.value, 1.25 * lim);
    const auto& two = m.starts[0];
    const auto& three = m.starts[1];
    ASSERT_TRUE(two.ok && three.ok);
    EXPECT_EQ(three.kind, "three-well");
    EXPECT_GT(three.result.value, two.result.value);
    for (const auto& s : m.starts)
        if (s.ok) {
            EXPECT_LE(m.value, s.result.value);
        }
}

TEST(MultiStart, ReproducibleAcrossJobCounts) {
    auto sp = example1();
    auto o = quick();
    o.starts = 3;
    o.max_iters = 60;
    o.seed = 17;
    auto a = multi_start(sp, 0.1, o);
    o.jobs = 3;
    auto b = multi_start(sp, 0.1, o);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.start_index, b.start_index);
    for (std::size_t i = 0; i < a.starts.size(); ++i)
        EXPECT_EQ(a.starts[i].result.value, b.starts[i].result.value);
}

TEST(RandomSawtooth, AdmissibleAndSeeded) {
    auto sp = example1();
    auto c = limit_constants(sp);
    auto a = random_sawtooth(sp, 0.1, c, 2001, 5), b = random_sawtooth(sp, 0.1, c, 2001, 5);
    auto d = random_sawtooth(sp, 0.1, c, 2001, 6);
    a.validate();
    EXPECT_EQ(a.values, b.values);
    EXPECT_NE(a.values, d.values);
}

TEST(Sweep, RequiresDecreasingEps) {
    auto sp = example1();
    EXPECT_THROW(epsilon_sweep(sp, {0.05, 0.1}, quick()), ParameterError);
}
