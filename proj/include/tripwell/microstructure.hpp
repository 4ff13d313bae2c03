#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "numeric.hpp"
#include "potential.hpp"
#include "transition.hpp"

namespace tripwell {

enum class PlanKind { TwoWell, ThreeWell, H7, H8 };

inline std::string to_string(PlanKind k) {
    switch (k) {
        case PlanKind::TwoWell: return "two-well";
        case PlanKind::ThreeWell: return "three-well";
        case PlanKind::H7: return "h7-competitor";
        case PlanKind::H8: return "h8-competitor";
    }
    return "";
}

enum class ToothParity { Even, Any };

struct ConstructionOptions {
    GridOptions grid;
    std::optional<int> count;            // overrides N, M or the number of periods
    ToothParity parity = ToothParity::Any;  // two-well tooth count rule (Even when gluing)
};

struct CompetitorWeights {
    double lambda1 = 0, lambda2 = 0, lambda3 = 0;
};

// lambda2 = 1/(yhat z31 + z21), lambda3 = yhat lambda2, lambda1 = rest.
inline CompetitorWeights competitor_weights(const LimitConstants& c, double yhat) {
    if (!(yhat >= 0.0)) throw InvalidRatioError("yhat must be nonnegative");
    CompetitorWeights w;
    w.lambda2 = 1.0 / (yhat * c.z31 + c.z21);
    w.lambda3 = 1.0 / c.z31 - (c.z21 / c.z31) * w.lambda2;
    w.lambda1 = 1.0 - w.lambda2 - w.lambda3;
    if (!(w.lambda1 > 0.0)) throw InvalidRatioError("yhat gives lambda1 <= 0");
    return w;
}

inline double h8_threshold(const PotentialSpec& sp, const LimitConstants& c) {
    return std::sqrt(sp.z2() * c.z21 / (sp.z3() * c.z31));
}

inline double h8_omega_a(const PotentialSpec& sp, const LimitConstants& c, double yhat) {
    return (sp.z2() * c.z21 - sp.z3() * c.z31 * yhat * yhat) / (2.0 * sp.z2() * (c.z21 + yhat * c.z31));
}

namespace detail {

inline std::shared_ptr<const TransitionProfile> ascent_01(const PotentialSpec& sp, double eps) {
    return std::make_shared<TransitionProfile>(sp, sp.z1(), sp.z2(), eps, 0.0);
}
inline std::shared_ptr<const TransitionProfile> ascent_12(const PotentialSpec& sp, double eps) {
    return std::make_shared<TransitionProfile>(sp, sp.z2(), sp.z3(), eps, 0.5 * (sp.z2() + sp.z3()));
}

inline int smallest_even_above(double x) {
    int n = static_cast<int>(std::floor(x)) + 1;
    if (n % 2) ++n;
    return std::max(n, 2);
}
inline int smallest_int_above(double x) { return std::max(static_cast<int>(std::floor(x)) + 1, 1); }

inline void check_interval(double a, double b) {
    if (!(a >= 0.0 && b <= 1.0 && a < b)) throw ParameterError("interval must satisfy 0 <= a < b <= 1");
}

struct TwoWellPart {
    std::vector<Tooth> teeth;
    int N = 0;
    double omega_star = 0, l = 0;
    double w_right = 0;  // gradient at b
};

inline TwoWellPart two_well_teeth(const PotentialSpec& sp, double eps, double a, double b,
                                  const LimitConstants& c, const ConstructionOptions& opt) {
    TwoWellPart r;
    double L = b - a;
    double x = L / (eps * c.d_star);
    if (opt.count) r.N = *opt.count;
    else r.N = opt.parity == ToothParity::Even ? smallest_even_above(x) : smallest_int_above(x);
    if (r.N < 1) throw ConstructionError("two-well tooth count must be positive");
    r.l = L / r.N;
    auto w = ascent_01(sp, eps);
    r.omega_star = zero_mean_shift(*w, r.l);
    double gap = sp.z2() - sp.z1();
    if (w->value(-r.omega_star) - sp.z1() > 0.05 * gap || sp.z2() - w->value(r.l - r.omega_star) > 0.05 * gap) {
        int nmin = smallest_even_above(x);
        throw ConstructionError("eps too large: the transition layer does not fit in a tooth (N = " +
                                std::to_string(r.N) + ", rule gives N >= " + std::to_string(nmin) + ")");
    }
    for (int i = 0; i < r.N; ++i) {
        Tooth t;
        t.a = a + r.l * i;
        t.b = (i + 1 == r.N) ? b : a + r.l * (i + 1);
        if (i % 2 == 0) t.pieces.push_back(Piece::of_wave(t.a, t.b, w, +1, t.a + r.omega_star));
        else t.pieces.push_back(Piece::of_wave(t.a, t.b, w, -1, t.b - r.omega_star));
        r.teeth.push_back(std::move(t));
    }
    const Tooth& last = r.teeth.back();
    r.w_right = last.pieces.back().value(last.b);
    return r;
}

struct ThreeWellPart {
    std::vector<Tooth> teeth;
    int M = 0;
    double omega_star = 0, l = 0, a_plateau = 0, mu = 0, bridge_width = 0;
};

inline ThreeWellPart three_well_teeth(const PotentialSpec& sp, double eps, double a, double b,
                                      const LimitConstants& c, double w_left, const ConstructionOptions& opt) {
    ThreeWellPart r;
    double L = b - a;
    r.M = opt.count ? *opt.count : smallest_int_above(L / (eps * c.h_star));
    if (r.M < 1) throw ConstructionError("three-well tooth count must be positive");
    r.l = L / r.M;
    double q = coercivity_of(sp).q;
    BridgeParams bp = standard_bridge(eps, q);
    auto v = std::make_shared<BridgedProfile>(sp, eps, bp);
    r.mu = bp.mu;
    r.bridge_width = bp.width;
    r.omega_star = zero_mean_shift(*v, r.l);
    const double e3 = eps * eps * eps;
    const double y0 = a, y1 = a + r.l;
    if (r.l <= 4.0 * e3) throw ConstructionError("eps too large: tooth shorter than the ramps");
    const double w_end = v->value(r.l - r.omega_star);

    // matching block on (y0,y1): ramp from w_left, the rising profile
    // centred at cc, ramp to the first regular tooth
    auto block = [&](double cc) {
        Tooth t;
        t.a = y0;
        t.b = y1;
        t.pieces.push_back(Piece::linear(y0, y0 + e3, w_left, v->value(y0 + e3 - cc)));
        t.pieces.push_back(Piece::of_wave(y0 + e3, y1 - e3, v, +1, cc));
        t.pieces.push_back(Piece::linear(y1 - e3, y1, v->value(y1 - e3 - cc), w_end));
        return t;
    };
    const double tol = 1e-10;
    double lo = y0 + e3 - v->left_extent(tol);
    double hi = y1 - e3 - v->right_extent(tol);
    if (!(lo < hi)) throw ConstructionError("matching block: no admissible plateau length a");
    double Ilo = block(lo).integral(), Ihi = block(hi).integral();
    if (!(Ilo > 0.0 && Ihi < 0.0)) throw ConstructionError("matching block: no admissible plateau length a");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        double Im = block(mid).integral();
        if (Im > 0.0) lo = mid; else hi = mid;
    }
    double cc = std::fabs(block(lo).integral()) <= std::fabs(block(hi).integral()) ? lo : hi;
    r.a_plateau = (cc + v->left_extent(tol)) - (y0 + e3);
    r.teeth.push_back(block(cc));
    for (int i = 1; i < r.M; ++i) {
        Tooth t;
        t.a = a + r.l * i;
        t.b = (i + 1 == r.M) ? b : a + r.l * (i + 1);
        if (i % 2 == 1) t.pieces.push_back(Piece::of_wave(t.a, t.b, v, -1, t.b - r.omega_star));
        else t.pieces.push_back(Piece::of_wave(t.a, t.b, v, +1, t.a + r.omega_star));
        r.teeth.push_back(std::move(t));
    }
    return r;
}

inline void finish(GridFunction& g) {
    g.nodes.front() = 0.0;
    g.nodes.back() = 1.0;
    g.values.front() = 0.0;
    g.values.back() = 0.0;
}

}  // namespace detail

// Two-well sawtooth on (a,b), zero outside. Even teeth rise z1 -> z2, odd
// teeth fall back.
inline GridFunction build_two_well_sawtooth(const PotentialSpec& sp, double eps, std::pair<double, double> interval,
                                            const LimitConstants& c, const ConstructionOptions& opt = {}) {
    if (!(eps > 0.0)) throw ParameterError("eps must be positive");
    auto [a, b] = interval;
    detail::check_interval(a, b);
    auto part = detail::two_well_teeth(sp, eps, a, b, c, opt);
    std::vector<Tooth> teeth;
    if (a > 0.0) teeth.push_back(Tooth{0.0, a, {Piece::constant(0.0, a, 0.0)}});
    teeth.insert(teeth.end(), part.teeth.begin(), part.teeth.end());
    if (b < 1.0) teeth.push_back(Tooth{b, 1.0, {Piece::constant(b, 1.0, 0.0)}});
    GridFunction g = assemble_profile(teeth, eps, opt.grid);
    detail::finish(g);
    g.kind = "two-well";
    g.meta = {{"N", part.N}, {"omega_star", part.omega_star}, {"tooth_length", part.l}, {"a", a}, {"b", b}};
    return g;
}

inline GridFunction build_three_well_profile(const PotentialSpec& sp, double eps, std::pair<double, double> interval,
                                             const LimitConstants& c, const ConstructionOptions& opt = {},
                                             std::optional<double> w_left = std::nullopt) {
    if (!(eps > 0.0)) throw ParameterError("eps must be positive");
    auto [a, b] = interval;
    detail::check_interval(a, b);
    auto part = detail::three_well_teeth(sp, eps, a, b, c, w_left.value_or(sp.z1()), opt);
    std::vector<Tooth> teeth;
    if (a > 0.0) teeth.push_back(Tooth{0.0, a, {Piece::constant(0.0, a, 0.0)}});
    teeth.insert(teeth.end(), part.teeth.begin(), part.teeth.end());
    if (b < 1.0) teeth.push_back(Tooth{b, 1.0, {Piece::constant(b, 1.0, 0.0)}});
    GridFunction g = assemble_profile(teeth, eps, opt.grid);
    detail::finish(g);
    g.kind = "three-well";
    g.meta = {{"M", part.M},          {"omega_star", part.omega_star}, {"tooth_length", part.l},
              {"a_plateau", part.a_plateau}, {"mu", part.mu},          {"bridge_width", part.bridge_width},
              {"a", a},               {"b", b}};
    return g;
}

// Two-well teeth on (0,l0) glued to the three-well part on (l0,1) through
// the matching block.
inline GridFunction build_mixed_profile(const PotentialSpec& sp, double eps, double l0, const LimitConstants& c,
                                        const ConstructionOptions& opt = {}) {
    if (!(l0 > 0.0 && l0 < 1.0)) throw ParameterError("l0 must lie in (0,1)");
    ConstructionOptions o2 = opt;
    o2.count.reset();
    o2.parity = ToothParity::Even;
    auto two = detail::two_well_teeth(sp, eps, 0.0, l0, c, o2);
    auto three = detail::three_well_teeth(sp, eps, l0, 1.0, c, two.w_right, o2);
    std::vector<Tooth> teeth = two.teeth;
    teeth.insert(teeth.end(), three.teeth.begin(), three.teeth.end());
    GridFunction g = assemble_profile(teeth, eps, opt.grid);
    detail::finish(g);
    g.kind = "mixed";
    g.meta = {{"N", two.N}, {"M", three.M}, {"omega_star", two.omega_star}, {"omega_star_3", three.omega_star},
              {"l0", l0}};
    return g;
}

// Periodic competitor pattern: plateau values and switch positions on a
// unit period, transitions mollified by heteroclinics.
struct PeriodPattern {
    std::vector<double> values;    // plateau values, first == last == z1
    std::vector<double> switches;  // switch positions in (0,1), size values-1
    double interface_cost = 0.0;   // sum of interface energies per period
};

namespace detail {

// integral of u^2 over one unit period of the sharp pattern
inline double sharp_u2(const PeriodPattern& p) {
    double u = 0.0, s = 0.0, x = 0.0;
    for (std::size_t k = 0; k < p.values.size(); ++k) {
        double xe = k + 1 < p.values.size() ? p.switches[k] : 1.0;
        double L = xe - x, m = p.values[k];
        s += L * (u * u + u * m * L + m * m * L * L / 3.0);
        u += m * L;
        x = xe;
    }
    return s;
}

// Period count minimizing C n eps + j/(n eps)^2 (sharp-interface energy).
inline int best_period_count(double C, double j, double eps) {
    double d = std::cbrt(C / (2.0 * j));
    double n0 = 1.0 / (eps * d);
    int lo = std::max(1, static_cast<int>(std::floor(n0))), hi = lo + 1;
    auto e = [&](int n) { return C * n * eps + j / ((n * eps) * (n * eps)); };
    return e(lo) <= e(hi) ? lo : hi;
}

struct Transition {
    std::shared_ptr<const MonotoneWave> wave;
    int sigma;
};

inline Transition transition_between(const PotentialSpec& sp, double, double from, double to,
                                     std::shared_ptr<const MonotoneWave> w01,
                                     std::shared_ptr<const MonotoneWave> w12,
                                     std::shared_ptr<const MonotoneWave> w02) {
    auto idx = [&](double z) { return z == sp.z1() ? 0 : (z == sp.z2() ? 1 : 2); };
    int i = idx(from), j = idx(to);
    int lo = std::min(i, j), hi = std::max(i, j);
    int sigma = j > i ? +1 : -1;
    if (lo == 0 && hi == 1) return {w01, sigma};
    if (lo == 1 && hi == 2) return {w12, sigma};
    return {w02, sigma};
}

}  // namespace detail

struct CompetitorInfo {
    CompetitorWeights weights;
    int periods = 0;
    double period = 0.0;
    double interface_cost = 0.0;
    double sharp_energy = 0.0;  // C/d + j d^2 at the chosen period
    std::string branch;         // "a", "b" for h8
    double omega = 0.0;
};

inline GridFunction build_competitor(const PotentialSpec& sp, double eps, const PeriodPattern& pat,
                                     const std::vector<int>& adjust, const ConstructionOptions& opt,
                                     CompetitorInfo& info) {
    if (!(eps > 0.0)) throw ParameterError("eps must be positive");
    double j = detail::sharp_u2(pat);
    int n = opt.count ? *opt.count : detail::best_period_count(pat.interface_cost, j, eps);
    if (n < 2) throw ConstructionError("eps too large: fewer than 2 competitor periods");
    const double P = 1.0 / n;
    info.periods = n;
    info.period = P;
    info.interface_cost = pat.interface_cost;
    {
        double d = P / eps;
        info.sharp_energy = pat.interface_cost / d + j * d * d;
    }
    auto w01 = detail::ascent_01(sp, eps);
    auto w12 = detail::ascent_12(sp, eps);
    double q = coercivity_of(sp).q;
    auto w02 = std::make_shared<BridgedProfile>(BridgedProfile::matched(sp, eps, standard_bridge(eps, q).mu));
    std::vector<detail::Transition> tr;
    for (std::size_t k = 0; k + 1 < pat.values.size(); ++k)
        tr.push_back(detail::transition_between(sp, eps, pat.values[k], pat.values[k + 1], w01, w12, w02));

    auto period_tooth = [&](double x0, double delta) {
        std::vector<double> sw(pat.switches.size());
        for (std::size_t k = 0; k < sw.size(); ++k) sw[k] = x0 + P * pat.switches[k] + adjust[k] * delta;
        Tooth t;
        t.a = x0;
        t.b = x0 + P;
        double start = x0;
        for (std::size_t k = 0; k < sw.size(); ++k) {
            double end = (k + 1 < sw.size()) ? 0.5 * (sw[k] + sw[k + 1]) : x0 + P;
            t.pieces.push_back(Piece::of_wave(start, end, tr[k].wave, tr[k].sigma, sw[k]));
            start = end;
        }
        return t;
    };
    // zero mean per period via the adjustable switches
    double lo = -0.1 * P, hi = 0.1 * P;
    double Ilo = period_tooth(0.0, lo).integral(), Ihi = period_tooth(0.0, hi).integral();
    if ((Ilo > 0) == (Ihi > 0)) throw ConstructionError("competitor: cannot restore zero mean per period");
    bool inc = Ihi > Ilo;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        double Im = period_tooth(0.0, mid).integral();
        if ((Im > 0) == inc) hi = mid; else lo = mid;
    }
    double delta = 0.5 * (lo + hi);

    std::vector<Tooth> teeth;
    for (int i = 0; i < n; ++i) {
        Tooth t = period_tooth(P * i, delta);
        if (i + 1 == n) {
            t.b = 1.0;
            t.pieces.back().b = 1.0;
        }
        teeth.push_back(std::move(t));
    }
    // plateaus must be long enough for the mollified transitions to saturate
    for (const auto& t : teeth)
        for (std::size_t k = 0; k + 1 < t.pieces.size(); ++k) {
            double x = t.pieces[k].b;
            if (std::fabs(t.pieces[k].value(x) - t.pieces[k + 1].value(x)) > 1e-9)
                throw ConstructionError("eps too large: competitor plateaus shorter than the transitions");
        }
    ConstructionOptions o = opt;
    if (o.grid.h_plateau <= 0.0) o.grid.h_plateau = P / 100.0;
    GridFunction g = assemble_profile(teeth, eps, o.grid);
    detail::finish(g);
    return g;
}

// z1 | z3 | z2 | z3 | z1 with fractions lambda1/2, lambda3/2, lambda2,
// lambda3/2, lambda1/2 per period.
inline GridFunction build_h7_competitor(const PotentialSpec& sp, double eps, double yhat, const LimitConstants& c,
                                        const ConstructionOptions& opt = {}, CompetitorInfo* info_out = nullptr) {
    CompetitorInfo info;
    info.weights = competitor_weights(c, yhat);
    const auto& w = info.weights;
    PeriodPattern pat;
    pat.values = {sp.z1(), sp.z3(), sp.z2(), sp.z3(), sp.z1()};
    double s1 = 0.5 * w.lambda1, s2 = s1 + 0.5 * w.lambda3, s3 = s2 + w.lambda2, s4 = s3 + 0.5 * w.lambda3;
    pat.switches = {s1, s2, s3, s4};
    pat.interface_cost = 2.0 * (c.E0 + 2.0 * c.E1);
    GridFunction g = build_competitor(sp, eps, pat, {+1, 0, 0, -1}, opt, info);
    g.kind = "h7-competitor";
    g.meta = {{"yhat", yhat},          {"periods", info.periods},      {"period", info.period},
              {"lambda1", w.lambda1},  {"lambda2", w.lambda2},        {"lambda3", w.lambda3},
              {"sharp_energy", info.sharp_energy}};
    if (info_out) *info_out = info;
    return g;
}

inline GridFunction build_h8_competitor(const PotentialSpec& sp, double eps, double yhat, const LimitConstants& c,
                                        const ConstructionOptions& opt = {}, CompetitorInfo* info_out = nullptr) {
    CompetitorInfo info;
    info.weights = competitor_weights(c, yhat);
    const auto& w = info.weights;
    PeriodPattern pat;
    double oa = h8_omega_a(sp, c, yhat);
    const double az1 = std::fabs(sp.z1());
    if (yhat <= h8_threshold(sp, c)) {
        info.branch = "a";
        info.omega = oa;
        double t1 = std::fabs(sp.z2()) / az1 * (1.0 - oa) * w.lambda2;
        pat.values = {sp.z1(), sp.z2(), sp.z3(), sp.z1()};
        pat.switches = {t1, t1 + w.lambda2, t1 + w.lambda2 + w.lambda3};
    } else {
        info.branch = "b";
        double ob = -oa;
        info.omega = ob;
        double t1 = std::fabs(sp.z3()) / az1 * (1.0 - ob) * w.lambda3;
        pat.values = {sp.z1(), sp.z3(), sp.z2(), sp.z1()};
        pat.switches = {t1, t1 + w.lambda3, t1 + w.lambda3 + w.lambda2};
    }
    if (!(pat.switches.back() < 1.0)) throw InvalidRatioError("yhat leaves no room for the final z1 run");
    pat.interface_cost = 2.0 * (c.E0 + c.E1);
    GridFunction g = build_competitor(sp, eps, pat, {0, 0, +1}, opt, info);
    g.kind = "h8-competitor";
    g.meta = {{"yhat", yhat},         {"periods", info.periods},     {"period", info.period},
              {"lambda1", w.lambda1}, {"lambda2", w.lambda2},       {"lambda3", w.lambda3},
              {"omega", info.omega},  {"branch_b", info.branch == "b" ? 1.0 : 0.0},
              {"sharp_energy", info.sharp_energy}};
    if (info_out) *info_out = info;
    return g;
}

}  // namespace tripwell
