#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"
#include "numeric.hpp"
#include "polynomial.hpp"
#include "potential.hpp"

namespace tripwell {

struct InterfaceEnergies {
    double E0 = 0.0, E1 = 0.0;
    double error = 0.0;  // quadrature error estimate (sum of both)
};

namespace detail {
inline double integrate_sqrtW(const PotentialSpec& sp, double a, double b, double tol, double* err_out) {
    if (a == b) {
        if (err_out) *err_out = 0.0;
        return 0.0;
    }
    double sign = 1.0;
    if (a > b) { std::swap(a, b); sign = -1.0; }
    // split at wells so every piece is smooth
    std::vector<double> cuts{a};
    for (double z : sp.wells)
        if (z > a && z < b) cuts.push_back(z);
    cuts.push_back(b);
    double total = 0.0, err = 0.0;
    auto f = [&](double s) { return sqrt_W(sp, s); };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double e = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, cuts[i], cuts[i + 1], 20,
                                                                                 1e-3 * tol, &e);
        err += e;
    }
    if (err > tol) throw NumericError("quadrature of sqrt(W) did not reach the requested tolerance", err);
    if (err_out) *err_out = err;
    return sign * total;
}
}  // namespace detail

inline void check_tol(double tol) {
    if (!(tol > 0.0 && tol <= 1e-3)) throw ParameterError("tol must lie in (0, 1e-3]");
}

inline InterfaceEnergies interface_energies(const PotentialSpec& sp, double tol = 1e-10) {
    check_tol(tol);
    InterfaceEnergies r;
    double e0 = 0.0, e1 = 0.0;
    r.E0 = 2.0 * detail::integrate_sqrtW(sp, sp.z1(), sp.z2(), tol / 2.0, &e0);
    r.E1 = 2.0 * detail::integrate_sqrtW(sp, sp.z2(), sp.z3(), tol / 2.0, &e1);
    r.error = 2.0 * (e0 + e1);
    return r;
}

// Exact values for the triple-well family from the antiderivative of the
// cubic factor (s-z1)(s-z2)(s-z3).
inline InterfaceEnergies exact_interface_energies(const PotentialSpec& sp) {
    if (sp.kind != PotentialSpec::Kind::TripleWell)
        throw SpecificationError("exact interface energies need the triple-well family");
    Polynomial p = Polynomial({-sp.z1(), 1.0}) * Polynomial({-sp.z2(), 1.0}) * Polynomial({-sp.z3(), 1.0});
    std::vector<double> c(p.coeffs().size() + 1, 0.0);
    for (std::size_t i = 0; i < p.coeffs().size(); ++i) c[i + 1] = p.coeffs()[i] / static_cast<double>(i + 1);
    Polynomial P(c);
    InterfaceEnergies r;
    r.E0 = 2.0 * std::fabs(P(sp.z2()) - P(sp.z1()));
    r.E1 = 2.0 * std::fabs(P(sp.z3()) - P(sp.z2()));
    return r;
}

// H(s) = signed integral of sqrt(W) from 0 to s. Closed form for the
// triple-well family (sqrt W = |cubic|), quadrature otherwise.
inline double H_antiderivative(const PotentialSpec& sp, double s, double tol = 1e-10) {
    check_tol(tol);
    if (sp.kind != PotentialSpec::Kind::TripleWell) return detail::integrate_sqrtW(sp, 0.0, s, tol, nullptr);
    Polynomial p = Polynomial({-sp.z1(), 1.0}) * Polynomial({-sp.z2(), 1.0}) * Polynomial({-sp.z3(), 1.0});
    std::vector<double> c(p.coeffs().size() + 1, 0.0);
    for (std::size_t i = 0; i < p.coeffs().size(); ++i) c[i + 1] = p.coeffs()[i] / static_cast<double>(i + 1);
    Polynomial P(c);
    double a = std::min(0.0, s), b = std::max(0.0, s);
    std::vector<double> cuts{a};
    for (double z : sp.wells)
        if (z > a && z < b) cuts.push_back(z);
    cuts.push_back(b);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += std::fabs(P(cuts[i + 1]) - P(cuts[i]));
    return s < 0.0 ? -total : total;
}

struct LimitConstants {
    double E0 = 0.0, E1 = 0.0;
    double A0 = 0.0, B0 = 0.0;
    double d_star = 0.0, h_star = 0.0;
    double z21 = 0.0, z31 = 0.0;
    double quad_error = 0.0;
};

inline LimitConstants limit_constants_from(const PotentialSpec& sp, double E0, double E1) {
    LimitConstants c;
    c.E0 = E0;
    c.E1 = E1;
    const double z1 = sp.z1(), z2 = sp.z2(), z3 = sp.z3();
    c.z21 = 1.0 - z2 / z1;
    c.z31 = 1.0 - z3 / z1;
    const double k = std::pow(1.5, 2.0 / 3.0);
    c.A0 = k * std::pow(E0, 2.0 / 3.0) * std::cbrt(z2 * z2 * c.z21);
    c.B0 = k * std::pow(E0 + E1, 2.0 / 3.0) * std::cbrt(z3 * z3 * c.z31);
    const double alpha = 1.0 / c.z21, beta = 1.0 / c.z31;
    c.d_star = std::cbrt(3.0 * E0) / std::cbrt(2.0 * alpha * alpha * alpha * z2 * z2 * c.z21);
    c.h_star = std::cbrt(3.0 * (E0 + E1)) / std::cbrt(2.0 * beta * beta * beta * z3 * z3 * c.z31);
    return c;
}

inline LimitConstants limit_constants(const PotentialSpec& sp, double tol = 1e-10) {
    InterfaceEnergies e = interface_energies(sp, tol);
    LimitConstants c = limit_constants_from(sp, e.E0, e.E1);
    c.quad_error = e.error;
    return c;
}

enum class FKind { f6, f7, f8, f0 };

inline double eval_f(const LimitConstants& c, const PotentialSpec& sp, FKind which, double y) {
    if (!(y >= 0.0)) throw ParameterError("eval_f requires y >= 0");
    const double z2 = sp.z2(), z3 = sp.z3(), z21 = c.z21, z31 = c.z31;
    const double S = c.E0 + c.E1;
    auto f0 = [&]() {
        double n = y * y * z31 * z3 - z2 * z21;
        return n * n / (4.0 * (z21 + y * z31));
    };
    switch (which) {
        case FKind::f6:
            return 9.0 * S * S * (z2 * z2 + y * y * y * z3 * z3 + 3.0 * y * z2 * (y * z3 + z2));
        case FKind::f7: {
            double T = c.E0 + 2.0 * c.E1;
            return 2.25 * T * T * (z2 * z2 * z21 + y * y * y * z3 * z3 * z31 + 3.0 * y * z2 * z31 * (y * z3 + z2));
        }
        case FKind::f8:
            return 9.0 * S * S * (z2 * z2 * z21 + y * y * y * z3 * z3 * z31 - 3.0 * f0());
        case FKind::f0:
            return f0();
    }
    return 0.0;
}

inline double eval_f(const PotentialSpec& sp, FKind which, double y, double tol = 1e-10) {
    return eval_f(limit_constants(sp, tol), sp, which, y);
}

struct HypothesisVerdict {
    std::string name;
    bool holds = true;
    std::vector<std::pair<double, double>> violation_intervals;  // hi may be +inf
    double worst_y = 0.0;
    double worst_margin = 0.0;
    bool reduced_confidence = false;
};

struct HypothesisReport {
    HypothesisVerdict H6, H7, H8;
    double y_max = 50.0;
};

namespace detail {

// Polynomial in y whose sign decides the hypothesis, and the margin
// f(y) - (A0 + B0 y)^3 itself.
inline Polynomial hypothesis_polynomial(const LimitConstants& c, const PotentialSpec& sp, FKind which) {
    const double z2 = sp.z2(), z3 = sp.z3(), z21 = c.z21, z31 = c.z31;
    const double S = c.E0 + c.E1;
    Polynomial lin({c.A0, c.B0});
    Polynomial cube = lin * lin * lin;
    switch (which) {
        case FKind::f6: {
            double k = 9.0 * S * S;
            return Polynomial({k * z2 * z2, k * 3.0 * z2 * z2, k * 3.0 * z2 * z3, k * z3 * z3}) - cube;
        }
        case FKind::f7: {
            double T = c.E0 + 2.0 * c.E1;
            double k = 2.25 * T * T;
            return Polynomial({k * z2 * z2 * z21, k * 3.0 * z2 * z2 * z31, k * 3.0 * z2 * z3 * z31,
                               k * z3 * z3 * z31}) -
                   cube;
        }
        case FKind::f8: {
            double k = 9.0 * S * S;
            Polynomial den({4.0 * z21, 4.0 * z31});
            Polynomial core({z2 * z2 * z21, 0.0, 0.0, z3 * z3 * z31});
            Polynomial num({-z2 * z21, 0.0, z31 * z3});
            return k * (den * core - 3.0 * (num * num)) - den * cube;
        }
        default:
            throw ParameterError("no hypothesis is attached to f0");
    }
}

template <class M>
HypothesisVerdict decide(const std::string& name, const Polynomial& P, M&& margin, double y_max,
                         std::size_t grid_n) {
    HypothesisVerdict v;
    v.name = name;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> breaks{0.0};
    bool tail_negative = false;
    // Leading terms that cancel to rounding level are dropped before the
    // Sturm analysis (the y^4 term of the H8 quartic vanishes identically).
    Polynomial Pr = P;
    Pr.chop(1e-12);
    const double scale = std::max(Pr.max_abs_coeff(), 1e-300);
    if (Pr.degree() < 1 || std::fabs(Pr.leading()) < 1e-9 * scale) {
        // degenerate leading term: dense scan on [0, y_max]
        v.reduced_confidence = true;
        double prev = margin(0.0);
        for (std::size_t i = 1; i <= grid_n; ++i) {
            double y = y_max * static_cast<double>(i) / static_cast<double>(grid_n);
            double cur = margin(y);
            if ((cur < 0) != (prev < 0)) {
                double yl = y_max * static_cast<double>(i - 1) / static_cast<double>(grid_n);
                breaks.push_back(bisect(margin, yl, y, 1e-12));
            }
            prev = cur;
        }
        breaks.push_back(y_max);
        tail_negative = false;
    } else {
        double B = root_bound(Pr);
        for (double r : isolate_roots(Pr, 0.0, B, 1e-12)) breaks.push_back(r);
        breaks.push_back(inf);
        tail_negative = Pr.leading() < 0.0;
    }
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double lo = breaks[i], hi = breaks[i + 1];
        bool neg;
        if (std::isinf(hi)) neg = tail_negative;
        else {
            double mid = 0.5 * (lo + hi);
            neg = (hi - lo > 0.0) && margin(mid) < 0.0;
        }
        if (!neg) continue;
        if (!v.violation_intervals.empty() && v.violation_intervals.back().second == lo)
            v.violation_intervals.back().second = hi;
        else v.violation_intervals.push_back({lo, hi});
    }
    v.holds = v.violation_intervals.empty();

    // worst point: dense scan of the margin, refined locally
    const double top = y_max;
    double best = inf, arg = 0.0;
    for (std::size_t i = 0; i <= grid_n; ++i) {
        double y = top * static_cast<double>(i) / static_cast<double>(grid_n);
        double m = margin(y);
        if (m < best) { best = m; arg = y; }
    }
    double h = top / static_cast<double>(grid_n);
    double ys = golden_min(margin, std::max(0.0, arg - h), std::min(top, arg + h), 1e-14);
    if (margin(ys) < best) { best = margin(ys); arg = ys; }
    for (const auto& iv : v.violation_intervals) {
        double hi = std::isinf(iv.second) ? std::max(iv.first * 2.0 + 1.0, top) : iv.second;
        double y = golden_min(margin, iv.first, hi, 1e-14);
        if (margin(y) < best) { best = margin(y); arg = y; }
    }
    v.worst_y = arg;
    v.worst_margin = best;
    if (!v.holds && v.worst_margin >= 0.0) v.worst_margin = -0.0;
    return v;
}
}  // namespace detail

inline HypothesisReport check_hypotheses(const PotentialSpec& sp, const LimitConstants& c, double y_max = 50.0,
                                         std::size_t grid_n = 100000) {
    if (!(y_max >= 10.0)) throw ParameterError("y_max must be at least 10");
    if (grid_n < 1000) throw ParameterError("grid_n must be at least 1000");
    HypothesisReport r;
    r.y_max = y_max;
    auto cube = [&](double y) {
        double l = c.A0 + c.B0 * y;
        return l * l * l;
    };
    auto m6 = [&](double y) { return eval_f(c, sp, FKind::f6, y) - cube(y); };
    auto m7 = [&](double y) { return eval_f(c, sp, FKind::f7, y) - cube(y); };
    auto m8 = [&](double y) { return eval_f(c, sp, FKind::f8, y) - cube(y); };
    r.H6 = detail::decide("H6", detail::hypothesis_polynomial(c, sp, FKind::f6), m6, y_max, grid_n);
    r.H7 = detail::decide("H7", detail::hypothesis_polynomial(c, sp, FKind::f7), m7, y_max, grid_n);
    r.H8 = detail::decide("H8", detail::hypothesis_polynomial(c, sp, FKind::f8), m8, y_max, grid_n);
    return r;
}

inline HypothesisReport check_hypotheses(const PotentialSpec& sp, double y_max = 50.0, std::size_t grid_n = 100000,
                                         double tol = 1e-10) {
    return check_hypotheses(sp, limit_constants(sp, tol), y_max, grid_n);
}

struct Z2SweepEntry {
    double z2 = 0.0;
    bool H6 = false, H7 = false, H8 = false;
};

// Verdicts for the triple-well family with z1, z3 fixed and z2 varied.
inline std::vector<Z2SweepEntry> sweep_z2(double z1, double z3, double lo, double hi, std::size_t n,
                                          double y_max = 50.0, std::size_t grid_n = 10000) {
    std::vector<Z2SweepEntry> out;
    for (std::size_t i = 0; i < n; ++i) {
        double z2 = (n == 1) ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        if (!(z2 > 0.0 && z2 < z3)) continue;
        auto sp = PotentialSpec::triple_well(z1, z2, z3);
        auto rep = check_hypotheses(sp, y_max, grid_n);
        out.push_back({z2, rep.H6.holds, rep.H7.holds, rep.H8.holds});
    }
    return out;
}

}  // namespace tripwell
