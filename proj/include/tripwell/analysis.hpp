#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "constants.hpp"
#include "energy.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "numeric.hpp"
#include "potential.hpp"

namespace tripwell {

struct VolumeFractions {
    double eta = 0.0;
    std::array<double, 3> lambda{0.0, 0.0, 0.0};
    double sigma_measure = 0.0;    // measure of cells near no well
    double overlap_measure = 0.0;  // measure counted for two wells (overlap mode only)
};

// Cell-measure fractions of {|u_x - z_k| <= eta}. With allow_overlap the
// eta < eta0 requirement is lifted and doubly counted measure is reported.
inline VolumeFractions volume_fractions(const GridFunction& u, const PotentialSpec& sp, double eta,
                                        bool allow_overlap = false) {
    if (!(eta > 0.0)) throw ParameterError("eta must be positive");
    if (!allow_overlap) {
        double eta0 = coercivity_of(sp).eta0;
        if (!(eta < eta0)) throw ParameterError("eta must be smaller than eta0 (well neighbourhoods could overlap)");
    }
    Derivatives d = discrete_derivatives(u);
    const std::size_t n = d.ux.size();
    std::array<std::vector<double>, 3> parts;
    std::vector<double> none, both;
    for (auto& p : parts) p.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        double h = u.nodes[j + 1] - u.nodes[j];
        int hits = 0;
        for (int k = 0; k < 3; ++k)
            if (std::fabs(d.ux[j] - sp.wells[k]) <= eta) {
                parts[k].push_back(h);
                ++hits;
            }
        if (hits == 0) none.push_back(h);
        if (hits > 1) both.push_back(h * (hits - 1));
    }
    const double L = u.nodes.back() - u.nodes.front();
    VolumeFractions r;
    r.eta = eta;
    for (int k = 0; k < 3; ++k) r.lambda[k] = pairwise_sum(parts[k]) / L;
    r.sigma_measure = pairwise_sum(none) / L;
    r.overlap_measure = pairwise_sum(both) / L;
    return r;
}

enum class LayerKind { A_plus, A_minus, B_plus, B_minus };

inline std::string to_string(LayerKind k) {
    switch (k) {
        case LayerKind::A_plus: return "A+";
        case LayerKind::A_minus: return "A-";
        case LayerKind::B_plus: return "B+";
        case LayerKind::B_minus: return "B-";
    }
    return "";
}

struct Layer {
    LayerKind kind;
    double x_minus = 0.0, x_plus = 0.0;
};

namespace detail {

// u_x as the piecewise-linear function through the cell midpoints.
struct SlopeLine {
    std::vector<double> m, g;
    explicit SlopeLine(const GridFunction& u) {
        Derivatives d = discrete_derivatives(u);
        g = d.ux;
        m.resize(g.size());
        for (std::size_t j = 0; j < g.size(); ++j) m[j] = 0.5 * (u.nodes[j] + u.nodes[j + 1]);
    }
};

struct BandTracker {
    double lo_t, hi_t;
    LayerKind up, down;
    bool entered = false;
    bool from_low = false;
    double entry = 0.0;
    void event(double x, double t, bool upward, std::vector<Layer>& out) {
        if (t == lo_t) {
            if (upward) { entered = true; from_low = true; entry = x; }
            else {
                if (entered && !from_low) out.push_back({down, entry, x});
                entered = false;
            }
        } else {
            if (upward) {
                if (entered && from_low) out.push_back({up, entry, x});
                entered = false;
            } else { entered = true; from_low = false; entry = x; }
        }
    }
};

}  // namespace detail

// Maximal intervals where u_x crosses (z1+eta, z2-eta) [A] or
// (z2+eta, z3-eta) [B] from one threshold to the other.
inline std::vector<Layer> transition_layers(const GridFunction& u, const PotentialSpec& sp, double eta) {
    if (!(eta > 0.0)) throw ParameterError("eta must be positive");
    detail::SlopeLine sl(u);
    const double tA0 = sp.z1() + eta, tA1 = sp.z2() - eta, tB0 = sp.z2() + eta, tB1 = sp.z3() - eta;
    const bool hasA = tA0 < tA1, hasB = tB0 < tB1;
    detail::BandTracker A{tA0, tA1, LayerKind::A_plus, LayerKind::A_minus};
    detail::BandTracker B{tB0, tB1, LayerKind::B_plus, LayerKind::B_minus};
    std::vector<Layer> out;
    // lower thresholds: "above" means > t; upper thresholds: >= t
    auto above = [](double v, double t, bool upper) { return upper ? v >= t : v > t; };
    struct Ev { double x, t; bool up; int band; };
    for (std::size_t j = 0; j + 1 < sl.g.size(); ++j) {
        double a = sl.g[j], b = sl.g[j + 1], xa = sl.m[j], xb = sl.m[j + 1];
        std::vector<Ev> evs;
        auto check = [&](double t, bool upper, int band) {
            bool sa = above(a, t, upper), sb = above(b, t, upper);
            if (sa == sb) return;
            double x = (b != a) ? xa + (xb - xa) * (t - a) / (b - a) : xa;
            evs.push_back({x, t, sb, band});
        };
        if (hasA) { check(tA0, false, 0); check(tA1, true, 0); }
        if (hasB) { check(tB0, false, 1); check(tB1, true, 1); }
        bool rising = b > a;
        std::sort(evs.begin(), evs.end(), [&](const Ev& p, const Ev& q) {
            return rising ? p.t < q.t : p.t > q.t;
        });
        for (const auto& e : evs) (e.band == 0 ? A : B).event(e.x, e.t, e.up, out);
    }
    std::stable_sort(out.begin(), out.end(), [](const Layer& p, const Layer& q) { return p.x_minus < q.x_minus; });
    return out;
}

struct LayerCounts {
    int A_plus = 0, A_minus = 0, B_plus = 0, B_minus = 0;
};

inline LayerCounts count_layers(const std::vector<Layer>& layers) {
    LayerCounts c;
    for (const auto& l : layers) {
        switch (l.kind) {
            case LayerKind::A_plus: ++c.A_plus; break;
            case LayerKind::A_minus: ++c.A_minus; break;
            case LayerKind::B_plus: ++c.B_plus; break;
            case LayerKind::B_minus: ++c.B_minus; break;
        }
    }
    return c;
}

enum class DType { T0, I, II, III, IV, Unclassified, Open };

inline std::string to_string(DType t) {
    switch (t) {
        case DType::T0: return "0";
        case DType::I: return "I";
        case DType::II: return "II";
        case DType::III: return "III";
        case DType::IV: return "IV";
        case DType::Unclassified: return "unclassified";
        case DType::Open: return "open";
    }
    return "";
}

struct DInterval {
    double x_minus = 0.0, x_plus = 0.0;  // D_i
    double l_minus = 0.0, l_plus = 0.0;  // enclosing L-interval
    double alpha = 0.0, beta = 0.0;
    int n_B = 0;
    bool zero_in_E = false;
    double u_minus = 0.0, u_plus = 0.0;
    DType type = DType::Unclassified;
};

struct DThresholds {
    double R_lo = 0.1, R_hi = 10.0;
};

namespace detail {

inline double interp_u(const GridFunction& u, double x) {
    const auto& X = u.nodes;
    if (x <= X.front()) return u.values.front();
    if (x >= X.back()) return u.values.back();
    auto it = std::upper_bound(X.begin(), X.end(), x);
    std::size_t k = static_cast<std::size_t>(it - X.begin()) - 1;
    double s = (x - X[k]) / (X[k + 1] - X[k]);
    return u.values[k] + s * (u.values[k + 1] - u.values[k]);
}

// cell measure inside (a,b) where |u_x - z| <= eta
inline double measure_near(const GridFunction& u, const std::vector<double>& ux, double a, double b, double z,
                           double eta) {
    double s = 0.0;
    auto it = std::upper_bound(u.nodes.begin(), u.nodes.end(), a);
    std::size_t j = it == u.nodes.begin() ? 0 : static_cast<std::size_t>(it - u.nodes.begin()) - 1;
    for (; j < ux.size() && u.nodes[j] < b; ++j) {
        double lo = std::max(a, u.nodes[j]), hi = std::min(b, u.nodes[j + 1]);
        if (hi > lo && std::fabs(ux[j] - z) <= eta) s += hi - lo;
    }
    return s;
}

inline bool has_zero(const GridFunction& u, double a, double b) {
    if (!(b > a)) return false;
    double prev = interp_u(u, a);
    if (prev == 0.0) return true;
    auto it = std::upper_bound(u.nodes.begin(), u.nodes.end(), a);
    for (std::size_t k = static_cast<std::size_t>(it - u.nodes.begin()); k < u.nodes.size() && u.nodes[k] < b; ++k) {
        double v = u.values[k];
        if (v == 0.0 || (v > 0) != (prev > 0)) return true;
        prev = v;
    }
    double e = interp_u(u, b);
    return e == 0.0 || (e > 0) != (prev > 0);
}

}  // namespace detail

// Pairs each A+ layer with the next A- layer (u_x > z1+eta in between) and
// classifies the inner interval.
inline std::vector<DInterval> d_intervals(const GridFunction& u, const PotentialSpec& sp, double eta,
                                          DThresholds th = {}, double eps = 0.0) {
    if (eps <= 0.0) eps = u.eps;
    if (!(eps > 0.0)) throw ParameterError("d_intervals needs eps (from the profile or given)");
    auto layers = transition_layers(u, sp, eta);
    detail::SlopeLine sl(u);
    Derivatives d = discrete_derivatives(u);
    const double thr = sp.z1() + eta;
    auto min_slope_between = [&](double a, double b) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < sl.m.size(); ++j)
            if (sl.m[j] >= a && sl.m[j] <= b) m = std::min(m, sl.g[j]);
        return m;
    };
    std::vector<DInterval> out;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].kind != LayerKind::A_plus) continue;
        const Layer& ap = layers[i];
        const Layer* am = nullptr;
        for (std::size_t k = i + 1; k < layers.size(); ++k) {
            if (layers[k].kind == LayerKind::A_minus) { am = &layers[k]; break; }
            if (layers[k].kind == LayerKind::A_plus) break;
        }
        DInterval D;
        D.x_minus = ap.x_plus;
        D.l_minus = ap.x_minus;
        if (!am || !(min_slope_between(ap.x_plus, am->x_minus) > thr)) {
            D.x_plus = u.nodes.back();
            D.l_plus = u.nodes.back();
            D.type = DType::Open;
            out.push_back(D);
            continue;
        }
        D.x_plus = am->x_minus;
        D.l_plus = am->x_plus;
        D.alpha = detail::measure_near(u, d.ux, D.x_minus, D.x_plus, sp.z2(), eta);
        D.beta = detail::measure_near(u, d.ux, D.x_minus, D.x_plus, sp.z3(), eta);
        std::vector<const Layer*> bl;
        for (const auto& l : layers)
            if ((l.kind == LayerKind::B_plus || l.kind == LayerKind::B_minus) && l.x_minus >= D.x_minus &&
                l.x_plus <= D.x_plus)
                bl.push_back(&l);
        D.n_B = static_cast<int>(bl.size());
        D.u_minus = detail::interp_u(u, D.x_minus);
        D.u_plus = detail::interp_u(u, D.x_plus);
        if (D.n_B == 2) D.zero_in_E = detail::has_zero(u, bl[0]->x_plus, bl[1]->x_minus);
        double mx = std::max(D.alpha, D.beta);
        if (!(mx > eps * th.R_lo && mx < eps * th.R_hi)) D.type = DType::T0;
        else if (D.u_minus * D.u_plus >= 0.0) D.type = DType::I;
        else if (D.n_B == 0 || D.n_B >= 4) D.type = DType::II;
        else if (D.n_B == 2) D.type = D.zero_in_E ? DType::IV : DType::III;
        else D.type = DType::Unclassified;
        out.push_back(D);
    }
    return out;
}

struct Histogram {
    std::vector<double> edges;   // bins+1 edges
    std::vector<double> masses;  // sums to 1
    double mean = 0.0;           // exact cell-weighted mean of u_x
    double out_of_range = 0.0;   // mass clamped into the end bins
};

inline Histogram empirical_young_measure(const GridFunction& u, const PotentialSpec& sp, std::size_t bins = 400) {
    if (bins < 10) throw ParameterError("histogram needs at least 10 bins");
    Derivatives d = discrete_derivatives(u);
    const double lo = sp.z1() - 1.0, hi = sp.z3() + 1.0;
    Histogram H;
    H.edges.resize(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k) H.edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
    std::vector<std::vector<double>> acc(bins);
    std::vector<double> wsum, out, mean_terms;
    const double L = u.nodes.back() - u.nodes.front();
    for (std::size_t j = 0; j < d.ux.size(); ++j) {
        double h = (u.nodes[j + 1] - u.nodes[j]) / L;
        double g = d.ux[j];
        long k = static_cast<long>(std::floor((g - lo) / (hi - lo) * static_cast<double>(bins)));
        if (k < 0 || k >= static_cast<long>(bins)) out.push_back(h);
        k = std::min(std::max(k, 0L), static_cast<long>(bins) - 1);
        acc[static_cast<std::size_t>(k)].push_back(h);
        mean_terms.push_back(u.values[j + 1] - u.values[j]);
    }
    H.masses.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) H.masses[k] = pairwise_sum(acc[k]);
    H.mean = pairwise_sum(mean_terms) / L;
    H.out_of_range = pairwise_sum(out);
    return H;
}

struct E0FamilyWeights {
    double lambda_param = 0.0;
    std::array<double, 3> w{0.0, 0.0, 0.0};
};

inline E0FamilyWeights e0_family(const PotentialSpec& sp, double lambda) {
    const double z1 = sp.z1(), z2 = sp.z2(), z3 = sp.z3();
    const double top = 1.0 / (1.0 - z2 / z1);
    if (!(lambda >= 0.0 && lambda <= top * (1.0 + 1e-15))) throw ParameterError("lambda outside [0, 1/z21]");
    E0FamilyWeights r;
    r.lambda_param = lambda;
    r.w[1] = lambda;
    r.w[0] = -(z3 + lambda * (z2 - z3)) / (z1 - z3);
    r.w[2] = (z1 + lambda * (z2 - z1)) / (z1 - z3);
    return r;
}

// Nondecreasing rearrangement of the cell slopes of v on the window [a,b]
// (a, b must be nodes), sampled back on v's nodes.
inline GridFunction rearrangement_envelope(const GridFunction& v, std::pair<double, double> window) {
    v.validate_shape();
    auto find = [&](double x) {
        auto it = std::lower_bound(v.nodes.begin(), v.nodes.end(), x - 1e-12 * (1.0 + std::fabs(x)));
        if (it == v.nodes.end() || std::fabs(*it - x) > 1e-12 * (1.0 + std::fabs(x)))
            throw ParameterError("window endpoints must be grid nodes");
        return static_cast<std::size_t>(it - v.nodes.begin());
    };
    std::size_t ia = find(window.first), ib = find(window.second);
    if (!(ib > ia)) throw ParameterError("empty rearrangement window");
    struct Cell { double s, h; };
    std::vector<Cell> cells;
    for (std::size_t j = ia; j < ib; ++j) {
        double h = v.nodes[j + 1] - v.nodes[j];
        double s = (v.values[j + 1] - v.values[j]) / h;
        if (s < -1e-12) throw PreconditionError("v is not nondecreasing on the window");
        cells.push_back({s, h});
    }
    std::stable_sort(cells.begin(), cells.end(), [](const Cell& p, const Cell& q) { return p.s < q.s; });
    // breakpoints of the rearranged function
    std::vector<double> bx{v.nodes[ia]}, bu{v.values[ia]};
    for (const auto& c : cells) {
        bx.push_back(bx.back() + c.h);
        bu.push_back(bu.back() + c.s * c.h);
    }
    GridFunction u = v;
    std::size_t k = 0;
    for (std::size_t j = ia; j <= ib; ++j) {
        double x = v.nodes[j];
        while (k + 2 < bx.size() && bx[k + 1] <= x) ++k;
        double t = (bx[k + 1] > bx[k]) ? (x - bx[k]) / (bx[k + 1] - bx[k]) : 0.0;
        t = std::min(std::max(t, 0.0), 1.0);
        u.values[j] = bu[k] + t * (bu[k + 1] - bu[k]);
    }
    u.values[ia] = v.values[ia];
    u.kind = "rearranged";
    return u;
}

struct MeasureReport {
    VolumeFractions fractions;
    LayerCounts layers;
    std::vector<Layer> layer_list;
    std::vector<DInterval> d_list;
    DThresholds thresholds;
    Histogram histogram;
};

struct AnalyzeOptions {
    bool allow_overlap = false;
    DThresholds thresholds;
    std::size_t bins = 400;
    double eps = 0.0;
};

inline MeasureReport analyze(const GridFunction& u, const PotentialSpec& sp, double eta, const AnalyzeOptions& o = {}) {
    MeasureReport r;
    r.fractions = volume_fractions(u, sp, eta, o.allow_overlap);
    r.layer_list = transition_layers(u, sp, eta);
    r.layers = count_layers(r.layer_list);
    double eps = o.eps > 0 ? o.eps : u.eps;
    if (eps > 0) r.d_list = d_intervals(u, sp, eta, o.thresholds, eps);
    r.thresholds = o.thresholds;
    r.histogram = empirical_young_measure(u, sp, o.bins);
    return r;
}

// Largest violation of the Modica-Mortola bound over the node-index window
// [ia, ib]: 2 eps |H(u_x last) - H(u_x first)| - local interface energy.
inline double modica_mortola_violation(const GridFunction& u, double eps, const PotentialSpec& sp, std::size_t ia,
                                       std::size_t ib) {
    if (!(ib > ia + 1)) return -std::numeric_limits<double>::infinity();
    Derivatives d = discrete_derivatives(u);
    double lhs = local_interface_energy(u, eps, sp, ia, ib);
    double Ha = H_antiderivative(sp, d.ux[ia], 1e-10);
    double Hb = H_antiderivative(sp, d.ux[ib - 1], 1e-10);
    return 2.0 * eps * std::fabs(Hb - Ha) - lhs;
}

}  // namespace tripwell
