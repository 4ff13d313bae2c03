#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "errors.hpp"
#include "transition.hpp"

namespace tripwell {

// u sampled at nodes of [0,1] (or of a sub-window for analysis oracles).
struct GridFunction {
    std::vector<double> nodes;
    std::vector<double> values;
    double eps = 0.0;
    std::string kind;                    // construction label, empty if generic
    std::map<std::string, double> meta;  // construction parameters

    std::size_t size() const { return nodes.size(); }

    // Shape checks: matching lengths, >= 3 nodes, strictly increasing nodes.
    void validate_shape() const {
        if (nodes.size() != values.size()) throw GridError("nodes and values differ in length");
        if (nodes.size() < 3) throw GridError("a grid function needs at least 3 nodes");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (!(nodes[i] > nodes[i - 1])) throw GridError("nodes must be strictly increasing");
        for (double v : values)
            if (!std::isfinite(v)) throw GridError("values must be finite");
    }

    // Full admissibility: shape plus u(0) = u(1) = 0 on [0,1].
    void validate() const {
        validate_shape();
        if (std::fabs(nodes.front()) > 1e-12 || std::fabs(nodes.back() - 1.0) > 1e-12)
            throw GridError("nodes must span [0,1]");
        if (values.front() != 0.0 || values.back() != 0.0)
            throw GridError("boundary values must be zero");
    }

    static GridFunction uniform(std::size_t n_cells, double eps = 0.0) {
        GridFunction g;
        g.eps = eps;
        g.nodes.resize(n_cells + 1);
        g.values.assign(n_cells + 1, 0.0);
        for (std::size_t i = 0; i <= n_cells; ++i) g.nodes[i] = static_cast<double>(i) / static_cast<double>(n_cells);
        g.nodes.back() = 1.0;
        return g;
    }
};

// One piece of a piecewise-defined gradient w on [a,b]:
//   constant c0, linear from c0 to c1, or wave(sigma (x - center)).
struct Piece {
    enum class Type { Constant, Linear, Wave };
    Type type = Type::Constant;
    double a = 0.0, b = 0.0;
    double c0 = 0.0, c1 = 0.0;
    std::shared_ptr<const MonotoneWave> wave;
    int sigma = 1;
    double center = 0.0;

    double value(double x) const {
        switch (type) {
            case Type::Constant: return c0;
            case Type::Linear: return c0 + (c1 - c0) * (x - a) / (b - a);
            case Type::Wave: return wave->value(sigma * (x - center));
        }
        return 0.0;
    }
    double slope(double x) const {
        switch (type) {
            case Type::Constant: return 0.0;
            case Type::Linear: return (c1 - c0) / (b - a);
            case Type::Wave: return sigma * wave->slope(sigma * (x - center));
        }
        return 0.0;
    }
    // integral of w over [a, x]
    double integral(double x) const {
        switch (type) {
            case Type::Constant: return c0 * (x - a);
            case Type::Linear: {
                double d = x - a;
                return c0 * d + 0.5 * (c1 - c0) * d * d / (b - a);
            }
            case Type::Wave:
                return sigma * (wave->primitive(sigma * (x - center)) - wave->primitive(sigma * (a - center)));
        }
        return 0.0;
    }
    // points where node clustering should start
    std::vector<double> anchors() const {
        std::vector<double> r{a, b};
        if (type == Type::Wave) {
            r.push_back(center + sigma * wave->core());
            for (double k : wave->kinks()) r.push_back(center + sigma * k);
        }
        return r;
    }

    static Piece constant(double a, double b, double c) {
        Piece p;
        p.type = Type::Constant;
        p.a = a; p.b = b; p.c0 = c; p.c1 = c;
        return p;
    }
    static Piece linear(double a, double b, double c0, double c1) {
        Piece p;
        p.type = Type::Linear;
        p.a = a; p.b = b; p.c0 = c0; p.c1 = c1;
        return p;
    }
    static Piece of_wave(double a, double b, std::shared_ptr<const MonotoneWave> w, int sigma, double center) {
        Piece p;
        p.type = Type::Wave;
        p.a = a; p.b = b; p.wave = std::move(w); p.sigma = sigma; p.center = center;
        return p;
    }
};

// A tooth: consecutive pieces over [a,b] on which u starts and ends at 0.
struct Tooth {
    double a = 0.0, b = 0.0;
    std::vector<Piece> pieces;

    double integral() const {
        double s = 0.0;
        for (const auto& p : pieces) s += p.integral(p.b);
        return s;
    }
};

struct GridOptions {
    double dw = 0.001;      // target change of u_x per cell inside layers
    double growth = 1.1;    // max ratio of neighbouring cell widths
    double h_plateau = 0.0; // max cell width; 0 means tooth length / 50
    double refine = 1.0;    // divides dw and h_plateau (refinement studies)
};

namespace detail {

inline const Piece& piece_at(const Tooth& t, double x) {
    auto it = std::upper_bound(t.pieces.begin(), t.pieces.end(), x,
                               [](double v, const Piece& p) { return v < p.a; });
    if (it == t.pieces.begin()) return t.pieces.front();
    return *(it - 1);
}

inline void march(const Tooth& t, double p, double q, double hmax, double dw, double growth, double hmin,
                  std::vector<double>& out) {
    auto target = [&](double x) {
        x = std::min(std::max(x, t.a), t.b);
        double s = std::fabs(piece_at(t, x).slope(x));
        double h = s > 0.0 ? dw / s : hmax;
        return std::max(std::min(h, hmax), hmin);
    };
    auto step = [&](double x, double hprev, int dir) {
        double h = std::min(growth * hprev, target(x));
        for (int k = 0; k < 60; ++k) {
            double tm = std::min(target(x + dir * 0.5 * h), target(x + dir * h));
            if (tm >= h) break;
            h = tm;
        }
        return std::max(h, hmin);
    };
    std::vector<double> left{p}, right{q};
    double xl = p, xr = q, hl = target(p), hr = target(q);
    while (true) {
        double gap = xr - xl;
        double sl = step(xl, hl, +1), sr = step(xr, hr, -1);
        if (std::max(sl, sr) >= gap - 0.25 * std::min(sl, sr)) {
            long k = std::max(1L, static_cast<long>(std::ceil(gap / std::min(sl, sr) - 1e-9)));
            for (long j = 1; j < k; ++j) left.push_back(xl + gap * static_cast<double>(j) / static_cast<double>(k));
            break;
        }
        if (sl <= sr) { xl += sl; hl = sl; left.push_back(xl); }
        else { xr -= sr; hr = sr; right.push_back(xr); }
    }
    out.insert(out.end(), left.begin(), left.end());
    for (auto it = right.rbegin(); it != right.rend(); ++it) out.push_back(*it);
}

}  // namespace detail

// Sample u(x) = integral of w on nodes clustered at the steep parts of w.
// Each tooth is corrected by a linear drift so u vanishes at its ends.
inline GridFunction assemble_profile(const std::vector<Tooth>& teeth, double eps, const GridOptions& opt) {
    GridFunction g;
    g.eps = eps;
    for (std::size_t ti = 0; ti < teeth.size(); ++ti) {
        const Tooth& t = teeth[ti];
        if (t.pieces.empty()) throw ConstructionError("tooth without pieces");
        double len = t.b - t.a;
        double hmax = (opt.h_plateau > 0.0 ? opt.h_plateau : len / 50.0) / opt.refine;
        double dw = opt.dw / opt.refine;
        double hmin = 1e-13;
        std::vector<double> anchors;
        for (const auto& p : t.pieces)
            for (double x : p.anchors())
                if (x >= t.a && x <= t.b) anchors.push_back(x);
        std::sort(anchors.begin(), anchors.end());
        std::vector<double> uniq;
        for (double x : anchors)
            if (uniq.empty() || x - uniq.back() > 1e-12 * (1.0 + std::fabs(x))) uniq.push_back(x);
        uniq.front() = t.a;
        uniq.back() = t.b;
        std::vector<double> xs;
        for (std::size_t k = 0; k + 1 < uniq.size(); ++k) {
            std::vector<double> seg;
            detail::march(t, uniq[k], uniq[k + 1], hmax, dw, opt.growth, hmin, seg);
            if (!xs.empty()) seg.erase(seg.begin());
            xs.insert(xs.end(), seg.begin(), seg.end());
        }
        // integrate piece by piece
        std::vector<double> us(xs.size(), 0.0);
        std::size_t pi = 0;
        double before = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            while (pi + 1 < t.pieces.size() && xs[k] > t.pieces[pi].b) {
                before += t.pieces[pi].integral(t.pieces[pi].b);
                ++pi;
            }
            us[k] = before + t.pieces[pi].integral(xs[k]);
        }
        double total = us.back();
        for (std::size_t k = 0; k < xs.size(); ++k) us[k] -= total * (xs[k] - t.a) / len;
        us.front() = 0.0;
        us.back() = 0.0;
        std::size_t start = g.nodes.empty() ? 0 : 1;
        for (std::size_t k = start; k < xs.size(); ++k) {
            g.nodes.push_back(xs[k]);
            g.values.push_back(us[k]);
        }
    }
    return g;
}

// Gradient of the assembled pattern at x (for diagnostics and tests).
inline double pattern_gradient(const std::vector<Tooth>& teeth, double x) {
    for (const auto& t : teeth)
        if (x >= t.a && x <= t.b) return detail::piece_at(t, x).value(x);
    return 0.0;
}

// Piecewise-linear interpolation of u onto a uniform grid on u's span.
inline GridFunction resample_uniform(const GridFunction& u, std::size_t n_nodes) {
    u.validate_shape();
    if (n_nodes < 3) throw GridError("a grid function needs at least 3 nodes");
    GridFunction g;
    g.eps = u.eps;
    g.kind = u.kind;
    g.meta = u.meta;
    const double a = u.nodes.front(), b = u.nodes.back();
    g.nodes.resize(n_nodes);
    g.values.resize(n_nodes);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n_nodes; ++i) {
        double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(n_nodes - 1);
        if (i + 1 == n_nodes) x = b;
        while (k + 2 < u.nodes.size() && u.nodes[k + 1] <= x) ++k;
        double t = (x - u.nodes[k]) / (u.nodes[k + 1] - u.nodes[k]);
        t = std::min(std::max(t, 0.0), 1.0);
        g.nodes[i] = x;
        g.values[i] = u.values[k] + t * (u.values[k + 1] - u.values[k]);
    }
    g.values.front() = u.values.front();
    g.values.back() = u.values.back();
    return g;
}

}  // namespace tripwell
