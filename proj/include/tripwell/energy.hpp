#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "banded.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "numeric.hpp"
#include "potential.hpp"

namespace tripwell {

enum class Scaling { E_eps, I_eps };

struct EnergyBreakdown {
    double total = 0.0;
    double interface = 0.0;
    double bulk_W = 0.0;
    double bulk_u2 = 0.0;
    Scaling scaling = Scaling::I_eps;
    bool under_resolved = false;
    double max_cell_in_layers = 0.0;  // largest cell where |u_xx| is large
};

struct Derivatives {
    std::vector<double> ux;   // per cell
    std::vector<double> uxx;  // per interior node (index j-1 for node j)
};

inline Derivatives discrete_derivatives(const GridFunction& u) {
    const auto& x = u.nodes;
    const auto& v = u.values;
    if (x.size() < 3) throw GridError("need at least 3 nodes");
    if (x.size() != v.size()) throw GridError("nodes and values differ in length");
    Derivatives d;
    const std::size_t n = x.size() - 1;
    d.ux.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        double h = x[j + 1] - x[j];
        if (!(h > 0.0)) throw GridError("duplicate or unsorted nodes");
        d.ux[j] = (v[j + 1] - v[j]) / h;
    }
    d.uxx.resize(n - 1);
    for (std::size_t j = 1; j < n; ++j) {
        double hl = x[j] - x[j - 1], hr = x[j + 1] - x[j];
        d.uxx[j - 1] = 2.0 * (d.ux[j] - d.ux[j - 1]) / (hl + hr);
    }
    return d;
}

namespace detail {

// Interface, W and u^2 sums of the discrete E^eps (no eps^-2 factor):
//   eps^6 sum uxx_j^2 w_j + sum W(ux_j) h_j + sum u_j^2 w_j
// with trapezoid node weights w_j.
inline EnergyBreakdown raw_energy(const GridFunction& u, double eps, const PotentialSpec& sp) {
    const auto& x = u.nodes;
    const auto& v = u.values;
    Derivatives d = discrete_derivatives(u);
    const std::size_t n = x.size() - 1;
    const double e6 = std::pow(eps, 6);
    std::vector<double> ti(n - 1), tw(n), tu(n + 1);
    const double e3 = eps * eps * eps;
    double max_bad = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
        double hl = x[j] - x[j - 1], hr = x[j + 1] - x[j];
        double k = d.uxx[j - 1];
        ti[j - 1] = e6 * k * k * 0.5 * (hl + hr);
        // a cell wider than eps^3 where the gradient jumps by a visible amount
        double hm = std::max(hl, hr);
        if (hm > e3 && std::fabs(d.ux[j] - d.ux[j - 1]) > 0.05) max_bad = std::max(max_bad, hm);
    }
    for (std::size_t j = 0; j < n; ++j) tw[j] = eval_W(sp, d.ux[j]) * (x[j + 1] - x[j]);
    for (std::size_t j = 0; j <= n; ++j) {
        double wl = j > 0 ? x[j] - x[j - 1] : 0.0;
        double wr = j < n ? x[j + 1] - x[j] : 0.0;
        tu[j] = v[j] * v[j] * 0.5 * (wl + wr);
    }
    EnergyBreakdown b;
    b.interface = pairwise_sum(ti);
    b.bulk_W = pairwise_sum(tw);
    b.bulk_u2 = pairwise_sum(tu);
    b.under_resolved = max_bad > 0.0;
    b.max_cell_in_layers = max_bad;
    return b;
}

}  // namespace detail

inline EnergyBreakdown energy_Eeps(const GridFunction& u, double eps, const PotentialSpec& sp) {
    if (!(eps > 0.0)) throw ParameterError("eps must be positive");
    EnergyBreakdown b = detail::raw_energy(u, eps, sp);
    b.scaling = Scaling::E_eps;
    b.total = b.interface + b.bulk_W + b.bulk_u2;
    return b;
}

inline EnergyBreakdown energy_Ieps(const GridFunction& u, double eps, const PotentialSpec& sp) {
    if (!(eps > 0.0)) throw ParameterError("eps must be positive");
    EnergyBreakdown b = detail::raw_energy(u, eps, sp);
    const double s = 1.0 / (eps * eps);
    b.interface *= s;
    b.bulk_W *= s;
    b.bulk_u2 *= s;
    b.scaling = Scaling::I_eps;
    b.total = b.interface + b.bulk_W + b.bulk_u2;
    return b;
}

// Interface + W part of I^eps restricted to the cells inside [xa, xb]
// (node-based terms over nodes strictly inside).
inline double local_interface_energy(const GridFunction& u, double eps, const PotentialSpec& sp, std::size_t ia,
                                     std::size_t ib) {
    const auto& x = u.nodes;
    Derivatives d = discrete_derivatives(u);
    const double e4 = std::pow(eps, 4), s = 1.0 / (eps * eps);
    std::vector<double> t;
    for (std::size_t j = ia; j < ib; ++j) t.push_back(s * eval_W(sp, d.ux[j]) * (x[j + 1] - x[j]));
    for (std::size_t j = ia + 1; j < ib; ++j) {
        double k = d.uxx[j - 1];
        t.push_back(e4 * k * k * 0.5 * (x[j + 1] - x[j - 1]));
    }
    return pairwise_sum(t);
}

// Gradient of I^eps with respect to the interior nodal values.
//   G_j = dI/dg_j = 2 c_j D_j - 2 c_{j+1} D_{j+1} + eps^-2 W'(g_j) h_j,
//   c_j = 2 eps^4 / (h_{j-1} + h_j), D_j = g_j - g_{j-1},
//   dI/du_m = G_{m-1}/h_{m-1} - G_m/h_m + 2 eps^-2 w_m u_m.
inline std::vector<double> energy_gradient(const GridFunction& u, double eps, const PotentialSpec& sp) {
    if (!(eps > 0.0)) throw ParameterError("eps must be positive");
    const auto& x = u.nodes;
    const auto& v = u.values;
    Derivatives d = discrete_derivatives(u);
    const std::size_t n = x.size() - 1;
    const double e4 = std::pow(eps, 4), s = 1.0 / (eps * eps);
    std::vector<double> h(n), G(n, 0.0), c(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) h[j] = x[j + 1] - x[j];
    for (std::size_t j = 1; j < n; ++j) c[j] = 2.0 * e4 / (h[j - 1] + h[j]);
    for (std::size_t j = 0; j < n; ++j) {
        double gj = s * eval_dW(sp, d.ux[j]) * h[j];
        if (j >= 1) gj += 2.0 * c[j] * (d.ux[j] - d.ux[j - 1]);
        if (j + 1 < n) gj -= 2.0 * c[j + 1] * (d.ux[j + 1] - d.ux[j]);
        G[j] = gj;
    }
    std::vector<double> out(n - 1);
    for (std::size_t m = 1; m < n; ++m) {
        double w = 0.5 * (h[m - 1] + h[m]);
        out[m - 1] = G[m - 1] / h[m - 1] - G[m] / h[m] + 2.0 * s * w * v[m];
    }
    return out;
}

inline std::vector<double> energy_gradient_Eeps(const GridFunction& u, double eps, const PotentialSpec& sp) {
    auto g = energy_gradient(u, eps, sp);
    for (double& x : g) x *= eps * eps;
    return g;
}

// Exact Hessian of I^eps in the interior nodal values (pentadiagonal).
inline Pentadiagonal energy_hessian(const GridFunction& u, double eps, const PotentialSpec& sp) {
    const auto& x = u.nodes;
    Derivatives d = discrete_derivatives(u);
    const std::size_t n = x.size() - 1;
    const double e4 = std::pow(eps, 4), s = 1.0 / (eps * eps);
    std::vector<double> h(n), c(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) h[j] = x[j + 1] - x[j];
    for (std::size_t j = 1; j < n; ++j) c[j] = 2.0 * e4 / (h[j - 1] + h[j]);
    // Hessian in the cell gradients g: tridiagonal (hd, ho)
    std::vector<double> hd(n), ho(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double v = s * eval_d2W(sp, d.ux[j]) * h[j];
        if (j >= 1) v += 2.0 * c[j];
        if (j + 1 < n) v += 2.0 * c[j + 1];
        hd[j] = v;
        if (j + 1 < n) ho[j] = -2.0 * c[j + 1];
    }
    // g_j = (u_{j+1} - u_j)/h_j ; scatter B^T Hg B onto interior nodes 1..n-1
    Pentadiagonal H(n - 1);
    auto add = [&](std::size_t a, std::size_t b, double val) {
        if (a == 0 || b == 0 || a == n || b == n) return;
        std::size_t i = std::min(a, b) - 1, k = std::max(a, b) - std::min(a, b);
        if (k == 0) H.d[i] += val;
        else if (k == 1) H.e[i] += (a == b) ? 0.0 : val * 0.5;
        else if (k == 2) H.f[i] += val * 0.5;
    };
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t na[2] = {j, j + 1};
        const double ba[2] = {-1.0 / h[j], 1.0 / h[j]};
        for (std::size_t jj = (j == 0 ? 0 : j - 1); jj <= std::min(n - 1, j + 1); ++jj) {
            double val = (jj == j) ? hd[j] : ho[std::min(j, jj)];
            const std::size_t nb[2] = {jj, jj + 1};
            const double bb[2] = {-1.0 / h[jj], 1.0 / h[jj]};
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q) add(na[p], nb[q], ba[p] * val * bb[q]);
        }
    }
    for (std::size_t m = 1; m < n; ++m) H.d[m - 1] += 2.0 * s * 0.5 * (h[m - 1] + h[m]);
    return H;
}

}  // namespace tripwell
