#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "analysis.hpp"
#include "banded.hpp"
#include "constants.hpp"
#include "energy.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "microstructure.hpp"
#include "potential.hpp"

namespace tripwell {

enum class StepRule { Newton, QuasiNewton, GradientArmijo };

inline std::string to_string(StepRule r) {
    switch (r) {
        case StepRule::Newton: return "newton";
        case StepRule::QuasiNewton: return "quasi-newton";
        case StepRule::GradientArmijo: return "gradient-armijo";
    }
    return "";
}

inline StepRule parse_step_rule(const std::string& s) {
    if (s == "newton") return StepRule::Newton;
    if (s == "quasi-newton") return StepRule::QuasiNewton;
    if (s == "gradient-armijo") return StepRule::GradientArmijo;
    throw ParameterError("unknown step rule '" + s + "'");
}

struct MinimizeOptions {
    std::size_t grid_n = 20001;  // minimum node count of the multi-start grid
    std::size_t max_iters = 1500;
    double grad_tol = 1e-7;  // sup-norm of the nodal gradient
    std::size_t starts = 5;
    std::uint64_t seed = 0;
    StepRule step_rule = StepRule::Newton;
    std::size_t jobs = 1;
    std::size_t lbfgs_memory = 10;
    double cells_per_eps3 = 5.0;  // multi-start grids have h <= eps^3 / cells_per_eps3

    void validate() const {
        if (!(grad_tol > 0.0)) throw ParameterError("grad_tol must be positive");
        if (starts < 1) throw ParameterError("starts must be at least 1");
        if (grid_n < 3) throw ParameterError("grid_n must be at least 3");
        if (max_iters < 1) throw ParameterError("max_iters must be at least 1");
        if (!(cells_per_eps3 > 0.0)) throw ParameterError("cells_per_eps3 must be positive");
    }
};

struct MinimizeResult {
    GridFunction u;
    double value = 0.0;
    double initial_value = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    double grad_norm = 0.0;
    std::string message;
    std::vector<double> history;  // accepted values, starting with the initial one
};

namespace detail {

inline double sup_norm(const std::vector<double>& g) {
    double m = 0.0;
    for (double v : g) m = std::max(m, std::fabs(v));
    return m;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> t(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) t[i] = a[i] * b[i];
    return pairwise_sum(t);
}

inline std::vector<double> node_weights(const GridFunction& u) {
    const auto& x = u.nodes;
    std::vector<double> w(x.size() - 2);
    for (std::size_t m = 1; m + 1 < x.size(); ++m) w[m - 1] = 0.5 * (x[m + 1] - x[m - 1]);
    return w;
}

struct Objective {
    const PotentialSpec& sp;
    double eps;
    std::function<double(const GridFunction&)> value;
    std::function<std::vector<double>(const GridFunction&)> gradient;
};

class Descent {
public:
    Descent(const PotentialSpec& sp, double eps, const MinimizeOptions& o) : sp_(sp), eps_(eps), o_(o) {}

    MinimizeResult run(GridFunction u) {
        MinimizeResult r;
        double E = energy(u);
        std::vector<double> g = energy_gradient(u, eps_, sp_);
        r.initial_value = E;
        r.history.push_back(E);
        tau_ = 0.0;
        for (r.iterations = 0; r.iterations < o_.max_iters; ++r.iterations) {
            r.grad_norm = sup_norm(g);
            if (r.grad_norm < o_.grad_tol) {
                r.converged = true;
                break;
            }
            auto p = direction(u, g);
            if (p.empty()) {
                r.message = "no usable descent direction";
                break;
            }
            double slope = dot(g, p);
            if (!(slope < 0.0)) {
                reset();
                p = g;
                for (double& v : p) v = -v;
                slope = dot(g, p);
            }
            double alpha = 1.0, Enew = E;
            GridFunction trial = u;
            bool ok = false;
            for (int k = 0; k < 60; ++k) {
                for (std::size_t i = 0; i < p.size(); ++i) trial.values[i + 1] = u.values[i + 1] + alpha * p[i];
                Enew = energy(trial);
                if (std::isfinite(Enew) && Enew <= E + 1e-4 * alpha * slope) { ok = true; break; }
                alpha *= 0.5;
            }
            if (!ok) {
                // at the roundoff floor Armijo cannot certify progress; take
                // the full step only if it does not increase the value
                for (std::size_t i = 0; i < p.size(); ++i) trial.values[i + 1] = u.values[i + 1] + p[i];
                Enew = energy(trial);
                auto gt = energy_gradient(trial, eps_, sp_);
                if (Enew <= E && sup_norm(gt) < r.grad_norm) {
                    alpha = 1.0;
                    accept(u, trial, g, gt, alpha, p);
                    E = Enew;
                    r.history.push_back(E);
                    continue;
                }
                r.message = "line search failed";
                break;
            }
            auto gn = energy_gradient(trial, eps_, sp_);
            accept(u, trial, g, gn, alpha, p);
            E = Enew;
            r.history.push_back(E);
            if (alpha == 1.0) tau_ *= 0.25;
        }
        if (r.iterations == o_.max_iters && !r.converged) {
            r.grad_norm = sup_norm(g);
            if (r.grad_norm < o_.grad_tol) r.converged = true;
            else if (r.message.empty()) r.message = "iteration limit reached";
        }
        r.u = std::move(u);
        r.value = E;
        return r;
    }

private:
    double energy(const GridFunction& u) const { return energy_Ieps(u, eps_, sp_).total; }

    void reset() {
        S_.clear();
        Y_.clear();
    }

    void accept(GridFunction& u, GridFunction& trial, std::vector<double>& g, std::vector<double>& gn, double alpha,
                const std::vector<double>& p) {
        if (o_.step_rule == StepRule::QuasiNewton) {
            std::vector<double> s(p.size()), y(p.size());
            for (std::size_t i = 0; i < p.size(); ++i) {
                s[i] = alpha * p[i];
                y[i] = gn[i] - g[i];
            }
            if (dot(s, y) > 1e-300) {
                S_.push_back(std::move(s));
                Y_.push_back(std::move(y));
                if (S_.size() > o_.lbfgs_memory) {
                    S_.pop_front();
                    Y_.pop_front();
                }
            }
        }
        std::swap(u, trial);
        g = std::move(gn);
    }

    std::vector<double> direction(const GridFunction& u, const std::vector<double>& g) {
        switch (o_.step_rule) {
            case StepRule::Newton: return newton(u, g);
            case StepRule::QuasiNewton: return lbfgs(u, g);
            case StepRule::GradientArmijo: {
                // steepest descent in the L2 metric of the grid
                auto w = node_weights(u);
                std::vector<double> p(g.size());
                double scale = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    p[i] = -g[i] / w[i];
                    scale = std::max(scale, std::fabs(p[i]));
                }
                if (scale > 0.1) for (double& v : p) v *= 0.1 / scale;
                return p;
            }
        }
        return {};
    }

    std::vector<double> newton(const GridFunction& u, const std::vector<double>& g) {
        Pentadiagonal H = energy_hessian(u, eps_, sp_);
        auto w = node_weights(u);
        double scale = 0.0;
        for (std::size_t i = 0; i < H.size(); ++i) scale = std::max(scale, std::fabs(H.d[i]) / w[i]);
        const double floor = 1e-14 * scale;
        double tau = tau_;
        for (int k = 0; k < 80; ++k) {
            if (ldl_.factor(H, tau, w, floor)) {
                tau_ = tau;
                auto p = ldl_.solve(g);
                for (double& v : p) v = -v;
                return p;
            }
            tau = std::max(4.0 * tau, 1e-10 * scale);
        }
        return {};
    }

    std::vector<double> lbfgs(const GridFunction& u, const std::vector<double>& g) {
        auto w = node_weights(u);
        std::vector<double> q = g;
        std::vector<double> a(S_.size());
        for (std::size_t k = S_.size(); k-- > 0;) {
            a[k] = dot(S_[k], q) / dot(Y_[k], S_[k]);
            for (std::size_t i = 0; i < q.size(); ++i) q[i] -= a[k] * Y_[k][i];
        }
        if (S_.empty()) {
            double s = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i) {
                q[i] /= w[i];
                s = std::max(s, std::fabs(q[i]));
            }
            if (s > 0.1) for (double& v : q) v *= 0.1 / s;
        } else {
            double gam = dot(S_.back(), Y_.back()) / dot(Y_.back(), Y_.back());
            for (double& v : q) v *= gam;
        }
        for (std::size_t k = 0; k < S_.size(); ++k) {
            double b = dot(Y_[k], q) / dot(Y_[k], S_[k]);
            for (std::size_t i = 0; i < q.size(); ++i) q[i] += (a[k] - b) * S_[k][i];
        }
        for (double& v : q) v = -v;
        return q;
    }

    const PotentialSpec& sp_;
    double eps_;
    MinimizeOptions o_;
    double tau_ = 0.0;
    PentaLDL ldl_;
    std::deque<std::vector<double>> S_, Y_;
};

}  // namespace detail

// Local minimization of the discrete I^eps over the interior nodal values of
// `init` (grid and boundary values are kept).
inline MinimizeResult minimize_Ieps(const PotentialSpec& sp, double eps, const GridFunction& init,
                                    const MinimizeOptions& opts = {}) {
    if (!(eps > 0.0)) throw ParameterError("eps must be positive");
    opts.validate();
    init.validate();
    detail::Descent d(sp, eps, opts);
    MinimizeResult r = d.run(init);
    r.u.eps = eps;
    for (std::size_t i = 1; i < r.history.size(); ++i)
        if (r.history[i] > r.history[i - 1]) throw NumericError("descent invariant violated", r.history[i]);
    return r;
}

struct StartResult {
    std::string kind;
    std::size_t index = 0;
    bool ok = false;
    std::string error;
    double seed_value = std::numeric_limits<double>::quiet_NaN();
    MinimizeResult result;
};

struct MultiStartResult {
    GridFunction u;
    double value = 0.0;
    std::string start_kind;
    std::size_t start_index = 0;
    bool converged = false;
    std::vector<StartResult> starts;
};

// Sharp random sawtooth on a uniform grid: teeth of jittered length around
// the optimal two-well period, each tooth mean-free; about half of them also
// visit z3.
inline GridFunction random_sawtooth(const PotentialSpec& sp, double eps, const LimitConstants& c, std::size_t nodes,
                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double n0 = 1.0 / (eps * c.d_star);
    int lo = std::max(1, static_cast<int>(std::floor(0.5 * n0))), hi = std::max(lo + 1, static_cast<int>(std::ceil(2.0 * n0)));
    int N = lo + static_cast<int>(std::floor(U(rng) * (hi - lo + 1)));
    N = std::min(N, hi);
    std::vector<double> len(static_cast<std::size_t>(N));
    double tot = 0.0;
    for (double& l : len) { l = 0.7 + 0.6 * U(rng); tot += l; }
    const double z1 = sp.z1(), z2 = sp.z2(), z3 = sp.z3();
    // breakpoints (x, slope) of the piecewise-constant gradient
    std::vector<double> bx{0.0};
    std::vector<double> sl;
    double x = 0.0;
    for (int t = 0; t < N; ++t) {
        double l = len[static_cast<std::size_t>(t)] / tot;
        double f1, f2, f3 = 0.0;
        if (U(rng) < 0.5) {
            f3 = 0.3 * U(rng) * (-z1) / (z3 - z1);
        }
        // f1 z1 + f2 z2 + f3 z3 = 0, f1 + f2 + f3 = 1
        f1 = (z2 + f3 * (z3 - z2)) / (z2 - z1);
        f2 = 1.0 - f1 - f3;
        std::vector<std::pair<double, double>> seg{{f1, z1}, {f2, z2}};
        if (f3 > 0.0) seg.insert(seg.begin() + 1 + (U(rng) < 0.5 ? 1 : 0), {f3, z3});
        if (U(rng) < 0.5) std::reverse(seg.begin(), seg.end());
        for (auto [f, s] : seg) {
            x += f * l;
            bx.push_back(x);
            sl.push_back(s);
        }
    }
    bx.back() = 1.0;
    GridFunction g = GridFunction::uniform(nodes - 1, eps);
    // exact integral of the gradient at each node
    std::size_t k = 0;
    double acc = 0.0;
    for (std::size_t i = 1; i < g.nodes.size(); ++i) {
        double a = g.nodes[i - 1], b = g.nodes[i], v = 0.0;
        while (k < sl.size() && bx[k + 1] <= a) { ++k; }
        for (std::size_t j = k; j < sl.size() && bx[j] < b; ++j)
            v += sl[j] * (std::min(b, bx[j + 1]) - std::max(a, bx[j]));
        acc += v;
        g.values[i] = acc;
    }
    g.values.back() = 0.0;
    g.kind = "random";
    g.meta = {{"teeth", N}, {"seed", static_cast<double>(seed)}};
    return g;
}

// Node count of the uniform grid multi_start minimizes on.
inline std::size_t minimization_nodes(double eps, const MinimizeOptions& o) {
    double cells = std::ceil(o.cells_per_eps3 / (eps * eps * eps));
    return std::max(o.grid_n, static_cast<std::size_t>(cells) + 1);
}

namespace detail {

struct SeedPlan {
    std::string kind;
    std::function<GridFunction()> make;
};

inline std::vector<SeedPlan> seed_plans(const PotentialSpec& sp, double eps, const LimitConstants& c,
                                        const HypothesisReport& hyp, const MinimizeOptions& opts) {
    // constructed seeds are resampled: their graded grids are coarse on the
    // plateaus, where a layer would become artificially cheap
    const std::size_t n = minimization_nodes(eps, opts);
    std::vector<SeedPlan> plans;
    plans.push_back({"two-well", [&sp, eps, c, n] {
                         return resample_uniform(build_two_well_sawtooth(sp, eps, {0.0, 1.0}, c), n);
                     }});
    plans.push_back({"three-well", [&sp, eps, c, n] {
                         return resample_uniform(build_three_well_profile(sp, eps, {0.0, 1.0}, c), n);
                     }});
    if (!hyp.H7.holds) {
        double y = hyp.H7.worst_y;
        plans.push_back({"h7-competitor", [&sp, eps, c, y, n] {
                             return resample_uniform(build_h7_competitor(sp, eps, y, c), n);
                         }});
    }
    if (!hyp.H8.holds) {
        double y = hyp.H8.worst_y;
        plans.push_back({"h8-competitor", [&sp, eps, c, y, n] {
                             return resample_uniform(build_h8_competitor(sp, eps, y, c), n);
                         }});
    }
    if (plans.size() > opts.starts) plans.resize(opts.starts);
    for (std::size_t i = plans.size(); i < opts.starts; ++i) {
        std::uint64_t s = opts.seed + i;
        plans.push_back({"random", [&sp, eps, c, n, s] { return random_sawtooth(sp, eps, c, n, s); }});
    }
    return plans;
}

template <class F>
void parallel_for(std::size_t n, std::size_t jobs, F&& f) {
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail

inline MultiStartResult multi_start(const PotentialSpec& sp, double eps, const MinimizeOptions& opts = {}) {
    if (!(eps > 0.0)) throw ParameterError("eps must be positive");
    opts.validate();
    const LimitConstants c = limit_constants(sp);
    const HypothesisReport hyp = check_hypotheses(sp, c);
    auto plans = detail::seed_plans(sp, eps, c, hyp, opts);
    std::vector<StartResult> out(plans.size());
    detail::parallel_for(plans.size(), opts.jobs, [&](std::size_t i) {
        StartResult& s = out[i];
        s.kind = plans[i].kind;
        s.index = i;
        try {
            GridFunction init = plans[i].make();
            s.seed_value = energy_Ieps(init, eps, sp).total;
            s.result = minimize_Ieps(sp, eps, init, opts);
            s.ok = true;
        } catch (const std::exception& e) {
            s.error = e.what();
        }
    });
    MultiStartResult best;
    bool found = false;
    for (auto& s : out) {
        if (!s.ok) continue;
        if (!found || s.result.value < best.value) {
            found = true;
            best.value = s.result.value;
            best.start_kind = s.kind;
            best.start_index = s.index;
            best.converged = s.result.converged;
        }
    }
    if (!found) {
        std::string msg = "all starts failed:";
        for (const auto& s : out) msg += " [" + s.kind + ": " + s.error + "]";
        throw MinimizationError(msg);
    }
    best.u = out[best.start_index].result.u;
    best.starts = std::move(out);
    return best;
}

struct SweepRecord {
    double eps = 0.0;
    double best_value = 0.0;
    double eta = 0.0;
    double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
    double overlap_measure = 0.0;
    int n_layers_A = 0, n_layers_B = 0;
    std::string start_kind;
    bool converged = false;
    std::vector<StartResult> starts;  // profiles dropped, diagnostics kept
};

inline std::vector<SweepRecord> epsilon_sweep(const PotentialSpec& sp, const std::vector<double>& eps_list,
                                              const MinimizeOptions& opts = {}) {
    if (eps_list.empty()) throw ParameterError("empty eps list");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0)) throw ParameterError("eps must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw ParameterError("eps list must be decreasing");
    }
    const Coercivity co = coercivity_of(sp);
    std::vector<SweepRecord> recs;
    for (double eps : eps_list) {
        MultiStartResult m = multi_start(sp, eps, opts);
        SweepRecord r;
        r.eps = eps;
        r.best_value = m.value;
        r.start_kind = m.start_kind;
        r.converged = m.converged;
        r.eta = std::pow(eps, 1.0 / (co.q + 1.0));
        auto vf = volume_fractions(m.u, sp, r.eta, r.eta >= co.eta0);
        r.lambda1 = vf.lambda[0];
        r.lambda2 = vf.lambda[1];
        r.lambda3 = vf.lambda[2];
        r.overlap_measure = vf.overlap_measure;
        auto lc = count_layers(transition_layers(m.u, sp, r.eta));
        r.n_layers_A = lc.A_plus + lc.A_minus;
        r.n_layers_B = lc.B_plus + lc.B_minus;
        r.starts = std::move(m.starts);
        for (auto& s : r.starts) s.result.u = GridFunction{};
        recs.push_back(std::move(r));
    }
    return recs;
}

}  // namespace tripwell
