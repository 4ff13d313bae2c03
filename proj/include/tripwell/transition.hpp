#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "errors.hpp"
#include "numeric.hpp"
#include "potential.hpp"

namespace tripwell {

// Monotone nondecreasing gradient profile on the whole line, saturating at
// lo() and hi().
class MonotoneWave {
public:
    virtual ~MonotoneWave() = default;
    virtual double value(double x) const = 0;
    virtual double slope(double x) const = 0;
    // signed integral of value over [0, x]
    virtual double primitive(double x) const = 0;
    virtual double lo() const = 0;
    virtual double hi() const = 0;
    // points where the profile is not smooth (grid anchors)
    virtual std::vector<double> kinks() const { return {}; }
    // a point inside the steep part of the profile
    virtual double core() const { return 0.0; }
    // x at which the profile is within tol of lo (left) / hi (right)
    virtual double left_extent(double tol) const = 0;
    virtual double right_extent(double tol) const = 0;
};

// Heteroclinic eps^3 w' = sqrt(W(w)) between adjacent wells lo < hi with
// w(0) = w0. Built on w = m + r tanh(t): x(t) = eps^3 G(t) with
// G' = (dw/dt)/sqrt(W(w)) tabulated and Hermite-interpolated.
class TransitionProfile : public MonotoneWave {
public:
    TransitionProfile(const PotentialSpec& sp, double lo, double hi, double eps, double w0,
                      double T = 20.0, double dt = 0.01)
        : sq_(sp, lo, hi), lo_(lo), hi_(hi), eps3_(eps * eps * eps), T_(T), dt_(dt) {
        if (!(eps > 0.0)) throw ParameterError("eps must be positive");
        if (!(lo < w0 && w0 < hi)) throw ConstructionError("anchor value must lie strictly between the wells");
        m_ = 0.5 * (lo + hi);
        r_ = 0.5 * (hi - lo);
        t_anchor_ = std::atanh((w0 - m_) / r_);
        if (std::fabs(t_anchor_) > T_ - 1.0) throw ConstructionError("anchor value too close to a well");
        const std::size_t K = static_cast<std::size_t>(std::llround(2.0 * T_ / dt_));
        t_.resize(K + 1);
        G_.resize(K + 1);
        g_.resize(K + 1);
        F_.resize(K + 1);
        f_.resize(K + 1);
        for (std::size_t k = 0; k <= K; ++k) {
            t_[k] = -T_ + dt_ * static_cast<double>(k);
            g_[k] = g(t_[k]);
            f_[k] = w_of_t(t_[k]) * g_[k];
        }
        using GL = boost::math::quadrature::gauss<double, 10>;
        auto gf = [&](double t) { return g(t); };
        auto ff = [&](double t) { return w_of_t(t) * g(t); };
        G_[0] = 0.0;
        F_[0] = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            G_[k + 1] = G_[k] + GL::integrate(gf, t_[k], t_[k + 1]);
            F_[k + 1] = F_[k] + GL::integrate(ff, t_[k], t_[k + 1]);
        }
        if (!std::isfinite(G_[K]) || !std::isfinite(F_[K]))
            throw ConstructionError("transition profile integral diverges at the wells");
        std::size_t ka = static_cast<std::size_t>(std::floor((t_anchor_ + T_) / dt_));
        ka = std::min(ka, K - 1);
        double Ga = G_[ka] + GL::integrate(gf, t_[ka], t_anchor_);
        double Fa = F_[ka] + GL::integrate(ff, t_[ka], t_anchor_);
        for (std::size_t k = 0; k <= K; ++k) {
            G_[k] -= Ga;
            F_[k] -= Fa;
        }
        x_lo_ = eps3_ * G_.front();
        x_hi_ = eps3_ * G_.back();
        P_lo_ = eps3_ * F_.front();
        P_hi_ = eps3_ * F_.back();
    }

    double lo() const override { return lo_; }
    double hi() const override { return hi_; }
    double eps3() const { return eps3_; }

    double value(double x) const override {
        if (x <= x_lo_) return lo_;
        if (x >= x_hi_) return hi_;
        return w_of_t(t_of_x(x));
    }

    double slope(double x) const override {
        if (x <= x_lo_ || x >= x_hi_) return 0.0;
        double t = t_of_x(x);
        return sq_(dlo(t), dhi(t)) / eps3_;
    }

    double primitive(double x) const override {
        if (x <= x_lo_) return P_lo_ + lo_ * (x - x_lo_);
        if (x >= x_hi_) return P_hi_ + hi_ * (x - x_hi_);
        double t = t_of_x(x);
        std::size_t k = cell_of_t(t);
        return eps3_ * hermite(t, k, F_, f_);
    }

    // x at which the profile takes the value w (lo < w < hi)
    double position(double w) const {
        if (!(w > lo_ && w < hi_)) throw ParameterError("position(): value outside the open well interval");
        double t = std::atanh((w - m_) / r_);
        if (t <= -T_) return x_lo_;
        if (t >= T_) return x_hi_;
        return eps3_ * hermite(t, cell_of_t(t), G_, g_);
    }

    double core() const override { return 0.0; }
    double left_extent(double tol) const override { return position(std::min(lo_ + tol, m_)); }
    double right_extent(double tol) const override { return position(std::max(hi_ - tol, m_)); }

private:
    double dlo(double t) const { return 2.0 * r_ / (1.0 + std::exp(-2.0 * t)); }
    double dhi(double t) const { return 2.0 * r_ / (1.0 + std::exp(2.0 * t)); }
    double w_of_t(double t) const { return t < 0.0 ? lo_ + dlo(t) : hi_ - dhi(t); }
    double g(double t) const {
        double a = dlo(t), b = dhi(t);
        double s = sq_(a, b);
        return (a * b / r_) / s;
    }
    std::size_t cell_of_t(double t) const {
        double k = std::floor((t + T_) / dt_);
        if (k < 0) k = 0;
        double kmax = static_cast<double>(t_.size() - 2);
        if (k > kmax) k = kmax;
        return static_cast<std::size_t>(k);
    }
    double hermite(double t, std::size_t k, const std::vector<double>& P, const std::vector<double>& dP) const {
        double h = dt_;
        double s = (t - t_[k]) / h;
        double s2 = s * s, s3 = s2 * s;
        double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
        return h00 * P[k] + h10 * h * dP[k] + h01 * P[k + 1] + h11 * h * dP[k + 1];
    }
    double t_of_x(double x) const {
        double target = x / eps3_;
        auto it = std::upper_bound(G_.begin(), G_.end(), target);
        std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - G_.begin()) - 1));
        k = std::min(k, t_.size() - 2);
        double a = t_[k], b = t_[k + 1];
        double ga = G_[k], gb = G_[k + 1];
        double t = (gb > ga) ? a + (b - a) * (target - ga) / (gb - ga) : a;
        for (int it2 = 0; it2 < 30; ++it2) {
            double r = hermite(t, k, G_, g_) - target;
            double dr = hermite_d(t, k, G_, g_);
            double tn = t - r / dr;
            if (!(tn > a && tn < b)) {
                // safeguard: bisection step
                if (r > 0) b = t; else a = t;
                tn = 0.5 * (a + b);
            } else {
                if (r > 0) b = t; else a = t;
            }
            if (std::fabs(tn - t) < 1e-15 * (1.0 + std::fabs(t))) { t = tn; break; }
            t = tn;
        }
        return t;
    }
    double hermite_d(double t, std::size_t k, const std::vector<double>& P, const std::vector<double>& dP) const {
        double h = dt_;
        double s = (t - t_[k]) / h;
        double s2 = s * s;
        double d00 = 6 * s2 - 6 * s, d10 = 3 * s2 - 4 * s + 1, d01 = -6 * s2 + 6 * s, d11 = 3 * s2 - 2 * s;
        return (d00 * P[k] + d01 * P[k + 1]) / h + d10 * dP[k] + d11 * dP[k + 1];
    }

    DeflatedSqrtW sq_;
    double lo_, hi_, eps3_, T_, dt_;
    double m_ = 0, r_ = 0, t_anchor_ = 0;
    double x_lo_ = 0, x_hi_ = 0, P_lo_ = 0, P_hi_ = 0;
    std::vector<double> t_, G_, g_, F_, f_;
};

// Bridge parameters for the z1 -> z3 composite.
struct BridgeParams {
    double mu = 0.0;     // the plateau offset: the bridge runs from z2-mu to z2+mu
    double width = 0.0;  // bridge length in x
};

// mu = eps^(2/(max(3,q)-2)), theta = 3/2 (max(q,3)-2), slope mu^-theta.
inline BridgeParams standard_bridge(double eps, double q) {
    double qq = std::max(3.0, q);
    BridgeParams b;
    b.mu = std::pow(eps, 2.0 / (qq - 2.0));
    double theta = 1.5 * (qq - 2.0);
    b.width = 2.0 * std::pow(b.mu, theta + 1.0);
    return b;
}

// z1 -> z3 gradient profile: the z1 -> z2 heteroclinic up to the level
// z2 - mu, a linear bridge, then the z2 -> z3 heteroclinic from z2 + mu.
// value(0) = 0.
class BridgedProfile : public MonotoneWave {
public:
    BridgedProfile(const PotentialSpec& sp, double eps, BridgeParams bp)
        : a_(std::make_shared<TransitionProfile>(sp, sp.z1(), sp.z2(), eps, 0.0)),
          b_(std::make_shared<TransitionProfile>(sp, sp.z2(), sp.z3(), eps, sp.z2() + bp.mu)),
          z2_(sp.z2()), mu_(bp.mu), width_(bp.width) {
        if (!(mu_ > 0.0 && mu_ < 0.5 * std::min(sp.z2() - sp.z1(), sp.z3() - sp.z2())))
            throw ConstructionError("bridge offset mu is not small compared with the well gaps");
        if (!(width_ > 0.0)) throw ConstructionError("bridge width must be positive");
        s0_ = a_->position(z2_ - mu_);
        s1_ = s0_ + width_;
        Pa_s0_ = a_->primitive(s0_);
        Pbridge_ = width_ * z2_;  // linear from z2-mu to z2+mu
    }

    // Bridge whose slope matches the mean of the two heteroclinic slopes at
    // its ends.
    static BridgedProfile matched(const PotentialSpec& sp, double eps, double mu) {
        double e3 = eps * eps * eps;
        double sl = 0.5 * (sqrt_W(sp, sp.z2() - mu) + sqrt_W(sp, sp.z2() + mu)) / e3;
        return BridgedProfile(sp, eps, BridgeParams{mu, 2.0 * mu / sl});
    }

    double lo() const override { return a_->lo(); }
    double hi() const override { return b_->hi(); }
    double value(double x) const override {
        if (x <= s0_) return a_->value(x);
        if (x < s1_) return z2_ - mu_ + 2.0 * mu_ * (x - s0_) / width_;
        return b_->value(x - s1_);
    }
    double slope(double x) const override {
        if (x <= s0_) return a_->slope(x);
        if (x < s1_) return 2.0 * mu_ / width_;
        return b_->slope(x - s1_);
    }
    double primitive(double x) const override {
        if (x <= s0_) return a_->primitive(x);
        if (x < s1_) {
            double d = x - s0_;
            return Pa_s0_ + (z2_ - mu_) * d + mu_ * d * d / width_;
        }
        return Pa_s0_ + Pbridge_ + b_->primitive(x - s1_);
    }
    std::vector<double> kinks() const override { return {s0_, s1_}; }
    double core() const override { return 0.0; }
    double left_extent(double tol) const override { return a_->left_extent(tol); }
    double right_extent(double tol) const override { return s1_ + b_->right_extent(tol); }
    double bridge_start() const { return s0_; }
    double bridge_width() const { return width_; }
    double mu() const { return mu_; }

private:
    std::shared_ptr<TransitionProfile> a_, b_;
    double z2_, mu_, width_;
    double s0_ = 0, s1_ = 0, Pa_s0_ = 0, Pbridge_ = 0;
};

// Piecewise-linear monotone profile through samples, constant outside.
class SampledWave : public MonotoneWave {
public:
    SampledWave(std::vector<double> x, std::vector<double> w) : x_(std::move(x)), w_(std::move(w)) {
        if (x_.size() < 2 || x_.size() != w_.size()) throw ParameterError("sampled wave needs >= 2 matching samples");
        for (std::size_t i = 1; i < x_.size(); ++i) {
            if (!(x_[i] > x_[i - 1])) throw GridError("sample abscissae must be strictly increasing");
            if (w_[i] < w_[i - 1]) throw PreconditionError("sampled wave must be nondecreasing");
        }
        P_.assign(x_.size(), 0.0);
        for (std::size_t i = 1; i < x_.size(); ++i)
            P_[i] = P_[i - 1] + 0.5 * (w_[i] + w_[i - 1]) * (x_[i] - x_[i - 1]);
        // shift so that primitive(0) = 0
        P0_ = raw_primitive(0.0);
    }
    double lo() const override { return w_.front(); }
    double hi() const override { return w_.back(); }
    double value(double x) const override {
        if (x <= x_.front()) return w_.front();
        if (x >= x_.back()) return w_.back();
        std::size_t k = cell(x);
        double s = (x - x_[k]) / (x_[k + 1] - x_[k]);
        return w_[k] + s * (w_[k + 1] - w_[k]);
    }
    double slope(double x) const override {
        if (x <= x_.front() || x >= x_.back()) return 0.0;
        std::size_t k = cell(x);
        return (w_[k + 1] - w_[k]) / (x_[k + 1] - x_[k]);
    }
    double primitive(double x) const override { return raw_primitive(x) - P0_; }
    double left_extent(double) const override { return x_.front(); }
    double right_extent(double) const override { return x_.back(); }

private:
    std::size_t cell(double x) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t k = static_cast<std::size_t>(it - x_.begin());
        return std::min(k == 0 ? 0 : k - 1, x_.size() - 2);
    }
    double raw_primitive(double x) const {
        if (x <= x_.front()) return w_.front() * (x - x_.front());
        if (x >= x_.back()) return P_.back() + w_.back() * (x - x_.back());
        std::size_t k = cell(x);
        double d = x - x_[k];
        double v = value(x);
        return P_[k] + 0.5 * (w_[k] + v) * d;
    }
    std::vector<double> x_, w_, P_;
    double P0_ = 0.0;
};

// omega with integral over [0, l] of wave(s - omega) equal to zero.
template <class Wave>
double zero_mean_shift(const Wave& wave, double period_l) {
    if (!(period_l > 0.0)) throw ParameterError("period must be positive");
    auto F = [&](double om) { return wave.primitive(period_l - om) - wave.primitive(-om); };
    double lo = 0.0, hi = period_l;
    double Flo = F(lo), Fhi = F(hi);
    if (!(Flo > 0.0 && Fhi < 0.0)) {
        // widen the bracket once in case the profile is far off center
        lo = -period_l;
        hi = 2.0 * period_l;
        Flo = F(lo);
        Fhi = F(hi);
        if (!(Flo > 0.0 && Fhi < 0.0))
            throw ConstructionError("zero-mean shift: no sign change of the tooth integral");
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        double fm = F(mid);
        if (fm == 0.0) return mid;
        if (fm > 0.0) lo = mid; else hi = mid;
    }
    double a = F(lo), b = F(hi);
    return std::fabs(a) <= std::fabs(b) ? lo : hi;
}

enum class Branch { z1_z2, z2_z3 };

// Heteroclinic sampled on x_grid. Default anchors: value 0 at x=0 for the
// z1->z2 branch, the midpoint (z2+z3)/2 at x=0 for the z2->z3 branch.
inline std::vector<double> solve_transition_ode(const PotentialSpec& sp, double eps, Branch br,
                                                const std::vector<double>& x_grid, double anchor = NAN) {
    double lo = br == Branch::z1_z2 ? sp.z1() : sp.z2();
    double hi = br == Branch::z1_z2 ? sp.z2() : sp.z3();
    if (std::isnan(anchor)) anchor = br == Branch::z1_z2 ? 0.0 : 0.5 * (lo + hi);
    TransitionProfile p(sp, lo, hi, eps, anchor);
    std::vector<double> out(x_grid.size());
    for (std::size_t i = 0; i < x_grid.size(); ++i) out[i] = p.value(x_grid[i]);
    return out;
}

}  // namespace tripwell
