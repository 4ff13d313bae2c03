#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace tripwell {

// Dense real polynomial, coefficients in ascending degree.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> c) : c_(std::move(c)) { trim(); }

    const std::vector<double>& coeffs() const { return c_; }
    int degree() const { return c_.empty() ? -1 : static_cast<int>(c_.size()) - 1; }
    double leading() const { return c_.empty() ? 0.0 : c_.back(); }
    double operator[](std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }

    double operator()(double x) const {
        double r = 0.0;
        for (std::size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
        return r;
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return Polynomial{};
        std::vector<double> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
        return Polynomial(std::move(d));
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (double v : c_) m = std::max(m, std::fabs(v));
        return m;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<double> r(std::max(a.c_.size(), b.c_.size()), 0.0);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + b[i];
        return Polynomial(std::move(r));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        std::vector<double> r(std::max(a.c_.size(), b.c_.size()), 0.0);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] - b[i];
        return Polynomial(std::move(r));
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.c_.empty() || b.c_.empty()) return Polynomial{};
        std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(r));
    }
    friend Polynomial operator*(double s, const Polynomial& a) {
        std::vector<double> r = a.c_;
        for (double& v : r) v *= s;
        return Polynomial(std::move(r));
    }

    // Polynomial remainder of a by b.
    static Polynomial remainder(const Polynomial& a, const Polynomial& b) {
        if (b.degree() < 0) throw NumericError("polynomial division by zero");
        std::vector<double> r = a.c_;
        int db = b.degree();
        for (int k = static_cast<int>(r.size()) - 1; k >= db; --k) {
            double q = r[k] / b.c_[db];
            for (int j = 0; j <= db; ++j) r[k - db + j] -= q * b.c_[j];
            r[k] = 0.0;
        }
        r.resize(static_cast<std::size_t>(std::max(db, 0)));
        return Polynomial(std::move(r));
    }

    // Drop leading coefficients below `rel` times the largest coefficient.
    void chop(double rel) {
        double m = max_abs_coeff();
        while (!c_.empty() && std::fabs(c_.back()) <= rel * m) c_.pop_back();
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    }
    std::vector<double> c_;
};

// Sturm chain of p. Remainders are chopped relative to their own size so
// rounding noise does not masquerade as a true remainder.
inline std::vector<Polynomial> sturm_chain(const Polynomial& p) {
    std::vector<Polynomial> s;
    s.push_back(p);
    s.push_back(p.derivative());
    while (s.back().degree() > 0) {
        Polynomial r = Polynomial::remainder(s[s.size() - 2], s.back());
        double scale = std::max(s[s.size() - 2].max_abs_coeff(), 1e-300);
        if (r.max_abs_coeff() <= 1e-13 * scale) break;
        r.chop(1e-14);
        s.push_back(-1.0 * r);
    }
    return s;
}

inline int sturm_sign_changes(const std::vector<Polynomial>& chain, double x) {
    int changes = 0;
    int prev = 0;
    for (const auto& q : chain) {
        double v = q(x);
        int sg = (v > 0) - (v < 0);
        if (sg == 0) continue;
        if (prev != 0 && sg != prev) ++changes;
        prev = sg;
    }
    return changes;
}

// Number of distinct real roots in (a, b].
inline int count_roots(const std::vector<Polynomial>& chain, double a, double b) {
    return sturm_sign_changes(chain, a) - sturm_sign_changes(chain, b);
}

// Cauchy bound on the modulus of the roots.
inline double root_bound(const Polynomial& p) {
    double lead = std::fabs(p.leading());
    double m = 0.0;
    for (int i = 0; i < p.degree(); ++i) m = std::max(m, std::fabs(p[i]) / lead);
    return 1.0 + m;
}

// Distinct real roots of p in (a, b], each refined by Sturm bisection to
// width `xtol`.
inline std::vector<double> isolate_roots(const Polynomial& p, double a, double b, double xtol) {
    std::vector<double> roots;
    if (p.degree() <= 0) return roots;
    auto chain = sturm_chain(p);
    std::vector<std::pair<double, double>> work{{a, b}};
    while (!work.empty()) {
        auto [lo, hi] = work.back();
        work.pop_back();
        int n = count_roots(chain, lo, hi);
        if (n <= 0) continue;
        if (hi - lo <= xtol) {
            roots.push_back(0.5 * (lo + hi));
            continue;
        }
        if (n == 1) {
            // Plain bisection on sign when the root is a crossing, Sturm otherwise.
            double flo = p(lo), fhi = p(hi);
            if (flo != 0.0 && fhi != 0.0 && (flo < 0) != (fhi < 0)) {
                while (hi - lo > xtol) {
                    double mid = 0.5 * (lo + hi);
                    double fm = p(mid);
                    if (fm == 0.0) { lo = hi = mid; break; }
                    if ((fm < 0) == (flo < 0)) { lo = mid; flo = fm; } else hi = mid;
                }
                roots.push_back(0.5 * (lo + hi));
                continue;
            }
        }
        double mid = 0.5 * (lo + hi);
        work.push_back({mid, hi});
        work.push_back({lo, mid});
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace tripwell
