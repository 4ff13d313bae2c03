#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"
#include "polynomial.hpp"

namespace tripwell {

struct Coercivity {
    double q = 2.0;
    double eta0 = 0.0;
    double c0 = 0.0;
};

struct PotentialSpec {
    enum class Kind { TripleWell, CustomPolynomial };

    Kind kind = Kind::TripleWell;
    std::array<double, 3> wells{-1.0, 0.5, 1.0};
    std::vector<double> coeffs;  // ascending degree; filled for both kinds
    std::optional<double> growth_p;
    std::optional<Coercivity> coercivity;

    double z1() const { return wells[0]; }
    double z2() const { return wells[1]; }
    double z3() const { return wells[2]; }

    static PotentialSpec triple_well(double z1, double z2, double z3) {
        PotentialSpec s;
        s.kind = Kind::TripleWell;
        s.wells = {z1, z2, z3};
        Polynomial p = Polynomial({-z1, 1.0}) * Polynomial({-z2, 1.0}) * Polynomial({-z3, 1.0});
        s.coeffs = (p * p).coeffs();
        s.coeffs.resize(7, 0.0);
        s.validate();
        return s;
    }

    static PotentialSpec custom(std::array<double, 3> wells, std::vector<double> coeffs) {
        PotentialSpec s;
        s.kind = Kind::CustomPolynomial;
        s.wells = wells;
        s.coeffs = std::move(coeffs);
        s.validate();
        return s;
    }

    // Structural checks: well ordering and a well-formed coefficient list.
    void validate() const {
        for (double z : wells)
            if (!std::isfinite(z)) throw SpecificationError("wells must be finite");
        if (!(wells[0] < 0.0 && 0.0 < wells[1] && wells[1] < wells[2]))
            throw SpecificationError("wells must satisfy z1 < 0 < z2 < z3");
        if (coeffs.empty()) throw SpecificationError("coefficient list is empty");
        for (double c : coeffs)
            if (!std::isfinite(c)) throw SpecificationError("coefficients must be finite");
        if (growth_p && !(*growth_p > 1.0)) throw SpecificationError("growth_p must exceed 1");
        if (coercivity) {
            const auto& c = *coercivity;
            if (!(c.q > 0 && c.eta0 > 0 && c.c0 > 0))
                throw SpecificationError("coercivity q, eta0, c0 must be positive");
        }
    }

    Polynomial polynomial() const { return Polynomial(coeffs); }
};

namespace detail {
inline double cubic_factor(const PotentialSpec& sp, double s) {
    return (s - sp.wells[0]) * (s - sp.wells[1]) * (s - sp.wells[2]);
}
inline double horner(const std::vector<double>& c, double s) {
    double r = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) r = r * s + c[i];
    return r;
}
inline double horner_d(const std::vector<double>& c, double s, int order) {
    double r = 0.0;
    for (std::size_t i = c.size(); i-- > static_cast<std::size_t>(order);) {
        double f = 1.0;
        for (int k = 0; k < order; ++k) f *= static_cast<double>(i - k);
        r = r * s + f * c[i];
    }
    return r;
}
}  // namespace detail

// The triple-well family is evaluated in factored form, which keeps relative
// accuracy near the wells.
inline double eval_W(const PotentialSpec& sp, double s) {
    if (sp.kind == PotentialSpec::Kind::TripleWell) {
        double p = detail::cubic_factor(sp, s);
        return p * p;
    }
    return detail::horner(sp.coeffs, s);
}

inline double eval_dW(const PotentialSpec& sp, double s) {
    if (sp.kind == PotentialSpec::Kind::TripleWell) {
        double a = s - sp.wells[0], b = s - sp.wells[1], c = s - sp.wells[2];
        return 2.0 * a * b * c * (b * c + a * c + a * b);
    }
    return detail::horner_d(sp.coeffs, s, 1);
}

inline double eval_d2W(const PotentialSpec& sp, double s) {
    if (sp.kind == PotentialSpec::Kind::TripleWell) {
        double a = s - sp.wells[0], b = s - sp.wells[1], c = s - sp.wells[2];
        double p1 = b * c + a * c + a * b;
        double p2 = 2.0 * (a + b + c);
        return 2.0 * (p1 * p1 + a * b * c * p2);
    }
    return detail::horner_d(sp.coeffs, s, 2);
}

inline double sqrt_W(const PotentialSpec& sp, double s) {
    if (sp.kind == PotentialSpec::Kind::TripleWell) return std::fabs(detail::cubic_factor(sp, s));
    return std::sqrt(std::max(eval_W(sp, s), 0.0));
}

// Order of vanishing of W at z: smallest k with a non-negligible k-th
// derivative. Returns 0 if W(z) is not (numerically) zero.
inline int well_multiplicity(const PotentialSpec& sp, double z) {
    if (sp.kind == PotentialSpec::Kind::TripleWell) {
        int m = 0;
        for (double w : sp.wells) m += (w == z) ? 2 : 0;
        return m;
    }
    double scale = 0.0, zp = 1.0;
    for (double c : sp.coeffs) {
        scale += std::fabs(c) * zp;
        zp *= std::max(1.0, std::fabs(z));
    }
    scale = std::max(scale, 1e-300);
    int deg = static_cast<int>(sp.coeffs.size()) - 1;
    double fact = 1.0;
    for (int k = 0; k <= deg; ++k) {
        if (k > 0) fact *= k;
        double dk = detail::horner_d(sp.coeffs, z, k) / fact;
        if (std::fabs(dk) > 1e-9 * scale) return k;
    }
    return deg + 1;
}

// W(s) = (s-lo)^mlo (s-hi)^mhi Q(s) between two adjacent wells; evaluates
// sqrt(W) from the offsets to the wells without cancellation.
class DeflatedSqrtW {
public:
    DeflatedSqrtW(const PotentialSpec& sp, double lo, double hi) : sp_(sp), lo_(lo), hi_(hi) {
        mlo_ = well_multiplicity(sp, lo);
        mhi_ = well_multiplicity(sp, hi);
        if (mlo_ == 0 || mhi_ == 0) throw ConstructionError("transition endpoints must be zeros of W");
        if (sp.kind == PotentialSpec::Kind::TripleWell) {
            for (double w : sp.wells)
                if (w != lo && w != hi) other_ = w;
            return;
        }
        std::vector<double> c = sp.coeffs;
        auto deflate = [&](double r, int m) {
            for (int k = 0; k < m; ++k) {
                std::vector<double> q(c.size() - 1);
                double acc = 0.0;
                for (std::size_t i = c.size(); i-- > 1;) {
                    acc = acc * r + c[i];
                    q[i - 1] = acc;
                }
                c = q;
            }
        };
        deflate(lo, mlo_);
        deflate(hi, mhi_);
        Q_ = c;
    }

    int mult_lo() const { return mlo_; }
    int mult_hi() const { return mhi_; }

    double operator()(double dlo, double dhi) const {
        double s = (dlo <= dhi) ? lo_ + dlo : hi_ - dhi;
        double q;
        if (sp_.kind == PotentialSpec::Kind::TripleWell) q = std::fabs(s - other_);
        else q = std::sqrt(std::max(detail::horner(Q_, s), 0.0));
        return pow_half(dlo, mlo_) * pow_half(dhi, mhi_) * q;
    }

private:
    static double pow_half(double d, int m) {
        if (m == 2) return d;
        return std::pow(d, 0.5 * m);
    }
    PotentialSpec sp_;
    double lo_, hi_;
    int mlo_ = 0, mhi_ = 0;
    double other_ = 0.0;
    std::vector<double> Q_;
};

// W vanishes at the wells and is positive at sampled points elsewhere.
inline bool check_wells(const PotentialSpec& sp, std::size_t grid_n = 10000) {
    double scale = 0.0;
    for (double c : sp.coeffs) scale = std::max(scale, std::fabs(c));
    for (double z : sp.wells)
        if (std::fabs(eval_W(sp, z)) > 1e-10 * std::max(scale, 1.0)) return false;
    double a = sp.z1() - 2.0, b = sp.z3() + 2.0;
    for (std::size_t i = 0; i <= grid_n; ++i) {
        double s = a + (b - a) * static_cast<double>(i) / static_cast<double>(grid_n);
        double dmin = std::min({std::fabs(s - sp.z1()), std::fabs(s - sp.z2()), std::fabs(s - sp.z3())});
        if (dmin < 1e-9) continue;
        if (!(eval_W(sp, s) > 0.0)) return false;
    }
    return true;
}

inline double coercivity_ratio(const PotentialSpec& sp, double s, double q, double eta0) {
    double dmin = std::min({std::fabs(s - sp.z1()), std::fabs(s - sp.z2()), std::fabs(s - sp.z3())});
    double lower = std::min(std::pow(dmin, q), std::pow(eta0, q));
    if (lower <= 0.0) return std::numeric_limits<double>::infinity();
    return eval_W(sp, s) / lower;
}

inline bool coercivity_holds(const PotentialSpec& sp, const Coercivity& c, double s) {
    double dmin = std::min({std::fabs(s - sp.z1()), std::fabs(s - sp.z2()), std::fabs(s - sp.z3())});
    return eval_W(sp, s) >= c.c0 * std::min(std::pow(dmin, c.q), std::pow(c.eta0, c.q));
}

inline Coercivity estimate_coercivity(const PotentialSpec& sp, std::size_t grid_n = 100000) {
    if (grid_n < 1000) throw ParameterError("estimate_coercivity needs grid_n >= 1000");
    Coercivity c;
    int q = 0;
    for (double z : sp.wells) q = std::max(q, well_multiplicity(sp, z));
    if (q == 0) throw CoercivityFailure("W does not vanish at the wells");
    c.q = q;
    c.eta0 = 0.9 * std::min({1.0, -sp.z1(), sp.z2(), 0.5 * (sp.z3() - sp.z2())});
    const double a = sp.z1() - 2.0, b = sp.z3() + 2.0;
    const double h = (b - a) / static_cast<double>(grid_n);
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i <= grid_n; ++i) {
        double r = coercivity_ratio(sp, a + h * static_cast<double>(i), c.q, c.eta0);
        if (r < best) { best = r; arg = i; }
    }
    if (!(best > 0.0) || !std::isfinite(best))
        throw CoercivityFailure("no positive c0 satisfies the coercivity inequality");
    double lo = a + h * (static_cast<double>(arg) - 1.0), hi = a + h * (static_cast<double>(arg) + 1.0);
    double sm = golden_min([&](double s) { return coercivity_ratio(sp, s, c.q, c.eta0); }, lo, hi, 1e-14);
    best = std::min(best, coercivity_ratio(sp, sm, c.q, c.eta0));
    c.c0 = best * (1.0 - 1e-6);
    return c;
}

struct GrowthReport {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    bool ok = false;
    std::string reason;
};

// Growth bounds c1|s|^p - c2 <= W(s) <= c3(|s|^p + 1). The witnesses are
// coefficient-based certificates valid on the whole line; the samples on
// `range` only re-check them.
inline GrowthReport verify_growth(const PotentialSpec& sp, double p, std::pair<double, double> range,
                                  std::size_t grid_n = 10000) {
    if (!(p > 1.0)) throw ParameterError("growth exponent p must exceed 1");
    GrowthReport r;
    Polynomial W = sp.polynomial();
    const int deg = W.degree();
    const double a = W.leading();
    std::vector<std::string> fails;

    if (deg > p + 1e-12) fails.push_back("upper bound fails: deg W exceeds p");
    else {
        double s = 0.0;
        for (int k = 0; k <= deg; ++k) s += std::fabs(W[k]);
        r.c3 = s;
    }
    if (deg < p - 1e-12 || !(a > 0.0)) fails.push_back("lower bound fails: c1|s|^p eventually exceeds W");
    else {
        double sb = 0.0;
        for (int k = 0; k < deg; ++k) sb += std::fabs(W[k]);
        double R = std::max(1.0, 2.0 * sb / a);
        r.c1 = 0.5 * a;
        r.c2 = r.c1 * std::pow(R, p);
    }
    if (fails.empty()) {
        for (std::size_t i = 0; i <= grid_n; ++i) {
            double s = (grid_n == 0) ? range.first
                                     : range.first + (range.second - range.first) * static_cast<double>(i) /
                                                         static_cast<double>(grid_n);
            double w = eval_W(sp, s), sp_ = std::pow(std::fabs(s), p);
            double tol = 1e-12 * (1.0 + std::fabs(w));
            if (r.c1 * sp_ - r.c2 > w + tol) { fails.push_back("lower bound violated at a sample"); break; }
            if (w > r.c3 * (sp_ + 1.0) + tol) { fails.push_back("upper bound violated at a sample"); break; }
            if (range.first == range.second) break;
        }
    }
    r.ok = fails.empty();
    for (std::size_t i = 0; i < fails.size(); ++i) r.reason += (i ? "; " : "") + fails[i];
    return r;
}

// Coercivity record given with the potential, or estimated when absent.
inline Coercivity coercivity_of(const PotentialSpec& sp) {
    return sp.coercivity ? *sp.coercivity : estimate_coercivity(sp);
}

}  // namespace tripwell
