#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "constants.hpp"
#include "energy.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "minimizer.hpp"
#include "numeric.hpp"
#include "potential.hpp"

namespace tripwell {

using Json = nlohmann::ordered_json;

inline constexpr const char* tool_version = "1.0.0";

inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot write '" + path + "'");
    out << text;
    if (!out) throw ParameterError("write to '" + path + "' failed");
}

// Report numbers: 12 significant digits; non-finite values become null.
inline Json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return round_sig(v, 12);
}

inline Json num_list(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

// ---- potential --------------------------------------------------------

inline PotentialSpec potential_from_json(const Json& j) {
    try {
        if (!j.is_object()) throw SpecificationError("potential must be a JSON object");
        std::string kind = j.at("kind").get<std::string>();
        auto w = j.at("wells").get<std::vector<double>>();
        if (w.size() != 3) throw SpecificationError("wells must have exactly 3 entries");
        PotentialSpec sp;
        if (kind == "polynomial-triple-well") {
            if (j.contains("coeffs")) throw SpecificationError("triple-well potentials take no coeffs");
            sp = PotentialSpec::triple_well(w[0], w[1], w[2]);
        } else if (kind == "custom-polynomial") {
            sp = PotentialSpec::custom({w[0], w[1], w[2]}, j.at("coeffs").get<std::vector<double>>());
        } else {
            throw SpecificationError("unknown potential kind '" + kind + "'");
        }
        if (j.contains("growth_p")) sp.growth_p = j.at("growth_p").get<double>();
        if (j.contains("coercivity")) {
            const auto& c = j.at("coercivity");
            sp.coercivity = Coercivity{c.at("q").get<double>(), c.at("eta0").get<double>(), c.at("c0").get<double>()};
        }
        sp.validate();
        return sp;
    } catch (const nlohmann::json::exception& e) {
        throw SpecificationError(std::string("malformed potential: ") + e.what());
    }
}

inline PotentialSpec parse_potential(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw SpecificationError(std::string("potential is not valid JSON: ") + e.what());
    }
    return potential_from_json(j);
}

inline Json potential_to_json(const PotentialSpec& sp) {
    Json j;
    if (sp.kind == PotentialSpec::Kind::TripleWell) {
        j["kind"] = "polynomial-triple-well";
        j["wells"] = {sp.z1(), sp.z2(), sp.z3()};
    } else {
        j["kind"] = "custom-polynomial";
        j["wells"] = {sp.z1(), sp.z2(), sp.z3()};
        j["coeffs"] = sp.coeffs;
    }
    if (sp.growth_p) j["growth_p"] = *sp.growth_p;
    if (sp.coercivity) j["coercivity"] = {{"q", sp.coercivity->q}, {"eta0", sp.coercivity->eta0}, {"c0", sp.coercivity->c0}};
    return j;
}

// ---- profiles (full precision so they round-trip) ----------------------

inline Json profile_to_json(const GridFunction& g) {
    Json j;
    j["eps"] = g.eps;
    j["nodes"] = g.nodes;
    j["values"] = g.values;
    Json m = Json::object();
    m["kind"] = g.kind;
    for (const auto& [k, v] : g.meta) m[k] = v;
    j["meta"] = m;
    return j;
}

inline GridFunction profile_from_json(const Json& j) {
    try {
        GridFunction g;
        g.eps = j.value("eps", 0.0);
        g.nodes = j.at("nodes").get<std::vector<double>>();
        g.values = j.at("values").get<std::vector<double>>();
        if (j.contains("meta")) {
            for (const auto& [k, v] : j.at("meta").items()) {
                if (k == "kind" && v.is_string()) g.kind = v.get<std::string>();
                else if (v.is_number()) g.meta[k] = v.get<double>();
            }
        }
        g.validate();
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw GridError(std::string("malformed profile: ") + e.what());
    }
}

inline GridFunction parse_profile(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw GridError(std::string("profile is not valid JSON: ") + e.what());
    }
    return profile_from_json(j);
}

// ---- reports -----------------------------------------------------------

struct Manifest {
    std::string command;
    std::string potential_digest;
    Json options = Json::object();
    double wall_time_s = 0.0;
};

inline Json manifest_json(const Manifest& m) {
    Json j;
    j["command"] = m.command;
    j["potential_digest"] = m.potential_digest;
    j["options"] = m.options;
    j["tool_version"] = tool_version;
    j["wall_time_s"] = num(m.wall_time_s);
    return j;
}

inline Json to_json(const LimitConstants& c) {
    return Json{{"E0", num(c.E0)},         {"E1", num(c.E1)},         {"A0", num(c.A0)},
                {"B0", num(c.B0)},         {"d_star", num(c.d_star)}, {"h_star", num(c.h_star)},
                {"z21", num(c.z21)},       {"z31", num(c.z31)},       {"quad_error", num(c.quad_error)}};
}

inline Json to_json(const HypothesisVerdict& v) {
    Json iv = Json::array();
    for (const auto& [a, b] : v.violation_intervals) iv.push_back({num(a), std::isinf(b) ? Json("inf") : num(b)});
    return Json{{"holds", v.holds},
                {"violation_intervals", iv},
                {"worst_y", num(v.worst_y)},
                {"worst_margin", num(v.worst_margin)},
                {"reduced_confidence", v.reduced_confidence}};
}

inline Json to_json(const HypothesisReport& r) {
    return Json{{"H6", to_json(r.H6)}, {"H7", to_json(r.H7)}, {"H8", to_json(r.H8)}, {"y_max", num(r.y_max)}};
}

inline Json to_json(const EnergyBreakdown& b) {
    return Json{{"total", num(b.total)},
                {"interface", num(b.interface)},
                {"bulk_W", num(b.bulk_W)},
                {"bulk_u2", num(b.bulk_u2)},
                {"scaling", b.scaling == Scaling::I_eps ? "I_eps" : "E_eps"},
                {"under_resolved", b.under_resolved},
                {"max_cell_in_layers", num(b.max_cell_in_layers)}};
}

inline Json to_json(const MeasureReport& r) {
    Json j;
    j["eta"] = num(r.fractions.eta);
    j["lambda"] = {num(r.fractions.lambda[0]), num(r.fractions.lambda[1]), num(r.fractions.lambda[2])};
    j["sigma_measure"] = num(r.fractions.sigma_measure);
    j["overlap_measure"] = num(r.fractions.overlap_measure);
    j["layers"] = {{"A_plus", r.layers.A_plus},
                   {"A_minus", r.layers.A_minus},
                   {"B_plus", r.layers.B_plus},
                   {"B_minus", r.layers.B_minus}};
    j["thresholds"] = {{"R_lo", num(r.thresholds.R_lo)}, {"R_hi", num(r.thresholds.R_hi)}};
    Json d = Json::array();
    for (const auto& D : r.d_list)
        d.push_back({{"span", {num(D.x_minus), num(D.x_plus)}},
                     {"alpha_i", num(D.alpha)},
                     {"beta_i", num(D.beta)},
                     {"n_i", D.n_B},
                     {"type", to_string(D.type)}});
    j["d_intervals"] = d;
    j["histogram"] = {{"bins", r.histogram.masses.size()},
                      {"lo", num(r.histogram.edges.front())},
                      {"hi", num(r.histogram.edges.back())},
                      {"mean", num(r.histogram.mean)},
                      {"out_of_range", num(r.histogram.out_of_range)},
                      {"masses", num_list(r.histogram.masses)}};
    return j;
}

inline std::string histogram_csv(const Histogram& h) {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "bin_lo,bin_hi,mass\n";
    for (std::size_t k = 0; k < h.masses.size(); ++k)
        os << round_sig(h.edges[k], 12) << ',' << round_sig(h.edges[k + 1], 12) << ',' << round_sig(h.masses[k], 12)
           << '\n';
    return os.str();
}

inline Json to_json(const StartResult& s) {
    return Json{{"index", s.index},
                {"kind", s.kind},
                {"ok", s.ok},
                {"error", s.error},
                {"seed_value", num(s.seed_value)},
                {"value", s.ok ? num(s.result.value) : Json(nullptr)},
                {"iterations", s.result.iterations},
                {"grad_norm", s.ok ? num(s.result.grad_norm) : Json(nullptr)},
                {"converged", s.result.converged},
                {"message", s.result.message}};
}

inline std::string sweep_csv(const std::vector<SweepRecord>& recs) {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "eps,best_value,lambda1,lambda2,lambda3,layersA,layersB,start_kind\n";
    for (const auto& r : recs)
        os << round_sig(r.eps, 12) << ',' << round_sig(r.best_value, 12) << ',' << round_sig(r.lambda1, 12) << ','
           << round_sig(r.lambda2, 12) << ',' << round_sig(r.lambda3, 12) << ',' << r.n_layers_A << ','
           << r.n_layers_B << ',' << r.start_kind << '\n';
    return os.str();
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace tripwell
