#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tripwell/tripwell.hpp"

using namespace tripwell;

namespace {

struct Context {
    std::string command;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    Json options = Json::object();
    std::string digest;

    Json manifest() const {
        Manifest m;
        m.command = command;
        m.potential_digest = digest;
        m.options = options;
        m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return manifest_json(m);
    }
};

PotentialSpec load_potential(Context& ctx, const std::string& path) {
    std::string text = read_file(path);
    ctx.digest = fnv1a_hex(text);
    return parse_potential(text);
}

GridFunction load_profile(const std::string& path) { return parse_profile(read_file(path)); }

void emit(const Json& j, const std::string& out_path = "") {
    std::string s = dump(j);
    if (!out_path.empty()) write_file(out_path, s);
    std::cout << s;
}

Json with_manifest(const Context& ctx, const Json& body) {
    Json j;
    j["manifest"] = ctx.manifest();
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    return j;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ParameterError("cannot parse number '" + tok + "' in list");
        }
    }
    if (out.empty()) throw ParameterError("empty list");
    return out;
}

std::uint64_t effective_seed(std::uint64_t cli_seed) {
    if (const char* env = std::getenv("TRIPWELL_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ParameterError("TRIPWELL_SEED must be a nonnegative integer");
        }
    }
    return cli_seed;
}

Json sweep_records_json(const std::vector<SweepRecord>& recs) {
    Json a = Json::array();
    for (const auto& r : recs) {
        Json s = Json::array();
        for (const auto& st : r.starts) s.push_back(to_json(st));
        a.push_back({{"eps", num(r.eps)},
                     {"best_value", num(r.best_value)},
                     {"eta", num(r.eta)},
                     {"lambda1", num(r.lambda1)},
                     {"lambda2", num(r.lambda2)},
                     {"lambda3", num(r.lambda3)},
                     {"overlap_measure", num(r.overlap_measure)},
                     {"layersA", r.n_layers_A},
                     {"layersB", r.n_layers_B},
                     {"start_kind", r.start_kind},
                     {"converged", r.converged},
                     {"starts", s}});
    }
    return a;
}

struct MinimizeFlags {
    std::size_t grid_n = 20001;
    std::size_t starts = 5;
    std::uint64_t seed = 0;
    std::size_t max_iters = 1500;
    double grad_tol = 1e-7;
    std::string step_rule = "newton";

    void add(CLI::App* sc) {
        sc->add_option("--grid-n", grid_n, "minimum nodes of the uniform minimization grid")->check(CLI::PositiveNumber);
        sc->add_option("--starts", starts, "number of starts")->check(CLI::PositiveNumber);
        sc->add_option("--seed", seed, "random seed (TRIPWELL_SEED overrides)");
        sc->add_option("--max-iters", max_iters, "iteration cap per start")->check(CLI::PositiveNumber);
        sc->add_option("--grad-tol", grad_tol, "sup-norm gradient tolerance")->check(CLI::PositiveNumber);
        sc->add_option("--step-rule", step_rule, "newton | quasi-newton | gradient-armijo");
    }
    MinimizeOptions options(std::size_t jobs) const {
        MinimizeOptions o;
        o.grid_n = grid_n;
        o.starts = starts;
        o.seed = effective_seed(seed);
        o.max_iters = max_iters;
        o.grad_tol = grad_tol;
        o.step_rule = parse_step_rule(step_rule);
        o.jobs = jobs;
        o.validate();
        return o;
    }
    Json json(const MinimizeOptions& o) const {
        return Json{{"grid_n", o.grid_n},       {"starts", o.starts},        {"seed", o.seed},
                    {"max_iters", o.max_iters}, {"grad_tol", num(o.grad_tol)}, {"step_rule", to_string(o.step_rule)}};
    }
};

// Sharp-limit energy of a competitor with weights w.
double competitor_target(const LimitConstants& c, const CompetitorWeights& w) { return c.A0 * w.lambda2 + c.B0 * w.lambda3; }

// I(eps) = I0 + k eps fitted through two points.
double extrapolate_linear(double e1, double i1, double e2, double i2) { return i2 - (i1 - i2) * e2 / (e1 - e2); }

Json reference_examples(std::size_t starts, std::uint64_t seed, std::size_t jobs, bool with_sweep) {
    const std::vector<double> ladder{0.1, 0.07, 0.05};
    Json out;
    {
        auto sp = PotentialSpec::triple_well(-1.0, 1.0 / 3.0, 1.0);
        auto c = limit_constants(sp);
        auto hyp = check_hypotheses(sp, c);
        Json ex;
        ex["potential"] = potential_to_json(sp);
        ex["constants"] = to_json(c);
        ex["hypotheses"] = to_json(hyp);
        ex["two_well_limit"] = num(c.A0 / c.z21);
        Json built = Json::array();
        for (double eps : ladder) {
            auto g = build_two_well_sawtooth(sp, eps, {0.0, 1.0}, c);
            auto e = energy_Ieps(g, eps, sp);
            double eta = std::pow(eps, 1.0 / (coercivity_of(sp).q + 1.0));
            auto vf = volume_fractions(g, sp, eta, eta >= coercivity_of(sp).eta0);
            built.push_back({{"eps", num(eps)},
                             {"N", g.meta.at("N")},
                             {"I_eps", num(e.total)},
                             {"eta", num(eta)},
                             {"lambda", {num(vf.lambda[0]), num(vf.lambda[1]), num(vf.lambda[2])}}});
        }
        ex["two_well_profiles"] = built;
        if (with_sweep) {
            MinimizeOptions o;
            o.starts = starts;
            o.seed = seed;
            o.jobs = jobs;
            ex["sweep"] = sweep_records_json(epsilon_sweep(sp, ladder, o));
        }
        out["example_z2_one_third"] = ex;
    }
    {
        auto sp = PotentialSpec::triple_well(-1.0, 0.5, 1.0);
        auto c = limit_constants(sp);
        auto hyp = check_hypotheses(sp, c);
        Json ex;
        ex["potential"] = potential_to_json(sp);
        ex["constants"] = to_json(c);
        ex["hypotheses"] = to_json(hyp);
        Json comp = Json::array();
        auto run = [&](const std::string& name, double yhat, auto builder) {
            std::vector<double> es{0.05, 0.025}, vals;
            CompetitorInfo info;
            for (double eps : es) {
                auto g = builder(sp, eps, yhat, c, ConstructionOptions{}, &info);
                vals.push_back(energy_Ieps(g, eps, sp).total);
            }
            double target = competitor_target(c, info.weights);
            double limit = extrapolate_linear(es[0], vals[0], es[1], vals[1]);
            comp.push_back({{"kind", name},
                            {"yhat", num(yhat)},
                            {"lambda", {num(info.weights.lambda1), num(info.weights.lambda2), num(info.weights.lambda3)}},
                            {"target", num(target)},
                            {"eps", num_list(es)},
                            {"I_eps", num_list(vals)},
                            {"extrapolated", num(limit)},
                            {"sharp_energy", num(info.sharp_energy)},
                            {"strictly_below", vals[0] < target && limit < target}});
        };
        if (!hyp.H7.holds) run("h7-competitor", hyp.H7.worst_y, build_h7_competitor);
        if (!hyp.H8.holds) run("h8-competitor", hyp.H8.worst_y, build_h8_competitor);
        ex["competitors"] = comp;
        out["example_z2_one_half"] = ex;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tripwell: three-well singular perturbation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    std::size_t jobs = 1;
    app.add_option("--jobs", jobs, "maximum concurrent minimizations")->check(CLI::PositiveNumber);

    std::string potential_path, profile_path, out_path;
    double tol = 1e-10;

    auto* c_const = app.add_subcommand("constants", "limit constants E0, E1, A0, B0, d*, h*");
    c_const->add_option("--potential", potential_path)->required();
    c_const->add_option("--tol", tol, "quadrature tolerance");
    c_const->add_option("--out", out_path);

    double ymax = 50.0;
    std::string sweep_z2_arg;
    auto* c_hyp = app.add_subcommand("check-hypotheses", "decide H6, H7, H8");
    c_hyp->add_option("--potential", potential_path)->required();
    c_hyp->add_option("--ymax", ymax);
    c_hyp->add_option("--sweep-z2", sweep_z2_arg, "lo:hi:n verdicts over z2 for fixed z1, z3");
    c_hyp->add_option("--out", out_path);

    double eps = 0.0, l0 = 0.5, a = 0.0, b = 1.0;
    std::optional<double> yhat;
    std::optional<int> count;
    std::string kind, parity = "any";
    auto* c_con = app.add_subcommand("construct", "build a recovery or competitor profile");
    c_con->add_option("--potential", potential_path)->required();
    c_con->add_option("--eps", eps)->required()->check(CLI::PositiveNumber);
    c_con->add_option("--kind", kind)->required()->check(CLI::IsMember({"two-well", "three-well", "mixed", "h7", "h8"}));
    c_con->add_option("--l0", l0, "two-well length of the mixed profile");
    c_con->add_option("--yhat", yhat, "competitor ratio (default: worst violating y)");
    c_con->add_option("--a", a, "left end of the patterned interval");
    c_con->add_option("--b", b, "right end of the patterned interval");
    c_con->add_option("--count", count, "override the tooth or period count");
    c_con->add_option("--parity", parity)->check(CLI::IsMember({"any", "even"}));
    c_con->add_option("--out", out_path)->required();

    std::string scaling = "I";
    auto* c_en = app.add_subcommand("energy", "evaluate the discrete energy of a profile");
    c_en->add_option("--profile", profile_path)->required();
    c_en->add_option("--potential", potential_path)->required();
    c_en->add_option("--eps", eps, "defaults to the profile's eps");
    c_en->add_option("--scaling", scaling)->check(CLI::IsMember({"I", "E"}));

    MinimizeFlags mf;
    std::string init_path;
    auto* c_min = app.add_subcommand("minimize", "local minimization (multi-start unless --init is given)");
    c_min->add_option("--potential", potential_path)->required();
    c_min->add_option("--eps", eps)->required()->check(CLI::PositiveNumber);
    c_min->add_option("--init", init_path, "start from this profile only");
    c_min->add_option("--out", out_path)->required();
    mf.add(c_min);

    std::string eps_list;
    auto* c_sw = app.add_subcommand("sweep", "multi-start minimization over an eps ladder");
    c_sw->add_option("--potential", potential_path)->required();
    c_sw->add_option("--eps", eps_list, "decreasing comma-separated list")->required();
    c_sw->add_option("--out", out_path)->required();
    mf.add(c_sw);

    double eta = 0.0, r_lo = 0.1, r_hi = 10.0;
    std::size_t bins = 400;
    std::string hist_path;
    bool overlap = false;
    auto* c_an = app.add_subcommand("analyze", "volume fractions, layers, D-intervals, histogram");
    c_an->add_option("--profile", profile_path)->required();
    c_an->add_option("--potential", potential_path)->required();
    c_an->add_option("--eta", eta)->required()->check(CLI::PositiveNumber);
    c_an->add_option("--bins", bins);
    c_an->add_option("--eps", eps, "defaults to the profile's eps");
    c_an->add_option("--r-lo", r_lo);
    c_an->add_option("--r-hi", r_hi);
    c_an->add_flag("--overlap", overlap, "allow eta >= eta0 and report overlapping measure");
    c_an->add_option("--histogram-csv", hist_path);
    c_an->add_option("--out", out_path);

    std::size_t pe_starts = 5;
    std::uint64_t pe_seed = 0;
    bool skip_sweep = false;
    auto* c_pe = app.add_subcommand("paper-examples", "both reference potentials end to end");
    c_pe->add_option("--out", out_path);
    c_pe->add_option("--starts", pe_starts)->check(CLI::PositiveNumber);
    c_pe->add_option("--seed", pe_seed);
    c_pe->add_flag("--skip-sweep", skip_sweep, "omit the multi-start minimization sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 1;
    }

    Context ctx;
    try {
        if (*c_const) {
            ctx.command = "constants";
            auto sp = load_potential(ctx, potential_path);
            ctx.options = {{"tol", num(tol)}};
            check_tol(tol);
            auto c = limit_constants(sp, tol);
            emit(with_manifest(ctx, to_json(c)), out_path);
        } else if (*c_hyp) {
            ctx.command = "check-hypotheses";
            auto sp = load_potential(ctx, potential_path);
            ctx.options = {{"ymax", num(ymax)}};
            Json body = to_json(check_hypotheses(sp, ymax));
            if (!sweep_z2_arg.empty()) {
                ctx.options["sweep_z2"] = sweep_z2_arg;
                std::vector<double> p;
                std::stringstream ss(sweep_z2_arg);
                std::string tok;
                while (std::getline(ss, tok, ':')) p.push_back(parse_list(tok).at(0));
                if (p.size() != 3 || !(p[2] >= 1.0)) throw ParameterError("--sweep-z2 expects lo:hi:n");
                Json rows = Json::array();
                for (const auto& e : sweep_z2(sp.z1(), sp.z3(), p[0], p[1], static_cast<std::size_t>(p[2]), ymax))
                    rows.push_back({{"z2", num(e.z2)}, {"H6", e.H6}, {"H7", e.H7}, {"H8", e.H8}});
                body["sweep_z2"] = rows;
            }
            emit(with_manifest(ctx, body), out_path);
        } else if (*c_con) {
            ctx.command = "construct";
            auto sp = load_potential(ctx, potential_path);
            auto c = limit_constants(sp);
            ConstructionOptions opt;
            opt.count = count;
            opt.parity = parity == "even" ? ToothParity::Even : ToothParity::Any;
            ctx.options = {{"eps", num(eps)}, {"kind", kind}, {"parity", parity}};
            if (count) ctx.options["count"] = *count;
            GridFunction g;
            if (kind == "two-well") {
                ctx.options["interval"] = {num(a), num(b)};
                g = build_two_well_sawtooth(sp, eps, {a, b}, c, opt);
            } else if (kind == "three-well") {
                ctx.options["interval"] = {num(a), num(b)};
                g = build_three_well_profile(sp, eps, {a, b}, c, opt);
            } else if (kind == "mixed") {
                ctx.options["l0"] = num(l0);
                g = build_mixed_profile(sp, eps, l0, c, opt);
            } else {
                auto hyp = check_hypotheses(sp, c);
                double y = yhat ? *yhat : (kind == "h7" ? hyp.H7.worst_y : hyp.H8.worst_y);
                ctx.options["yhat"] = num(y);
                g = kind == "h7" ? build_h7_competitor(sp, eps, y, c, opt) : build_h8_competitor(sp, eps, y, c, opt);
            }
            g.eps = eps;
            Json prof;
            prof["manifest"] = ctx.manifest();
            Json body = profile_to_json(g);
            for (auto& [k, v] : body.items()) prof[k] = v;
            write_file(out_path, dump(prof));
            Json meta = Json::object();
            for (const auto& [k, v] : g.meta) meta[k] = num(v);
            auto e = energy_Ieps(g, eps, sp);
            emit(with_manifest(ctx, Json{{"kind", g.kind},
                                         {"nodes", g.size()},
                                         {"meta", meta},
                                         {"energy", to_json(e)},
                                         {"profile", out_path}}));
        } else if (*c_en) {
            ctx.command = "energy";
            auto sp = load_potential(ctx, potential_path);
            auto g = load_profile(profile_path);
            double e = eps > 0.0 ? eps : g.eps;
            if (!(e > 0.0)) throw ParameterError("eps is neither given nor stored in the profile");
            ctx.options = {{"eps", num(e)}, {"scaling", scaling}, {"profile_digest", fnv1a_hex(read_file(profile_path))}};
            auto b = scaling == "I" ? energy_Ieps(g, e, sp) : energy_Eeps(g, e, sp);
            emit(with_manifest(ctx, to_json(b)));
        } else if (*c_min) {
            ctx.command = "minimize";
            auto sp = load_potential(ctx, potential_path);
            auto o = mf.options(jobs);
            ctx.options = mf.json(o);
            ctx.options["eps"] = num(eps);
            Json body;
            GridFunction best;
            if (!init_path.empty()) {
                ctx.options["init_digest"] = fnv1a_hex(read_file(init_path));
                auto r = minimize_Ieps(sp, eps, load_profile(init_path), o);
                body = {{"value", num(r.value)},
                        {"initial_value", num(r.initial_value)},
                        {"converged", r.converged},
                        {"iterations", r.iterations},
                        {"grad_norm", num(r.grad_norm)},
                        {"message", r.message},
                        {"start_kind", "init"}};
                best = std::move(r.u);
            } else {
                auto m = multi_start(sp, eps, o);
                Json s = Json::array();
                for (const auto& st : m.starts) s.push_back(to_json(st));
                body = {{"value", num(m.value)},
                        {"start_kind", m.start_kind},
                        {"start_index", m.start_index},
                        {"converged", m.converged},
                        {"starts", s}};
                best = std::move(m.u);
            }
            best.kind = "minimized";
            best.meta.clear();
            Json file = with_manifest(ctx, body);
            file["profile"] = profile_to_json(best);
            write_file(out_path, dump(file));
            std::cout << dump(with_manifest(ctx, body));
        } else if (*c_sw) {
            ctx.command = "sweep";
            auto sp = load_potential(ctx, potential_path);
            auto o = mf.options(jobs);
            auto eps_v = parse_list(eps_list);
            ctx.options = mf.json(o);
            ctx.options["eps"] = num_list(eps_v);
            auto recs = epsilon_sweep(sp, eps_v, o);
            write_file(out_path, sweep_csv(recs));
            emit(with_manifest(ctx, Json{{"records", sweep_records_json(recs)}, {"csv", out_path}}));
        } else if (*c_an) {
            ctx.command = "analyze";
            auto sp = load_potential(ctx, potential_path);
            auto g = load_profile(profile_path);
            AnalyzeOptions ao;
            ao.allow_overlap = overlap;
            ao.thresholds = {r_lo, r_hi};
            ao.bins = bins;
            ao.eps = eps;
            ctx.options = {{"eta", num(eta)}, {"bins", bins}, {"overlap", overlap},
                           {"profile_digest", fnv1a_hex(read_file(profile_path))}};
            auto rep = analyze(g, sp, eta, ao);
            if (!hist_path.empty()) write_file(hist_path, histogram_csv(rep.histogram));
            emit(with_manifest(ctx, to_json(rep)), out_path);
        } else if (*c_pe) {
            ctx.command = "paper-examples";
            std::uint64_t seed = effective_seed(pe_seed);
            ctx.options = {{"starts", pe_starts}, {"seed", seed}, {"sweep", !skip_sweep}};
            emit(with_manifest(ctx, reference_examples(pe_starts, seed, jobs, !skip_sweep)), out_path);
        }
    } catch (const Error& e) {
        bool usage = e.code() == "parameter" || e.code() == "specification";
        std::cerr << Json{{"error", e.code()}, {"message", e.what()}, {"command", ctx.command}}.dump() << "\n";
        return usage ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << Json{{"error", "internal"}, {"message", e.what()}, {"command", ctx.command}}.dump() << "\n";
        return 2;
    }
    return 0;
}
