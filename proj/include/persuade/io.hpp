#pragma once

#include <json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "persuade/casebook.hpp"
#include "persuade/errors.hpp"
#include "persuade/kernel.hpp"
#include "persuade/martingale.hpp"
#include "persuade/measure.hpp"
#include "persuade/solver.hpp"

namespace persuade {

/// Stable key order keeps identical inputs producing byte-identical outputs.
using Json = nlohmann::ordered_json;

inline Json measure_to_json(const DiscreteMeasure& mu) {
    Json arr = Json::array();
    for (const auto& a : mu.atoms()) arr.push_back({to_string(a.point), to_string(a.weight)});
    return arr;
}

inline DiscreteMeasure measure_from_json(const Json& j) {
    if (!j.is_array()) throw ConfigError("measure must be an array of [point, weight] pairs");
    std::vector<Atom> atoms;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2)
            throw ConfigError("measure atom must be a [point, weight] pair");
        atoms.push_back({parse_rational(e[0].get<std::string>()),
                         parse_rational(e[1].get<std::string>())});
    }
    return DiscreteMeasure(std::move(atoms));
}

inline Json grid_to_json(const Grid& g) {
    Json j;
    Json pts = Json::array();
    for (const auto& p : g.points()) pts.push_back(to_string(p));
    j["points"] = pts;
    j["threshold"] = to_string(g.threshold());
    j["truncated_below"] = g.truncated_below();
    j["truncated_above"] = g.truncated_above();
    return j;
}

inline Grid grid_from_json(const Json& j, const std::optional<Rat>& fallbackThreshold = {}) {
    if (!j.contains("points")) throw ConfigError("grid needs a points array");
    std::vector<Rat> pts;
    for (const auto& p : j["points"]) pts.push_back(parse_rational(p.get<std::string>()));
    Rat l;
    if (j.contains("threshold"))
        l = parse_rational(j["threshold"].get<std::string>());
    else if (fallbackThreshold)
        l = *fallbackThreshold;
    else
        throw ConfigError("grid needs a threshold");
    return Grid(std::move(pts), l, j.value("truncated_below", false),
                j.value("truncated_above", false));
}

struct SolverOptions {
    Rat resolution = Rat(1, 64);
    Rat tol = parse_rational("1e-9");
    std::size_t maxLpVars = 0; // 0 = use the environment default
    int digits = 12;
};

/// Parsed scenario file: initial measure, kernel description, threshold, weights,
/// horizon, solver options.
struct Scenario {
    DiscreteMeasure initial;
    Rat l;
    Json kernelSpec;
    std::optional<Grid> grid;
    std::optional<Rat> delta;        // geometric weights
    std::vector<Rat> explicitWeights; // otherwise
    Horizon horizon = 1;
    SolverOptions options;

    WeightSchedule weights() const {
        if (delta) return WeightSchedule::geometric(*delta);
        return WeightSchedule::explicit_weights(explicitWeights);
    }

    MartingaleSpec build_spec() const {
        if (!is_finite(horizon) && !kernel_is_closed())
            throw ConfigError("infinite horizon requires a kernel with a closed transition table");
        auto kernels = build_kernels();
        if (kernels.stationary) return MartingaleSpec(initial, *kernels.stationary, horizon);
        return MartingaleSpec(initial, kernels.perPeriod, horizon);
    }

private:
    struct BuiltKernels {
        std::optional<Kernel> stationary;
        std::vector<Kernel> perPeriod;
    };

    bool kernel_is_closed() const {
        std::string kind = kernelSpec.value("kind", "");
        return kind == "random-walk" || kind == "explicit";
    }

    static Kernel explicit_kernel(const Json& spec) {
        if (!spec.contains("rows")) throw ConfigError("explicit kernel needs rows");
        std::map<Rat, DiscreteMeasure> t;
        for (const auto& row : spec["rows"]) {
            Rat from = parse_rational(row.at("from").get<std::string>());
            t[from] = measure_from_json(row.at("to"));
        }
        return Kernel(std::move(t));
    }

    Kernel kernel_for_support(const Json& spec, const std::vector<Rat>& support) const {
        std::string kind = spec.value("kind", "");
        if (kind == "random-walk") {
            if (!grid) throw ConfigError("random-walk kernel needs a grid");
            return random_walk_kernel(*grid);
        }
        if (kind == "binary-signal") {
            if (!spec.contains("q")) throw ConfigError("binary-signal kernel needs q");
            return binary_signal_kernel(parse_rational(spec["q"].get<std::string>()), support);
        }
        if (kind == "explicit") return explicit_kernel(spec);
        throw ConfigError("unknown kernel kind: " + kind);
    }

    BuiltKernels build_kernels() const {
        std::string kind = kernelSpec.value("kind", "");
        BuiltKernels out;
        if (kind == "per-period") {
            if (!kernelSpec.contains("kernels"))
                throw ConfigError("per-period kernel needs a kernels array");
            if (!is_finite(horizon))
                throw ConfigError("per-period kernels require a finite horizon");
            int T = finite_horizon(horizon);
            std::set<Rat> cur;
            for (const auto& a : initial.atoms()) cur.insert(a.point);
            const auto& list = kernelSpec["kernels"];
            if (static_cast<int>(list.size()) + 1 < T)
                throw ConfigError("need at least T-1 per-period kernels");
            for (int t = 1; t < T; ++t) {
                std::vector<Rat> sup(cur.begin(), cur.end());
                Kernel k = kernel_for_support(list[static_cast<std::size_t>(t) - 1], sup);
                std::set<Rat> next;
                for (const auto& x : sup)
                    for (const auto& b : k.at(x).atoms()) next.insert(b.point);
                out.perPeriod.push_back(std::move(k));
                cur = std::move(next);
            }
            if (out.perPeriod.empty()) out.perPeriod.emplace_back();
            return out;
        }
        if (kind == "binary-signal") {
            // stationary conditionally independent signal: close the table over the
            // supports reachable within the horizon
            if (!is_finite(horizon))
                throw ConfigError("binary-signal kernels are not closed; use a finite horizon");
            int T = finite_horizon(horizon);
            Rat q = parse_rational(kernelSpec.at("q").get<std::string>());
            std::set<Rat> all;
            std::set<Rat> cur;
            for (const auto& a : initial.atoms()) cur.insert(a.point);
            all = cur;
            for (int t = 1; t < T; ++t) {
                std::vector<Rat> sup(cur.begin(), cur.end());
                Kernel k = binary_signal_kernel(q, sup);
                std::set<Rat> next;
                for (const auto& x : sup)
                    for (const auto& b : k.at(x).atoms()) next.insert(b.point);
                cur = std::move(next);
                all.insert(cur.begin(), cur.end());
            }
            out.stationary = binary_signal_kernel(q, {all.begin(), all.end()});
            return out;
        }
        out.stationary = kernel_for_support(kernelSpec, {});
        return out;
    }
};

inline Scenario scenario_from_json(const Json& j) {
    Scenario s;
    if (!j.contains("initial")) throw ConfigError("scenario needs an initial measure");
    s.initial = measure_from_json(j["initial"]);
    if (!j.contains("l")) throw ConfigError("scenario needs a threshold l");
    s.l = parse_rational(j["l"].get<std::string>());
    if (!j.contains("kernel")) throw ConfigError("scenario needs a kernel");
    s.kernelSpec = j["kernel"];
    if (j.contains("grid")) s.grid = grid_from_json(j["grid"], s.l);
    if (j.contains("delta")) s.delta = parse_rational(j["delta"].get<std::string>());
    if (j.contains("weights")) {
        for (const auto& w : j["weights"]) s.explicitWeights.push_back(parse_rational(w.get<std::string>()));
    }
    if (!s.delta && s.explicitWeights.empty())
        throw ConfigError("scenario needs weights or delta");
    if (!j.contains("horizon")) throw ConfigError("scenario needs a horizon");
    if (j["horizon"].is_string()) {
        if (j["horizon"].get<std::string>() != "infinite")
            throw ConfigError("horizon must be an integer or \"infinite\"");
        TruncatedInfinite ti;
        s.horizon = ti;
    } else {
        s.horizon = j["horizon"].get<int>();
    }
    if (j.contains("options")) {
        const auto& o = j["options"];
        if (o.contains("resolution")) s.options.resolution = parse_rational(o["resolution"].get<std::string>());
        if (o.contains("tol")) s.options.tol = parse_rational(o["tol"].get<std::string>());
        if (o.contains("max_lp_vars")) s.options.maxLpVars = o["max_lp_vars"].get<std::size_t>();
        if (o.contains("digits")) s.options.digits = o["digits"].get<int>();
    }
    if (!is_finite(s.horizon)) s.horizon = TruncatedInfinite{s.options.tol};
    return s;
}

inline Scenario scenario_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("bad JSON in " + path + ": " + e.what());
    }
    return scenario_from_json(j);
}

inline Json solve_result_to_json(const SolveResult& res, const Scenario& sc,
                                 const std::string& method) {
    Json j;
    j["method"] = method;
    j["l"] = to_string(sc.l);
    if (res.exact) {
        j["value"] = to_string(res.value.lo);
    } else {
        j["value_lo"] = to_string(res.value.lo);
        j["value_hi"] = to_string(res.value.hi);
    }
    Json masses = Json::array();
    for (const auto& m : res.per_period_mass) masses.push_back(to_string(m));
    j["per_period_mass"] = masses;
    // derived interval records need the residual flow
    auto w = sc.weights();
    std::vector<Rat> toGo(res.plan.eliminated.size() + 1, Rat(0));
    for (std::size_t t = res.plan.eliminated.size(); t-- > 0;)
        toGo[t] = toGo[t + 1] +
                  w.weight(static_cast<int>(t) + 1) * res.plan.eliminated[t].total_mass();
    Json plan = Json::array();
    MartingaleSpec spec = sc.build_spec();
    DiscreteMeasure mu = spec.initial();
    for (std::size_t t = 0; t < res.plan.eliminated.size(); ++t) {
        const auto& nu = res.plan.eliminated[t];
        auto rec = interval_record(nu, mu, sc.l);
        Json p;
        p["t"] = t + 1;
        p["alpha"] = to_string(rec.alpha);
        p["y_lo"] = to_string(rec.y_lo);
        p["y_hi"] = to_string(rec.y_hi);
        p["gamma_lo"] = to_string(rec.gamma_lo);
        p["gamma_hi"] = to_string(rec.gamma_hi);
        p["value_to_go"] = to_string(toGo[t]);
        p["eliminated"] = measure_to_json(nu);
        plan.push_back(std::move(p));
        if (t + 1 < res.plan.eliminated.size())
            mu = pushforward(spec.kernel(static_cast<int>(t) + 1),
                             nu.total_mass() > 0 ? subtract(mu, nu) : mu);
    }
    j["plan"] = plan;
    return j;
}

/// CSV export of (t, alpha_t, y_lo, y_hi, value-to-go) with decimal renderings.
inline std::string plan_to_csv(const SolveResult& res, const Scenario& sc, int digits) {
    std::ostringstream os;
    os << "t,alpha,y_lo,y_hi,value_to_go\n";
    auto w = sc.weights();
    std::vector<Rat> toGo(res.plan.eliminated.size() + 1, Rat(0));
    for (std::size_t t = res.plan.eliminated.size(); t-- > 0;)
        toGo[t] = toGo[t + 1] +
                  w.weight(static_cast<int>(t) + 1) * res.plan.eliminated[t].total_mass();
    MartingaleSpec spec = sc.build_spec();
    DiscreteMeasure mu = spec.initial();
    for (std::size_t t = 0; t < res.plan.eliminated.size(); ++t) {
        const auto& nu = res.plan.eliminated[t];
        auto rec = interval_record(nu, mu, sc.l);
        os << (t + 1) << ',' << to_decimal_string(rec.alpha, digits) << ','
           << to_decimal_string(rec.y_lo, digits) << ',' << to_decimal_string(rec.y_hi, digits)
           << ',' << to_decimal_string(toGo[t], digits) << '\n';
        if (t + 1 < res.plan.eliminated.size())
            mu = pushforward(spec.kernel(static_cast<int>(t) + 1),
                             nu.total_mass() > 0 ? subtract(mu, nu) : mu);
    }
    return os.str();
}

inline Json case_report_to_json(const CaseReport& rep) {
    Json j;
    j["case"] = rep.id;
    j["pass"] = rep.pass;
    j["runtime_ms"] = rep.runtime_ms;
    Json checks = Json::array();
    for (const auto& c : rep.checks) {
        Json e;
        e["name"] = c.name;
        e["computed"] = c.computed;
        if (!c.expected.empty()) {
            e["expected"] = c.expected;
            e["provenance"] = c.provenance;
            e["pass"] = c.pass;
        }
        checks.push_back(std::move(e));
    }
    j["checks"] = checks;
    return j;
}

// ---------------------------------------------------------------------------
// check runners
// ---------------------------------------------------------------------------

inline Json check_blackwell(const Scenario& sc) {
    MartingaleSpec spec = sc.build_spec();
    int depth = is_finite(sc.horizon) ? finite_horizon(sc.horizon) : 2;
    auto sups = spec.reachable_supports(std::max(depth, 2));
    Json j;
    j["check"] = "blackwell";
    bool all = true;
    Json periods = Json::array();
    for (int t = 1; t < std::max(depth, 2); ++t) {
        auto res = is_blackwell_preserving(spec.kernel(t), sups[static_cast<std::size_t>(t) - 1]);
        Json p;
        p["t"] = t;
        p["pass"] = res.preserving;
        if (res.counterexample) {
            p["witness"] = {to_string((*res.counterexample)[0]),
                            to_string((*res.counterexample)[1]),
                            to_string((*res.counterexample)[2])};
        }
        all = all && res.preserving;
        periods.push_back(std::move(p));
    }
    j["pass"] = all;
    j["periods"] = periods;
    return j;
}

inline Json check_domination(const Json& cfg) {
    DiscreteMeasure lambda = measure_from_json(cfg.at("lambda"));
    DiscreteMeasure mu = measure_from_json(cfg.at("mu"));
    auto res = dominates(lambda, mu);
    Json j;
    j["check"] = "domination";
    j["pass"] = res.dominated;
    if (res.witness) {
        Json moves = Json::array();
        for (const auto& m : res.witness->transport)
            moves.push_back({to_string(m.from), to_string(m.to), to_string(m.mass)});
        j["witness"] = moves;
    }
    return j;
}

inline Json check_ic(const Json& cfg) {
    Scenario sc = scenario_from_json(cfg.at("scenario"));
    StoppingPlan plan;
    for (const auto& m : cfg.at("plan")) plan.eliminated.push_back(measure_from_json(m));
    auto rep = ic_check(plan, sc.build_spec(), sc.l);
    Json j;
    j["check"] = "ic";
    j["pass"] = rep.ok;
    if (!rep.ok) {
        j["period"] = rep.period;
        j["constraint"] = rep.constraint;
    }
    return j;
}

inline Json check_parity(const Json& cfg) {
    Grid g = grid_from_json(cfg.at("grid"));
    DiscreteMeasure mu = measure_from_json(cfg.at("measure"));
    Json j;
    j["check"] = "parity";
    j["pass"] = parity_class(g, mu);
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << content;
}

} // namespace persuade
