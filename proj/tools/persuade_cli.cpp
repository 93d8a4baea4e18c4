#include <CLI11.hpp>

#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "persuade/persuade.hpp"

namespace {

using namespace persuade;

void emit(const Json& j, const std::string& outPath) {
    std::string text = j.dump(2) + "\n";
    if (outPath.empty())
        std::cout << text;
    else
        write_text_file(outPath, text);
}

Scenario load_scenario(const std::string& path, const std::optional<std::string>& w2,
                       const std::optional<std::string>& resolution,
                       const std::optional<std::string>& tol) {
    Scenario sc = scenario_from_file(path);
    if (w2) {
        if (sc.explicitWeights.size() < 2)
            throw ConfigError("--w2 needs a scenario with at least two explicit weights");
        sc.explicitWeights[1] = parse_rational(*w2);
    }
    if (resolution) sc.options.resolution = parse_rational(*resolution);
    if (tol) {
        sc.options.tol = parse_rational(*tol);
        if (!is_finite(sc.horizon)) sc.horizon = TruncatedInfinite{sc.options.tol};
    }
    return sc;
}

SolveResult dispatch_solve(const Scenario& sc, const std::string& method) {
    MartingaleSpec spec = sc.build_spec();
    auto w = sc.weights();
    if (method == "lp")
        return lp_solve(spec, sc.l, w, sc.options.maxLpVars ? sc.options.maxLpVars : lp_var_cap());
    if (method == "interval") return interval_optimize(spec, sc.l, w, sc.options.resolution);
    if (method == "greedy") return greedy_evaluate(spec, sc.l, w);
    if (method == "value-iter") {
        if (!sc.grid) throw ConfigError("value-iter needs a grid");
        if (!sc.delta) throw ConfigError("value-iter needs geometric weights (delta)");
        SolveResult res;
        res.value = value_iterate_random_walk(*sc.grid, sc.l, *sc.delta, sc.initial, sc.options.tol);
        res.exact = res.value.is_point();
        return res;
    }
    throw ConfigError("unknown method: " + method);
}

int cmd_solve(const std::string& path, const std::string& method, const std::string& outPath,
              const std::string& csvPath, const std::optional<std::string>& w2,
              const std::optional<std::string>& resolution, const std::optional<std::string>& tol) {
    Scenario sc = load_scenario(path, w2, resolution, tol);
    SolveResult res = dispatch_solve(sc, method);
    emit(solve_result_to_json(res, sc, method), outPath);
    if (!csvPath.empty()) write_text_file(csvPath, plan_to_csv(res, sc, sc.options.digits));
    return 0;
}

int cmd_check(const std::string& path, const std::string& kind, bool strict,
              const std::string& outPath) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open check config: " + path);
    Json cfg;
    in >> cfg;
    Json rep;
    if (kind == "blackwell")
        rep = check_blackwell(cfg.contains("scenario") ? scenario_from_json(cfg["scenario"])
                                                       : scenario_from_json(cfg));
    else if (kind == "domination")
        rep = check_domination(cfg);
    else if (kind == "ic")
        rep = check_ic(cfg);
    else if (kind == "parity")
        rep = check_parity(cfg);
    else
        throw ConfigError("unknown check: " + kind);
    emit(rep, outPath);
    if (strict && !rep.value("pass", false)) return 1;
    return 0;
}

int cmd_case(const std::string& id, const std::string& outPath, const std::string& csvPath,
             const std::string& w2, const std::string& delta, const std::string& eps,
             const std::string& lth, const std::string& q, int n, std::uint64_t seed,
             int trials, int digits) {
    CaseReport rep;
    if (id == "counterexample") {
        rep = casebook::counterexample_nonblackwell();
    } else if (id == "example1") {
        rep = casebook::example1(parse_rational(w2.empty() ? "1/2" : w2));
    } else if (id == "example1-cutoffs") {
        rep = casebook::example1_cutoffs();
        if (!csvPath.empty()) write_text_file(csvPath, casebook::example1_sweep_csv(100, digits));
    } else if (id == "example2") {
        Rat lv = parse_rational(lth.empty() ? "3/4" : lth);
        Rat w2v = parse_rational(w2.empty() ? "24/25" : w2);
        rep = casebook::example2_case(lv, parse_rational(q), w2v, n);
        if (!csvPath.empty())
            write_text_file(csvPath, casebook::example2_alpha_star_csv(to_double(lv),
                                                                       to_double(w2v)));
    } else if (id == "prop1") {
        rep = casebook::prop1_check(parse_rational(delta), parse_rational(eps),
                                    parse_rational(lth.empty() ? "1/2" : lth));
    } else if (id == "lemmas") {
        casebook::LemmaCounts counts;
        if (trials > 0) {
            counts.uniqueness = counts.residual_monotone = counts.residual_fosd =
                counts.additivity = counts.walk_preserves = counts.two_period =
                    counts.alpha_sweep = trials;
            counts.minimality = trials;
            counts.domination_value = std::max(1, trials / 2);
        }
        rep = casebook::lemma_property_suite(seed, counts);
    } else {
        throw ConfigError("unknown case: " + id +
                          " (known: counterexample, example1, example1-cutoffs, example2, "
                          "prop1, lemmas)");
    }
    emit(case_report_to_json(rep), outPath);
    return rep.pass ? 0 : 1;
}

int cmd_sweep(const std::string& path, const std::string& param, const std::string& from,
              const std::string& to, int steps, const std::string& method, int threads,
              const std::string& outPath, int digits) {
    if (steps < 1) throw ConfigError("sweep needs at least one step");
    Rat lo = parse_rational(from), hi = parse_rational(to);
    std::vector<Rat> values;
    for (int i = 0; i <= steps; ++i) values.push_back(lo + (hi - lo) * rat(i, steps)); // exact grid
    Scenario base = scenario_from_file(path);

    auto runOne = [&](const Rat& v) -> std::pair<Rat, SolveResult> {
        Scenario sc = base;
        if (param == "w2") {
            if (sc.explicitWeights.size() < 2)
                throw ConfigError("sweep over w2 needs two explicit weights");
            sc.explicitWeights[1] = v;
        } else if (param == "delta") {
            sc.delta = v;
            sc.explicitWeights.clear();
        } else {
            throw ConfigError("unknown sweep parameter: " + param);
        }
        return {v, dispatch_solve(sc, method)};
    };

    std::vector<std::pair<Rat, SolveResult>> rows(values.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < values.size(); ++i) rows[i] = runOne(values[i]);
    } else {
        std::vector<std::future<std::pair<Rat, SolveResult>>> futs;
        futs.reserve(values.size());
        for (const auto& v : values)
            futs.push_back(std::async(std::launch::async, runOne, v));
        for (std::size_t i = 0; i < futs.size(); ++i) rows[i] = futs[i].get(); // merged in order
    }

    std::ostringstream csv;
    csv << param << ",value_lo,value_hi,alpha1\n";
    for (const auto& [v, res] : rows) {
        Rat a1 = res.per_period_mass.empty() ? Rat(0) : res.per_period_mass[0];
        csv << to_decimal_string(v, digits) << ',' << to_decimal_string(res.value.lo, digits)
            << ',' << to_decimal_string(res.value.hi, digits) << ','
            << to_decimal_string(a1, digits) << '\n';
    }
    if (outPath.empty())
        std::cout << csv.str();
    else
        write_text_file(outPath, csv.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"persuade: exact solvers for dynamic persuasion with a learning sender"};
    app.require_subcommand(1);

    std::string scenario, method = "lp", out, csv, checkKind, caseId, param, from, to;
    std::optional<std::string> w2opt, resolutionOpt, tolOpt;
    std::string w2 = "", delta = "3/4", eps = "1/100", lth = "", q = "4/5";
    bool strict = false;
    int steps = 10, threads = 1, n = 400, trials = 0, digits = 12;
    std::uint64_t seed = 20240817;

    auto* solve = app.add_subcommand("solve", "solve a scenario file");
    solve->add_option("scenario", scenario, "scenario JSON file")->required();
    solve->add_option("--method", method, "lp | interval | greedy | value-iter");
    solve->add_option("--out", out, "write the result JSON here");
    solve->add_option("--csv", csv, "write the plan CSV here");
    solve->add_option("--w2", w2opt, "override the second explicit weight");
    solve->add_option("--resolution", resolutionOpt, "interval search resolution");
    solve->add_option("--tol", tolOpt, "value-iteration tolerance");

    auto* check = app.add_subcommand("check", "run a structural check");
    check->add_option("kind", checkKind, "blackwell | domination | ic | parity")->required();
    check->add_option("config", scenario, "config JSON file")->required();
    check->add_flag("--strict", strict, "exit nonzero when the check fails");
    check->add_option("--out", out, "write the report JSON here");

    auto* kase = app.add_subcommand("case", "run a casebook reproduction");
    kase->add_option("id", caseId, "counterexample | example1 | example1-cutoffs | example2 | "
                                   "prop1 | lemmas")
        ->required();
    kase->add_option("--out", out, "write the report JSON here");
    kase->add_option("--csv", csv, "write the case's sweep CSV here (example1-cutoffs, example2)");
    kase->add_option("--digits", digits, "decimal digits in CSV output");
    kase->add_option("--w2", w2, "second-period weight (example1/example2)");
    kase->add_option("--delta", delta, "discount factor (prop1)");
    kase->add_option("--eps", eps, "grid step (prop1)");
    kase->add_option("--l", lth, "threshold (example2/prop1)");
    kase->add_option("--q", q, "signal precision (example2)");
    kase->add_option("--n", n, "discretization size (example2)");
    kase->add_option("--seed", seed, "random seed (lemmas)");
    kase->add_option("--trials", trials, "instances per lemma (lemmas)");

    auto* sweep = app.add_subcommand("sweep", "sweep a scenario parameter, emit CSV");
    sweep->add_option("scenario", scenario, "scenario JSON file")->required();
    sweep->add_option("--param", param, "w2 | delta")->required();
    sweep->add_option("--from", from, "start value")->required();
    sweep->add_option("--to", to, "end value")->required();
    sweep->add_option("--steps", steps, "number of grid steps");
    sweep->add_option("--method", method, "lp | interval | greedy | value-iter");
    sweep->add_option("--threads", threads, "worker threads");
    sweep->add_option("--out", out, "write the CSV here");
    sweep->add_option("--digits", digits, "decimal digits in CSV output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed())
            return cmd_solve(scenario, method, out, csv, w2opt, resolutionOpt, tolOpt);
        if (check->parsed()) return cmd_check(scenario, checkKind, strict, out);
        if (kase->parsed())
            return cmd_case(caseId, out, csv, w2, delta, eps, lth, q, n, seed, trials, digits);
        if (sweep->parsed())
            return cmd_sweep(scenario, param, from, to, steps, method, threads, out, digits);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
