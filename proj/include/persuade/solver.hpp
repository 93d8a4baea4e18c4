#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "persuade/errors.hpp"
#include "persuade/kernel.hpp"
#include "persuade/martingale.hpp"
#include "persuade/measure.hpp"
#include "persuade/policy.hpp"
#include "persuade/rational.hpp"
#include "persuade/simplex.hpp"

namespace persuade {

/// Non-increasing nonnegative weights, explicit or geometric (w_t = delta^t).
class WeightSchedule {
public:
    static WeightSchedule explicit_weights(std::vector<Rat> w) {
        if (w.empty()) throw DomainError("weight schedule is empty");
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (w[i] < 0) throw DomainError("weights must be nonnegative");
            if (i > 0 && w[i] > w[i - 1]) throw DomainError("weights must be non-increasing");
        }
        WeightSchedule s;
        s.weights_ = std::move(w);
        return s;
    }

    static WeightSchedule geometric(Rat delta) {
        if (delta <= 0 || delta >= 1) throw DomainError("discount factor must lie in (0,1)");
        WeightSchedule s;
        s.delta_ = std::move(delta);
        return s;
    }

    bool is_geometric() const { return delta_.has_value(); }
    const Rat& delta() const {
        if (!delta_) throw DomainError("weight schedule is not geometric");
        return *delta_;
    }

    /// w_t, 1-based; zero beyond an explicit schedule's length.
    Rat weight(int t) const {
        if (t < 1) throw DomainError("period index must be >= 1");
        if (delta_) return pow_rat(*delta_, static_cast<unsigned long>(t));
        if (static_cast<std::size_t>(t) > weights_.size()) return Rat(0);
        return weights_[static_cast<std::size_t>(t) - 1];
    }

    std::size_t explicit_size() const { return weights_.size(); }

private:
    std::vector<Rat> weights_;
    std::optional<Rat> delta_;
};

struct SolveResult {
    RatInterval value{Rat(0)};
    StoppingPlan plan;
    std::vector<Rat> per_period_mass;
    bool exact = true; // point value; truncated-infinite results carry a certified interval
};

inline Rat plan_value(const StoppingPlan& plan, const WeightSchedule& w) {
    Rat v = 0;
    for (std::size_t t = 0; t < plan.eliminated.size(); ++t)
        v += w.weight(static_cast<int>(t) + 1) * plan.eliminated[t].total_mass();
    return v;
}

inline std::size_t lp_var_cap() {
    if (const char* env = std::getenv("PERSUADE_MAX_LP_VARS")) {
        long v = std::atol(env);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return 20000;
}

// ---------------------------------------------------------------------------
// Exact LP oracle (mass-elimination formulation, residual flows substituted out)
// ---------------------------------------------------------------------------

/// Exact optimum of the stopping LP: variables nu_t(x) >= 0 on the reachable support
/// of each period, constraints nu_t <= mu_t with mu_t expanded symbolically through
/// the kernel recursion, and sum_x (x - l) nu_t(x) >= 0 per period. Always feasible
/// (the mute plan) and bounded, so the simplex returns an optimal basic solution.
inline SolveResult lp_solve(const MartingaleSpec& spec, const Rat& l, const WeightSchedule& w,
                            std::size_t maxVars = lp_var_cap()) {
    if (!is_finite(spec.horizon()))
        throw HorizonTooLargeError("lp_solve requires a finite horizon");
    const int T = finite_horizon(spec.horizon());
    auto supports = spec.reachable_supports(T);

    std::size_t nvars = 0;
    std::vector<std::size_t> offset(supports.size());
    for (std::size_t t = 0; t < supports.size(); ++t) {
        offset[t] = nvars;
        nvars += supports[t].size();
    }
    if (nvars > maxVars)
        throw HorizonTooLargeError("stopping LP needs " + std::to_string(nvars) +
                                   " variables; cap is " + std::to_string(maxVars) +
                                   " (PERSUADE_MAX_LP_VARS)");

    LinearProgram lp;
    lp.nvars = nvars;
    lp.c.assign(nvars, Rat(0));

    // mu_t as affine forms over the nu variables: constant + coefficient row
    std::vector<Rat> cst;
    std::vector<std::vector<Rat>> coef; // coef[i] over nvars, for support point i of period t
    cst.reserve(supports[0].size());
    for (const auto& x : supports[0]) {
        cst.push_back(spec.initial().weight_at(x));
        coef.emplace_back(nvars, Rat(0));
    }

    for (int t = 1; t <= T; ++t) {
        const auto& sup = supports[static_cast<std::size_t>(t) - 1];
        const std::size_t off = offset[static_cast<std::size_t>(t) - 1];
        // nu_t(x) <= mu_t(x)
        for (std::size_t i = 0; i < sup.size(); ++i) {
            std::vector<Rat> row = coef[i];
            for (auto& v : row) v = -v; // nu - mu <= 0  ->  nu + (-coef)·nu_prev <= cst
            row[off + i] += 1;
            lp.A_ub.push_back(std::move(row));
            lp.b_ub.push_back(cst[i]);
        }
        // IC: sum (l - x) nu_t(x) <= 0
        std::vector<Rat> ic(nvars, Rat(0));
        for (std::size_t i = 0; i < sup.size(); ++i) ic[off + i] = l - sup[i];
        lp.A_ub.push_back(std::move(ic));
        lp.b_ub.push_back(Rat(0));
        // objective
        Rat wt = w.weight(t);
        for (std::size_t i = 0; i < sup.size(); ++i) lp.c[off + i] = wt;

        if (t == T) break;
        // mu_{t+1} = sigma_t ∘ (mu_t - nu_t)
        const auto& nextSup = supports[static_cast<std::size_t>(t)];
        std::map<Rat, std::size_t> nextIndex;
        for (std::size_t j = 0; j < nextSup.size(); ++j) nextIndex[nextSup[j]] = j;
        std::vector<Rat> nCst(nextSup.size(), Rat(0));
        std::vector<std::vector<Rat>> nCoef(nextSup.size(), std::vector<Rat>(nvars, Rat(0)));
        const Kernel& k = spec.kernel(t);
        for (std::size_t i = 0; i < sup.size(); ++i) {
            for (const auto& b : k.at(sup[i]).atoms()) {
                std::size_t j = nextIndex.at(b.point);
                nCst[j] += b.weight * cst[i];
                for (std::size_t v = 0; v < nvars; ++v)
                    if (coef[i][v] != 0) nCoef[j][v] += b.weight * coef[i][v];
                nCoef[j][off + i] -= b.weight; // the -nu_t(x_i) term
            }
        }
        cst = std::move(nCst);
        coef = std::move(nCoef);
    }

    auto sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal)
        throw InfeasibleSpecError("stopping LP did not reach an optimum (internal error)");

    SolveResult res;
    for (int t = 1; t <= T; ++t) {
        const auto& sup = supports[static_cast<std::size_t>(t) - 1];
        const std::size_t off = offset[static_cast<std::size_t>(t) - 1];
        std::vector<Atom> atoms;
        for (std::size_t i = 0; i < sup.size(); ++i)
            if (sol.x[off + i] != 0) atoms.push_back({sup[i], sol.x[off + i]});
        res.plan.eliminated.emplace_back(std::move(atoms));
    }
    res.per_period_mass = res.plan.masses();
    res.value = RatInterval(plan_value(res.plan, w));
    if (res.value.lo != sol.value)
        throw InfeasibleSpecError("LP value does not match its plan (internal error)");
    return res;
}

// ---------------------------------------------------------------------------
// Greedy evaluation and truncated value iteration
// ---------------------------------------------------------------------------

namespace detail {

struct GreedyRun {
    StoppingPlan plan;
    Rat value = 0;
    Rat residualMass = 0;
    int periods = 0;
    Rat tailBound = 0; // certified bound on the value beyond the evaluated periods
};

inline GreedyRun greedy_run(const MartingaleSpec& spec, const Rat& l, const WeightSchedule& w,
                            int maxPeriods, const Rat& tol, bool infinite) {
    GreedyRun run;
    DiscreteMeasure mu = spec.initial();
    for (int t = 1; t <= maxPeriods; ++t) {
        if (mu.total_mass() == 0) {
            run.periods = t - 1;
            return run;
        }
        DiscreteMeasure nu = greedy_measure(mu, l);
        run.value += w.weight(t) * nu.total_mass();
        run.plan.eliminated.push_back(nu);
        mu = subtract(mu, nu);
        run.residualMass = mu.total_mass();
        run.periods = t;
        if (infinite) {
            // remaining value <= sum_{s>t} delta^s |nu_s| <= delta^{t+1} * (live mass):
            // residual mass absorbed strictly below the threshold can never stop, and
            // the total stoppable mass is bounded by what is left. Contained in the
            // delta^t |mu| / (1 - delta) bound.
            Rat live = 0;
            for (const auto& a : mu.atoms()) {
                const DiscreteMeasure& img = spec.kernel(t).at(a.point);
                bool absorbedBelow = a.point < l && img.size() == 1 &&
                                     img.atoms()[0].point == a.point;
                if (!absorbedBelow) live += a.weight;
            }
            Rat tail = w.weight(t + 1) * live;
            if (tail <= tol) {
                run.tailBound = tail;
                return run;
            }
        }
        if (t < maxPeriods && mu.total_mass() > 0) mu = pushforward(spec.kernel(t), mu);
    }
    if (infinite)
        throw ToleranceUnachievableError("value iteration did not reach tolerance " +
                                         to_string(tol) + " within " +
                                         std::to_string(maxPeriods) + " periods");
    return run;
}

} // namespace detail

/// Exact value and plan of the greedy policy. Finite horizons give a point value;
/// truncated-infinite horizons a certified interval of width at most the spec's tol.
inline SolveResult greedy_evaluate(const MartingaleSpec& spec, const Rat& l,
                                   const WeightSchedule& w, int infiniteCap = 50000) {
    SolveResult res;
    if (is_finite(spec.horizon())) {
        auto run = detail::greedy_run(spec, l, w, finite_horizon(spec.horizon()), Rat(0), false);
        res.plan = std::move(run.plan);
        res.per_period_mass = res.plan.masses();
        res.value = RatInterval(run.value);
        res.exact = true;
        return res;
    }
    if (!w.is_geometric())
        throw DomainError("infinite-horizon evaluation requires geometric weights");
    const Rat tol = std::get<TruncatedInfinite>(spec.horizon()).tol;
    auto run = detail::greedy_run(spec, l, w, infiniteCap, tol, true);
    res.plan = std::move(run.plan);
    res.per_period_mass = res.plan.masses();
    res.value = RatInterval(run.value, run.value + run.tailBound);
    res.exact = run.tailBound == 0;
    return res;
}

/// Greedy value for T = infinity on a random-walk grid, bracketed within tol by
/// truncation (monotone convergence of the truncated values).
inline RatInterval value_iterate_random_walk(const Grid& g, const Rat& l, const Rat& delta,
                                             const DiscreteMeasure& mu1, const Rat& tol,
                                             int maxPeriods = 50000) {
    if (delta <= 0 || delta >= 1) throw DomainError("discount factor must lie in (0,1)");
    if (tol <= 0) throw DomainError("tolerance must be positive");
    for (const auto& a : mu1.atoms())
        if (!g.position_of(a.point)) throw OffGridSupportError(to_string(a.point));
    MartingaleSpec spec(mu1, random_walk_kernel(g), TruncatedInfinite{tol});
    auto res = greedy_evaluate(spec, l, WeightSchedule::geometric(delta), maxPeriods);
    return res.value;
}

struct GridD {
    Rat value;
    bool lower_bound_only = false; // set when the grid window truncates an infinite grid
};

/// D(Γ) = max over represented j <= 0 of (l - z_{j-1}) / (l - z_j): the factor by which
/// the distance to the threshold can grow in one downward step below l.
inline GridD grid_D(const Grid& g) {
    const auto& z = g.points();
    const Rat& l = g.threshold();
    std::size_t i0 = g.index0();
    if (i0 < 1)
        throw DegenerateGridError("D(Γ) needs at least two grid points below the threshold");
    GridD d{Rat(0), g.truncated_below()};
    for (std::size_t i = 1; i <= i0; ++i) {
        Rat r = (l - z[i - 1]) / (l - z[i]);
        if (r > d.value) d.value = r;
    }
    return d;
}

/// Adoption-time law of the policy that stays fully transparent below the threshold:
/// the posterior is revealed outright except that, within each revealed cell, mass at
/// or above l is pooled with just enough mass from below to hold the conditional mean
/// at l. On single-parity-class priors this law coincides with the greedy policy's.
inline std::vector<std::pair<int, Rat>> transparent_equivalent_adoption_law(
    const Grid& g, const Rat& l, const DiscreteMeasure& mu1, int T) {
    for (const auto& a : mu1.atoms())
        if (!g.position_of(a.point)) throw OffGridSupportError(to_string(a.point));
    Kernel sigma = random_walk_kernel(g);
    std::vector<std::pair<int, Rat>> law;
    // cells: revealed posterior -> conditional measure of the next-period belief
    std::map<Rat, DiscreteMeasure> cells;
    cells[Rat(-1)] = mu1; // initial cell; nothing revealed yet
    for (int t = 1; t <= T; ++t) {
        Rat alpha = 0;
        std::map<Rat, DiscreteMeasure> residuals;
        for (auto& [tag, cell] : cells) {
            if (cell.total_mass() == 0) continue;
            DiscreteMeasure nu = greedy_measure(cell, l);
            if (nu.total_mass() > 0 && nu.barycenter() < l)
                throw Error("transparent policy: cell recommendation violates IC");
            alpha += nu.total_mass();
            residuals[tag] = subtract(cell, nu);
        }
        law.emplace_back(t, alpha);
        if (t == T) break;
        std::map<Rat, DiscreteMeasure> next;
        for (auto& [tag, res] : residuals) {
            for (const auto& a : res.atoms()) {
                // reveal the posterior a.point, then advance it through the walk
                DiscreteMeasure step = scale(sigma.at(a.point), a.weight);
                auto it = next.find(a.point);
                if (it == next.end())
                    next.emplace(a.point, std::move(step));
                else
                    it->second = add(it->second, step);
            }
        }
        cells = std::move(next);
    }
    return law;
}

// ---------------------------------------------------------------------------
// Interval-policy optimization
// ---------------------------------------------------------------------------

struct IntervalOptimizeOptions {
    int maxSearchHorizon = 8;      // nested numeric search cap
    int infiniteSearchHorizon = 6; // effective horizon for truncated-infinite specs
    int topSeeds = 3;
    std::size_t maxPivots = 200000;
};

namespace detail {

inline Rat rat_from_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.14e", x);
    return parse_rational(buf);
}

// ----- numeric (double) model for the nested coarse search -----

struct NumericModel {
    int T = 0;
    Rat l;
    std::vector<std::vector<Rat>> supports; // exact reachable supports per period
    std::vector<std::vector<double>> points;
    // kernel application period t -> t+1: list per source index of (target index, prob)
    std::vector<std::vector<std::vector<std::pair<std::size_t, double>>>> trans;
    std::vector<double> weights; // w_t as doubles, 1-based at index t-1
    std::vector<double> initial;
    double lD = 0;
};

inline NumericModel build_numeric_model(const MartingaleSpec& spec, const Rat& l,
                                        const WeightSchedule& w, int T) {
    NumericModel m;
    m.T = T;
    m.l = l;
    m.lD = to_double(l);
    m.supports = spec.reachable_supports(T);
    m.points.resize(m.supports.size());
    for (std::size_t t = 0; t < m.supports.size(); ++t)
        for (const auto& p : m.supports[t]) m.points[t].push_back(to_double(p));
    m.trans.resize(static_cast<std::size_t>(T > 0 ? T - 1 : 0));
    for (int t = 1; t < T; ++t) {
        const auto& sup = m.supports[static_cast<std::size_t>(t) - 1];
        const auto& nextSup = m.supports[static_cast<std::size_t>(t)];
        std::map<Rat, std::size_t> idx;
        for (std::size_t j = 0; j < nextSup.size(); ++j) idx[nextSup[j]] = j;
        auto& rows = m.trans[static_cast<std::size_t>(t) - 1];
        rows.resize(sup.size());
        const Kernel& k = spec.kernel(t);
        for (std::size_t i = 0; i < sup.size(); ++i)
            for (const auto& b : k.at(sup[i]).atoms())
                rows[i].emplace_back(idx.at(b.point), to_double(b.weight));
    }
    for (int t = 1; t <= T; ++t) m.weights.push_back(to_double(w.weight(t)));
    m.initial.assign(m.supports[0].size(), 0.0);
    for (std::size_t i = 0; i < m.supports[0].size(); ++i)
        m.initial[i] = to_double(spec.initial().weight_at(m.supports[0][i]));
    return m;
}

inline double greedy_mass_d(const std::vector<double>& pts, const std::vector<double>& wts,
                            double l) {
    double M = 0, mean = 0;
    for (std::size_t i = 0; i < wts.size(); ++i) {
        M += wts[i];
        mean += wts[i] * pts[i];
    }
    if (M <= 1e-15) return 0;
    if (mean / M >= l) return M;
    double W = 0, S = 0;
    for (std::size_t k = pts.size(); k-- > 0;) {
        if (wts[k] <= 0) continue;
        if (W + pts[k] * wts[k] >= l * (S + wts[k])) {
            W += pts[k] * wts[k];
            S += wts[k];
        } else {
            if (pts[k] >= l) break;
            double theta = (W - l * S) / (l - pts[k]);
            return S + std::max(0.0, theta);
        }
    }
    return S;
}

/// Window measure of mass beta with mean as close to l as attainable; doubles only.
inline std::vector<double> interval_measure_d(const std::vector<double>& pts,
                                              const std::vector<double>& wts, double l,
                                              double beta) {
    std::vector<double> out(wts.size(), 0.0);
    if (beta <= 0) return out;
    double M = 0;
    for (double w : wts) M += w;
    beta = std::min(beta, M);
    auto windowIntegral = [&](double p) {
        double c = 0, s = 0, lo = p, hi = p + beta;
        for (std::size_t i = 0; i < wts.size(); ++i) {
            double cn = c + wts[i];
            double from = std::max(c, lo), to = std::min(cn, hi);
            if (to > from) s += pts[i] * (to - from);
            c = cn;
        }
        return s;
    };
    double target = l * beta;
    double lo = 0, hi = M - beta;
    double p = 0;
    if (windowIntegral(0) < target) {
        for (int it = 0; it < 60; ++it) {
            double mid = (lo + hi) / 2;
            if (windowIntegral(mid) >= target)
                hi = mid;
            else
                lo = mid;
        }
        p = hi;
    }
    double c = 0, wlo = p, whi = p + beta;
    for (std::size_t i = 0; i < wts.size(); ++i) {
        double cn = c + wts[i];
        double from = std::max(c, wlo), to = std::min(cn, whi);
        if (to > from) out[i] = to - from;
        c = cn;
    }
    return out;
}

struct NumericSearcher {
    const NumericModel& m;
    int gridTop, gridDeep, goldenIters;

    /// Budgets shrink with depth so the nested search stays within a total
    /// evaluation budget; the exact refinement supplies the precision.
    static std::pair<int, int> deep_budget(int T, int gridTop, double evalBudget = 250000) {
        int searchLevels = std::max(1, T - 2);
        double per = std::pow(evalBudget / std::max(1, gridTop * T),
                              1.0 / static_cast<double>(searchLevels));
        int perLevel = std::min(40, std::max(5, static_cast<int>(per)));
        int grid = std::max(3, perLevel * 2 / 5);
        return {grid, std::max(2, perLevel - grid)};
    }

    double value(int t, const std::vector<double>& wts) const {
        const auto& pts = m.points[static_cast<std::size_t>(t) - 1];
        double g = greedy_mass_d(pts, wts, m.lD);
        if (t == m.T) return m.weights[static_cast<std::size_t>(t) - 1] * g;
        if (g <= 1e-14) {
            // nothing stoppable; advance
            return value(t + 1, push(t, wts, {}));
        }
        auto eval = [&](double a) {
            auto nu = interval_measure_d(pts, wts, m.lD, a);
            return m.weights[static_cast<std::size_t>(t) - 1] * a + value(t + 1, push(t, wts, nu));
        };
        int K = t == 1 ? gridTop : gridDeep;
        double bestA = 0, bestV = -1;
        for (int i = 0; i <= K; ++i) {
            double a = g * i / K;
            double v = eval(a);
            if (v > bestV) {
                bestV = v;
                bestA = a;
            }
        }
        double lo = std::max(0.0, bestA - g / K), hi = std::min(g, bestA + g / K);
        auto [a, v] = golden(eval, lo, hi, goldenIters);
        return std::max(v, bestV);
    }

    /// Per-level argmax chain (the seed handed to the exact refinement).
    std::vector<double> chain(std::vector<double> wts, std::optional<double> firstAlpha) const {
        std::vector<double> out;
        for (int t = 1; t <= m.T; ++t) {
            const auto& pts = m.points[static_cast<std::size_t>(t) - 1];
            double g = greedy_mass_d(pts, wts, m.lD);
            double a;
            if (t == m.T) {
                a = g;
            } else if (t == 1 && firstAlpha) {
                a = std::min(*firstAlpha, g);
            } else if (g <= 1e-14) {
                a = 0;
            } else {
                auto eval = [&](double x) {
                    auto nu = interval_measure_d(pts, wts, m.lD, x);
                    return m.weights[static_cast<std::size_t>(t) - 1] * x +
                           value(t + 1, push(t, wts, nu));
                };
                int K = t == 1 ? gridTop : gridDeep;
                double bestA = 0, bestV = -1;
                for (int i = 0; i <= K; ++i) {
                    double x = g * i / K;
                    double v = eval(x);
                    if (v > bestV) {
                        bestV = v;
                        bestA = x;
                    }
                }
                double lo = std::max(0.0, bestA - g / K), hi = std::min(g, bestA + g / K);
                auto [ga, gv] = golden(eval, lo, hi, goldenIters);
                a = gv > bestV ? ga : bestA;
            }
            out.push_back(a);
            if (t < m.T) {
                auto nu = interval_measure_d(pts, wts, m.lD, a);
                wts = push(t, wts, nu);
            }
        }
        return out;
    }

    std::vector<double> push(int t, const std::vector<double>& wts,
                             const std::vector<double>& nu) const {
        const auto& rows = m.trans[static_cast<std::size_t>(t) - 1];
        std::vector<double> out(m.points[static_cast<std::size_t>(t)].size(), 0.0);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            double rem = wts[i] - (i < nu.size() && !nu.empty() ? nu[i] : 0.0);
            if (rem <= 0) continue;
            for (const auto& [j, p] : rows[i]) out[j] += rem * p;
        }
        return out;
    }

    template <class F> static std::pair<double, double> golden(F f, double lo, double hi, int iters) {
        const double phi = 0.6180339887498949;
        double a = lo, b = hi;
        double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        double f1 = f(x1), f2 = f(x2);
        for (int i = 0; i < iters; ++i) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = f(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = f(x1);
            }
        }
        double mid = (a + b) / 2;
        return {mid, f((a + b) / 2)};
    }
};

// ----- exact regime refinement -----

struct AffForm {
    Rat c;
    std::vector<Rat> a; // coefficients over the free alpha variables

    explicit AffForm(std::size_t nvars = 0) : c(0), a(nvars, Rat(0)) {}
    static AffForm constant(const Rat& v, std::size_t nvars) {
        AffForm f(nvars);
        f.c = v;
        return f;
    }
    Rat eval(const std::vector<Rat>& alpha) const {
        Rat v = c;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] != 0) v += a[i] * alpha[i];
        return v;
    }
    AffForm& operator+=(const AffForm& o) {
        c += o.c;
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
        return *this;
    }
    AffForm& operator-=(const AffForm& o) {
        c -= o.c;
        for (std::size_t i = 0; i < a.size(); ++i) a[i] -= o.a[i];
        return *this;
    }
    AffForm& scale(const Rat& s) {
        c *= s;
        for (auto& v : a) v *= s;
        return *this;
    }
};

/// Seed entry for one period of the refinement: stop nothing, stop greedily,
/// or stop a given mass (clamped into the feasible range during evaluation).
struct SeedEntry {
    enum Kind { Zero, Greedy, Mass } kind = Greedy;
    Rat mass;
    static SeedEntry zero() { return {Zero, Rat(0)}; }
    static SeedEntry greedy() { return {Greedy, Rat(0)}; }
    static SeedEntry of(Rat m) { return {Mass, std::move(m)}; }
};

struct Candidate {
    Rat value;
    StoppingPlan plan;
    std::vector<Rat> masses;
};

/// Evaluates a seed exactly: runs the honest greedy/interval recursion with the
/// requested per-period masses (clamped to [0, greedy mass]).
inline Candidate evaluate_seed(const MartingaleSpec& spec, const Rat& l,
                               const WeightSchedule& w, int T,
                               const std::vector<SeedEntry>& seed) {
    Candidate cand;
    cand.value = 0;
    DiscreteMeasure mu = spec.initial();
    for (int t = 1; t <= T; ++t) {
        DiscreteMeasure nu;
        if (mu.total_mass() > 0) {
            Rat g = greedy_mass(mu, l);
            const SeedEntry& e = seed[static_cast<std::size_t>(t) - 1];
            Rat target = e.kind == SeedEntry::Zero ? Rat(0)
                         : e.kind == SeedEntry::Greedy ? g
                                                       : std::min(std::max(e.mass, Rat(0)), g);
            nu = interval_measure(mu, l, target);
        }
        cand.value += w.weight(t) * nu.total_mass();
        cand.masses.push_back(nu.total_mass());
        cand.plan.eliminated.push_back(nu);
        if (t < T) mu = pushforward(spec.kernel(t), mu.total_mass() > 0 ? subtract(mu, nu) : mu);
    }
    return cand;
}

struct PeriodRegime {
    enum Kind { Mute, TakeAll, Window, GreedyFinal } kind = Mute;
    // Window
    std::size_t loIdx = 0, hiIdx = 0;
    std::vector<std::size_t> fullIdx;
    int var = -1;
    // GreedyFinal
    std::vector<std::size_t> topIdx;
    std::optional<std::size_t> splitIdx;
};

/// Classifies the combinatorial regime of each period at the seed plan, over the
/// fixed reachable supports.
inline std::optional<std::vector<PeriodRegime>> classify_regimes(
    const MartingaleSpec& spec, const Rat& l, int T, const Candidate& seedPlan,
    const std::vector<std::vector<Rat>>& supports) {
    std::vector<PeriodRegime> regimes;
    DiscreteMeasure mu = spec.initial();
    int nvars = 0;
    for (int t = 1; t <= T; ++t) {
        const auto& sup = supports[static_cast<std::size_t>(t) - 1];
        auto indexOf = [&](const Rat& p) -> std::optional<std::size_t> {
            auto it = std::lower_bound(sup.begin(), sup.end(), p);
            if (it != sup.end() && *it == p) return static_cast<std::size_t>(it - sup.begin());
            return std::nullopt;
        };
        const DiscreteMeasure& nu = seedPlan.plan.eliminated[static_cast<std::size_t>(t) - 1];
        PeriodRegime reg;
        if (mu.total_mass() == 0 || nu.total_mass() == 0) {
            reg.kind = PeriodRegime::Mute;
        } else if (mu.barycenter() >= l && nu == mu) {
            reg.kind = PeriodRegime::TakeAll;
        } else if (t == T) {
            // final period: greedy takes everything above a split point plus a fraction
            // of the split atom. The top block is taken over the full reachable support
            // so that points with zero weight at the seed stay covered as masses move.
            reg.kind = PeriodRegime::GreedyFinal;
            std::optional<Rat> splitPoint;
            for (auto it = mu.atoms().rbegin(); it != mu.atoms().rend(); ++it) {
                Rat taken = nu.weight_at(it->point);
                if (taken < it->weight) {
                    splitPoint = it->point;
                    break;
                }
            }
            if (!splitPoint) {
                // block taken exactly; the next support point below l is the zero split
                Rat lowest = nu.min_point();
                for (std::size_t i = sup.size(); i-- > 0;) {
                    if (sup[i] < lowest && sup[i] < l) {
                        splitPoint = sup[i];
                        break;
                    }
                }
            }
            if (splitPoint && *splitPoint >= l) return std::nullopt; // not a greedy shape
            for (std::size_t i = 0; i < sup.size(); ++i) {
                if (splitPoint && sup[i] == *splitPoint)
                    reg.splitIdx = i;
                else if (!splitPoint || sup[i] > *splitPoint)
                    reg.topIdx.push_back(i);
            }
        } else {
            if (nu.barycenter() != l) return std::nullopt; // slack case is TakeAll-only
            reg.kind = PeriodRegime::Window;
            Rat ylo = nu.min_point(), yhi = nu.max_point();
            auto lo = indexOf(ylo), hi = indexOf(yhi);
            if (!lo || !hi) return std::nullopt;
            reg.loIdx = *lo;
            reg.hiIdx = *hi;
            for (std::size_t k = *lo + 1; k < *hi; ++k) reg.fullIdx.push_back(k);
            reg.var = nvars++;
        }
        regimes.push_back(std::move(reg));
        if (t < T)
            mu = pushforward(spec.kernel(t),
                             nu.total_mass() > 0 ? subtract(mu, nu) : mu);
    }
    return regimes;
}

/// Solves the exact linear program of one combinatorial regime: within the regime the
/// whole plan is affine in the free stopping masses, so the best plan in the regime is
/// an LP vertex. Returns the refined candidate (exactly re-evaluated), or nullopt.
inline std::optional<Candidate> refine_regime(const MartingaleSpec& spec, const Rat& l,
                                              const WeightSchedule& w, int T,
                                              const std::vector<PeriodRegime>& regimes,
                                              const std::vector<std::vector<Rat>>& supports,
                                              std::size_t maxPivots,
                                              bool lexicographic = false,
                                              const Rat* valueFloor = nullptr) {
    int nvars = 0;
    for (const auto& r : regimes)
        if (r.kind == PeriodRegime::Window) ++nvars;
    const std::size_t nv = static_cast<std::size_t>(nvars);

    std::vector<AffForm> muF;
    for (const auto& x : supports[0])
        muF.push_back(AffForm::constant(spec.initial().weight_at(x), nv));

    std::vector<AffForm> geConstraints; // each form constrained >= 0
    std::vector<AffForm> alphaF; // per-period stopped mass
    AffForm objective(nv);

    for (int t = 1; t <= T; ++t) {
        const auto& reg = regimes[static_cast<std::size_t>(t) - 1];
        const auto& sup = supports[static_cast<std::size_t>(t) - 1];
        std::vector<AffForm> nuF(sup.size(), AffForm(nv));
        AffForm alpha(nv);
        switch (reg.kind) {
        case PeriodRegime::Mute:
            break;
        case PeriodRegime::TakeAll: {
            AffForm meanGap(nv); // sum (x - l) mu >= 0
            for (std::size_t i = 0; i < sup.size(); ++i) {
                nuF[i] = muF[i];
                alpha += muF[i];
                AffForm term = muF[i];
                term.scale(sup[i] - l);
                meanGap += term;
            }
            geConstraints.push_back(std::move(meanGap));
            break;
        }
        case PeriodRegime::Window: {
            alpha.a[static_cast<std::size_t>(reg.var)] = 1;
            if (reg.loIdx == reg.hiIdx) {
                // single-atom window at the threshold
                nuF[reg.loIdx] = alpha;
                AffForm slack = muF[reg.loIdx];
                slack -= alpha;
                geConstraints.push_back(slack);  // theta <= weight
                geConstraints.push_back(alpha);  // theta >= 0
                break;
            }
            AffForm Wf(nv), Sx(nv);
            for (auto k : reg.fullIdx) {
                nuF[k] = muF[k];
                Wf += muF[k];
                AffForm term = muF[k];
                term.scale(sup[k]);
                Sx += term;
            }
            const Rat &xl = sup[reg.loIdx], &xh = sup[reg.hiIdx];
            Rat span = xh - xl;
            // theta_hi = ((l - xl) alpha - (Sx - xl Wf)) / span
            AffForm thetaHi = alpha;
            thetaHi.scale((l - xl) / span);
            {
                AffForm corr = Sx;
                AffForm xw = Wf;
                xw.scale(xl);
                corr -= xw;
                corr.scale(Rat(1) / span);
                thetaHi -= corr;
            }
            AffForm thetaLo = alpha;
            thetaLo -= Wf;
            thetaLo -= thetaHi;
            nuF[reg.loIdx] = thetaLo;
            nuF[reg.hiIdx] = thetaHi;
            geConstraints.push_back(thetaLo);
            geConstraints.push_back(thetaHi);
            {
                AffForm s1 = muF[reg.loIdx];
                s1 -= thetaLo;
                geConstraints.push_back(std::move(s1));
                AffForm s2 = muF[reg.hiIdx];
                s2 -= thetaHi;
                geConstraints.push_back(std::move(s2));
            }
            break;
        }
        case PeriodRegime::GreedyFinal: {
            AffForm Wtop(nv), Stop(nv);
            for (auto k : reg.topIdx) {
                nuF[k] = muF[k];
                Stop += muF[k];
                AffForm term = muF[k];
                term.scale(sup[k]);
                Wtop += term;
            }
            AffForm meanGap = Wtop; // W - l S >= 0
            {
                AffForm ls = Stop;
                ls.scale(l);
                meanGap -= ls;
            }
            alpha = Stop;
            if (reg.splitIdx) {
                const Rat& xs = sup[*reg.splitIdx];
                AffForm theta = meanGap;
                theta.scale(Rat(1) / (l - xs));
                nuF[*reg.splitIdx] = theta;
                alpha += theta;
                geConstraints.push_back(theta); // theta >= 0 (== meanGap >= 0)
                AffForm slack = muF[*reg.splitIdx];
                slack -= theta;
                geConstraints.push_back(std::move(slack));
            } else {
                geConstraints.push_back(meanGap);
            }
            break;
        }
        }
        // residual nonnegativity for points the policy does not saturate
        for (std::size_t i = 0; i < sup.size(); ++i) {
            AffForm resid = muF[i];
            resid -= nuF[i];
            geConstraints.push_back(std::move(resid));
        }
        AffForm walpha = alpha;
        walpha.scale(w.weight(t));
        objective += walpha;
        alphaF.push_back(alpha);

        if (t == T) break;
        const auto& nextSup = supports[static_cast<std::size_t>(t)];
        std::map<Rat, std::size_t> idx;
        for (std::size_t j = 0; j < nextSup.size(); ++j) idx[nextSup[j]] = j;
        std::vector<AffForm> nextF(nextSup.size(), AffForm(nv));
        const Kernel& k = spec.kernel(t);
        for (std::size_t i = 0; i < sup.size(); ++i) {
            AffForm resid = muF[i];
            resid -= nuF[i];
            for (const auto& b : k.at(sup[i]).atoms()) {
                AffForm term = resid;
                term.scale(b.weight);
                nextF[idx.at(b.point)] += term;
            }
        }
        muF = std::move(nextF);
    }

    // LP over the free masses: maximize objective subject to geConstraints >= 0.
    LinearProgram lp;
    lp.nvars = nv;
    lp.c.assign(nv, Rat(0));
    for (std::size_t i = 0; i < nv; ++i) lp.c[i] = objective.a[i];
    for (const auto& f : geConstraints) {
        std::vector<Rat> row(nv);
        bool nonzero = false;
        for (std::size_t i = 0; i < nv; ++i) {
            row[i] = -f.a[i];
            if (row[i] != 0) nonzero = true;
        }
        if (!nonzero) {
            if (f.c < 0) return std::nullopt; // regime internally infeasible
            continue;
        }
        lp.A_ub.push_back(std::move(row));
        lp.b_ub.push_back(f.c);
    }
    if (valueFloor) {
        // pin the value and optimize lexicographically: used for tie-breaking
        std::vector<Rat> row(nv);
        for (std::size_t i = 0; i < nv; ++i) row[i] = objective.a[i];
        lp.A_eq.push_back(std::move(row));
        lp.b_eq.push_back(*valueFloor - objective.c);
    }

    std::vector<Rat> alphaSol(nv, Rat(0));
    if (nv > 0) {
        if (!lexicographic) {
            auto sol = solve_lp(lp, maxPivots);
            if (sol.status != LpStatus::Optimal) return std::nullopt;
            alphaSol = sol.x;
        } else {
            // maximize alpha_1, then alpha_2, ... subject to the pinned value
            for (std::size_t v = 0; v < nv; ++v) {
                LinearProgram step = lp;
                step.c.assign(nv, Rat(0));
                step.c[v] = 1;
                auto sol = solve_lp(step, maxPivots);
                if (sol.status != LpStatus::Optimal) return std::nullopt;
                std::vector<Rat> row(nv, Rat(0));
                row[v] = 1;
                lp.A_eq.push_back(std::move(row));
                lp.b_eq.push_back(sol.x[v]);
                alphaSol = sol.x;
            }
        }
    } else if (valueFloor && objective.c != *valueFloor) {
        return std::nullopt;
    }

    // honest re-evaluation of the refined masses
    std::vector<SeedEntry> seed;
    for (int t = 1; t <= T; ++t) {
        const auto& reg = regimes[static_cast<std::size_t>(t) - 1];
        switch (reg.kind) {
        case PeriodRegime::Mute:
            seed.push_back(SeedEntry::zero());
            break;
        case PeriodRegime::TakeAll:
        case PeriodRegime::GreedyFinal:
            seed.push_back(SeedEntry::greedy());
            break;
        case PeriodRegime::Window:
            seed.push_back(SeedEntry::of(alphaSol[static_cast<std::size_t>(reg.var)]));
            break;
        }
    }
    return evaluate_seed(spec, l, w, T, seed);
}

/// Exact T<=2 optimization by breakpoint enumeration: the plan value is piecewise
/// linear in the first-period mass, with slope changes only at window-regime
/// boundaries of mu_1 and greedy-split events of mu_2; both sets are enumerable.
inline Candidate exact_t2(const MartingaleSpec& spec, const Rat& l, const WeightSchedule& w,
                          int T) {
    const DiscreteMeasure& mu1 = spec.initial();
    if (T == 1) return evaluate_seed(spec, l, w, 1, {SeedEntry::greedy()});
    std::set<Rat> candidates{Rat(0), greedy_mass(mu1, l)};
    auto regimes = enumerate_window_regimes(mu1, l);
    Rat g1 = greedy_mass(mu1, l);
    const Kernel& k = spec.kernel(1);
    for (const auto& reg : regimes) {
        Rat lo = std::max(reg.betaMin, Rat(0));
        Rat hi = std::min(reg.betaMax, g1);
        if (lo > hi) continue;
        candidates.insert(lo);
        candidates.insert(hi);
        // mu_2 weights are affine in beta inside this regime; sample the two ends to
        // recover the affine form of each downstream atom
        auto nuLo = window_regime_measure(mu1, l, reg, lo);
        auto nuHi = window_regime_measure(mu1, l, reg, hi);
        if (!nuLo || !nuHi) continue;
        DiscreteMeasure m2lo = pushforward(k, subtract(mu1, *nuLo));
        DiscreteMeasure m2hi = pushforward(k, subtract(mu1, *nuHi));
        std::set<Rat> pts;
        for (const auto& a : m2lo.atoms()) pts.insert(a.point);
        for (const auto& a : m2hi.atoms()) pts.insert(a.point);
        std::vector<Rat> sup(pts.begin(), pts.end());
        if (hi == lo) continue;
        Rat span = hi - lo;
        // weight_i(beta) = c_i + k_i (beta - lo)
        std::vector<Rat> c0, slope;
        for (const auto& p : sup) {
            Rat wl = m2lo.weight_at(p), wh = m2hi.weight_at(p);
            c0.push_back(wl);
            slope.push_back((wh - wl) / span);
        }
        // greedy split events on mu_2: for each split candidate s (point < l), with the
        // block strictly above s fully taken: theta_s(beta) = (W - l S) / (l - x_s);
        // events theta_s = 0 and theta_s = weight_s
        Rat Wc = 0, Ws = 0, Sc = 0, Ss = 0; // W = Wc + Ws t, S = Sc + Ss t, t = beta - lo
        for (std::size_t i = sup.size(); i-- > 0;) {
            if (sup[i] < l) {
                Rat denom = l - sup[i];
                // theta numerator: (Wc - l Sc) + (Ws - l Ss) t
                Rat nc = Wc - l * Sc, ns = Ws - l * Ss;
                auto addRoot = [&](const Rat& a0, const Rat& a1) {
                    // a0 + a1 t = 0
                    if (a1 != 0) {
                        Rat t = -a0 / a1;
                        Rat beta = lo + t;
                        if (beta >= lo && beta <= hi) candidates.insert(beta);
                    }
                };
                addRoot(nc, ns);
                // theta = weight_s: nc + ns t = denom (c0_i + slope_i t)
                addRoot(nc - denom * c0[i], ns - denom * slope[i]);
            }
            Wc += sup[i] * c0[i];
            Ws += sup[i] * slope[i];
            Sc += c0[i];
            Ss += slope[i];
        }
    }
    Candidate best;
    best.value = -1;
    for (const auto& beta : candidates) {
        if (beta < 0 || beta > g1) continue;
        auto cand = evaluate_seed(spec, l, w, 2, {SeedEntry::of(beta), SeedEntry::greedy()});
        if (cand.value > best.value ||
            (cand.value == best.value && !best.masses.empty() && cand.masses > best.masses))
            best = std::move(cand);
    }
    return best;
}

} // namespace detail

/// Best plan within the interval-policy class. A coarse nested numeric search (grid at
/// `resolution` plus golden-section polish) locates the optimal combinatorial regime;
/// the exact refinement solves that regime's linear program in the stopping masses and
/// re-evaluates the plan exactly. T <= 2 is solved by exact breakpoint enumeration.
/// Ties break toward the lexicographically earliest-stopping mass sequence.
inline SolveResult interval_optimize(const MartingaleSpec& spec, const Rat& l,
                                     const WeightSchedule& w,
                                     const Rat& resolution = Rat(1, 64),
                                     IntervalOptimizeOptions opts = {}) {
    const bool finite = is_finite(spec.horizon());
    int T = finite ? finite_horizon(spec.horizon()) : opts.infiniteSearchHorizon;
    if (!finite && !w.is_geometric())
        throw DomainError("infinite-horizon optimization requires geometric weights");
    if (T > opts.maxSearchHorizon)
        throw HorizonTooLargeError("interval_optimize search horizon " + std::to_string(T) +
                                   " exceeds the cap " +
                                   std::to_string(opts.maxSearchHorizon));

    detail::Candidate bestCand;
    const auto supports = spec.reachable_supports(T);

    if (spec.initial().barycenter() >= l) {
        // immediate full adoption dominates: weights are non-increasing
        std::vector<detail::SeedEntry> seed(static_cast<std::size_t>(T),
                                            detail::SeedEntry::zero());
        seed[0] = detail::SeedEntry::greedy();
        bestCand = detail::evaluate_seed(spec, l, w, T, seed);
    } else if (T <= 2) {
        bestCand = detail::exact_t2(spec, l, w, T);
    } else {
        using detail::SeedEntry;
        // numeric coarse search
        detail::NumericModel model = detail::build_numeric_model(spec, l, w, T);
        int gridTop = 16;
        if (resolution > 0 && resolution < 1) {
            double r = to_double(resolution);
            gridTop = std::max(12, std::min(256, static_cast<int>(std::lround(1.0 / r))));
        }
        auto [gridDeep, goldenDeep] = detail::NumericSearcher::deep_budget(T, gridTop);
        detail::NumericSearcher searcher{model, gridTop, gridDeep, goldenDeep};

        std::vector<std::vector<SeedEntry>> seeds;
        auto chainToSeed = [&](const std::vector<double>& chain) {
            std::vector<SeedEntry> s;
            for (int t = 0; t < T; ++t) {
                if (t + 1 == T)
                    s.push_back(SeedEntry::greedy());
                else
                    s.push_back(SeedEntry::of(
                        detail::rat_from_double(chain[static_cast<std::size_t>(t)])));
            }
            return s;
        };
        // top level-1 grid cells, golden-polished and expanded into per-period chains
        {
            const auto& pts = model.points[0];
            double g = detail::greedy_mass_d(pts, model.initial, model.lD);
            auto eval1 = [&](double a) {
                auto nu = detail::interval_measure_d(pts, model.initial, model.lD, a);
                return model.weights[0] * a +
                       (T > 1 ? searcher.value(2, searcher.push(1, model.initial, nu)) : 0.0);
            };
            std::vector<std::pair<double, double>> scored; // (value, alpha1)
            for (int i = 0; i <= gridTop; ++i) scored.emplace_back(eval1(g * i / gridTop), g * i / gridTop);
            std::sort(scored.rbegin(), scored.rend());
            // polish effort scales with the cost of one inner evaluation
            double innerCost = std::pow(gridDeep + goldenDeep + 1, std::max(0, T - 2));
            int polishIters = static_cast<int>(250000.0 / (opts.topSeeds * innerCost + 1));
            polishIters = std::min(40, polishIters);
            for (int s = 0; s < opts.topSeeds && s < static_cast<int>(scored.size()); ++s) {
                double a = scored[static_cast<std::size_t>(s)].second;
                if (polishIters >= 6) {
                    double lo = std::max(0.0, a - g / gridTop), hi = std::min(g, a + g / gridTop);
                    auto [pa, pv] = detail::NumericSearcher::golden(eval1, lo, hi, polishIters);
                    if (pv >= scored[static_cast<std::size_t>(s)].first) a = pa;
                }
                seeds.push_back(chainToSeed(searcher.chain(model.initial, a)));
            }
            seeds.push_back(chainToSeed(searcher.chain(model.initial, std::nullopt)));
        }
        // structured seeds: all {mute, greedy} combinations while they stay cheap,
        // otherwise mute-prefix-then-greedy variants
        if (T <= 6) {
            int combos = 1;
            for (int t = 1; t < T; ++t) combos *= 2;
            for (int mask = 0; mask < combos; ++mask) {
                std::vector<SeedEntry> s;
                for (int t = 0; t + 1 < T; ++t)
                    s.push_back((mask >> t) & 1 ? SeedEntry::greedy() : SeedEntry::zero());
                s.push_back(SeedEntry::greedy());
                seeds.push_back(std::move(s));
            }
        } else {
            for (int k = 0; k < T; ++k) {
                std::vector<SeedEntry> s;
                for (int t = 0; t < T; ++t)
                    s.push_back(t < k ? SeedEntry::zero() : SeedEntry::greedy());
                seeds.push_back(std::move(s));
            }
        }

        bestCand.value = -1;
        std::set<std::vector<Rat>> visited;
        auto refineFrom = [&](const std::vector<SeedEntry>& seed) {
            detail::Candidate cand = detail::evaluate_seed(spec, l, w, T, seed);
            for (int round = 0; round < 6; ++round) {
                if (visited.count(cand.masses)) break;
                visited.insert(cand.masses);
                auto regimes = detail::classify_regimes(spec, l, T, cand, supports);
                if (!regimes) break;
                auto refined = detail::refine_regime(spec, l, w, T, *regimes, supports,
                                                     opts.maxPivots);
                if (!refined) break;
                bool improved = refined->value > cand.value;
                bool moved = refined->masses != cand.masses;
                cand = std::move(*refined);
                if (!improved && !moved) break;
            }
            return cand;
        };
        auto fold = [&](detail::Candidate cand) {
            if (cand.value > bestCand.value ||
                (cand.value == bestCand.value && cand.masses > bestCand.masses)) {
                bestCand = std::move(cand);
                return true;
            }
            return false;
        };
        for (const auto& seed : seeds) fold(refineFrom(seed));
        // nudge the incumbent's masses across nearby regime boundaries; a regime LP sees
        // only its own polytope, so the step re-seeds the neighbouring regimes
        const Rat M = spec.initial().total_mass();
        for (int pass = 0; pass < 3; ++pass) {
            bool improved = false;
            for (int t = 0; t + 1 < T; ++t) {
                for (int dir : {-1, 1}) {
                    std::vector<SeedEntry> seed;
                    for (int s = 0; s + 1 < T; ++s) {
                        Rat a = bestCand.masses[static_cast<std::size_t>(s)];
                        if (s == t) {
                            Rat h = std::max(Rat(a / 512), Rat(M / 4096));
                            a = dir < 0 ? Rat(a - h) : Rat(a + h);
                            if (a < 0) a = 0;
                        }
                        seed.push_back(SeedEntry::of(a));
                    }
                    seed.push_back(SeedEntry::greedy());
                    auto cand = refineFrom(seed);
                    if (cand.value > bestCand.value) improved = true;
                    fold(std::move(cand));
                }
            }
            if (!improved) break;
        }
        // lexicographic tie-break inside the winning regime
        auto regimes = detail::classify_regimes(spec, l, T, bestCand, supports);
        if (regimes) {
            Rat floor = bestCand.value;
            auto lex = detail::refine_regime(spec, l, w, T, *regimes, supports, opts.maxPivots,
                                             /*lexicographic=*/true, &floor);
            if (lex && lex->value == bestCand.value && lex->masses > bestCand.masses)
                bestCand = std::move(*lex);
        }
    }

    SolveResult res;
    res.plan = std::move(bestCand.plan);
    res.per_period_mass = res.plan.masses();
    if (finite) {
        res.value = RatInterval(bestCand.value);
        res.exact = true;
    } else {
        // any plan's tail beyond T is worth at most delta^{T+1} |mu1|
        Rat tail = w.weight(T + 1) * spec.initial().total_mass();
        res.value = RatInterval(bestCand.value, bestCand.value + tail);
        res.exact = false;
    }
    return res;
}

} // namespace persuade
