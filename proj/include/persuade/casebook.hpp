#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "persuade/random_instances.hpp"
#include "persuade/solver.hpp"

namespace persuade {

struct CaseCheck {
    std::string name;
    std::string computed;
    std::string expected;   // empty for informational rows
    std::string provenance; // where the expectation comes from
    bool pass = true;
};

struct CaseReport {
    std::string id;
    std::vector<CaseCheck> checks;
    bool pass = true;
    double runtime_ms = 0;

    void check(std::string name, std::string computed, std::string expected,
               std::string provenance, bool ok) {
        pass = pass && ok;
        checks.push_back(
            {std::move(name), std::move(computed), std::move(expected), std::move(provenance), ok});
    }
    void info(std::string name, std::string computed) {
        checks.push_back({std::move(name), std::move(computed), "", "", true});
    }
};

namespace casebook {

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

} // namespace detail

// ---------------------------------------------------------------------------
// Example 1: two conditionally independent binary signals
// ---------------------------------------------------------------------------

struct Example1Setup {
    MartingaleSpec spec;
    Rat l;
};

inline Example1Setup example1_setup() {
    DiscreteMeasure mu1({{rat(1, 4), rat(1, 2)}, {rat(3, 4), rat(1, 2)}});
    Kernel k = binary_signal_kernel(rat(4, 5), {rat(1, 4), rat(3, 4)});
    return {MartingaleSpec(std::move(mu1), std::move(k), 2), rat(18, 25)};
}

inline std::string example1_regime(const Rat& alpha1, const Rat& greedyMass) {
    if (alpha1 == greedyMass) return "greedy";
    if (alpha1 == 0) return "mute";
    return "interior";
}

/// Solves the two-period example at the given second-period weight and classifies the
/// regime of the optimal first-period mass. The three weights quoted in the source
/// example carry reference expectations; the interior-regime reference mass 25/58
/// disagrees with the exact optimum 125/378, which all three solution routes agree on,
/// and is reported as a failed check with both values shown.
inline CaseReport example1(const Rat& w2) {
    detail::Stopwatch sw;
    CaseReport rep;
    rep.id = "example1";
    auto setup = example1_setup();
    auto w = WeightSchedule::explicit_weights({rat(1), w2});
    auto lp = lp_solve(setup.spec, setup.l, w);
    auto io = interval_optimize(setup.spec, setup.l, w);
    Rat g1 = greedy_mass(setup.spec.initial(), setup.l);
    std::string regime = example1_regime(lp.per_period_mass[0], g1);

    rep.info("w2", to_string(w2));
    rep.info("value", to_string(lp.value.lo));
    rep.info("alpha1", to_string(lp.per_period_mass[0]) + " (" +
                           to_decimal_string(lp.per_period_mass[0], 6) + ")");
    rep.check("interval optimum matches lp", to_string(io.value.lo), to_string(lp.value.lo),
              "derived: dual solution routes", io.value.lo == lp.value.lo);
    if (w2 == rat(1, 2)) {
        rep.check("regime", regime, "greedy", "reference: w2 in the greedy range", regime == "greedy");
        rep.check("alpha1", to_string(lp.per_period_mass[0]), "25/47", "reference: greedy mass",
                  lp.per_period_mass[0] == rat(25, 47));
    } else if (w2 == rat(4, 5)) {
        rep.check("regime", regime, "interior", "reference: w2 in the interior range",
                  regime == "interior");
        rep.check("alpha1", to_string(lp.per_period_mass[0]), "25/58",
                  "reference value; exact optimum is 125/378",
                  lp.per_period_mass[0] == rat(25, 58));
    } else if (w2 == rat(49, 50)) {
        rep.check("regime", regime, "mute", "reference: w2 in the mute range", regime == "mute");
        rep.check("alpha1", to_string(lp.per_period_mass[0]), "0", "reference: stays mute",
                  lp.per_period_mass[0] == 0);
    }
    rep.runtime_ms = sw.ms();
    return rep;
}

/// Bisection on w2 for the greedy/interior and interior/mute regime boundaries.
inline CaseReport example1_cutoffs() {
    detail::Stopwatch sw;
    CaseReport rep;
    rep.id = "example1-cutoffs";
    auto setup = example1_setup();
    Rat g1 = greedy_mass(setup.spec.initial(), setup.l);
    auto classify = [&](const Rat& w2) {
        auto lp = lp_solve(setup.spec, setup.l, WeightSchedule::explicit_weights({rat(1), w2}));
        return example1_regime(lp.per_period_mass[0], g1);
    };
    auto bisect = [&](auto pred) -> Rat {
        Rat lo = 0, hi = 1; // pred true at lo, false at hi
        for (int i = 0; i < 22; ++i) {
            Rat mid = (lo + hi) / 2;
            (pred(mid) ? lo : hi) = mid;
        }
        return (lo + hi) / 2;
    };
    Rat lower = bisect([&](const Rat& w2) { return classify(w2) == "greedy"; });
    Rat upper = bisect([&](const Rat& w2) { return classify(w2) != "mute"; });
    double lowD = to_double(lower), upD = to_double(upper);
    rep.info("lower cutoff", detail::fmt(lowD) + " (exact boundary 65/94 = 0.691489...)");
    rep.info("upper cutoff", detail::fmt(upD) + " (exact boundary 85/89 = 0.955056...)");
    rep.check("lower cutoff within 0.618 +- 0.01", detail::fmt(lowD), "0.618 +- 0.01",
              "reference value; exact boundary is 65/94", std::abs(lowD - 0.618) <= 0.01);
    rep.check("upper cutoff within 0.955 +- 0.01", detail::fmt(upD), "0.955 +- 0.01",
              "reference value", std::abs(upD - 0.955) <= 0.01);
    rep.runtime_ms = sw.ms();
    return rep;
}

/// CSV sweep of w2 -> (value, alpha1, regime) by the exact LP, for external plotting.
inline std::string example1_sweep_csv(int steps = 100, int digits = 12) {
    auto setup = example1_setup();
    Rat g1 = greedy_mass(setup.spec.initial(), setup.l);
    std::ostringstream os;
    os << "w2,value,alpha1,regime\n";
    for (int i = 0; i <= steps; ++i) {
        Rat w2 = rat(i, steps);
        auto lp = lp_solve(setup.spec, setup.l, WeightSchedule::explicit_weights({rat(1), w2}));
        os << to_decimal_string(w2, digits) << ',' << to_decimal_string(lp.value.lo, digits)
           << ',' << to_decimal_string(lp.per_period_mass[0], digits) << ','
           << example1_regime(lp.per_period_mass[0], g1) << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Example 2: uniform first signal, perfect-or-null second signal
// ---------------------------------------------------------------------------

inline void example2_domain_check(double alpha, double l, double q) {
    if (!(q >= 0 && q < 1)) throw DomainError("example2: q must lie in [0,1)");
    if (!(l > 0.5 && l < 1)) throw DomainError("example2: l must lie in (1/2,1)");
    if (!(alpha >= 0 && alpha <= 2 * (1 - l) + 1e-12))
        throw DomainError("example2: alpha must lie in [0, 2(1-l)]");
}

/// Optimal second-period cutoff x̂(α) = l − sqrt(((1−l)² + (1−l) l q (1−2α)) / (1−q)).
inline double example2_xhat(double alpha, double l, double q) {
    example2_domain_check(alpha, l, q);
    return l - std::sqrt(((1 - l) * (1 - l) + (1 - l) * l * q * (1 - 2 * alpha)) / (1 - q));
}

/// Sender value Γ(α) = α + w2 [(1−q)(1 − α − x̂(α)) + q (1 − 2 l α)/2].
inline double example2_gamma(double alpha, double l, double q, double w2) {
    double xh = example2_xhat(alpha, l, q);
    return alpha + w2 * ((1 - q) * (1 - alpha - xh) + 0.5 * q * (1 - 2 * l * alpha));
}

/// argmax of the concave Γ over [0, 2(1−l)] by ternary search with endpoint checks.
inline double example2_alpha_star(double l, double q, double w2) {
    example2_domain_check(0, l, q);
    double lo = 0, hi = 2 * (1 - l);
    for (int i = 0; i < 200; ++i) {
        double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (example2_gamma(m1, l, q, w2) < example2_gamma(m2, l, q, w2))
            lo = m1;
        else
            hi = m2;
    }
    double mid = (lo + hi) / 2;
    double best = mid;
    double bestV = example2_gamma(mid, l, q, w2);
    for (double cand : {0.0, 2 * (1 - l)}) {
        double v = example2_gamma(cand, l, q, w2);
        if (v > bestV + 1e-15) {
            bestV = v;
            best = cand;
        }
    }
    return best;
}

/// Discretized two-period spec: the uniform prior as n equal atoms at midpoints and the
/// perfect-or-null second signal as an explicit kernel.
inline MartingaleSpec example2_discretized_spec(int n, const Rat& q) {
    std::vector<Atom> atoms;
    std::map<Rat, DiscreteMeasure> table;
    for (int i = 1; i <= n; ++i) {
        Rat x(2 * i - 1, 2 * n);
        x.canonicalize();
        atoms.push_back({x, Rat(1, n)});
        std::vector<Atom> img;
        if (q > 0) {
            img.push_back({Rat(0), q * (1 - x)});
            img.push_back({Rat(1), q * x});
        }
        if (q < 1) img.push_back({x, 1 - q});
        table[x] = DiscreteMeasure(std::move(img));
    }
    return MartingaleSpec(DiscreteMeasure(std::move(atoms)), Kernel(std::move(table)), 2);
}

inline std::string example2_regime(double alphaStar, double l, double tol = 1e-6) {
    if (alphaStar <= tol) return "zero";
    if (alphaStar >= 2 * (1 - l) - tol) return "greedy";
    return "interior";
}

/// Regime cutoffs in w2 at fixed (l, q): Gamma'(alpha) = 1 + w2 [(1-q)(-1 - xhat'(alpha)) - ql]
/// falls in alpha, so w_L solves Gamma'(2(1-l)) = 0 and w_H solves Gamma'(0) = 0.
/// Numeric values only; no closed form is claimed.
struct Example2Cutoffs {
    double w_low;  // greedy for w2 <= w_low
    double w_high; // zero for w2 >= w_high
};

inline Example2Cutoffs example2_cutoffs(double l, double q) {
    example2_domain_check(0, l, q);
    auto xhatSlope = [&](double alpha) {
        double R = ((1 - l) * (1 - l) + (1 - l) * l * q * (1 - 2 * alpha)) / (1 - q);
        return (1 - l) * l * q / ((1 - q) * std::sqrt(R));
    };
    auto wAt = [&](double alpha) {
        return 1.0 / ((1 - q) * (1 + xhatSlope(alpha)) + q * l);
    };
    return {wAt(2 * (1 - l)), wAt(0.0)};
}

/// Closed-form maximum vs the discretized LP, plus the alpha*-vs-q regime pattern.
inline CaseReport example2_case(const Rat& l, const Rat& q, const Rat& w2, int n = 400) {
    detail::Stopwatch sw;
    CaseReport rep;
    rep.id = "example2";
    double lD = to_double(l), qD = to_double(q), w2D = to_double(w2);

    double xhat0 = example2_xhat(0.0, lD, 0.0);
    rep.check("xhat(q=0, alpha=0) = 2l-1", detail::fmt(xhat0), detail::fmt(2 * lD - 1),
              "derived: uniform greedy cutoff", std::abs(xhat0 - (2 * lD - 1)) < 1e-12);

    double aStar = example2_alpha_star(lD, qD, w2D);
    double gamma = example2_gamma(aStar, lD, qD, w2D);
    rep.info("alpha_star", detail::fmt(aStar));
    rep.info("gamma_max", detail::fmt(gamma));

    auto spec = example2_discretized_spec(n, q);
    auto lp = lp_solve(spec, l, WeightSchedule::explicit_weights({rat(1), w2}));
    double lpV = to_double(lp.value.lo);
    rep.info("lp_value(n=" + std::to_string(n) + ")", detail::fmt(lpV));
    rep.check("closed-form max within 1e-2 of discretized LP", detail::fmt(gamma),
              detail::fmt(lpV) + " +- 0.01", "derived: LP oracle on the discretization",
              std::abs(gamma - lpV) <= 1e-2);

    // regime cutoffs in w2 and their consistency with the maximizer
    auto cuts = example2_cutoffs(lD, qD);
    rep.info("w_low", detail::fmt(cuts.w_low));
    rep.info("w_high", detail::fmt(cuts.w_high));
    bool cutsOk =
        cuts.w_low < cuts.w_high &&
        example2_regime(example2_alpha_star(lD, qD, cuts.w_low * 0.98), lD) == "greedy" &&
        example2_regime(example2_alpha_star(lD, qD, std::min(1.0, cuts.w_high * 1.02)), lD) !=
            "interior";
    rep.check("w_low < w_high bracket the interior regime",
              detail::fmt(cuts.w_low) + " .. " + detail::fmt(cuts.w_high), "consistent",
              "numeric cutoffs, no closed form claimed", cutsOk);

    // regime pattern over a fine q sweep at the quoted (l, w2)
    std::vector<std::string> pattern;
    for (int i = 1; i < 200; ++i) {
        double qq = i / 200.0;
        std::string r = example2_regime(example2_alpha_star(3.0 / 4, qq, 24.0 / 25), 3.0 / 4);
        if (pattern.empty() || pattern.back() != r) pattern.push_back(r);
    }
    std::string seq;
    for (std::size_t i = 0; i < pattern.size(); ++i) seq += (i ? "," : "") + pattern[i];
    rep.check("alpha*-vs-q pattern at l=3/4, w2=24/25", seq,
              "greedy,interior,zero,interior,greedy", "regime sequence as q rises",
              seq == "greedy,interior,zero,interior,greedy");
    rep.runtime_ms = sw.ms();
    return rep;
}

/// CSV sweep of q -> alpha*(q) at fixed (l, w2), for external plotting.
inline std::string example2_alpha_star_csv(double l, double w2, int steps = 199, int digits = 12) {
    std::ostringstream os;
    os << "q,alpha_star,regime\n";
    os.precision(digits);
    for (int i = 1; i < steps + 1; ++i) {
        double q = static_cast<double>(i) / (steps + 1);
        double a = example2_alpha_star(l, q, w2);
        os << q << ',' << a << ',' << example2_regime(a, l) << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// The non-Blackwell-preserving counterexample
// ---------------------------------------------------------------------------

inline CaseReport counterexample_nonblackwell() {
    detail::Stopwatch sw;
    CaseReport rep;
    rep.id = "counterexample";
    DiscreteMeasure mu1({{rat(1, 3), rat(1, 7)}, {rat(1, 2), rat(2, 7)}, {rat(3, 4), rat(4, 7)}});
    std::map<Rat, DiscreteMeasure> t;
    t[rat(1, 2)] = DiscreteMeasure({{rat(0), rat(1, 2)}, {rat(1), rat(1, 2)}});
    t[rat(1, 3)] = DiscreteMeasure::dirac(rat(1, 3));
    t[rat(3, 4)] = DiscreteMeasure::dirac(rat(3, 4));
    Kernel sigma{std::move(t)};
    Rat l = rat(2, 3);
    auto w = WeightSchedule::explicit_weights({rat(1), rat(3, 4)});
    MartingaleSpec spec(mu1, sigma, 2);

    auto io = interval_optimize(spec, l, w);
    rep.check("interval-optimal value", to_string(io.value.lo), "6/7", "exact",
              io.value.lo == rat(6, 7));

    StoppingPlan alt;
    alt.eliminated.push_back(DiscreteMeasure({{rat(1, 3), rat(1, 7)}, {rat(3, 4), rat(4, 7)}}));
    DiscreteMeasure mu2 = pushforward(sigma, subtract(mu1, alt.eliminated[0]));
    alt.eliminated.push_back(greedy_measure(mu2, l));
    Rat altV = plan_value(alt, w);
    rep.check("alternative plan value", to_string(altV), "7/8", "exact", altV == rat(7, 8));
    rep.check("alternative plan is IC", ic_check(alt, spec, l).ok ? "true" : "false", "true",
              "constraint replay", ic_check(alt, spec, l).ok);

    auto lp = lp_solve(spec, l, w);
    rep.info("lp optimum", to_string(lp.value.lo));
    rep.check("lp >= 7/8", to_string(lp.value.lo), ">= 7/8", "LP oracle",
              lp.value.lo >= rat(7, 8));
    rep.check("lp > interval optimum 6/7", to_string(lp.value.lo), "> 6/7", "LP oracle",
              lp.value.lo > rat(6, 7));

    auto bw = is_blackwell_preserving(sigma, {rat(1, 3), rat(1, 2), rat(3, 4)});
    std::string witness = "none";
    if (bw.counterexample)
        witness = "(" + to_string((*bw.counterexample)[0]) + "," +
                  to_string((*bw.counterexample)[1]) + "," + to_string((*bw.counterexample)[2]) +
                  ")";
    rep.check("kernel is not Blackwell preserving", bw.preserving ? "preserving" : witness,
              "(1/3,1/2,3/4)", "binary-support criterion",
              !bw.preserving && witness == "(1/3,1/2,3/4)");
    rep.runtime_ms = sw.ms();
    return rep;
}

// ---------------------------------------------------------------------------
// Greedy sub-optimality for a patient sender (two-point prior on the eps-grid)
// ---------------------------------------------------------------------------

/// Greedy value vs the wait-one-period deviation for the two-point prior
/// p δ_{l-2eps} + (1-p) δ_1 with p = 1 - eps/(2-2l+eps), certified by truncated value
/// iteration. Also reports the fixed-point constant c(delta) = (1-sqrt(1-delta^2))/delta
/// against v(l-eps).
inline CaseReport prop1_check(const Rat& delta, const Rat& eps, const Rat& l) {
    detail::Stopwatch sw;
    CaseReport rep;
    rep.id = "prop1";
    if (delta <= 0 || delta >= 1) throw DomainError("prop1: delta must lie in (0,1)");
    if (l <= 0 || l >= 1) throw DomainError("prop1: l must lie in (0,1)");
    Rat ratio = l / eps;
    if (ratio.get_den() != 1) throw DomainError("prop1: threshold must lie on the eps-grid");
    if (l < 2 * eps) throw DomainError("prop1: need l >= 2 eps");

    Grid g = Grid::standard(eps, l);
    Rat p = 1 - eps / (2 - 2 * l + eps);
    DiscreteMeasure prior({{l - 2 * eps, p}, {Rat(1), 1 - p}});
    Kernel walk = random_walk_kernel(g);

    Rat tol = parse_rational("1e-12");
    RatInterval greedyV = value_iterate_random_walk(g, l, delta, prior, tol);
    RatInterval devV = scale(value_iterate_random_walk(g, l, delta, pushforward(walk, prior), tol),
                             delta);
    rep.info("greedy value", "[" + to_decimal_string(greedyV.lo, 10) + ", " +
                                 to_decimal_string(greedyV.hi, 10) + "]");
    rep.info("deviation value", "[" + to_decimal_string(devV.lo, 10) + ", " +
                                    to_decimal_string(devV.hi, 10) + "]");

    bool deviationBeats = devV.lo > greedyV.hi;
    bool greedyHolds = greedyV.lo >= devV.hi;
    if (delta * delta > Rat(1, 2)) {
        rep.check("deviation strictly beats greedy", deviationBeats ? "true" : "false", "true",
                  "certified interval comparison; delta > 1/sqrt(2)", deviationBeats);
    } else if (delta <= Rat(1, 2)) {
        rep.check("deviation does not improve on greedy", greedyHolds ? "true" : "false", "true",
                  "greedy optimal at delta <= 1/D = 1/2", greedyHolds);
    } else {
        rep.info("comparison", deviationBeats ? "deviation beats greedy"
                                              : (greedyHolds ? "greedy at least deviation"
                                                             : "undecided at tolerance"));
    }

    // c(delta) enclosure vs v(l - eps) (unit-normalized: adoption today worth 1)
    RatInterval root = sqrt_interval(1 - delta * delta, 30);
    RatInterval c{(1 - root.hi) / delta, (1 - root.lo) / delta};
    RatInterval vle = value_iterate_random_walk(g, l, delta, DiscreteMeasure::dirac(l - eps), tol);
    RatInterval vNorm{vle.lo / delta, vle.hi / delta};
    rep.info("c(delta)", "[" + to_decimal_string(c.lo, 10) + ", " + to_decimal_string(c.hi, 10) +
                             "]");
    rep.info("v(l-eps)", "[" + to_decimal_string(vNorm.lo, 10) + ", " +
                             to_decimal_string(vNorm.hi, 10) + "]");
    Rat gap = abs_rat(vNorm.midpoint() - c.midpoint());
    rep.check("v(l-eps) within eps of c(delta)", to_decimal_string(gap, 8),
              "<= " + to_string(eps), "fixed-point approximation, O(eps) band", gap <= eps);
    rep.runtime_ms = sw.ms();
    return rep;
}

// ---------------------------------------------------------------------------
// Randomized lemma property suite
// ---------------------------------------------------------------------------

struct LemmaCounts {
    int uniqueness = 100;       // interval measures of a given mass coincide
    int minimality = 200;       // interval measure is Blackwell-minimal
    int residual_monotone = 100; // nu ⪯_B nu' implies mu-nu' ⪯_B mu-nu
    int residual_fosd = 100;    // greedy-then-greedy residual FOSD-dominates deviations
    int additivity = 100;       // domination is closed under addition
    int walk_preserves = 100;   // random walk preserves domination
    int two_period = 100;       // delta g(sigma mu) <= g(mu) + delta g(sigma(mu-nu))
    int alpha_sweep = 100;      // alpha + delta g(sigma(mu-nu_alpha)) <= greedy pair
    int domination_value = 60;  // dominating priors yield weakly higher LP value
};

inline CaseReport lemma_property_suite(std::uint64_t seed, const LemmaCounts& counts = {}) {
    detail::Stopwatch sw;
    CaseReport rep;
    rep.id = "lemma-suite";
    rnd::Rng rng(seed);

    auto run = [&](const std::string& name, int target, auto&& once) {
        int ok = 0, ran = 0, guard = 0;
        while (ran < target && guard < target * 40) {
            ++guard;
            auto outcome = once(); // optional<bool>: nullopt means instance rejected
            if (!outcome) continue;
            ++ran;
            if (*outcome) ++ok;
        }
        rep.check(name, std::to_string(ok) + "/" + std::to_string(ran),
                  std::to_string(target) + "/" + std::to_string(target), "seeded random instances",
                  ok == target && ran == target);
    };

    // all mean-l interval measures of a given mass coincide
    run("uniqueness (interval measure)", counts.uniqueness, [&]() -> std::optional<bool> {
        DiscreteMeasure mu = rnd::measure(rng, 2, 5, 10);
        if (mu.empty()) return std::nullopt;
        Rat l = rnd::rational(rng, 12, mu.min_point(), mu.max_point());
        if (mu.barycenter() >= l) return std::nullopt;
        Rat gm = greedy_mass(mu, l);
        if (gm == 0) return std::nullopt;
        Rat beta = gm * rnd::rational(rng, 8, Rat(1, 8), Rat(1));
        DiscreteMeasure canon = interval_measure(mu, l, beta);
        if (canon.total_mass() != beta || (beta > 0 && canon.barycenter() != l)) return false;
        for (const auto& reg : enumerate_window_regimes(mu, l)) {
            auto other = window_regime_measure(mu, l, reg, beta);
            if (other && leq(*other, mu) && *other != canon) return false;
        }
        return true;
    });

    // the interval measure is the Blackwell-minimal stopping rule of its mass
    run("minimality (Blackwell)", counts.minimality, [&]() -> std::optional<bool> {
        DiscreteMeasure mu = rnd::measure(rng, 2, 5, 10);
        Rat l = rnd::rational(rng, 12);
        auto nuP = rnd::submeasure_with_mean(rng, mu, l);
        if (!nuP) return std::nullopt;
        DiscreteMeasure tilde = interval_measure(mu, l, nuP->total_mass());
        return blackwell_leq(tilde, *nuP);
    });

    // Residual monotonicity: nu ⪯_B nu' (equal mass, equal mean, both <= mu)
    run("residual monotonicity", counts.residual_monotone, [&]() -> std::optional<bool> {
        DiscreteMeasure mu = rnd::measure(rng, 2, 5, 10);
        Rat l = rnd::rational(rng, 12);
        auto nuP = rnd::submeasure_with_mean(rng, mu, l);
        if (!nuP || nuP->total_mass() == 0) return std::nullopt;
        DiscreteMeasure tilde = interval_measure(mu, l, nuP->total_mass());
        if (!blackwell_leq(tilde, *nuP)) return false;
        return blackwell_leq(subtract(mu, *nuP), subtract(mu, tilde));
    });

    // the greedy residual FOSD-dominates any interval deviation's residual
    run("residual FOSD (two periods)", counts.residual_fosd, [&]() -> std::optional<bool> {
        auto rs = rnd::blackwell_preserving_spec(rng, 2, 7);
        if (!is_finite(rs.spec.horizon()) || finite_horizon(rs.spec.horizon()) < 2)
            return std::nullopt;
        const DiscreteMeasure& mu1 = rs.spec.initial();
        if (mu1.barycenter() >= rs.l) return std::nullopt;
        Rat g1 = greedy_mass(mu1, rs.l);
        if (g1 == 0) return std::nullopt;
        Rat beta = g1 * rnd::rational(rng, 8, Rat(0), Rat(1));
        DiscreteMeasure nu1 = greedy_measure(mu1, rs.l);
        DiscreteMeasure nu1p = interval_measure(mu1, rs.l, beta);
        const Kernel& k = rs.spec.kernel(1);
        DiscreteMeasure m2 = pushforward(k, subtract(mu1, nu1));
        DiscreteMeasure m2p = pushforward(k, subtract(mu1, nu1p));
        DiscreteMeasure nu2 = m2.total_mass() > 0 ? greedy_measure(m2, rs.l) : m2;
        DiscreteMeasure nu2p = m2p.total_mass() > 0 ? greedy_measure(m2p, rs.l) : m2p;
        return fosd_leq(subtract(m2p, nu2p), subtract(m2, nu2));
    });

    // domination is closed under addition
    run("additivity (domination)", counts.additivity, [&]() -> std::optional<bool> {
        auto [a, b] = rnd::domination_pair(rng);
        auto [c, d] = rnd::domination_pair(rng);
        if (!dominates(a, b).dominated || !dominates(c, d).dominated) return std::nullopt;
        return dominates(add(a, c), add(b, d)).dominated;
    });

    // the random-walk kernel preserves domination
    run("walk preserves domination", counts.walk_preserves, [&]() -> std::optional<bool> {
        Grid g = rnd::grid(rng, 8, 16);
        const auto& z = g.points();
        auto pick = [&](int maxAtoms) {
            std::vector<Atom> atoms;
            int n = rng.uniform(1, maxAtoms);
            for (int i = 0; i < n; ++i)
                atoms.push_back({z[static_cast<std::size_t>(
                                     rng.uniform(0, static_cast<int>(z.size()) - 1))],
                                 rnd::rational(rng, 6, Rat(1, 6), Rat(1))});
            return DiscreteMeasure(std::move(atoms));
        };
        DiscreteMeasure lambda = pick(3);
        // lift each atom to a weakly higher grid point, then spread within the grid
        std::vector<Atom> lifted;
        for (const auto& a : lambda.atoms()) {
            auto pos = *g.position_of(a.point);
            auto up = static_cast<std::size_t>(
                rng.uniform(static_cast<int>(pos), static_cast<int>(z.size()) - 1));
            lifted.push_back({z[up], a.weight});
        }
        DiscreteMeasure mu{std::move(lifted)};
        std::map<Rat, DiscreteMeasure> spreadT;
        for (const auto& a : mu.atoms()) {
            auto pos = *g.position_of(a.point);
            if (pos == 0 || pos + 1 == z.size() || rng.flip()) {
                spreadT[a.point] = DiscreteMeasure::dirac(a.point);
            } else {
                auto lo = static_cast<std::size_t>(rng.uniform(0, static_cast<int>(pos) - 1));
                auto hi = static_cast<std::size_t>(
                    rng.uniform(static_cast<int>(pos) + 1, static_cast<int>(z.size()) - 1));
                Rat w = (z[hi] - a.point) / (z[hi] - z[lo]);
                spreadT[a.point] = DiscreteMeasure({{z[lo], w}, {z[hi], 1 - w}});
            }
        }
        mu = pushforward(Kernel(std::move(spreadT)), mu);
        if (rng.flip()) mu = add(mu, pick(2));
        if (!dominates(lambda, mu).dominated) return std::nullopt; // construction failed
        Kernel sigma = random_walk_kernel(g);
        return dominates(pushforward(sigma, lambda), pushforward(sigma, mu)).dominated;
    });

    // waiting one period cannot beat greedy: delta g(sigma mu) <= g(mu) + delta g(sigma (mu - nu)) at delta = 1/D
    auto twoPeriodInstance = [&](auto&& body) -> std::optional<bool> {
        Grid g = rnd::grid(rng, 9, 16);
        DiscreteMeasure mu = rnd::delta_star_measure(rng, g);
        Rat l = g.threshold();
        if (mu.max_point() < l) return std::nullopt;
        Rat delta = Rat(1) / grid_D(g).value;
        Kernel sigma = random_walk_kernel(g);
        return body(g, mu, l, delta, sigma);
    };
    auto safe_greedy_mass = [](const DiscreteMeasure& m, const Rat& l) -> Rat {
        return m.total_mass() == 0 ? Rat(0) : greedy_mass(m, l);
    };
    run("two-period greedy advantage", counts.two_period, [&]() -> std::optional<bool> {
        return twoPeriodInstance([&](const Grid&, const DiscreteMeasure& mu, const Rat& l,
                                     const Rat& delta, const Kernel& sigma) -> std::optional<bool> {
            DiscreteMeasure nu = greedy_measure(mu, l);
            Rat lhs = delta * safe_greedy_mass(pushforward(sigma, mu), l);
            Rat rhs = nu.total_mass() +
                      delta * safe_greedy_mass(pushforward(sigma, subtract(mu, nu)), l);
            return lhs <= rhs;
        });
    });

    // nor can any partial first stop: alpha + delta g(sigma(mu - nu_alpha)) <= g(mu) + delta g(sigma(mu - nu))
    run("alpha sweep (corollary)", counts.alpha_sweep, [&]() -> std::optional<bool> {
        return twoPeriodInstance([&](const Grid&, const DiscreteMeasure& mu, const Rat& l,
                                     const Rat& delta, const Kernel& sigma) -> std::optional<bool> {
            DiscreteMeasure nu = greedy_measure(mu, l);
            Rat g1 = nu.total_mass();
            if (g1 == 0) return std::nullopt;
            Rat rhs = g1 + delta * safe_greedy_mass(pushforward(sigma, subtract(mu, nu)), l);
            for (int k = 0; k <= 6; ++k) {
                Rat alpha = g1 * rat(k, 6);
                DiscreteMeasure nuA = interval_measure(mu, l, alpha);
                Rat lhs =
                    alpha + delta * safe_greedy_mass(pushforward(sigma, subtract(mu, nuA)), l);
                if (lhs > rhs) return false;
            }
            Rat alpha = g1 * rnd::rational(rng, 10, Rat(0), Rat(1));
            DiscreteMeasure nuA = interval_measure(mu, l, alpha);
            return alpha + delta * safe_greedy_mass(pushforward(sigma, subtract(mu, nuA)), l) <=
                   rhs;
        });
    });

    // Domination favors the sender: dominating priors yield weakly higher LP values
    run("domination raises value", counts.domination_value, [&]() -> std::optional<bool> {
        Grid g = rnd::grid(rng, 7, 12);
        const auto& z = g.points();
        std::vector<Atom> atoms;
        int n = rng.uniform(1, 3);
        for (int i = 0; i < n; ++i)
            atoms.push_back(
                {z[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(z.size()) - 1))],
                 rnd::rational(rng, 6, Rat(1, 6), Rat(1))});
        DiscreteMeasure lambda{std::move(atoms)};
        std::vector<Atom> lifted;
        for (const auto& a : lambda.atoms()) {
            auto pos = *g.position_of(a.point);
            auto up = static_cast<std::size_t>(
                rng.uniform(static_cast<int>(pos), static_cast<int>(z.size()) - 1));
            lifted.push_back({z[up], a.weight});
        }
        DiscreteMeasure mu{std::move(lifted)};
        if (!dominates(lambda, mu).dominated) return std::nullopt;
        int T = rng.uniform(1, 3);
        Rat delta = rnd::rational(rng, 8, Rat(1, 8), Rat(9, 10));
        std::vector<Rat> wts;
        for (int t = 1; t <= T; ++t) wts.push_back(pow_rat(delta, static_cast<unsigned long>(t)));
        auto w = WeightSchedule::explicit_weights(std::move(wts));
        Kernel sigma = random_walk_kernel(g);
        Rat vLambda = lp_solve(MartingaleSpec(lambda, sigma, T), g.threshold(), w).value.lo;
        Rat vMu = lp_solve(MartingaleSpec(mu, sigma, T), g.threshold(), w).value.lo;
        return vMu >= vLambda;
    });

    rep.runtime_ms = sw.ms();
    return rep;
}

} // namespace casebook
} // namespace persuade
