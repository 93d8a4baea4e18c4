#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "persuade/errors.hpp"
#include "persuade/martingale.hpp"
#include "persuade/measure.hpp"

namespace persuade {

/// Maximal-mass sub-measure with conditional mean l (the greedy measure).
/// Returns mu itself when barycenter(mu) >= l (the IC constraint holds with slack),
/// and the zero measure when no support point reaches l.
inline DiscreteMeasure greedy_measure(const DiscreteMeasure& mu, const Rat& l) {
    if (mu.empty()) throw ZeroMassError();
    if (mu.barycenter() >= l) return mu;
    if (mu.max_point() < l) return DiscreteMeasure::zero(); // threshold unreachable
    std::vector<Atom> atoms;
    Rat W = 0, S = 0; // running weighted sum and mass of the taken top block
    const auto& as = mu.atoms();
    for (auto it = as.rbegin(); it != as.rend(); ++it) {
        if (W + it->point * it->weight >= l * (S + it->weight)) {
            atoms.push_back(*it);
            W += it->point * it->weight;
            S += it->weight;
        } else {
            // split: (W + x theta) = l (S + theta)
            Rat theta = (W - l * S) / (l - it->point);
            atoms.push_back({it->point, theta});
            break;
        }
    }
    return DiscreteMeasure(std::move(atoms));
}

inline Rat greedy_mass(const DiscreteMeasure& mu, const Rat& l) {
    return greedy_measure(mu, l).total_mass();
}

namespace detail {

/// W(p) = ∫_p^{p+beta} F^{-1}(u) du for the quantile function of mu.
inline Rat window_integral(const DiscreteMeasure& mu, const Rat& p, const Rat& beta) {
    Rat lo = p, hi = p + beta, c = 0, s = 0;
    for (const auto& a : mu.atoms()) {
        Rat cNext = c + a.weight;
        Rat from = std::max(c, lo), to = std::min(cNext, hi);
        if (to > from) s += a.point * (to - from);
        c = cNext;
    }
    return s;
}

/// Measure of the quantile window (p, p+beta).
inline DiscreteMeasure window_measure(const DiscreteMeasure& mu, const Rat& p, const Rat& beta) {
    std::vector<Atom> atoms;
    Rat lo = p, hi = p + beta, c = 0;
    for (const auto& a : mu.atoms()) {
        Rat cNext = c + a.weight;
        Rat from = std::max(c, lo), to = std::min(cNext, hi);
        if (to > from) atoms.push_back({a.point, to - from});
        c = cNext;
    }
    return DiscreteMeasure(std::move(atoms));
}

} // namespace detail

/// The unique interval sub-measure of mass beta with conditional mean l: slide the
/// quantile window (p, p+beta) until its mean hits l; the
/// window mean is piecewise linear and increasing in p, so the solve is exact).
/// beta = greedy_mass recovers the greedy measure; beta = 0 the zero measure.
/// When barycenter(mu) > l and no mean-l window exists, the bottom window (minimal
/// conditional mean, still >= l) is returned; the solver only reaches that case at t=1.
inline DiscreteMeasure interval_measure(const DiscreteMeasure& mu, const Rat& l,
                                        const Rat& beta) {
    if (beta < 0) throw DomainError("interval_measure: negative mass");
    if (beta == 0) return DiscreteMeasure::zero();
    if (beta > greedy_mass(mu, l))
        throw MassTooLargeError("interval mass " + to_string(beta) +
                                " exceeds greedy mass " + to_string(greedy_mass(mu, l)));
    Rat M = mu.total_mass();
    Rat target = l * beta;

    // breakpoints of p -> W(p): cumulative boundaries shifted by 0 and -beta
    std::vector<Rat> ps{Rat(0), M - beta};
    Rat c = 0;
    for (const auto& a : mu.atoms()) {
        c += a.weight;
        for (const Rat& cand : {c, Rat(c - beta)})
            if (cand > 0 && cand < M - beta) ps.push_back(cand);
    }
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());

    Rat prevP = ps.front();
    Rat prevW = detail::window_integral(mu, prevP, beta);
    if (prevW >= target) return detail::window_measure(mu, prevP, beta);
    for (std::size_t i = 1; i < ps.size(); ++i) {
        Rat w = detail::window_integral(mu, ps[i], beta);
        if (w >= target) {
            Rat slope = (w - prevW) / (ps[i] - prevP);
            Rat p = prevP + (target - prevW) / slope;
            return detail::window_measure(mu, p, beta);
        }
        prevP = ps[i];
        prevW = w;
    }
    throw Error("interval_measure: no window reached the target mean"); // unreachable
}

/// Derived interval-policy record for one period: window endpoints and the endpoint
/// stopping probabilities gamma = nu(y)/mu(y). An empty nu is represented by the
/// degenerate window y_lo = y_hi = l with zero atom probabilities.
struct IntervalPolicyRecord {
    Rat y_lo, y_hi;
    Rat gamma_lo, gamma_hi;
    Rat alpha;
};

inline IntervalPolicyRecord interval_record(const DiscreteMeasure& nu,
                                            const DiscreteMeasure& mu, const Rat& l) {
    IntervalPolicyRecord r;
    r.alpha = nu.total_mass();
    if (nu.empty()) {
        r.y_lo = r.y_hi = l;
        r.gamma_lo = r.gamma_hi = 0;
        return r;
    }
    r.y_lo = nu.min_point();
    r.y_hi = nu.max_point();
    r.gamma_lo = nu.weight_at(r.y_lo) / mu.weight_at(r.y_lo);
    r.gamma_hi = nu.weight_at(r.y_hi) / mu.weight_at(r.y_hi);
    return r;
}

/// Per-period eliminated measures nu_t; P(tau = t) = |nu_t|.
struct StoppingPlan {
    std::vector<DiscreteMeasure> eliminated;

    std::vector<Rat> masses() const {
        std::vector<Rat> m;
        m.reserve(eliminated.size());
        for (const auto& nu : eliminated) m.push_back(nu.total_mass());
        return m;
    }
};

struct ICReport {
    bool ok = true;
    int period = -1;         // first violated period (1-based) when !ok
    std::string constraint;  // "submeasure" or "mean"
    explicit operator bool() const { return ok; }
};

/// Replays the residual-flow recursion mu_t = sigma_{t-1}∘(mu_{t-1} - nu_{t-1}) and
/// checks nu_t <= mu_t and barycenter(nu_t) >= l whenever |nu_t| > 0.
inline ICReport ic_check(const StoppingPlan& plan, const MartingaleSpec& spec, const Rat& l) {
    if (is_finite(spec.horizon()) &&
        plan.eliminated.size() > static_cast<std::size_t>(finite_horizon(spec.horizon())))
        throw DomainError("plan has more periods than the horizon");
    DiscreteMeasure mu = spec.initial();
    for (std::size_t t = 0; t < plan.eliminated.size(); ++t) {
        const auto& nu = plan.eliminated[t];
        if (!leq(nu, mu)) return {false, static_cast<int>(t) + 1, "submeasure"};
        if (nu.total_mass() > 0 && nu.barycenter() < l)
            return {false, static_cast<int>(t) + 1, "mean"};
        if (t + 1 < plan.eliminated.size())
            mu = pushforward(spec.kernel(static_cast<int>(t) + 1), subtract(mu, nu));
    }
    return {};
}

/// All window regimes of mean-l interval measures of mu, each with its admissible mass
/// range. Within a regime the boundary atoms (and the fully taken interior set) are
/// fixed and the two endpoint masses are linear in beta. Used by the exact optimizer
/// and as a brute-force uniqueness oracle.
struct WindowRegime {
    std::size_t loIdx = 0, hiIdx = 0;     // boundary atom indices into mu.atoms()
    std::vector<std::size_t> fullIdx;     // strictly interior atoms, fully taken
    Rat betaMin, betaMax;
};

inline std::vector<WindowRegime> enumerate_window_regimes(const DiscreteMeasure& mu,
                                                          const Rat& l) {
    std::vector<WindowRegime> out;
    const auto& as = mu.atoms();
    const std::size_t n = as.size();
    for (std::size_t lo = 0; lo < n; ++lo) {
        if (as[lo].point > l) break;
        for (std::size_t hi = lo; hi < n; ++hi) {
            if (as[hi].point < l) continue;
            WindowRegime reg;
            reg.loIdx = lo;
            reg.hiIdx = hi;
            if (lo == hi) {
                if (as[lo].point != l) continue; // single-atom window needs the atom at l
                reg.betaMin = 0;
                reg.betaMax = as[lo].weight;
                out.push_back(std::move(reg));
                continue;
            }
            Rat Wf = 0, Sx = 0;
            for (std::size_t k = lo + 1; k < hi; ++k) {
                reg.fullIdx.push_back(k);
                Wf += as[k].weight;
                Sx += as[k].point * as[k].weight;
            }
            // theta_hi = ((l - x_lo) beta - (Sx - x_lo Wf)) / (x_hi - x_lo), increasing in beta
            // theta_lo = ((x_hi - l) beta - (x_hi Wf - Sx)) / (x_hi - x_lo), increasing in beta
            const Rat &xl = as[lo].point, &xh = as[hi].point;
            Rat span = xh - xl;
            Rat betaMin = 0, betaMax = mu.total_mass();
            bool empty = false;
            auto clampGE = [&](const Rat& coef, const Rat& rhs) {
                // coef * beta >= rhs
                if (coef > 0) {
                    betaMin = std::max(betaMin, Rat(rhs / coef));
                } else if (coef < 0) {
                    betaMax = std::min(betaMax, Rat(rhs / coef));
                } else if (rhs > 0) {
                    empty = true;
                }
            };
            // theta_hi >= 0, theta_hi <= w_hi, theta_lo >= 0, theta_lo <= w_lo
            clampGE(l - xl, Sx - xl * Wf);
            clampGE(-(l - xl), -(Sx - xl * Wf) - as[hi].weight * span);
            clampGE(xh - l, xh * Wf - Sx);
            clampGE(-(xh - l), -(xh * Wf - Sx) - as[lo].weight * span);
            if (empty || betaMin > betaMax || betaMax == 0) continue;
            reg.betaMin = betaMin;
            reg.betaMax = betaMax;
            out.push_back(std::move(reg));
        }
    }
    return out;
}

/// The interval measure of mass beta realized inside a specific regime.
/// Returns nullopt when beta falls outside the regime's admissible range.
inline std::optional<DiscreteMeasure> window_regime_measure(const DiscreteMeasure& mu,
                                                            const Rat& l,
                                                            const WindowRegime& reg,
                                                            const Rat& beta) {
    if (beta < reg.betaMin || beta > reg.betaMax) return std::nullopt;
    const auto& as = mu.atoms();
    std::vector<Atom> atoms;
    if (reg.loIdx == reg.hiIdx) {
        atoms.push_back({as[reg.loIdx].point, beta});
        return DiscreteMeasure(std::move(atoms));
    }
    Rat Wf = 0, Sx = 0;
    for (auto k : reg.fullIdx) {
        atoms.push_back(as[k]);
        Wf += as[k].weight;
        Sx += as[k].point * as[k].weight;
    }
    const Rat &xl = as[reg.loIdx].point, &xh = as[reg.hiIdx].point;
    Rat span = xh - xl;
    Rat thetaHi = ((l - xl) * beta - (Sx - xl * Wf)) / span;
    Rat thetaLo = beta - Wf - thetaHi;
    atoms.push_back({xl, thetaLo});
    atoms.push_back({xh, thetaHi});
    return DiscreteMeasure(std::move(atoms));
}

} // namespace persuade
