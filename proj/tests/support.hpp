#pragma once

// Test-only oracles. Each one decides a property through a different route than the
// library implementation it cross-checks, so agreement is evidence, not tautology.

#include "persuade/persuade.hpp"

namespace oracle {

using namespace persuade;

/// Blackwell order via kernel feasibility: lambda ⪯_B mu iff some mean-preserving
/// transport carries lambda onto mu (row sums = lambda, column sums = mu, per-row
/// barycenter fixed). Independent of the integrated-CDF route used by the library.
inline bool blackwell_by_transport(const DiscreteMeasure& lambda, const DiscreteMeasure& mu) {
    if (lambda.total_mass() != mu.total_mass()) return false;
    if (lambda.total_mass() == 0) return true;
    const auto& src = lambda.atoms();
    const auto& dst = mu.atoms();
    LinearProgram lp;
    lp.nvars = src.size() * dst.size();
    lp.c.assign(lp.nvars, Rat(0));
    auto var = [&](std::size_t i, std::size_t j) { return i * dst.size() + j; };
    for (std::size_t i = 0; i < src.size(); ++i) {
        std::vector<Rat> row(lp.nvars, Rat(0)), mean(lp.nvars, Rat(0));
        for (std::size_t j = 0; j < dst.size(); ++j) {
            row[var(i, j)] = 1;
            mean[var(i, j)] = dst[j].point - src[i].point;
        }
        lp.A_eq.push_back(std::move(row));
        lp.b_eq.push_back(src[i].weight);
        lp.A_eq.push_back(std::move(mean));
        lp.b_eq.push_back(Rat(0));
    }
    for (std::size_t j = 0; j < dst.size(); ++j) {
        std::vector<Rat> col(lp.nvars, Rat(0));
        for (std::size_t i = 0; i < src.size(); ++i) col[var(i, j)] = 1;
        lp.A_eq.push_back(std::move(col));
        lp.b_eq.push_back(dst[j].weight);
    }
    return solve_lp(lp).status == LpStatus::Optimal;
}

/// Stop-loss transform E[(X - k)+] under the (unnormalized) measure.
inline Rat stop_loss(const DiscreteMeasure& mu, const Rat& k) {
    Rat s = 0;
    for (const auto& a : mu.atoms())
        if (a.point > k) s += (a.point - k) * a.weight;
    return s;
}

/// Increasing convex order: E[(X-k)+]_lambda <= E[(X-k)+]_mu at every support point
/// (piecewise-linear transforms, so support points plus 0 suffice).
inline bool stop_loss_leq(const DiscreteMeasure& lambda, const DiscreteMeasure& mu) {
    std::vector<Rat> ks{Rat(0)};
    for (const auto& a : lambda.atoms()) ks.push_back(a.point);
    for (const auto& a : mu.atoms()) ks.push_back(a.point);
    for (const auto& k : ks)
        if (stop_loss(lambda, k) > stop_loss(mu, k)) return false;
    return true;
}

/// Maximal mass of a sub-measure with conditional mean >= l, by LP (independent of the
/// greedy sweep).
inline Rat max_ic_mass_lp(const DiscreteMeasure& mu, const Rat& l) {
    const auto& as = mu.atoms();
    LinearProgram lp;
    lp.nvars = as.size();
    lp.c.assign(lp.nvars, Rat(1));
    for (std::size_t i = 0; i < as.size(); ++i) {
        std::vector<Rat> row(lp.nvars, Rat(0));
        row[i] = 1;
        lp.A_ub.push_back(std::move(row));
        lp.b_ub.push_back(as[i].weight);
    }
    std::vector<Rat> ic(lp.nvars, Rat(0));
    for (std::size_t i = 0; i < as.size(); ++i) ic[i] = l - as[i].point;
    lp.A_ub.push_back(std::move(ic));
    lp.b_ub.push_back(Rat(0));
    auto sol = solve_lp(lp);
    return sol.value;
}

/// Max of nu([x,1]) over sub-measures of mass m with conditional mean >= l; used to
/// certify that greedy is FOSD-maximal among same-mass IC stopping rules.
inline Rat max_tail_at_mass_lp(const DiscreteMeasure& mu, const Rat& l, const Rat& m,
                               const Rat& x) {
    const auto& as = mu.atoms();
    LinearProgram lp;
    lp.nvars = as.size();
    lp.c.assign(lp.nvars, Rat(0));
    for (std::size_t i = 0; i < as.size(); ++i) {
        if (as[i].point >= x) lp.c[i] = 1;
        std::vector<Rat> row(lp.nvars, Rat(0));
        row[i] = 1;
        lp.A_ub.push_back(std::move(row));
        lp.b_ub.push_back(as[i].weight);
    }
    std::vector<Rat> ic(lp.nvars, Rat(0));
    for (std::size_t i = 0; i < as.size(); ++i) ic[i] = l - as[i].point;
    lp.A_ub.push_back(std::move(ic));
    lp.b_ub.push_back(Rat(0));
    std::vector<Rat> mass(lp.nvars, Rat(1));
    lp.A_eq.push_back(std::move(mass));
    lp.b_eq.push_back(m);
    auto sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) throw Error("oracle LP infeasible");
    return sol.value;
}

/// Verifies a domination witness: row sums match lambda, per-source mean moves up,
/// column sums fit inside mu.
inline bool witness_is_valid(const OrderWitness& w, const DiscreteMeasure& lambda,
                             const DiscreteMeasure& mu) {
    std::map<Rat, Rat> rowMass, colMass, rowMean;
    for (const auto& m : w.transport) {
        if (m.mass < 0) return false;
        rowMass[m.from] += m.mass;
        rowMean[m.from] += m.mass * m.to;
        colMass[m.to] += m.mass;
    }
    for (const auto& a : lambda.atoms()) {
        if (rowMass[a.point] != a.weight) return false;
        if (rowMean[a.point] < a.point * a.weight) return false;
    }
    for (const auto& [pt, mass] : colMass)
        if (mass > mu.weight_at(pt)) return false;
    return true;
}

} // namespace oracle
