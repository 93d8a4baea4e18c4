#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "persuade/errors.hpp"
#include "persuade/rational.hpp"
#include "persuade/simplex.hpp"

namespace persuade {

struct Atom {
    Rat point;
    Rat weight;
};

/// Finitely supported positive measure on [0,1] with exact rational weights.
/// Canonical form: points strictly increasing, all weights > 0 (zero atoms pruned,
/// coinciding points merged on construction).
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;

    explicit DiscreteMeasure(std::vector<Atom> atoms) {
        std::sort(atoms.begin(), atoms.end(),
                  [](const Atom& a, const Atom& b) { return a.point < b.point; });
        for (auto& a : atoms) {
            if (a.point < 0 || a.point > 1)
                throw DomainError("measure point outside [0,1]: " + to_string(a.point));
            if (a.weight < 0)
                throw DomainError("negative atom weight at " + to_string(a.point));
            if (a.weight == 0) continue;
            if (!atoms_.empty() && atoms_.back().point == a.point)
                atoms_.back().weight += a.weight;
            else
                atoms_.push_back(std::move(a));
        }
    }

    static DiscreteMeasure dirac(const Rat& point, const Rat& weight = Rat(1)) {
        return DiscreteMeasure({{point, weight}});
    }

    static DiscreteMeasure zero() { return DiscreteMeasure(); }

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    Rat weight_at(const Rat& point) const {
        auto it = find(point);
        return it == atoms_.end() ? Rat(0) : it->weight;
    }

    Rat total_mass() const {
        Rat m = 0;
        for (const auto& a : atoms_) m += a.weight;
        return m;
    }

    Rat barycenter() const {
        Rat m = 0, s = 0;
        for (const auto& a : atoms_) {
            m += a.weight;
            s += a.weight * a.point;
        }
        if (m == 0) throw ZeroMassError();
        return s / m;
    }

    Rat min_point() const {
        if (atoms_.empty()) throw ZeroMassError();
        return atoms_.front().point;
    }
    Rat max_point() const {
        if (atoms_.empty()) throw ZeroMassError();
        return atoms_.back().point;
    }

    /// mu([x, 1])
    Rat upper_tail(const Rat& x) const {
        Rat s = 0;
        for (auto it = atoms_.rbegin(); it != atoms_.rend() && it->point >= x; ++it)
            s += it->weight;
        return s;
    }

    bool operator==(const DiscreteMeasure& other) const {
        if (atoms_.size() != other.atoms_.size()) return false;
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            if (atoms_[i].point != other.atoms_[i].point ||
                atoms_[i].weight != other.atoms_[i].weight)
                return false;
        return true;
    }
    bool operator!=(const DiscreteMeasure& other) const { return !(*this == other); }

private:
    std::vector<Atom>::const_iterator find(const Rat& point) const {
        auto it = std::lower_bound(atoms_.begin(), atoms_.end(), point,
                                   [](const Atom& a, const Rat& p) { return a.point < p; });
        if (it != atoms_.end() && it->point == point) return it;
        return atoms_.end();
    }
    std::vector<Atom> atoms_;
};

inline Rat total_mass(const DiscreteMeasure& mu) { return mu.total_mass(); }
inline Rat barycenter(const DiscreteMeasure& mu) { return mu.barycenter(); }

inline DiscreteMeasure add(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    std::vector<Atom> atoms(a.atoms().begin(), a.atoms().end());
    atoms.insert(atoms.end(), b.atoms().begin(), b.atoms().end());
    return DiscreteMeasure(std::move(atoms));
}

inline DiscreteMeasure scale(const DiscreteMeasure& mu, const Rat& c) {
    if (c < 0) throw DomainError("cannot scale a measure by a negative factor");
    std::vector<Atom> atoms;
    atoms.reserve(mu.size());
    for (const auto& a : mu.atoms()) atoms.push_back({a.point, a.weight * c});
    return DiscreteMeasure(std::move(atoms));
}

/// Setwise sub-measure test: nu(B) <= mu(B) for all B, decided atomwise.
inline bool leq(const DiscreteMeasure& nu, const DiscreteMeasure& mu) {
    for (const auto& a : nu.atoms())
        if (a.weight > mu.weight_at(a.point)) return false;
    return true;
}

/// Pointwise difference mu - nu; throws NotSubmeasure naming the offending point.
inline DiscreteMeasure subtract(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    std::vector<Atom> atoms;
    atoms.reserve(mu.size());
    for (const auto& a : nu.atoms())
        if (a.weight > mu.weight_at(a.point)) throw NotSubmeasureError(to_string(a.point));
    for (const auto& a : mu.atoms()) {
        Rat w = a.weight - nu.weight_at(a.point);
        if (w != 0) atoms.push_back({a.point, w});
    }
    return DiscreteMeasure(std::move(atoms));
}

/// First-order stochastic dominance lambda ⪯_F mu: mu([x,1]) >= lambda([x,1]) at every
/// support point of either measure. Defined for positive measures of any masses; the
/// tail at x = 0 forces |lambda| <= |mu| whenever the relation holds.
inline bool fosd_leq(const DiscreteMeasure& lambda, const DiscreteMeasure& mu) {
    if (lambda.total_mass() > mu.total_mass()) return false; // tail at 0 already fails
    for (const auto& a : lambda.atoms())
        if (mu.upper_tail(a.point) < lambda.upper_tail(a.point)) return false;
    for (const auto& a : mu.atoms())
        if (mu.upper_tail(a.point) < lambda.upper_tail(a.point)) return false;
    return true;
}

namespace detail {

/// Integrated CDF of the normalization of mu evaluated at x, times total mass:
/// returns  ∫_0^x mu([0,y]) dy  (unnormalized; callers compare equal-mass measures).
inline Rat integrated_cdf(const DiscreteMeasure& mu, const Rat& x) {
    Rat s = 0;
    for (const auto& a : mu.atoms())
        if (a.point < x) s += a.weight * (x - a.point);
    return s;
}

} // namespace detail

/// Blackwell (mean-preserving-spread) order on equal-mass, equal-mean measures:
/// lambda ⪯_B mu iff ∫_0^x F_lambda <= ∫_0^x F_mu for all x. Both integrated CDFs are
/// piecewise linear, so checking at the union of support points (plus x=1) is exact.
inline bool blackwell_leq(const DiscreteMeasure& lambda, const DiscreteMeasure& mu) {
    Rat ml = lambda.total_mass(), mm = mu.total_mass();
    if (ml != mm) throw MassMismatchError("blackwell_leq requires equal total masses");
    if (ml == 0) return true;
    if (lambda.barycenter() != mu.barycenter()) throw MeanMismatchError();
    std::vector<Rat> xs;
    xs.reserve(lambda.size() + mu.size() + 1);
    for (const auto& a : lambda.atoms()) xs.push_back(a.point);
    for (const auto& a : mu.atoms()) xs.push_back(a.point);
    xs.push_back(Rat(1));
    for (const auto& x : xs)
        if (detail::integrated_cdf(lambda, x) > detail::integrated_cdf(mu, x)) return false;
    return true;
}

enum class WitnessKind { FosdKernel, MpsKernel, DominationTransport };

/// Certificate for an order check: mass moved from source points to target points.
/// Row sums over `transport` match the source weights; all masses are nonnegative.
struct OrderWitness {
    WitnessKind kind = WitnessKind::DominationTransport;
    struct Move {
        Rat from;
        Rat to;
        Rat mass;
    };
    std::vector<Move> transport;
};

struct DominationResult {
    bool dominated = false;
    std::optional<OrderWitness> witness;
    explicit operator bool() const { return dominated; }
};

/// Domination order lambda ⪯_D mu: exact feasibility of the one-step transport
///   m(x,z) >= 0,  sum_z m(x,z) = lambda(x),  sum_z z m(x,z) >= x lambda(x),
///   sum_x m(x,z) <= mu(z),
/// solved as "maximize the transported mass"; the order holds iff the optimum is
/// |lambda|. This collapses the FOSD-kernel-then-mean-preserving-kernel composition
/// into one program; the two-kernel factorization is recovered by the usual mixture
/// construction.
inline DominationResult dominates(const DiscreteMeasure& lambda, const DiscreteMeasure& mu) {
    Rat ml = lambda.total_mass(), mm = mu.total_mass();
    if (ml > mm) throw MassMismatchError("dominates requires |lambda| <= |mu|");
    DominationResult res;
    if (ml == 0) {
        res.dominated = true;
        res.witness = OrderWitness{WitnessKind::DominationTransport, {}};
        return res;
    }
    const auto& src = lambda.atoms();
    const auto& dst = mu.atoms();
    const std::size_t ns = src.size(), nd = dst.size();
    LinearProgram lp;
    lp.nvars = ns * nd;
    lp.c.assign(lp.nvars, Rat(1));
    auto var = [&](std::size_t i, std::size_t j) { return i * nd + j; };
    // row caps and per-source mean constraints
    for (std::size_t i = 0; i < ns; ++i) {
        std::vector<Rat> rowCap(lp.nvars, Rat(0));
        std::vector<Rat> mean(lp.nvars, Rat(0));
        for (std::size_t j = 0; j < nd; ++j) {
            rowCap[var(i, j)] = 1;
            mean[var(i, j)] = src[i].point - dst[j].point; // sum (x - z) m <= 0
        }
        lp.A_ub.push_back(std::move(rowCap));
        lp.b_ub.push_back(src[i].weight);
        lp.A_ub.push_back(std::move(mean));
        lp.b_ub.push_back(Rat(0));
    }
    for (std::size_t j = 0; j < nd; ++j) {
        std::vector<Rat> colCap(lp.nvars, Rat(0));
        for (std::size_t i = 0; i < ns; ++i) colCap[var(i, j)] = 1;
        lp.A_ub.push_back(std::move(colCap));
        lp.b_ub.push_back(dst[j].weight);
    }
    auto sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) throw Error("dominates: transport LP did not solve");
    if (sol.value != ml) return res;
    res.dominated = true;
    OrderWitness w;
    w.kind = WitnessKind::DominationTransport;
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < nd; ++j)
            if (sol.x[var(i, j)] != 0)
                w.transport.push_back({src[i].point, dst[j].point, sol.x[var(i, j)]});
    res.witness = std::move(w);
    return res;
}

/// The unique sub-measure of mass m concentrated on the highest points,
/// splitting at most one atom.
inline DiscreteMeasure top_mass(const DiscreteMeasure& mu, const Rat& m) {
    if (m < 0) throw DomainError("top_mass: negative mass");
    if (m > mu.total_mass()) throw MassMismatchError("top_mass: mass exceeds |mu|");
    std::vector<Atom> atoms;
    Rat remaining = m;
    const auto& as = mu.atoms();
    for (auto it = as.rbegin(); it != as.rend() && remaining > 0; ++it) {
        Rat take = std::min(remaining, it->weight);
        atoms.push_back({it->point, take});
        remaining -= take;
    }
    return DiscreteMeasure(std::move(atoms));
}

} // namespace persuade
