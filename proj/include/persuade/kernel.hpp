#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "persuade/errors.hpp"
#include "persuade/measure.hpp"
#include "persuade/rational.hpp"

namespace persuade {

/// Ordered belief grid {z_j} with threshold l, indices normalized so l ∈ (z_0, z_1].
/// Finite windows onto infinite grids carry truncation flags; consumers of D(Γ)
/// treat a truncated window's value as a lower bound.
class Grid {
public:
    Grid(std::vector<Rat> points, Rat threshold, bool truncatedBelow = false,
         bool truncatedAbove = false)
        : points_(std::move(points)), l_(std::move(threshold)),
          truncatedBelow_(truncatedBelow), truncatedAbove_(truncatedAbove) {
        if (points_.size() < 2) throw DegenerateGridError("grid needs at least 2 points");
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (points_[i] < 0 || points_[i] > 1)
                throw DegenerateGridError("grid point outside [0,1]");
            if (i > 0 && points_[i] <= points_[i - 1])
                throw DegenerateGridError("grid points must be strictly increasing");
        }
        // z_0 is the highest point strictly below l; z_1 the next one (>= l).
        std::size_t i = 0;
        while (i < points_.size() && points_[i] < l_) ++i;
        if (i == 0) throw DegenerateGridError("threshold at or below the lowest grid point");
        if (i == points_.size()) throw DegenerateGridError("threshold above the highest grid point");
        idx0_ = i - 1;
    }

    const std::vector<Rat>& points() const { return points_; }
    const Rat& threshold() const { return l_; }
    std::size_t size() const { return points_.size(); }
    /// Position of z_0 (highest point strictly below l) in points().
    std::size_t index0() const { return idx0_; }
    bool truncated_below() const { return truncatedBelow_; }
    bool truncated_above() const { return truncatedAbove_; }

    std::optional<std::size_t> position_of(const Rat& p) const {
        auto it = std::lower_bound(points_.begin(), points_.end(), p);
        if (it != points_.end() && *it == p)
            return static_cast<std::size_t>(it - points_.begin());
        return std::nullopt;
    }

    /// {0, eps, 2 eps, ...} up to 1.
    static Grid standard(const Rat& eps, const Rat& threshold) {
        if (eps <= 0 || eps > 1) throw DegenerateGridError("grid step must be in (0,1]");
        std::vector<Rat> pts;
        for (Rat p = 0; p <= 1; p += eps) pts.push_back(p);
        return Grid(std::move(pts), threshold);
    }

    /// Posterior grid of conditionally i.i.d. binary symmetric signals with precision p,
    /// z in [-depth, depth]: { p^z / (p^z + (1-p)^z) }. A finite window onto Z, so both
    /// truncation flags are set.
    static Grid binary_signal(const Rat& p, int depth, const Rat& threshold) {
        if (p <= Rat(1, 2) || p >= 1) throw InvalidPrecisionError();
        std::vector<Rat> pts;
        for (int z = -depth; z <= depth; ++z) {
            Rat pz = z >= 0 ? pow_rat(p, static_cast<unsigned long>(z))
                            : pow_rat(Rat(1) / p, static_cast<unsigned long>(-z));
            Rat qz = z >= 0 ? pow_rat(1 - p, static_cast<unsigned long>(z))
                            : pow_rat(Rat(1) / (1 - p), static_cast<unsigned long>(-z));
            pts.push_back(pz / (pz + qz));
        }
        return Grid(std::move(pts), threshold, true, true);
    }

private:
    std::vector<Rat> points_;
    Rat l_;
    std::size_t idx0_ = 0;
    bool truncatedBelow_ = false;
    bool truncatedAbove_ = false;
};

/// Finite probability kernel: each source point maps to a unit-mass measure whose
/// barycenter equals the source (Bayes plausibility). Immutable after construction.
class Kernel {
public:
    Kernel() = default;

    explicit Kernel(std::map<Rat, DiscreteMeasure> transitions)
        : transitions_(std::move(transitions)) {
        for (const auto& [x, m] : transitions_) {
            if (m.total_mass() != 1)
                throw DomainError("kernel image at " + to_string(x) + " is not unit mass");
            if (m.barycenter() != x)
                throw DomainError("kernel image at " + to_string(x) +
                                  " violates the martingale property");
        }
    }

    const std::map<Rat, DiscreteMeasure>& transitions() const { return transitions_; }

    bool covers(const Rat& x) const { return transitions_.count(x) > 0; }

    const DiscreteMeasure& at(const Rat& x) const {
        auto it = transitions_.find(x);
        if (it == transitions_.end()) throw MissingTransitionError(to_string(x));
        return it->second;
    }

private:
    std::map<Rat, DiscreteMeasure> transitions_;
};

/// Pushforward sigma∘mu = sum_x mu(x) sigma(x); preserves mass and barycenter exactly.
inline DiscreteMeasure pushforward(const Kernel& sigma, const DiscreteMeasure& mu) {
    std::vector<Atom> atoms;
    for (const auto& a : mu.atoms()) {
        const auto& img = sigma.at(a.point);
        for (const auto& b : img.atoms()) atoms.push_back({b.point, a.weight * b.weight});
    }
    return DiscreteMeasure(std::move(atoms));
}

/// Random walk on the grid: absorbing at the endpoints, otherwise
/// sigma(z_i) = (z_{i+1}-z_i)/(z_{i+1}-z_{i-1}) δ_{z_{i-1}} + (z_i-z_{i-1})/(z_{i+1}-z_{i-1}) δ_{z_{i+1}}.
inline Kernel random_walk_kernel(const Grid& g) {
    const auto& z = g.points();
    std::map<Rat, DiscreteMeasure> t;
    t[z.front()] = DiscreteMeasure::dirac(z.front());
    t[z.back()] = DiscreteMeasure::dirac(z.back());
    for (std::size_t i = 1; i + 1 < z.size(); ++i) {
        Rat span = z[i + 1] - z[i - 1];
        Rat down = (z[i + 1] - z[i]) / span;
        Rat up = (z[i] - z[i - 1]) / span;
        t[z[i]] = DiscreteMeasure({{z[i - 1], down}, {z[i + 1], up}});
    }
    return Kernel(std::move(t));
}

/// Conditionally independent binary symmetric signal of precision q observed from
/// belief y: signal H arrives with probability yq + (1-y)(1-q) and moves the belief to
/// yq / (yq + (1-y)(1-q)); L is complementary. q = 1/2 is uninformative, q = 1 reveals.
inline Kernel binary_signal_kernel(const Rat& q, const std::vector<Rat>& support) {
    if (q < Rat(1, 2) || q > 1) throw InvalidPrecisionError();
    std::map<Rat, DiscreteMeasure> t;
    for (const auto& y : support) {
        if (y < 0 || y > 1) throw DomainError("belief outside [0,1]");
        Rat pH = y * q + (1 - y) * (1 - q);
        Rat pL = 1 - pH;
        std::vector<Atom> atoms;
        if (pH > 0) atoms.push_back({y * q / pH, pH});
        if (pL > 0) atoms.push_back({y * (1 - q) / pL, pL});
        t[y] = DiscreteMeasure(std::move(atoms));
    }
    return Kernel(std::move(t));
}

struct BlackwellCheck {
    bool preserving = true;
    // first violating triple y' < y < y'' when not preserving
    std::optional<std::array<Rat, 3>> counterexample;
    explicit operator bool() const { return preserving; }
};

/// Binary-support criterion for Blackwell preservation, restricted to the given
/// support: for every triple y' < y < y'' in the support, the pushforward of δ_y must
/// be a Blackwell lower bound of the pushforward of the mean-y mixture of y', y''.
/// No claim is made off the support.
inline BlackwellCheck is_blackwell_preserving(const Kernel& sigma,
                                              const std::vector<Rat>& support) {
    std::vector<Rat> s(support);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    BlackwellCheck res;
    for (std::size_t b = 1; b + 1 < s.size(); ++b) {
        for (std::size_t a = 0; a < b; ++a) {
            for (std::size_t c = b + 1; c < s.size(); ++c) {
                const Rat &lo = s[a], &mid = s[b], &hi = s[c];
                Rat alpha = (hi - mid) / (hi - lo);
                DiscreteMeasure mix({{lo, alpha}, {hi, 1 - alpha}});
                if (!blackwell_leq(pushforward(sigma, DiscreteMeasure::dirac(mid)),
                                   pushforward(sigma, mix))) {
                    res.preserving = false;
                    res.counterexample = {lo, mid, hi};
                    return res;
                }
            }
        }
    }
    return res;
}

/// True iff all interior support indices share parity. Endpoint indices count as both
/// parities, so a measure touching an endpoint is compatible with either class.
inline bool parity_class(const Grid& g, const DiscreteMeasure& mu) {
    bool sawEven = false, sawOdd = false;
    for (const auto& a : mu.atoms()) {
        auto pos = g.position_of(a.point);
        if (!pos) throw OffGridSupportError(to_string(a.point));
        if (*pos == 0 || *pos + 1 == g.size()) continue;
        (*pos % 2 == 0 ? sawEven : sawOdd) = true;
    }
    return !(sawEven && sawOdd);
}

} // namespace persuade
