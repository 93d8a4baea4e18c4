#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "persuade/kernel.hpp"
#include "persuade/martingale.hpp"
#include "persuade/measure.hpp"
#include "persuade/policy.hpp"
#include "persuade/rational.hpp"
#include "persuade/solver.hpp"

namespace persuade::rnd {

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}

    int uniform(int lo, int hi) { // inclusive
        return std::uniform_int_distribution<int>(lo, hi)(eng);
    }
    bool flip() { return uniform(0, 1) == 1; }
};

/// Random rational in [lo, hi] with denominator at most maxDen.
inline Rat rational(Rng& rng, int maxDen, const Rat& lo = Rat(0), const Rat& hi = Rat(1)) {
    int den = rng.uniform(1, maxDen);
    // numerator range covering [lo*den, hi*den]
    Rat lod = lo * den, hid = hi * den;
    long nlo = static_cast<long>(std::ceil(to_double(lod) - 1e-9));
    long nhi = static_cast<long>(std::floor(to_double(hid) + 1e-9));
    while (rat(nlo, den) < lo) ++nlo;
    while (rat(nhi, den) > hi) --nhi;
    if (nlo > nhi) return lo;
    long num = nlo + rng.uniform(0, static_cast<int>(nhi - nlo));
    return rat(num, den);
}

inline DiscreteMeasure measure(Rng& rng, int minAtoms, int maxAtoms, int maxDen,
                               const Rat& lo = Rat(0), const Rat& hi = Rat(1)) {
    int n = rng.uniform(minAtoms, maxAtoms);
    std::set<Rat> pts;
    int guard = 0;
    while (static_cast<int>(pts.size()) < n && guard++ < 200)
        pts.insert(rational(rng, maxDen, lo, hi));
    std::vector<Atom> atoms;
    for (const auto& p : pts) atoms.push_back({p, rational(rng, maxDen, Rat(1, maxDen), Rat(1))});
    return DiscreteMeasure(std::move(atoms));
}

inline DiscreteMeasure probability_measure(Rng& rng, int minAtoms, int maxAtoms, int maxDen) {
    DiscreteMeasure m = measure(rng, minAtoms, maxAtoms, maxDen);
    return scale(m, Rat(1) / m.total_mass());
}

/// Random sub-measure (independent per-atom fractions with small denominators).
inline DiscreteMeasure submeasure(Rng& rng, const DiscreteMeasure& mu, int maxDen = 8) {
    std::vector<Atom> atoms;
    for (const auto& a : mu.atoms())
        atoms.push_back({a.point, a.weight * rational(rng, maxDen, Rat(0), Rat(1))});
    return DiscreteMeasure(std::move(atoms));
}

/// Random nonzero sub-measure with conditional mean exactly l, built by drawing random
/// fractions and repairing the mean with exact weight adjustments. Returns nullopt when
/// mu cannot support one (all mass on one side of l).
inline std::optional<DiscreteMeasure> submeasure_with_mean(Rng& rng, const DiscreteMeasure& mu,
                                                           const Rat& l, int tries = 30) {
    if (mu.empty() || mu.max_point() < l || mu.min_point() > l) return std::nullopt;
    for (int attempt = 0; attempt < tries; ++attempt) {
        std::vector<Atom> atoms;
        for (const auto& a : mu.atoms())
            atoms.push_back({a.point, a.weight * rational(rng, 6, Rat(0), Rat(1))});
        // gap = sum (x - l) s_x ; drive it to zero by moving weights within bounds
        auto gap = [&]() {
            Rat g = 0;
            for (const auto& a : atoms) g += (a.point - l) * a.weight;
            return g;
        };
        Rat g = gap();
        // g > 0: add mass below l or remove mass above l; g < 0 symmetric
        for (int pass = 0; pass < 2 && g != 0; ++pass) {
            for (std::size_t i = 0; i < atoms.size() && g != 0; ++i) {
                const Rat& x = atoms[i].point;
                Rat cap = mu.atoms()[i].weight;
                if (g > 0) {
                    if (x < l) { // add up to capacity
                        Rat need = g / (l - x);
                        Rat room = cap - atoms[i].weight;
                        Rat use = std::min(need, room);
                        atoms[i].weight += use;
                        g -= use * (l - x);
                    } else if (x > l && pass == 1) { // remove
                        Rat need = g / (x - l);
                        Rat use = std::min(need, atoms[i].weight);
                        atoms[i].weight -= use;
                        g -= use * (x - l);
                    }
                } else {
                    if (x > l) {
                        Rat need = (-g) / (x - l);
                        Rat room = cap - atoms[i].weight;
                        Rat use = std::min(need, room);
                        atoms[i].weight += use;
                        g += use * (x - l);
                    } else if (x < l && pass == 1) {
                        Rat need = (-g) / (l - x);
                        Rat use = std::min(need, atoms[i].weight);
                        atoms[i].weight -= use;
                        g += use * (l - x);
                    }
                }
            }
        }
        if (g != 0) continue;
        DiscreteMeasure nu{std::move(atoms)};
        if (nu.total_mass() > 0) return nu;
    }
    return std::nullopt;
}

/// Mean-preserving kernel over the given support: each point either stays put or
/// splits onto two random points around it with the exact mixing weights.
inline Kernel mps_kernel(Rng& rng, const std::vector<Rat>& support, int maxDen = 12) {
    std::map<Rat, DiscreteMeasure> t;
    for (const auto& x : support) {
        if (x == 0 || x == 1 || rng.uniform(0, 3) == 0) {
            t[x] = DiscreteMeasure::dirac(x);
            continue;
        }
        Rat lo = rational(rng, maxDen, Rat(0), x);
        Rat hi = rational(rng, maxDen, x, Rat(1));
        if (lo == hi) {
            t[x] = DiscreteMeasure::dirac(x);
            continue;
        }
        Rat a = (hi - x) / (hi - lo);
        t[x] = DiscreteMeasure({{lo, a}, {hi, 1 - a}});
    }
    return Kernel(std::move(t));
}

/// (lambda, mu) with lambda ⪯_B mu: mu is a random mean-preserving spread of lambda.
inline std::pair<DiscreteMeasure, DiscreteMeasure> blackwell_pair(Rng& rng, int maxDen = 10) {
    DiscreteMeasure lambda = measure(rng, 1, 4, maxDen);
    std::vector<Rat> sup;
    for (const auto& a : lambda.atoms()) sup.push_back(a.point);
    Kernel k = mps_kernel(rng, sup, maxDen);
    return {lambda, pushforward(k, lambda)};
}

/// (lambda, mu) with lambda ⪯_F mu: every atom moves weakly upward.
inline std::pair<DiscreteMeasure, DiscreteMeasure> fosd_pair(Rng& rng, int maxDen = 10) {
    DiscreteMeasure lambda = measure(rng, 1, 4, maxDen);
    std::vector<Atom> up;
    for (const auto& a : lambda.atoms())
        up.push_back({rational(rng, maxDen, a.point, Rat(1)), a.weight});
    return {lambda, DiscreteMeasure(std::move(up))};
}

/// (lambda, mu) with lambda ⪯_D mu by construction: an upward move, then a
/// mean-preserving spread, then extra slack mass added to mu.
inline std::pair<DiscreteMeasure, DiscreteMeasure> domination_pair(Rng& rng, int maxDen = 10) {
    auto [lambda, lifted] = fosd_pair(rng, maxDen);
    std::vector<Rat> sup;
    for (const auto& a : lifted.atoms()) sup.push_back(a.point);
    DiscreteMeasure spread = pushforward(mps_kernel(rng, sup, maxDen), lifted);
    DiscreteMeasure mu = rng.flip() ? add(spread, measure(rng, 0, 2, maxDen)) : spread;
    return {lambda, mu};
}

/// Random grid with 5..maxPts strictly increasing rational points and a threshold
/// placed strictly between two interior points.
inline Grid grid(Rng& rng, int maxPts = 10, int maxDen = 24) {
    int n = rng.uniform(5, maxPts);
    std::set<Rat> pts{Rat(0), Rat(1)};
    int guard = 0;
    while (static_cast<int>(pts.size()) < n && guard++ < 300)
        pts.insert(rational(rng, maxDen));
    std::vector<Rat> v(pts.begin(), pts.end());
    // threshold strictly above at least two points and at most the top point
    int i = rng.uniform(2, static_cast<int>(v.size()) - 1);
    Rat lo = v[static_cast<std::size_t>(i) - 1], hi = v[static_cast<std::size_t>(i)];
    Rat l = lo + (hi - lo) * rational(rng, 6, Rat(1, 6), Rat(1));
    return Grid(std::move(v), l);
}

/// Positive measure supported on one parity class of the grid (endpoints allowed).
inline DiscreteMeasure delta_star_measure(Rng& rng, const Grid& g, int maxDen = 8) {
    const auto& z = g.points();
    int parity = rng.uniform(0, 1);
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < z.size(); ++i) {
        bool endpoint = i == 0 || i + 1 == z.size();
        if (!endpoint && static_cast<int>(i % 2) != parity) continue;
        if (rng.uniform(0, 2) == 0) continue;
        atoms.push_back({z[i], rational(rng, maxDen, Rat(1, maxDen), Rat(1))});
    }
    if (atoms.empty()) atoms.push_back({z[g.index0()], Rat(1)});
    DiscreteMeasure m{std::move(atoms)};
    return scale(m, Rat(1) / m.total_mass());
}

struct RandomSpec {
    MartingaleSpec spec;
    Rat l;
    WeightSchedule weights;
};

inline WeightSchedule random_weights(Rng& rng, int T, int maxDen = 10) {
    std::vector<Rat> w;
    Rat cur = 1;
    for (int t = 0; t < T; ++t) {
        w.push_back(cur);
        cur = cur * rational(rng, maxDen, Rat(1, 4), Rat(1));
    }
    return WeightSchedule::explicit_weights(std::move(w));
}

/// Random Blackwell-preserving spec: a random walk on a random grid, or conditionally
/// independent binary signals with per-period precisions. T <= maxT, initial support
/// bounded by maxSupport.
inline RandomSpec blackwell_preserving_spec(Rng& rng, int maxT = 4, int maxSupport = 9) {
    int T = rng.uniform(1, maxT);
    if (rng.flip()) {
        Grid g = grid(rng, std::min(maxSupport, 9));
        Kernel k = random_walk_kernel(g);
        // initial measure on grid points
        std::vector<Atom> atoms;
        for (const auto& p : g.points())
            if (rng.uniform(0, 2) > 0) atoms.push_back({p, rational(rng, 8, Rat(1, 8), Rat(1))});
        if (atoms.empty()) atoms.push_back({g.points()[g.index0()], Rat(1)});
        DiscreteMeasure mu1{std::move(atoms)};
        mu1 = scale(mu1, Rat(1) / mu1.total_mass());
        return {MartingaleSpec(mu1, k, T), g.threshold(), random_weights(rng, T)};
    }
    DiscreteMeasure mu1 = probability_measure(rng, 1, std::min(4, maxSupport), 12);
    Rat l = rational(rng, 16, mu1.min_point(), Rat(1));
    if (l == 0) l = Rat(1, 2);
    std::vector<Kernel> kernels;
    std::set<Rat> cur;
    for (const auto& a : mu1.atoms()) cur.insert(a.point);
    for (int t = 1; t < T; ++t) {
        Rat q = rational(rng, 10, Rat(1, 2), Rat(1));
        std::vector<Rat> sup(cur.begin(), cur.end());
        Kernel k = binary_signal_kernel(q, sup);
        std::set<Rat> next;
        for (const auto& x : sup)
            for (const auto& b : k.at(x).atoms()) next.insert(b.point);
        kernels.push_back(std::move(k));
        cur = std::move(next);
    }
    return {MartingaleSpec(mu1, kernels, T), l, random_weights(rng, T)};
}

/// Random impatient-sender walk spec: epsilon-grid with the threshold on the grid
/// (so 1/D = 1/2), a single-parity initial measure, and delta <= 1/2.
inline RandomSpec impatient_walk_spec(Rng& rng, int maxT = 6) {
    int k = rng.uniform(6, 12);
    Rat eps(1, k);
    int m = rng.uniform(2, k - 1);
    Rat l = rat(m, k);
    Grid g = Grid::standard(eps, l);
    DiscreteMeasure mu1 = delta_star_measure(rng, g);
    int T = rng.uniform(2, maxT);
    Rat delta = rational(rng, 12, Rat(1, 12), Rat(1, 2));
    std::vector<Rat> w;
    for (int t = 1; t <= T; ++t) w.push_back(pow_rat(delta, static_cast<unsigned long>(t)));
    return {MartingaleSpec(mu1, random_walk_kernel(g), T), l,
            WeightSchedule::explicit_weights(std::move(w))};
}

} // namespace persuade::rnd
