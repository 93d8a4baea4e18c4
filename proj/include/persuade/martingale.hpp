#pragma once

#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "persuade/errors.hpp"
#include "persuade/kernel.hpp"
#include "persuade/measure.hpp"

namespace persuade {

/// Infinite horizon handled by truncation; `tol` bounds the certified value-interval
/// width of truncated evaluations.
struct TruncatedInfinite {
    Rat tol = parse_rational("1e-9");
};

using Horizon = std::variant<int, TruncatedInfinite>;

inline bool is_finite(const Horizon& h) { return std::holds_alternative<int>(h); }
inline int finite_horizon(const Horizon& h) { return std::get<int>(h); }

/// Initial measure, per-period (or stationary) kernels, and a horizon.
/// Kernels are finite tables over the reachable supports, which the spec precomputes.
class MartingaleSpec {
public:
    MartingaleSpec(DiscreteMeasure initial, std::vector<Kernel> perPeriod, Horizon horizon)
        : initial_(std::move(initial)), kernels_(std::move(perPeriod)),
          horizon_(horizon), stationary_(false) {
        validate();
    }

    MartingaleSpec(DiscreteMeasure initial, Kernel stationary, Horizon horizon)
        : initial_(std::move(initial)), kernels_{std::move(stationary)},
          horizon_(horizon), stationary_(true) {
        validate();
    }

    const DiscreteMeasure& initial() const { return initial_; }
    const Horizon& horizon() const { return horizon_; }
    bool stationary() const { return stationary_; }

    /// Kernel mapping period t to t+1 (1-based t, t in [1, T-1]).
    const Kernel& kernel(int t) const {
        if (stationary_) return kernels_.front();
        if (t < 1 || static_cast<std::size_t>(t) > kernels_.size())
            throw DomainError("no kernel for period " + std::to_string(t));
        return kernels_[static_cast<std::size_t>(t) - 1];
    }

    /// Support reachable at period t (1-based) when no mass is ever stopped.
    /// Stopping only removes mass, so every realizable support is contained in these.
    std::vector<Rat> reachable_support(int t) const {
        auto sets = reachable_supports(t);
        return sets.back();
    }

    /// Reachable supports for periods 1..t.
    std::vector<std::vector<Rat>> reachable_supports(int t) const {
        std::vector<std::vector<Rat>> out;
        std::set<Rat> cur;
        for (const auto& a : initial_.atoms()) cur.insert(a.point);
        out.emplace_back(cur.begin(), cur.end());
        for (int s = 2; s <= t; ++s) {
            std::set<Rat> next;
            const Kernel& k = kernel(s - 1);
            for (const auto& x : cur) {
                for (const auto& b : k.at(x).atoms()) next.insert(b.point);
            }
            cur = std::move(next);
            out.emplace_back(cur.begin(), cur.end());
        }
        return out;
    }

private:
    void validate() {
        if (initial_.empty()) throw ZeroMassError();
        int checkDepth;
        if (is_finite(horizon_)) {
            int T = finite_horizon(horizon_);
            if (T < 1) throw DomainError("horizon must be >= 1");
            if (!stationary_ && kernels_.size() + 1 < static_cast<std::size_t>(T))
                throw DomainError("need T-1 kernels for a horizon-T martingale");
            checkDepth = T;
        } else {
            if (!stationary_)
                throw DomainError("infinite horizon requires a stationary kernel");
            checkDepth = 0; // reachability is validated lazily during evaluation
        }
        // every reachable point needs a kernel entry
        std::set<Rat> cur;
        for (const auto& a : initial_.atoms()) cur.insert(a.point);
        for (int t = 1; t < checkDepth; ++t) {
            std::set<Rat> next;
            const Kernel& k = kernel(t);
            for (const auto& x : cur) {
                if (!k.covers(x)) throw MissingTransitionError(to_string(x));
                for (const auto& b : k.at(x).atoms()) next.insert(b.point);
            }
            cur = std::move(next);
        }
    }

    DiscreteMeasure initial_;
    std::vector<Kernel> kernels_;
    Horizon horizon_;
    bool stationary_;
};

} // namespace persuade
