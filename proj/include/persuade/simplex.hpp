#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "persuade/errors.hpp"
#include "persuade/rational.hpp"

namespace persuade {

/// maximize c·x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0
struct LinearProgram {
    std::size_t nvars = 0;
    std::vector<std::vector<Rat>> A_ub;
    std::vector<Rat> b_ub;
    std::vector<std::vector<Rat>> A_eq;
    std::vector<Rat> b_eq;
    std::vector<Rat> c;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Rat value;
    std::vector<Rat> x; // a basic optimal solution when status == Optimal
};

/// Dense exact-rational two-phase simplex. Entering rule is largest reduced cost,
/// falling back to Bland's rule after a degenerate streak so termination is guaranteed.
class Simplex {
public:
    explicit Simplex(const LinearProgram& lp, std::size_t maxPivots = 500000)
        : n_(lp.nvars), maxPivots_(maxPivots) {
        if (lp.c.size() != n_) throw DomainError("objective size mismatch");
        enum RowKind { LE, GE, EQ };
        struct Row {
            const std::vector<Rat>* a;
            Rat b;
            RowKind kind;
        };
        std::vector<Row> rows;
        std::vector<std::vector<Rat>> flipped; // storage for sign-normalized rows
        flipped.reserve(lp.A_ub.size() + lp.A_eq.size());
        auto addRow = [&](const std::vector<Rat>& a, const Rat& b, bool eq) {
            if (a.size() != n_) throw DomainError("constraint size mismatch");
            if (b >= 0) {
                rows.push_back({&a, b, eq ? EQ : LE});
            } else {
                flipped.emplace_back();
                auto& fa = flipped.back();
                fa.reserve(n_);
                for (const auto& v : a) fa.push_back(-v);
                rows.push_back({&fa, Rat(-b), eq ? EQ : GE});
            }
        };
        for (std::size_t i = 0; i < lp.A_ub.size(); ++i) addRow(lp.A_ub[i], lp.b_ub[i], false);
        for (std::size_t i = 0; i < lp.A_eq.size(); ++i) addRow(lp.A_eq[i], lp.b_eq[i], true);

        m_ = rows.size();
        std::size_t nSlack = 0, nArt = 0;
        for (auto& r : rows) {
            if (r.kind != EQ) ++nSlack;
            if (r.kind != LE) ++nArt;
        }
        slack0_ = n_;
        art0_ = n_ + nSlack;
        ncols_ = art0_ + nArt; // + RHS handled separately
        tab_.assign(m_ + 1, std::vector<Rat>(ncols_ + 1));
        basis_.assign(m_, 0);

        std::size_t si = 0, ai = 0;
        for (std::size_t i = 0; i < m_; ++i) {
            auto& t = tab_[i];
            for (std::size_t j = 0; j < n_; ++j) t[j] = (*rows[i].a)[j];
            t[ncols_] = rows[i].b;
            switch (rows[i].kind) {
            case LE:
                t[slack0_ + si] = 1;
                basis_[i] = slack0_ + si++;
                break;
            case GE:
                t[slack0_ + si] = -1;
                ++si;
                t[art0_ + ai] = 1;
                basis_[i] = art0_ + ai++;
                break;
            case EQ:
                t[art0_ + ai] = 1;
                basis_[i] = art0_ + ai++;
                break;
            }
        }
        c_ = lp.c;
        nArt_ = nArt;
    }

    LpSolution solve() {
        LpSolution sol;
        if (nArt_ > 0) {
            // phase 1: maximize -sum(artificials); objective row starts as the sum of
            // the rows with a basic artificial (reduced costs w.r.t. that basis).
            auto& obj = tab_[m_];
            for (auto& v : obj) v = 0;
            for (std::size_t i = 0; i < m_; ++i) {
                if (basis_[i] >= art0_) {
                    for (std::size_t j = 0; j <= ncols_; ++j)
                        if (tab_[i][j] != 0) obj[j] += tab_[i][j];
                }
            }
            for (std::size_t j = art0_; j < ncols_; ++j) obj[j] = 0;
            if (!run()) throw Error("simplex: phase 1 unbounded");
            if (tab_[m_][ncols_] != 0) {
                sol.status = LpStatus::Infeasible;
                return sol;
            }
            driveOutArtificials();
        }

        // phase 2 objective: reduced costs of the original objective w.r.t. current basis
        auto& obj = tab_[m_];
        for (auto& v : obj) v = 0;
        for (std::size_t j = 0; j < n_; ++j) obj[j] = c_[j];
        for (std::size_t i = 0; i < m_; ++i) {
            const Rat& cb = basis_[i] < n_ ? c_[basis_[i]] : zero_;
            if (cb != 0) {
                Rat f = cb;
                for (std::size_t j = 0; j <= ncols_; ++j)
                    if (tab_[i][j] != 0) obj[j] -= f * tab_[i][j];
            }
        }
        if (!run()) {
            sol.status = LpStatus::Unbounded;
            return sol;
        }
        sol.status = LpStatus::Optimal;
        sol.x.assign(n_, Rat(0));
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_) sol.x[basis_[i]] = tab_[i][ncols_];
        Rat v = 0;
        for (std::size_t j = 0; j < n_; ++j)
            if (sol.x[j] != 0) v += c_[j] * sol.x[j];
        sol.value = v;
        return sol;
    }

private:
    bool run() {
        std::size_t degenerateStreak = 0;
        for (std::size_t iter = 0; iter < maxPivots_; ++iter) {
            const bool bland = degenerateStreak > 40;
            std::size_t enter = ncols_;
            const auto& obj = tab_[m_];
            if (bland) {
                for (std::size_t j = 0; j < art0_; ++j)
                    if (obj[j] > 0) {
                        enter = j;
                        break;
                    }
            } else {
                const Rat* best = nullptr;
                for (std::size_t j = 0; j < art0_; ++j)
                    if (obj[j] > 0 && (!best || obj[j] > *best)) {
                        best = &obj[j];
                        enter = j;
                    }
            }
            if (enter == ncols_) return true; // optimal

            std::size_t leave = m_;
            Rat bestNum, bestDen;
            for (std::size_t i = 0; i < m_; ++i) {
                const Rat& a = tab_[i][enter];
                if (a > 0) {
                    const Rat& b = tab_[i][ncols_];
                    if (leave == m_) {
                        leave = i;
                        bestNum = b;
                        bestDen = a;
                    } else {
                        // compare b/a < bestNum/bestDen without forming quotients
                        int cmp = cmp_ratio(b, a, bestNum, bestDen);
                        if (cmp < 0 || (cmp == 0 && basis_[i] < basis_[leave])) {
                            leave = i;
                            bestNum = b;
                            bestDen = a;
                        }
                    }
                }
            }
            if (leave == m_) return false; // unbounded

            if (tab_[leave][ncols_] == 0)
                ++degenerateStreak;
            else
                degenerateStreak = 0;
            pivot(leave, enter);
        }
        throw Error("simplex: pivot cap exceeded");
    }

    static int cmp_ratio(const Rat& n1, const Rat& d1, const Rat& n2, const Rat& d2) {
        Rat lhs = n1 * d2, rhs = n2 * d1;
        return lhs < rhs ? -1 : (lhs == rhs ? 0 : 1);
    }

    void pivot(std::size_t r, std::size_t c) {
        auto& prow = tab_[r];
        Rat inv = prow[c];
        for (std::size_t j = 0; j <= ncols_; ++j)
            if (prow[j] != 0) prow[j] /= inv;
        Rat t;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == r) continue;
            auto& row = tab_[i];
            Rat f = row[c];
            if (f == 0) continue;
            for (std::size_t j = 0; j <= ncols_; ++j) {
                if (prow[j] != 0) {
                    t = f * prow[j];
                    row[j] -= t;
                }
            }
            row[c] = 0;
        }
        basis_[r] = c;
    }

    void driveOutArtificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] >= art0_) {
                std::size_t j = 0;
                for (; j < art0_; ++j)
                    if (tab_[i][j] != 0) break;
                if (j < art0_) pivot(i, j);
                // an all-zero row is a redundant constraint; its artificial stays basic at 0
            }
        }
    }

    std::size_t n_, m_ = 0, ncols_ = 0, slack0_ = 0, art0_ = 0, nArt_ = 0;
    std::size_t maxPivots_;
    std::vector<std::vector<Rat>> tab_;
    std::vector<std::size_t> basis_;
    std::vector<Rat> c_;
    Rat zero_;
};

inline LpSolution solve_lp(const LinearProgram& lp, std::size_t maxPivots = 500000) {
    return Simplex(lp, maxPivots).solve();
}

} // namespace persuade
