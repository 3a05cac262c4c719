#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "smlab/rational.hpp"

namespace smlab {

enum class LpSense { minimize, maximize };
enum class LpRel { le, eq, ge };
enum class LpStatus { optimal, infeasible, unbounded };

struct LpRow {
    std::vector<Rat> coef;
    LpRel rel = LpRel::le;
    Rat rhs;
};

// dense exact-rational LP; variables have individual lower bounds (default 0)
// and no upper bounds
struct RationalLP {
    LpSense sense = LpSense::maximize;
    std::vector<Rat> objective;
    std::vector<LpRow> rows;
    std::vector<Rat> lower_bounds; // empty = all zero

    std::size_t n_vars() const { return objective.size(); }
};

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    Rat value;
    std::vector<Rat> x;
    // one multiplier per row; satisfies sum_i dual[i]*rhs[i] + sum_{shifted lb terms} = value
    std::vector<Rat> row_dual;
};

namespace detail {

// two-phase primal simplex with Bland's anti-cycling rule on a dense tableau
class SimplexTableau {
public:
    SimplexTableau(const RationalLP& lp) : lp_(lp) {
        n_ = lp.n_vars();
        m_ = lp.rows.size();
        for (const auto& r : lp.rows)
            if (r.coef.size() != n_) throw std::invalid_argument("solve_lp: row width mismatch");
        if (!lp.lower_bounds.empty() && lp.lower_bounds.size() != n_)
            throw std::invalid_argument("solve_lp: lower bound count mismatch");
        build();
    }

    LpSolution solve() {
        LpSolution sol;
        if (!phase1()) {
            sol.status = LpStatus::infeasible;
            return sol;
        }
        int verdict = phase2();
        if (verdict < 0) {
            sol.status = LpStatus::unbounded;
            return sol;
        }
        sol.status = LpStatus::optimal;
        std::vector<Rat> xhat(total_, Rat(0));
        for (std::size_t i = 0; i < m_; ++i) xhat[basis_[i]] = b_[i];
        sol.x.resize(n_);
        for (std::size_t j = 0; j < n_; ++j) sol.x[j] = xhat[j] + lb(j);
        Rat cx = 0;
        for (std::size_t j = 0; j < n_; ++j) cx += phase2_cost_[j] * (xhat[j] + lb(j));
        sol.value = lp_.sense == LpSense::maximize ? Rat(-cx) : cx;

        sol.row_dual.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            // reduced cost of the designated unit column gives the multiplier
            Rat red = cost_[unit_col_[i]];
            Rat y = -red; // unit columns have zero phase-2 cost
            y *= row_sign_[i];
            if (lp_.sense == LpSense::maximize) y = -y;
            sol.row_dual[i] = y;
        }
        return sol;
    }

private:
    const RationalLP& lp_;
    std::size_t n_ = 0, m_ = 0, total_ = 0;
    std::vector<std::vector<Rat>> a_; // m x total
    std::vector<Rat> b_;
    std::vector<Rat> cost_;        // reduced-cost row (current phase)
    std::vector<Rat> phase2_cost_; // original (internal min) costs per column
    Rat obj_;                      // current phase objective of the basic solution
    std::vector<int> basis_;
    std::vector<bool> artificial_;
    std::vector<int> unit_col_;  // per row: a column whose built coefficient is e_i
    std::vector<Rat> row_sign_;  // built row = sign * user row

    Rat lb(std::size_t j) const {
        return lp_.lower_bounds.empty() ? Rat(0) : lp_.lower_bounds[j];
    }

    void build() {
        // shift x = lb + xhat and normalize rhs signs
        std::vector<std::vector<Rat>> rows(m_, std::vector<Rat>(n_));
        std::vector<Rat> rhs(m_);
        std::vector<LpRel> rel(m_);
        row_sign_.assign(m_, Rat(1));
        for (std::size_t i = 0; i < m_; ++i) {
            const LpRow& r = lp_.rows[i];
            Rat shift = 0;
            for (std::size_t j = 0; j < n_; ++j) shift += r.coef[j] * lb(j);
            Rat rr = r.rhs - shift;
            LpRel re = r.rel;
            Rat sign = 1;
            if (rr < 0) {
                sign = -1;
                rr = -rr;
                if (re == LpRel::le) re = LpRel::ge;
                else if (re == LpRel::ge) re = LpRel::le;
            }
            row_sign_[i] = sign;
            rel[i] = re;
            rhs[i] = rr;
            for (std::size_t j = 0; j < n_; ++j) rows[i][j] = sign * r.coef[j];
        }

        std::size_t n_slack = 0, n_art = 0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (rel[i] != LpRel::eq) ++n_slack;
            if (rel[i] != LpRel::le) ++n_art;
        }
        total_ = n_ + n_slack + n_art;
        a_.assign(m_, std::vector<Rat>(total_, Rat(0)));
        b_ = rhs;
        basis_.assign(m_, -1);
        artificial_.assign(total_, false);
        unit_col_.assign(m_, -1);

        for (std::size_t i = 0; i < m_; ++i)
            for (std::size_t j = 0; j < n_; ++j) a_[i][j] = rows[i][j];

        std::size_t col = n_;
        for (std::size_t i = 0; i < m_; ++i) {
            if (rel[i] == LpRel::le) {
                a_[i][col] = 1;
                basis_[i] = (int)col;
                unit_col_[i] = (int)col;
                ++col;
            } else if (rel[i] == LpRel::ge) {
                a_[i][col] = -1; // surplus
                ++col;
            }
        }
        for (std::size_t i = 0; i < m_; ++i) {
            if (rel[i] != LpRel::le) {
                a_[i][col] = 1;
                basis_[i] = (int)col;
                unit_col_[i] = (int)col;
                artificial_[col] = true;
                ++col;
            }
        }

        phase2_cost_.assign(total_, Rat(0));
        for (std::size_t j = 0; j < n_; ++j)
            phase2_cost_[j] = lp_.sense == LpSense::maximize ? Rat(-lp_.objective[j])
                                                             : lp_.objective[j];
    }

    void load_costs(const std::vector<Rat>& c) {
        cost_ = c;
        obj_ = 0;
        for (std::size_t i = 0; i < m_; ++i) {
            int bi = basis_[i];
            if (c[bi] == 0) continue;
            for (std::size_t j = 0; j < total_; ++j) cost_[j] -= c[bi] * a_[i][j];
            obj_ += c[bi] * b_[i];
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        Rat piv = a_[row][col];
        for (std::size_t j = 0; j < total_; ++j) a_[row][j] /= piv;
        b_[row] /= piv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row || a_[i][col] == 0) continue;
            Rat f = a_[i][col];
            for (std::size_t j = 0; j < total_; ++j) a_[i][j] -= f * a_[row][j];
            b_[i] -= f * b_[row];
        }
        if (cost_[col] != 0) {
            Rat f = cost_[col];
            for (std::size_t j = 0; j < total_; ++j) cost_[j] -= f * a_[row][j];
            obj_ += f * b_[row];
        }
        basis_[row] = (int)col;
    }

    // Bland: entering = lowest eligible index, leaving = min ratio with lowest basis index
    // returns 0 at optimum, -1 when unbounded
    int iterate(bool allow_artificial) {
        for (;;) {
            std::size_t enter = total_;
            for (std::size_t j = 0; j < total_; ++j) {
                if (!allow_artificial && artificial_[j]) continue;
                if (cost_[j] < 0) { enter = j; break; }
            }
            if (enter == total_) return 0;
            std::size_t leave = m_;
            Rat best;
            for (std::size_t i = 0; i < m_; ++i) {
                if (a_[i][enter] <= 0) continue;
                Rat ratio = b_[i] / a_[i][enter];
                if (leave == m_ || ratio < best ||
                    (ratio == best && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == m_) return -1;
            pivot(leave, enter);
        }
    }

    bool phase1() {
        bool need = false;
        for (std::size_t j = 0; j < total_; ++j) need = need || artificial_[j];
        if (!need) return true;
        std::vector<Rat> c(total_, Rat(0));
        for (std::size_t j = 0; j < total_; ++j)
            if (artificial_[j]) c[j] = 1;
        load_costs(c);
        iterate(true);
        if (obj_ != 0) return false;
        // drive remaining artificials out of the basis where possible
        for (std::size_t i = 0; i < m_; ++i) {
            if (!artificial_[basis_[i]]) continue;
            std::size_t enter = total_;
            for (std::size_t j = 0; j < total_; ++j)
                if (!artificial_[j] && a_[i][j] != 0) { enter = j; break; }
            if (enter < total_) pivot(i, enter);
            // else: redundant row, the artificial stays basic at level zero
        }
        return true;
    }

    int phase2() {
        load_costs(phase2_cost_);
        return iterate(false);
    }
};

} // namespace detail

// exact optimum, solution vector and row multipliers
inline LpSolution solve_lp(const RationalLP& lp) {
    detail::SimplexTableau t(lp);
    return t.solve();
}

} // namespace smlab
