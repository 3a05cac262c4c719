#include "doctest.h"

#include "smlab/lp.hpp"

#include <random>

using namespace smlab;

TEST_CASE("one variable box") {
    RationalLP lp;
    lp.sense = LpSense::maximize;
    lp.objective = {Rat(1)};
    lp.rows.push_back({{Rat(1)}, LpRel::le, Rat(3)});
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.value == Rat(3));
    CHECK(sol.x[0] == Rat(3));
    CHECK(sol.row_dual[0] == Rat(1));
}

TEST_CASE("two variable simplex") {
    RationalLP lp;
    lp.sense = LpSense::maximize;
    lp.objective = {Rat(1), Rat(1)};
    lp.rows.push_back({{Rat(1), Rat(1)}, LpRel::le, Rat(1)});
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.value == Rat(1));
    CHECK(sol.x[0] + sol.x[1] == Rat(1));
}

TEST_CASE("infeasible") {
    RationalLP lp;
    lp.sense = LpSense::maximize;
    lp.objective = {Rat(1)};
    lp.rows.push_back({{Rat(1)}, LpRel::le, Rat(-1)});
    auto sol = solve_lp(lp);
    CHECK(sol.status == LpStatus::infeasible);
}

TEST_CASE("unbounded") {
    RationalLP lp;
    lp.sense = LpSense::maximize;
    lp.objective = {Rat(1)};
    lp.rows.push_back({{Rat(-1)}, LpRel::le, Rat(1)});
    auto sol = solve_lp(lp);
    CHECK(sol.status == LpStatus::unbounded);
}

TEST_CASE("equality rows and minimization") {
    // min x + 2y st x + y = 2, x - y >= 0
    RationalLP lp;
    lp.sense = LpSense::minimize;
    lp.objective = {Rat(1), Rat(2)};
    lp.rows.push_back({{Rat(1), Rat(1)}, LpRel::eq, Rat(2)});
    lp.rows.push_back({{Rat(1), Rat(-1)}, LpRel::ge, Rat(0)});
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.value == Rat(2));
    CHECK(sol.x[0] == Rat(2));
    CHECK(sol.x[1] == Rat(0));
}

TEST_CASE("lower bounds shift") {
    // max -x st x >= 2 encoded via lower bound
    RationalLP lp;
    lp.sense = LpSense::maximize;
    lp.objective = {Rat(-1)};
    lp.rows.push_back({{Rat(1)}, LpRel::le, Rat(10)});
    lp.lower_bounds = {Rat(2)};
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.value == Rat(-2));
    CHECK(sol.x[0] == Rat(2));
}

TEST_CASE("degenerate pivoting terminates") {
    // classic cycling-prone instance; Bland's rule must terminate
    RationalLP lp;
    lp.sense = LpSense::minimize;
    lp.objective = {Rat(-3, 4), Rat(150), Rat(-1, 50), Rat(6)};
    lp.rows.push_back({{Rat(1, 4), Rat(-60), Rat(-1, 25), Rat(9)}, LpRel::le, Rat(0)});
    lp.rows.push_back({{Rat(1, 2), Rat(-90), Rat(-1, 50), Rat(3)}, LpRel::le, Rat(0)});
    lp.rows.push_back({{Rat(0), Rat(0), Rat(1), Rat(0)}, LpRel::le, Rat(1)});
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.value == Rat(-1, 20));
}

TEST_CASE("duals certify optimality on random instances") {
    // max c·x st Ax <= b, x >= 0 with b >= 0: check y >= 0, y·b == value, yA >= c
    std::mt19937_64 rng(17);
    int solved = 0;
    for (int it = 0; it < 200; ++it) {
        int n = 1 + (int)(rng() % 4);
        int m = 1 + (int)(rng() % 4);
        RationalLP lp;
        lp.sense = LpSense::maximize;
        for (int j = 0; j < n; ++j) lp.objective.emplace_back((int)(rng() % 7) - 3);
        for (int i = 0; i < m; ++i) {
            LpRow row;
            for (int j = 0; j < n; ++j) row.coef.emplace_back((int)(rng() % 9) - 2);
            row.rel = LpRel::le;
            row.rhs = Rat((int)(rng() % 10));
            lp.rows.push_back(std::move(row));
        }
        auto sol = solve_lp(lp);
        if (sol.status != LpStatus::optimal) continue;
        ++solved;
        // primal feasibility
        for (int i = 0; i < m; ++i) {
            Rat lhs = 0;
            for (int j = 0; j < n; ++j) lhs += lp.rows[i].coef[j] * sol.x[j];
            CHECK(lhs <= lp.rows[i].rhs);
        }
        Rat primal = 0;
        for (int j = 0; j < n; ++j) primal += lp.objective[j] * sol.x[j];
        CHECK(primal == sol.value);
        // dual feasibility and strong duality
        Rat dual_val = 0;
        for (int i = 0; i < m; ++i) {
            CHECK(sol.row_dual[i] >= 0);
            dual_val += sol.row_dual[i] * lp.rows[i].rhs;
        }
        CHECK(dual_val == sol.value);
        for (int j = 0; j < n; ++j) {
            Rat col = 0;
            for (int i = 0; i < m; ++i) col += sol.row_dual[i] * lp.rows[i].coef[j];
            CHECK(col >= lp.objective[j]);
        }
    }
    CHECK(solved > 50);
}

TEST_CASE("duals on ge rows of a minimization") {
    // min c·x st Ax >= b, x >= 0: duals y >= 0 with y·b == value and yA <= c
    std::mt19937_64 rng(29);
    int solved = 0;
    for (int it = 0; it < 200; ++it) {
        int n = 1 + (int)(rng() % 4);
        int m = 1 + (int)(rng() % 4);
        RationalLP lp;
        lp.sense = LpSense::minimize;
        for (int j = 0; j < n; ++j) lp.objective.emplace_back(1 + (int)(rng() % 7));
        for (int i = 0; i < m; ++i) {
            LpRow row;
            for (int j = 0; j < n; ++j) row.coef.emplace_back((int)(rng() % 5));
            row.rel = LpRel::ge;
            row.rhs = Rat((int)(rng() % 6));
            lp.rows.push_back(std::move(row));
        }
        auto sol = solve_lp(lp);
        if (sol.status != LpStatus::optimal) continue;
        ++solved;
        Rat dual_val = 0;
        for (int i = 0; i < m; ++i) {
            CHECK(sol.row_dual[i] >= 0);
            dual_val += sol.row_dual[i] * lp.rows[i].rhs;
        }
        CHECK(dual_val == sol.value);
        for (int j = 0; j < n; ++j) {
            Rat col = 0;
            for (int i = 0; i < m; ++i) col += sol.row_dual[i] * lp.rows[i].coef[j];
            CHECK(col <= lp.objective[j]);
        }
    }
    CHECK(solved > 50);
}

TEST_CASE("mixed-row optimality certificates") {
    // max problems with le, ge and eq rows together: verify a full
    // optimality certificate (primal feasible, y*b = value, and the dual
    // prices dominate the objective on every column)
    std::mt19937_64 rng(31);
    int solved = 0;
    for (int it = 0; it < 300; ++it) {
        int n = 1 + (int)(rng() % 4);
        int m = 2 + (int)(rng() % 4);
        RationalLP lp;
        lp.sense = LpSense::maximize;
        for (int j = 0; j < n; ++j) lp.objective.emplace_back((int)(rng() % 7) - 3);
        for (int i = 0; i < m; ++i) {
            LpRow row;
            for (int j = 0; j < n; ++j) row.coef.emplace_back((int)(rng() % 7) - 2);
            int kind = (int)(rng() % 3);
            row.rel = kind == 0 ? LpRel::le : (kind == 1 ? LpRel::ge : LpRel::eq);
            row.rhs = Rat((int)(rng() % 7) - 2);
            lp.rows.push_back(std::move(row));
        }
        auto sol = solve_lp(lp);
        if (sol.status != LpStatus::optimal) continue;
        ++solved;
        Rat primal = 0;
        for (int j = 0; j < n; ++j) {
            CHECK(sol.x[j] >= 0);
            primal += lp.objective[j] * sol.x[j];
        }
        CHECK(primal == sol.value);
        Rat dual_val = 0;
        for (int i = 0; i < m; ++i) {
            Rat lhs = 0;
            for (int j = 0; j < n; ++j) lhs += lp.rows[i].coef[j] * sol.x[j];
            if (lp.rows[i].rel == LpRel::le) {
                CHECK(lhs <= lp.rows[i].rhs);
                CHECK(sol.row_dual[i] >= 0);
            } else if (lp.rows[i].rel == LpRel::ge) {
                CHECK(lhs >= lp.rows[i].rhs);
                CHECK(sol.row_dual[i] <= 0);
            } else {
                CHECK(lhs == lp.rows[i].rhs);
            }
            dual_val += sol.row_dual[i] * lp.rows[i].rhs;
        }
        CHECK(dual_val == sol.value);
        for (int j = 0; j < n; ++j) {
            Rat priced = 0;
            for (int i = 0; i < m; ++i) priced += sol.row_dual[i] * lp.rows[i].coef[j];
            CHECK(priced >= lp.objective[j]);
        }
    }
    CHECK(solved > 60);
}

TEST_CASE("malformed dimensions rejected") {
    RationalLP lp;
    lp.objective = {Rat(1), Rat(1)};
    lp.rows.push_back({{Rat(1)}, LpRel::le, Rat(1)});
    CHECK_THROWS(solve_lp(lp));
}
