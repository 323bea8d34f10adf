#include <doctest.h>

#include <functional>
#include <string>
#include <vector>

#include "formula_oracle.hpp"
#include "qp/presburger.hpp"

using namespace qp::presburger;
using qp::Error;
using qp::ParseError;

namespace {

Cell pt(long a) { return Cell::make_point(a); }

Cell stripe(std::optional<long> lo, std::optional<long> hi, long mod, long res) {
    std::optional<mpz_class> l, h;
    if (lo) l = *lo;
    if (hi) h = *hi;
    return Cell::make_stripe(l, h, mod, res);
}

std::vector<Cell> dec(const std::string& text) { return decompose(parse_formula(text)); }

// every formula here stays inside the oracle fragment
const std::vector<std::string> kCorpus = {
    "exists y. x = 2*y and 0 < x and x < 10",
    "x = x",
    "x = 3",
    "not (2 | x)",
    "exists y. x = 3*y and y > 1",
    "forall y. y < 0 or x <= 2*y or 5 < x",
    "x >= -3 and x <= 12 and (3 | x or 4 | x + 1)",
    "exists y. 2*y <= x and x <= 2*y + 1",
    "exists y. x = y * 6 or x = y * 10",
    "forall y. not (x = 2*y)",
    "exists y. x = 2*y and exists z. x = 3*z",
    "exists y. 5 | y + x and y > 0 and y < 10",
    "x = 2 or x = 3 and x = 3",
    "not (x < -7 or x > 7) and 2 | x",
    "exists y. x = 4*y + 1 and (y >= 0 or 3 | y)",
    "forall y. y > x or y - 1 < x",
    "x != 4 and 0 <= x and x <= 9",
};

}  // namespace

TEST_CASE("parse errors report position and code") {
    try {
        parse_formula("x + < 3");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.code() == "parse_error");
        CHECK(e.line() == 1);
        CHECK(e.col() == 5);
    }
    CHECK_THROWS_AS(parse_formula("x * y"), ParseError);       // literal-only multiplication
    CHECK_THROWS_AS(parse_formula("x | 3"), ParseError);       // modulus must be a literal
    CHECK_THROWS_AS(parse_formula("0 | x"), ParseError);       // and positive
    CHECK_THROWS_AS(parse_formula("exists . x = 1"), ParseError);
    CHECK_THROWS_AS(parse_formula("exists y x = 1"), ParseError);
    CHECK_THROWS_AS(parse_formula("(x < 3"), ParseError);
    CHECK_THROWS_AS(parse_formula("x = "), ParseError);
    CHECK_THROWS_AS(parse_formula("x ? 3"), ParseError);
    CHECK_THROWS_AS(parse_formula("x = 3 or"), ParseError);
    CHECK_THROWS_AS(parse_formula("X = 3"), ParseError);       // variables are lowercase

    try {
        parse_formula("x =\n  yy &");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.col() == 6);
    }
}

TEST_CASE("decompose matches the pinned small examples") {
    CHECK(dec("exists y. x = 2*y and 0 < x and x < 10") ==
          std::vector<Cell>{stripe(0, 10, 2, 0)});
    CHECK(dec("x = x") == std::vector<Cell>{stripe(std::nullopt, std::nullopt, 1, 0)});
    CHECK(dec("x = 3") == std::vector<Cell>{pt(3)});
    CHECK(dec("exists y. x = 2*y") == std::vector<Cell>{stripe(std::nullopt, std::nullopt, 2, 0)});
    CHECK(dec("x < 0 and x > 0").empty());
}

TEST_CASE("and binds tighter than or") {
    // x = 2 or (x = 3 and x = 3) is {2,3}; the other grouping would be {3}
    CHECK(dec("x = 2 or x = 3 and x = 3") == std::vector<Cell>{stripe(1, 4, 1, 0)});
}

TEST_CASE("binder scope extends maximally to the right") {
    // exists y. (y < x and x < y) is everywhere false; a narrow scope would
    // leave the second y free and decompose would reject two free variables.
    CHECK(dec("exists y. y < x and x < y").empty());
}

TEST_CASE("decompose needs exactly one syntactic free variable") {
    CHECK_THROWS_AS(dec("3 < 4"), Error);
    CHECK_THROWS_AS(dec("x + y > 0"), Error);
    try {
        dec("x < y");
        FAIL("expected rejection of two free variables");
    } catch (const Error& e) {
        CHECK(e.code() == "domain_violation");
    }
    // a bound variable does not count
    CHECK(dec("exists y. x = y + y") == std::vector<Cell>{stripe(std::nullopt, std::nullopt, 2, 0)});
}

TEST_CASE("cell membership agrees with direct formula evaluation") {
    for (const auto& text : kCorpus) {
        CAPTURE(text);
        FormulaPtr f = parse_formula(text);
        auto cells = decompose(f);
        for (long x = -250; x <= 250; ++x) {
            bool direct = qptest::oracle_member(f, "x", x);
            bool via_cells = cells_contain(cells, x);
            if (direct != via_cells) {
                CAPTURE(x);
                CHECK(direct == via_cells);
            }
        }
        for (long x : {-10000L, -9997L, 9998L, 10000L}) {
            CAPTURE(x);
            CHECK(qptest::oracle_member(f, "x", x) == cells_contain(cells, x));
        }
    }
}

TEST_CASE("emitted cells are disjoint and structurally canonical") {
    for (const auto& text : kCorpus) {
        CAPTURE(text);
        auto cells = dec(text);
        // pairwise disjoint: no integer in the window belongs to two cells
        for (long x = -400; x <= 400; ++x) {
            int hits = 0;
            for (const auto& c : cells)
                if (c.contains(x)) ++hits;
            CHECK(hits <= 1);
        }
        for (const auto& c : cells) {
            if (c.is_point) continue;
            CAPTURE(c.str());
            CHECK(c.mod >= 1);
            CHECK(c.res >= 0);
            CHECK(c.res < c.mod);
            // bounds sit exactly one lattice step outside the extreme members
            if (c.lo) {
                CHECK(mpz_congruent_p(c.lo->get_mpz_t(), c.res.get_mpz_t(), c.mod.get_mpz_t()));
                CHECK(c.contains(*c.lo + c.mod));
            }
            if (c.hi) {
                CHECK(mpz_congruent_p(c.hi->get_mpz_t(), c.res.get_mpz_t(), c.mod.get_mpz_t()));
                CHECK(c.contains(*c.hi - c.mod));
            }
            if (c.lo && c.hi) CHECK(*c.hi - *c.lo >= 3 * c.mod);  // at least two members
        }
    }
}

TEST_CASE("re-normalizing a decomposition is the identity") {
    for (const auto& text : kCorpus) {
        CAPTURE(text);
        auto cells = dec(text);
        CHECK(canonicalize_cells(cells) == cells);
    }
}

TEST_CASE("re-decomposing the defining formula of a decomposition is stable") {
    for (const auto& text : kCorpus) {
        CAPTURE(text);
        auto cells = dec(text);
        if (cells.empty()) continue;
        std::string built;
        for (const auto& c : cells) {
            std::string piece;
            if (c.is_point) {
                piece = "x = " + c.point.get_str();
            } else {
                piece = c.mod.get_str() + " | x - " + c.res.get_str();
                if (c.lo) piece += " and " + c.lo->get_str() + " < x";
                if (c.hi) piece += " and x < " + c.hi->get_str();
            }
            built += built.empty() ? "(" + piece + ")" : " or (" + piece + ")";
        }
        CAPTURE(built);
        CHECK(dec(built) == cells);
    }
}

TEST_CASE("canonicalize merges, re-points, and sorts hand-built unions") {
    // isolated points are kept as points, in sorted order
    std::vector<Cell> evens{pt(4), pt(8), pt(2), pt(6)};
    CHECK(canonicalize_cells(evens) == std::vector<Cell>{pt(2), pt(4), pt(6), pt(8)});

    // adjacent integers merge at modulus 1
    CHECK(canonicalize_cells({pt(3), pt(4)}) == std::vector<Cell>{stripe(2, 5, 1, 0)});

    // a lattice split into pieces is reassembled into the full line
    std::vector<Cell> pieces{stripe(3, std::nullopt, 3, 0), pt(3),
                             stripe(std::nullopt, 3, 3, 0)};
    CHECK(canonicalize_cells(pieces) == std::vector<Cell>{stripe(std::nullopt, std::nullopt, 3, 0)});

    // two interleaved full lattices compress to a coarser single stripe
    CHECK(dec("2 | x or not (2 | x + 2)") ==
          std::vector<Cell>{stripe(std::nullopt, std::nullopt, 1, 0)});

    // a degenerate one-member stripe becomes a point
    CHECK(canonicalize_cells({stripe(2, 8, 5, 0)}) == std::vector<Cell>{pt(5)});

    // overlapping stripes of the same class fuse
    CHECK(canonicalize_cells({stripe(0, 14, 2, 0), stripe(6, 20, 2, 0)}) ==
          std::vector<Cell>{stripe(0, 20, 2, 0)});

    // empty stripes vanish
    CHECK(canonicalize_cells({stripe(3, 4, 7, 2)}).empty());
}

TEST_CASE("quantifier elimination output stays quantifier free") {
    for (const auto& text : kCorpus) {
        FormulaPtr qf = eliminate_quantifiers(parse_formula(text));
        std::function<bool(const FormulaPtr&)> qfree = [&](const FormulaPtr& f) {
            switch (f->kind) {
                case Formula::Exists:
                case Formula::Forall:
                    return false;
                case Formula::Not:
                    return qfree(f->a);
                case Formula::And:
                case Formula::Or:
                    return qfree(f->a) && qfree(f->b);
                default:
                    return true;
            }
        };
        CHECK(qfree(qf));
    }
}

TEST_CASE("resource caps stop blowups with a stable code") {
    try {
        dec("1009 | x and 997 | x");
        FAIL("expected the modulus cap to trip");
    } catch (const Error& e) {
        CHECK(e.code() == "resource_cap");
    }
    try {
        dec("exists a. exists b. 97*a > x and 89*b > a and 83 | a + b + x");
        FAIL("expected the node cap to trip");
    } catch (const Error& e) {
        CHECK(e.code() == "resource_cap");
    }
    // coefficient sums with huge coprime moduli still fold cleanly: the set
    // is the gcd lattice, and elimination collapses the equality branches
    CHECK(dec("exists a. exists b. exists c. exists d. 30*a + 42*b + 66*c + 70*d = x") ==
          std::vector<Cell>{stripe(std::nullopt, std::nullopt, 2, 0)});
}

TEST_CASE("subgroup recognition on the pinned examples") {
    auto r6 = recognize_subgroup({stripe(std::nullopt, std::nullopt, 6, 0)});
    CHECK(r6.is_group);
    CHECK(r6.n == 6);

    auto r0 = recognize_subgroup({pt(0)});
    CHECK(r0.is_group);
    CHECK(r0.n == 0);

    auto bad = recognize_subgroup({stripe(0, std::nullopt, 2, 0)});
    CHECK_FALSE(bad.is_group);
    CHECK(bad.missing_zero);  // 0 is outside the open interval

    auto line = recognize_subgroup({stripe(std::nullopt, std::nullopt, 1, 0)});
    CHECK(line.is_group);
    CHECK(line.n == 1);
}

TEST_CASE("subgroup recognition accepts groups presented in pieces") {
    std::vector<Cell> pieces{stripe(3, std::nullopt, 3, 0), pt(3), pt(0),
                             stripe(std::nullopt, 0, 3, 0)};
    auto r = recognize_subgroup(pieces);
    CHECK(r.is_group);
    CHECK(r.n == 3);

    auto viaFormula = recognize_subgroup(dec("7 | x"));
    CHECK(viaFormula.is_group);
    CHECK(viaFormula.n == 7);
}

TEST_CASE("subgroup rejection produces a checkable witness") {
    std::vector<std::vector<Cell>> nonGroups = {
        {pt(0), pt(2), stripe(std::nullopt, std::nullopt, 4, 0)},   // 4Z plus {2}
        {pt(0), pt(5)},                                             // {0,5}
        {pt(0), stripe(0, std::nullopt, 3, 0)},                     // 0 and positive multiples
        {stripe(std::nullopt, std::nullopt, 4, 2), pt(0)},          // 0 and 4Z+2
        {stripe(-20, 20, 2, 0)},                                    // bounded window of evens
    };
    for (const auto& cells : nonGroups) {
        auto r = recognize_subgroup(cells);
        CHECK_FALSE(r.is_group);
        if (r.missing_zero) {
            CHECK_FALSE(cells_contain(cells, 0));
            continue;
        }
        REQUIRE(r.witness_pair.has_value());
        auto [u, v] = *r.witness_pair;
        CAPTURE(u.get_str());
        CAPTURE(v.get_str());
        CHECK(cells_contain(cells, u));
        CHECK(cells_contain(cells, v));
        CHECK_FALSE(cells_contain(cells, u - v));
    }
}

TEST_CASE("recognized groups really are closed under subtraction on a window") {
    std::vector<std::vector<Cell>> groups = {
        {stripe(std::nullopt, std::nullopt, 6, 0)},
        {stripe(std::nullopt, std::nullopt, 1, 0)},
        dec("5 | x"),
    };
    for (const auto& cells : groups) {
        auto r = recognize_subgroup(cells);
        REQUIRE(r.is_group);
        CHECK(cells_contain(cells, 0));
        std::vector<long> members;
        for (long x = -60; x <= 60; ++x)
            if (cells_contain(cells, x)) members.push_back(x);
        for (long u : members)
            for (long v : members) CHECK(cells_contain(cells, u - v));
        // and n generates: every member is a multiple of n
        for (long x : members)
            if (r.n != 0) CHECK(x % r.n.get_si() == 0);
    }
}
