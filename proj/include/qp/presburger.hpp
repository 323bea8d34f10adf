#pragma once
#include <gmpxx.h>

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qp/error.hpp"

namespace qp::presburger {

// Linear term over integer variables: sum of coeff * var plus a constant.
struct Term {
    std::map<std::string, mpz_class> coeffs;  // zero coefficients are dropped
    mpz_class constant = 0;

    static Term constant_term(mpz_class c);
    static Term variable(const std::string& v);

    Term operator+(const Term& o) const;
    Term operator-(const Term& o) const;
    Term operator-() const;
    Term scaled(const mpz_class& k) const;

    mpz_class coeff(const std::string& v) const;
    bool is_constant() const { return coeffs.empty(); }
    Term without(const std::string& v) const;  // drop v's coefficient
    Term substituted(const std::string& v, const Term& by) const;
    std::string str() const;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Negation-normal construction folds constants: And/Or absorb True/False,
// Dvd with modulus 1 is True, atoms on constant terms evaluate immediately.
// Every constructor enforces the node cap and throws "resource_cap" past it.
struct Formula {
    enum Kind { True, False, Leq0, Dvd, NotDvd, Not, And, Or, Exists, Forall };

    Kind kind;
    Term t;           // Leq0: t <= 0; Dvd/NotDvd: n | t (or not)
    mpz_class n;      // Dvd/NotDvd modulus, >= 1
    FormulaPtr a, b;  // Not/Exists/Forall use a; And/Or use a, b
    std::string var;  // Exists/Forall binder
    size_t size = 1;  // nodes in the subtree (shared nodes counted per use)

    // Variables mentioned free in the source text, filled by the parser on the
    // root node. Folding can erase a variable from the tree ("x = x" collapses
    // to a truth constant) while the formula still has it free syntactically.
    std::set<std::string> mentioned_free;
};

inline constexpr size_t kNodeCap = 1000000;

FormulaPtr f_true();
FormulaPtr f_false();
FormulaPtr f_leq0(Term t);
FormulaPtr f_dvd(mpz_class n, Term t);
FormulaPtr f_notdvd(mpz_class n, Term t);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_exists(std::string var, FormulaPtr body);
FormulaPtr f_forall(std::string var, FormulaPtr body);

std::set<std::string> free_vars(const FormulaPtr& f);

// Text grammar: atoms are comparisons (= != < <= > >=) between linear terms
// or divisibilities "n | term"; connectives not/and/or (tightest first),
// binders "exists v. body" / "forall v. body" extend maximally right.
// Multiplication is only by integer literals.
FormulaPtr parse_formula(const std::string& text);

// Quantifier elimination (Cooper). Returns an equivalent quantifier-free
// formula over the same free variables.
FormulaPtr eliminate_quantifiers(const FormulaPtr& f);

// One-variable definable set, normalized: an isolated integer, or the open
// interval (lo, hi) intersected with a congruence class res mod m. Stripes
// hold at least two points; bounds sit one lattice step outside the extreme
// members (so the stripe for {2,4,6,8} is (0,10) with mod 2, res 0).
struct Cell {
    bool is_point = false;
    mpz_class point;

    std::optional<mpz_class> lo, hi;  // absent = unbounded on that side
    mpz_class mod = 1;
    mpz_class res = 0;

    static Cell make_point(mpz_class a);
    static Cell make_stripe(std::optional<mpz_class> lo, std::optional<mpz_class> hi,
                            mpz_class mod, mpz_class res);

    bool contains(const mpz_class& x) const;
    bool operator==(const Cell& o) const;
    std::string str() const;
};

bool cells_contain(const std::vector<Cell>& cells, const mpz_class& x);

// Disjoint canonical cell list for the set defined by f over its single free
// variable. Canonical: per-class merging at the lcm of the moduli, full lines
// compressed to their minimal period, singleton runs as points, fixed sort.
std::vector<Cell> decompose(const FormulaPtr& f);

// The same normalization applied to an arbitrary finite union of cells.
std::vector<Cell> canonicalize_cells(const std::vector<Cell>& cells);

struct SubgroupResult {
    bool is_group = false;
    mpz_class n;  // union = nZ when is_group; n = 0 encodes {0}
    bool missing_zero = false;
    // u, v in the union with u - v outside it, when not a group and 0 is present.
    std::optional<std::pair<mpz_class, mpz_class>> witness_pair;
};

// Decides whether the union of the cells is a subgroup of (Z, +).
SubgroupResult recognize_subgroup(const std::vector<Cell>& cells);

} // namespace qp::presburger
