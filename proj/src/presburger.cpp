#include "qp/presburger.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace qp::presburger {

// ---------------------------------------------------------------- terms

Term Term::constant_term(mpz_class c) {
    Term t;
    t.constant = std::move(c);
    return t;
}

Term Term::variable(const std::string& v) {
    Term t;
    t.coeffs[v] = 1;
    return t;
}

static void put(std::map<std::string, mpz_class>& m, const std::string& v, const mpz_class& c) {
    if (c == 0)
        m.erase(v);
    else
        m[v] = c;
}

Term Term::operator+(const Term& o) const {
    Term r = *this;
    r.constant += o.constant;
    for (const auto& [v, c] : o.coeffs) put(r.coeffs, v, coeff(v) + c);
    return r;
}

Term Term::operator-(const Term& o) const { return *this + (-o); }

Term Term::operator-() const { return scaled(-1); }

Term Term::scaled(const mpz_class& k) const {
    Term r;
    if (k == 0) return r;
    r.constant = constant * k;
    for (const auto& [v, c] : coeffs) r.coeffs[v] = c * k;
    return r;
}

mpz_class Term::coeff(const std::string& v) const {
    auto it = coeffs.find(v);
    return it == coeffs.end() ? mpz_class(0) : it->second;
}

Term Term::without(const std::string& v) const {
    Term r = *this;
    r.coeffs.erase(v);
    return r;
}

Term Term::substituted(const std::string& v, const Term& by) const {
    mpz_class c = coeff(v);
    if (c == 0) return *this;
    return without(v) + by.scaled(c);
}

std::string Term::str() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& [v, c] : coeffs) {
        if (!first) out << " + ";
        first = false;
        if (c == 1)
            out << v;
        else
            out << c.get_str() << "*" << v;
    }
    if (first)
        out << constant.get_str();
    else if (constant != 0)
        out << " + " << constant.get_str();
    return out.str();
}

// ---------------------------------------------------------------- formulas

namespace {

FormulaPtr node(Formula f) {
    if (f.size > kNodeCap)
        throw Error("resource_cap", "intermediate formula reached " + std::to_string(f.size) +
                                        " nodes (cap " + std::to_string(kNodeCap) + ")");
    return std::make_shared<const Formula>(std::move(f));
}

FormulaPtr leaf(Formula::Kind k) {
    Formula f;
    f.kind = k;
    return node(std::move(f));
}

const FormulaPtr& true_node() {
    static FormulaPtr t = leaf(Formula::True);
    return t;
}

const FormulaPtr& false_node() {
    static FormulaPtr t = leaf(Formula::False);
    return t;
}

}  // namespace

FormulaPtr f_true() { return true_node(); }
FormulaPtr f_false() { return false_node(); }

FormulaPtr f_leq0(Term t) {
    if (t.is_constant()) return t.constant <= 0 ? f_true() : f_false();
    Formula f;
    f.kind = Formula::Leq0;
    f.t = std::move(t);
    return node(std::move(f));
}

FormulaPtr f_dvd(mpz_class n, Term t) {
    n = abs(n);
    if (n == 0) throw Error("domain_violation", "divisibility modulus must be nonzero");
    if (n == 1) return f_true();
    if (t.is_constant())
        return mpz_divisible_p(t.constant.get_mpz_t(), n.get_mpz_t()) ? f_true() : f_false();
    Formula f;
    f.kind = Formula::Dvd;
    f.t = std::move(t);
    f.n = std::move(n);
    return node(std::move(f));
}

FormulaPtr f_notdvd(mpz_class n, Term t) {
    n = abs(n);
    if (n == 0) throw Error("domain_violation", "divisibility modulus must be nonzero");
    if (n == 1) return f_false();
    if (t.is_constant())
        return mpz_divisible_p(t.constant.get_mpz_t(), n.get_mpz_t()) ? f_false() : f_true();
    Formula f;
    f.kind = Formula::NotDvd;
    f.t = std::move(t);
    f.n = std::move(n);
    return node(std::move(f));
}

FormulaPtr f_not(FormulaPtr a) {
    if (a->kind == Formula::True) return f_false();
    if (a->kind == Formula::False) return f_true();
    if (a->kind == Formula::Not) return a->a;
    Formula f;
    f.kind = Formula::Not;
    f.size = 1 + a->size;
    f.a = std::move(a);
    return node(std::move(f));
}

FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
    if (a->kind == Formula::False || b->kind == Formula::True) return a;
    if (b->kind == Formula::False || a->kind == Formula::True) return b;
    Formula f;
    f.kind = Formula::And;
    f.size = 1 + a->size + b->size;
    f.a = std::move(a);
    f.b = std::move(b);
    return node(std::move(f));
}

FormulaPtr f_or(FormulaPtr a, FormulaPtr b) {
    if (a->kind == Formula::True || b->kind == Formula::False) return a;
    if (b->kind == Formula::True || a->kind == Formula::False) return b;
    Formula f;
    f.kind = Formula::Or;
    f.size = 1 + a->size + b->size;
    f.a = std::move(a);
    f.b = std::move(b);
    return node(std::move(f));
}

FormulaPtr f_exists(std::string var, FormulaPtr body) {
    if (body->kind == Formula::True || body->kind == Formula::False) return body;
    Formula f;
    f.kind = Formula::Exists;
    f.size = 1 + body->size;
    f.var = std::move(var);
    f.a = std::move(body);
    return node(std::move(f));
}

FormulaPtr f_forall(std::string var, FormulaPtr body) {
    if (body->kind == Formula::True || body->kind == Formula::False) return body;
    Formula f;
    f.kind = Formula::Forall;
    f.size = 1 + body->size;
    f.var = std::move(var);
    f.a = std::move(body);
    return node(std::move(f));
}

static void free_vars_into(const FormulaPtr& f, std::set<std::string>& out,
                           std::set<std::string>& bound) {
    switch (f->kind) {
        case Formula::True:
        case Formula::False:
            return;
        case Formula::Leq0:
        case Formula::Dvd:
        case Formula::NotDvd:
            for (const auto& [v, c] : f->t.coeffs)
                if (!bound.count(v)) out.insert(v);
            return;
        case Formula::Not:
            free_vars_into(f->a, out, bound);
            return;
        case Formula::And:
        case Formula::Or:
            free_vars_into(f->a, out, bound);
            free_vars_into(f->b, out, bound);
            return;
        case Formula::Exists:
        case Formula::Forall: {
            bool fresh = bound.insert(f->var).second;
            free_vars_into(f->a, out, bound);
            if (fresh) bound.erase(f->var);
            return;
        }
    }
}

std::set<std::string> free_vars(const FormulaPtr& f) {
    std::set<std::string> out, bound;
    free_vars_into(f, out, bound);
    return out;
}

// ---------------------------------------------------------------- parser

namespace {

enum class TK { Int, Ident, Keyword, Sym, End };

struct PTok {
    TK kind;
    mpz_class num;
    std::string text;  // ident/keyword/symbol spelling
    int line, col;
};

const std::set<std::string> kKeywords = {"and", "or", "not", "exists", "forall"};

std::vector<PTok> lex(const std::string& s) {
    std::vector<PTok> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto bump = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (s[i + k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        i += n;
    };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            bump(1);
            continue;
        }
        int tl = line, tc = col;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({TK::Int, mpz_class(s.substr(i, j - i)), "", tl, tc});
            bump(j - i);
            continue;
        }
        if (c >= 'a' && c <= 'z') {
            size_t j = i;
            while (j < s.size() && (std::islower(static_cast<unsigned char>(s[j])) ||
                                    std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            std::string w = s.substr(i, j - i);
            out.push_back({kKeywords.count(w) ? TK::Keyword : TK::Ident, 0, w, tl, tc});
            bump(j - i);
            continue;
        }
        if (s.compare(i, 2, "!=") == 0 || s.compare(i, 2, "<=") == 0 || s.compare(i, 2, ">=") == 0) {
            out.push_back({TK::Sym, 0, s.substr(i, 2), tl, tc});
            bump(2);
            continue;
        }
        if (std::string("()+-*|=<>.").find(c) != std::string::npos) {
            out.push_back({TK::Sym, 0, std::string(1, c), tl, tc});
            bump(1);
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back({TK::End, 0, "", line, col});
    return out;
}

struct FormulaParser {
    const std::vector<PTok>& ts;
    size_t pos = 0;
    std::vector<std::string> binders{};
    std::set<std::string> mentioned{};

    void note_var(const std::string& v) {
        if (std::count(binders.begin(), binders.end(), v) == 0) mentioned.insert(v);
    }

    const PTok& peek(size_t ahead = 0) const { return ts[std::min(pos + ahead, ts.size() - 1)]; }
    bool at_sym(const std::string& s, size_t ahead = 0) const {
        return peek(ahead).kind == TK::Sym && peek(ahead).text == s;
    }
    bool at_kw(const std::string& s) const {
        return peek().kind == TK::Keyword && peek().text == s;
    }
    const PTok& next() { return ts[pos < ts.size() - 1 ? pos++ : pos]; }
    [[noreturn]] void fail(const std::string& what, size_t at) const {
        const PTok& t = ts[std::min(at, ts.size() - 1)];
        throw ParseError(what, t.line, t.col);
    }
    [[noreturn]] void fail_here(const std::string& what) const { fail(what, pos); }

    // ---- terms

    Term term_atom() {
        if (peek().kind == TK::Int) return Term::constant_term(next().num);
        if (peek().kind == TK::Ident) {
            note_var(peek().text);
            return Term::variable(next().text);
        }
        if (at_sym("-")) {
            next();
            return -term_atom();
        }
        if (at_sym("(")) {
            next();
            Term t = term();
            if (!at_sym(")")) fail_here("expected ')' in term");
            next();
            return t;
        }
        fail_here("expected a term");
    }

    Term term_mul() {
        Term t = term_atom();
        while (at_sym("*")) {
            size_t star = pos;
            next();
            Term u = term_atom();
            if (t.is_constant())
                t = u.scaled(t.constant);
            else if (u.is_constant())
                t = t.scaled(u.constant);
            else
                fail("multiplication is only allowed by integer literals", star);
        }
        return t;
    }

    Term term() {
        Term t = term_mul();
        while (at_sym("+") || at_sym("-")) {
            bool minus = peek().text == "-";
            next();
            Term u = term_mul();
            t = minus ? t - u : t + u;
        }
        return t;
    }

    // ---- formulas

    FormulaPtr atom() {
        size_t start = pos;
        Term lhs = term();
        if (at_sym("|")) {
            if (!lhs.is_constant() || lhs.constant < 1)
                fail("divisibility modulus must be a positive integer literal", start);
            next();
            return f_dvd(lhs.constant, term());
        }
        if (peek().kind != TK::Sym) fail_here("expected a comparison operator");
        std::string op = peek().text;
        if (op != "=" && op != "!=" && op != "<" && op != "<=" && op != ">" && op != ">=")
            fail_here("expected a comparison operator");
        next();
        Term rhs = term();
        Term d = lhs - rhs;
        if (op == "=") return f_and(f_leq0(d), f_leq0(-d));
        if (op == "!=")
            return f_or(f_leq0(d + Term::constant_term(1)), f_leq0(-d + Term::constant_term(1)));
        if (op == "<") return f_leq0(d + Term::constant_term(1));
        if (op == "<=") return f_leq0(d);
        if (op == ">") return f_leq0(-d + Term::constant_term(1));
        return f_leq0(-d);  // >=
    }

    // A '(' opens a term exactly when the matching ')' is followed by an
    // operator that continues a term or starts a comparison.
    bool paren_opens_term() const {
        size_t k = pos, depth = 0;
        while (ts[k].kind != TK::End) {
            if (ts[k].kind == TK::Sym && ts[k].text == "(") ++depth;
            if (ts[k].kind == TK::Sym && ts[k].text == ")") {
                --depth;
                if (depth == 0) {
                    const PTok& after = ts[k + 1 < ts.size() ? k + 1 : k];
                    if (after.kind != TK::Sym) return false;
                    const std::string& t = after.text;
                    return t == "+" || t == "-" || t == "*" || t == "=" || t == "!=" ||
                           t == "<" || t == "<=" || t == ">" || t == ">=" || t == "|";
                }
            }
            ++k;
        }
        return false;  // unbalanced; let the formula path report it
    }

    FormulaPtr unary() {
        if (at_kw("not")) {
            next();
            return f_not(unary());
        }
        if (at_kw("exists") || at_kw("forall")) {
            bool ex = peek().text == "exists";
            next();
            if (peek().kind != TK::Ident) fail_here("expected a variable after the binder");
            std::string v = next().text;
            if (!at_sym(".")) fail_here("expected '.' after the bound variable");
            next();
            binders.push_back(v);
            FormulaPtr body = or_formula();
            binders.pop_back();
            return ex ? f_exists(v, body) : f_forall(v, body);
        }
        if (at_sym("(") && !paren_opens_term()) {
            next();
            FormulaPtr f = or_formula();
            if (!at_sym(")")) fail_here("expected ')'");
            next();
            return f;
        }
        return atom();
    }

    FormulaPtr and_formula() {
        FormulaPtr f = unary();
        while (at_kw("and")) {
            next();
            f = f_and(f, unary());
        }
        return f;
    }

    FormulaPtr or_formula() {
        FormulaPtr f = and_formula();
        while (at_kw("or")) {
            next();
            f = f_or(f, and_formula());
        }
        return f;
    }
};

}  // namespace

FormulaPtr parse_formula(const std::string& text) {
    auto toks = lex(text);
    FormulaParser p{toks};
    FormulaPtr f = p.or_formula();
    if (p.peek().kind != TK::End) p.fail_here("trailing input after formula");
    Formula root = *f;  // annotate the root with the source-level free variables
    root.mentioned_free = std::move(p.mentioned);
    return std::make_shared<const Formula>(std::move(root));
}

// ---------------------------------------------------------------- NNF

static FormulaPtr to_nnf(const FormulaPtr& f, bool pos) {
    switch (f->kind) {
        case Formula::True:
            return pos ? f_true() : f_false();
        case Formula::False:
            return pos ? f_false() : f_true();
        case Formula::Leq0:
            // not (t <= 0)  <=>  -t + 1 <= 0
            return pos ? f : f_leq0(-f->t + Term::constant_term(1));
        case Formula::Dvd:
            return pos ? f : f_notdvd(f->n, f->t);
        case Formula::NotDvd:
            return pos ? f : f_dvd(f->n, f->t);
        case Formula::Not:
            return to_nnf(f->a, !pos);
        case Formula::And:
            return pos ? f_and(to_nnf(f->a, true), to_nnf(f->b, true))
                       : f_or(to_nnf(f->a, false), to_nnf(f->b, false));
        case Formula::Or:
            return pos ? f_or(to_nnf(f->a, true), to_nnf(f->b, true))
                       : f_and(to_nnf(f->a, false), to_nnf(f->b, false));
        case Formula::Exists:
            return pos ? f_exists(f->var, to_nnf(f->a, true))
                       : f_forall(f->var, to_nnf(f->a, false));
        case Formula::Forall:
            return pos ? f_forall(f->var, to_nnf(f->a, true))
                       : f_exists(f->var, to_nnf(f->a, false));
    }
    throw Error("internal_error", "unreachable formula kind");
}

// ---------------------------------------------------------------- Cooper

namespace {

// Substitute a term for every free occurrence of v (no binders below here).
FormulaPtr subst(const FormulaPtr& f, const std::string& v, const Term& by) {
    switch (f->kind) {
        case Formula::True:
        case Formula::False:
            return f;
        case Formula::Leq0:
            return f_leq0(f->t.substituted(v, by));
        case Formula::Dvd:
            return f_dvd(f->n, f->t.substituted(v, by));
        case Formula::NotDvd:
            return f_notdvd(f->n, f->t.substituted(v, by));
        case Formula::Not:
            return f_not(subst(f->a, v, by));
        case Formula::And:
            return f_and(subst(f->a, v, by), subst(f->b, v, by));
        case Formula::Or:
            return f_or(subst(f->a, v, by), subst(f->b, v, by));
        case Formula::Exists:
        case Formula::Forall:
            if (f->var == v) return f;
            throw Error("internal_error", "substitution under a quantifier during elimination");
    }
    throw Error("internal_error", "unreachable formula kind");
}

void collect_coeff_lcm(const FormulaPtr& f, const std::string& v, mpz_class& L) {
    switch (f->kind) {
        case Formula::Leq0:
        case Formula::Dvd:
        case Formula::NotDvd: {
            mpz_class c = abs(f->t.coeff(v));
            if (c != 0) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), c.get_mpz_t());
            return;
        }
        case Formula::And:
        case Formula::Or:
            collect_coeff_lcm(f->a, v, L);
            collect_coeff_lcm(f->b, v, L);
            return;
        default:
            return;
    }
}

// Rescale every atom so the coefficient of v is +1 or -1 (+1 only, for
// divisibilities), under the change of variable w = L*v.
FormulaPtr unit_coeffs(const FormulaPtr& f, const std::string& v, const mpz_class& L) {
    switch (f->kind) {
        case Formula::Leq0: {
            mpz_class c = f->t.coeff(v);
            if (c == 0) return f;
            mpz_class k = L / abs(c);
            Term t = f->t.scaled(k);
            put(t.coeffs, v, c > 0 ? 1 : -1);
            return f_leq0(std::move(t));
        }
        case Formula::Dvd:
        case Formula::NotDvd: {
            mpz_class c = f->t.coeff(v);
            if (c == 0) return f;
            mpz_class k = L / abs(c);
            Term t = f->t.scaled(k);
            if (c < 0) t = -t;
            put(t.coeffs, v, 1);
            mpz_class n = f->n * k;
            return f->kind == Formula::Dvd ? f_dvd(n, std::move(t)) : f_notdvd(n, std::move(t));
        }
        case Formula::And:
            return f_and(unit_coeffs(f->a, v, L), unit_coeffs(f->b, v, L));
        case Formula::Or:
            return f_or(unit_coeffs(f->a, v, L), unit_coeffs(f->b, v, L));
        default:
            return f;
    }
}

void collect_delta_and_bounds(const FormulaPtr& f, const std::string& v, mpz_class& delta,
                              std::vector<Term>& lower) {
    switch (f->kind) {
        case Formula::Leq0:
            // -w + r <= 0 means w >= r: a lower boundary at r.
            if (f->t.coeff(v) == -1) lower.push_back(f->t.without(v));
            return;
        case Formula::Dvd:
        case Formula::NotDvd:
            if (f->t.coeff(v) == 1)
                mpz_lcm(delta.get_mpz_t(), delta.get_mpz_t(), f->n.get_mpz_t());
            return;
        case Formula::And:
        case Formula::Or:
            collect_delta_and_bounds(f->a, v, delta, lower);
            collect_delta_and_bounds(f->b, v, delta, lower);
            return;
        default:
            return;
    }
}

// The w -> -infinity limit: upper bounds become true, lower bounds false,
// divisibilities keep only the residue j.
FormulaPtr minus_inf(const FormulaPtr& f, const std::string& v, const mpz_class& j) {
    switch (f->kind) {
        case Formula::Leq0: {
            mpz_class c = f->t.coeff(v);
            if (c == 0) return f;
            return c > 0 ? f_true() : f_false();
        }
        case Formula::Dvd:
        case Formula::NotDvd:
            if (f->t.coeff(v) == 0) return f;
            return f->kind == Formula::Dvd
                       ? f_dvd(f->n, f->t.substituted(v, Term::constant_term(j)))
                       : f_notdvd(f->n, f->t.substituted(v, Term::constant_term(j)));
        case Formula::And:
            return f_and(minus_inf(f->a, v, j), minus_inf(f->b, v, j));
        case Formula::Or:
            return f_or(minus_inf(f->a, v, j), minus_inf(f->b, v, j));
        default:
            return f;
    }
}

// Quantifier-free NNF body only.
FormulaPtr cooper_exists(const std::string& v, const FormulaPtr& body) {
    mpz_class L = 1;
    collect_coeff_lcm(body, v, L);
    FormulaPtr unit = unit_coeffs(body, v, L);

    mpz_class delta = L;
    std::vector<Term> lower;
    collect_delta_and_bounds(unit, v, delta, lower);

    FormulaPtr result = f_false();
    for (mpz_class j = 1; j <= delta; ++j) {
        result = f_or(result, f_and(minus_inf(unit, v, j), f_dvd(L, Term::constant_term(j))));
        for (const Term& b : lower) {
            Term at = b + Term::constant_term(j - 1);
            result = f_or(result, f_and(subst(unit, v, at), f_dvd(L, at)));
        }
    }
    return result;
}

}  // namespace

FormulaPtr eliminate_quantifiers(const FormulaPtr& f) {
    switch (f->kind) {
        case Formula::True:
        case Formula::False:
        case Formula::Leq0:
        case Formula::Dvd:
        case Formula::NotDvd:
            return f;
        case Formula::Not:
            return f_not(eliminate_quantifiers(f->a));
        case Formula::And:
            return f_and(eliminate_quantifiers(f->a), eliminate_quantifiers(f->b));
        case Formula::Or:
            return f_or(eliminate_quantifiers(f->a), eliminate_quantifiers(f->b));
        case Formula::Exists: {
            FormulaPtr body = to_nnf(eliminate_quantifiers(f->a), true);
            if (!free_vars(body).count(f->var)) return body;
            return cooper_exists(f->var, body);
        }
        case Formula::Forall: {
            FormulaPtr body = to_nnf(eliminate_quantifiers(f->a), false);  // nnf of negation
            if (!free_vars(body).count(f->var)) return to_nnf(f_not(body), true);
            return to_nnf(f_not(cooper_exists(f->var, body)), true);
        }
    }
    throw Error("internal_error", "unreachable formula kind");
}

// ---------------------------------------------------------------- cells

Cell Cell::make_point(mpz_class a) {
    Cell c;
    c.is_point = true;
    c.point = std::move(a);
    return c;
}

Cell Cell::make_stripe(std::optional<mpz_class> lo, std::optional<mpz_class> hi, mpz_class mod,
                       mpz_class res) {
    Cell c;
    c.lo = std::move(lo);
    c.hi = std::move(hi);
    c.mod = std::move(mod);
    c.res = std::move(res);
    return c;
}

bool Cell::contains(const mpz_class& x) const {
    if (is_point) return x == point;
    if (lo && !(*lo < x)) return false;
    if (hi && !(x < *hi)) return false;
    return mpz_congruent_p(x.get_mpz_t(), res.get_mpz_t(), mod.get_mpz_t()) != 0;
}

bool Cell::operator==(const Cell& o) const {
    if (is_point != o.is_point) return false;
    if (is_point) return point == o.point;
    return lo == o.lo && hi == o.hi && mod == o.mod && res == o.res;
}

std::string Cell::str() const {
    std::ostringstream out;
    if (is_point) {
        out << "{" << point.get_str() << "}";
    } else {
        out << "(" << (lo ? lo->get_str() : "-inf") << ", " << (hi ? hi->get_str() : "+inf")
            << ") mod " << mod.get_str() << " res " << res.get_str();
    }
    return out.str();
}

bool cells_contain(const std::vector<Cell>& cells, const mpz_class& x) {
    for (const auto& c : cells)
        if (c.contains(x)) return true;
    return false;
}

namespace {

struct Region {
    std::optional<mpz_class> lo, hi;  // open bounds
    mpz_class m = 1, r = 0;
};

constexpr unsigned long kModCap = 1000000;

mpz_class floor_div(const mpz_class& a, const mpz_class& b) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

mpz_class ceil_div(const mpz_class& a, const mpz_class& b) {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

struct KRun {
    std::optional<mpz_class> lo, hi;  // inclusive k bounds; absent = unbounded
};

bool cell_less(const Cell& a, const Cell& b) {
    if (a.is_point != b.is_point) return a.is_point;
    if (a.is_point) return a.point < b.point;
    // -inf sorts first among lower bounds, +inf last among upper bounds.
    if (a.lo.has_value() != b.lo.has_value()) return !a.lo.has_value();
    if (a.lo && b.lo && *a.lo != *b.lo) return *a.lo < *b.lo;
    if (a.hi.has_value() != b.hi.has_value()) return a.hi.has_value();
    if (a.hi && b.hi && *a.hi != *b.hi) return *a.hi < *b.hi;
    if (a.mod != b.mod) return a.mod < b.mod;
    return a.res < b.res;
}

std::vector<mpz_class> sorted_divisors(const mpz_class& m) {
    std::vector<mpz_class> divs;
    for (mpz_class d = 1; d * d <= m; ++d) {
        if (mpz_divisible_p(m.get_mpz_t(), d.get_mpz_t())) {
            divs.push_back(d);
            mpz_class q = m / d;
            if (q != d) divs.push_back(q);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

std::vector<Cell> canonical_pass(const std::vector<Region>& regs, const mpz_class& M) {
    // Coverage per residue class mod M, as inclusive intervals of k (x = rho + M k).
    std::map<mpz_class, std::vector<KRun>> classes;
    for (const auto& reg : regs) {
        mpz_class r0;
        mpz_mod(r0.get_mpz_t(), reg.r.get_mpz_t(), reg.m.get_mpz_t());
        for (mpz_class rho = r0; rho < M; rho += reg.m) {
            KRun run;
            if (reg.lo) run.lo = floor_div(*reg.lo - rho, M) + 1;
            if (reg.hi) run.hi = ceil_div(*reg.hi - rho, M) - 1;
            if (run.lo && run.hi && *run.lo > *run.hi) continue;
            classes[rho].push_back(std::move(run));
        }
    }

    std::vector<Cell> cells;
    std::vector<mpz_class> full;  // classes covering all of rho + M Z
    for (auto& [rho, runs] : classes) {
        std::sort(runs.begin(), runs.end(), [](const KRun& a, const KRun& b) {
            if (a.lo.has_value() != b.lo.has_value()) return !a.lo.has_value();
            if (a.lo && b.lo && *a.lo != *b.lo) return *a.lo < *b.lo;
            if (a.hi.has_value() != b.hi.has_value()) return b.hi.has_value();
            return a.hi && b.hi && *a.hi < *b.hi;
        });
        std::vector<KRun> merged;
        for (auto& run : runs) {
            if (!merged.empty()) {
                KRun& cur = merged.back();
                bool joins = !cur.hi || !run.lo || *run.lo <= *cur.hi + 1;
                if (joins) {
                    if (cur.hi && (!run.hi || *run.hi > *cur.hi)) cur.hi = run.hi;
                    continue;
                }
            }
            merged.push_back(run);
        }
        for (const auto& run : merged) {
            if (!run.lo && !run.hi) {
                full.push_back(rho);
                continue;
            }
            if (run.lo && run.hi && *run.lo == *run.hi) {
                cells.push_back(Cell::make_point(rho + M * *run.lo));
                continue;
            }
            std::optional<mpz_class> lo, hi;
            if (run.lo) lo = rho + M * (*run.lo - 1);
            if (run.hi) hi = rho + M * (*run.hi + 1);
            cells.push_back(Cell::make_stripe(std::move(lo), std::move(hi), M, rho));
        }
    }

    if (!full.empty()) {
        std::set<mpz_class> F(full.begin(), full.end());
        for (const mpz_class& d : sorted_divisors(M)) {
            bool invariant = true;
            for (const auto& rho : F) {
                mpz_class shifted;
                mpz_mod(shifted.get_mpz_t(), mpz_class(rho + d).get_mpz_t(), M.get_mpz_t());
                if (!F.count(shifted)) {
                    invariant = false;
                    break;
                }
            }
            if (invariant) {
                for (mpz_class sigma = 0; sigma < d; ++sigma)
                    if (F.count(sigma))
                        cells.push_back(Cell::make_stripe(std::nullopt, std::nullopt, d, sigma));
                break;
            }
        }
    }

    std::sort(cells.begin(), cells.end(), cell_less);
    return cells;
}

std::vector<Region> regions_of_cells(const std::vector<Cell>& cells) {
    std::vector<Region> regs;
    for (const auto& c : cells) {
        Region reg;
        if (c.is_point) {
            reg.lo = c.point - 1;
            reg.hi = c.point + 1;
            reg.m = 1;
            reg.r = 0;
        } else {
            reg.lo = c.lo;
            reg.hi = c.hi;
            reg.m = c.mod;
            reg.r = c.res;
        }
        regs.push_back(std::move(reg));
    }
    return regs;
}

std::vector<Cell> canonicalize_regions(std::vector<Region> regs) {
    while (true) {
        mpz_class M = 1;
        for (const auto& reg : regs) mpz_lcm(M.get_mpz_t(), M.get_mpz_t(), reg.m.get_mpz_t());
        if (M > kModCap)
            throw Error("resource_cap",
                        "combined congruence modulus " + M.get_str() + " exceeds the cap");
        std::vector<Cell> cells = canonical_pass(regs, M);
        mpz_class M2 = 1;
        for (const auto& c : cells)
            if (!c.is_point) mpz_lcm(M2.get_mpz_t(), M2.get_mpz_t(), c.mod.get_mpz_t());
        if (M2 == M) return cells;
        regs = regions_of_cells(cells);
    }
}

// ------------------------------------------------------------ DNF solving

struct AtomC {
    enum { LEQ0, DVD, NDVD } kind;
    mpz_class c, d;  // c*x + d
    mpz_class n;     // modulus for DVD/NDVD
};

void dnf_of(const FormulaPtr& f, const std::string& x, std::vector<std::vector<AtomC>>& out,
            std::vector<AtomC>& path, size_t& budget) {
    if (--budget == 0) throw Error("resource_cap", "disjunctive normal form exceeded the cap");
    switch (f->kind) {
        case Formula::True:
            out.push_back(path);
            return;
        case Formula::False:
            return;
        case Formula::Leq0:
        case Formula::Dvd:
        case Formula::NotDvd: {
            for (const auto& [v, c] : f->t.coeffs)
                if (v != x)
                    throw Error("internal_error", "stray variable after elimination: " + v);
            AtomC a;
            a.kind = f->kind == Formula::Leq0 ? AtomC::LEQ0
                                              : (f->kind == Formula::Dvd ? AtomC::DVD : AtomC::NDVD);
            a.c = f->t.coeff(x);
            a.d = f->t.constant;
            a.n = f->n;
            path.push_back(std::move(a));
            out.push_back(path);
            path.pop_back();
            return;
        }
        case Formula::And: {
            // Expand the left side, continuing into the right under each branch.
            std::vector<std::vector<AtomC>> left;
            dnf_of(f->a, x, left, path, budget);
            for (auto& lp : left) dnf_of(f->b, x, out, lp, budget);
            return;
        }
        case Formula::Or:
            dnf_of(f->a, x, out, path, budget);
            dnf_of(f->b, x, out, path, budget);
            return;
        default:
            throw Error("internal_error", "quantifier or negation survived elimination");
    }
}

// Solve one conjunction of atoms in x into regions (possibly none).
std::vector<Region> solve_conjunct(const std::vector<AtomC>& atoms) {
    std::optional<mpz_class> lo, hi;  // open bounds
    std::vector<std::pair<mpz_class, mpz_class>> dvds, ndvds;  // (modulus, residue)

    for (const auto& a : atoms) {
        if (a.kind == AtomC::LEQ0) {
            if (a.c == 0) {
                if (a.d > 0) return {};
                continue;
            }
            if (a.c > 0) {
                mpz_class bound = floor_div(-a.d, a.c) + 1;  // x < bound
                if (!hi || bound < *hi) hi = bound;
            } else {
                mpz_class bound = ceil_div(-a.d, a.c) - 1;  // bound < x
                if (!lo || bound > *lo) lo = bound;
            }
            continue;
        }
        // c*x + d = 0 mod n (or != 0 mod n)
        if (a.c == 0) {
            bool holds = mpz_divisible_p(a.d.get_mpz_t(), a.n.get_mpz_t()) != 0;
            if (a.kind == AtomC::DVD ? !holds : holds) return {};
            continue;
        }
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), a.c.get_mpz_t(), a.n.get_mpz_t());
        if (!mpz_divisible_p(a.d.get_mpz_t(), g.get_mpz_t())) {
            // congruence c*x = -d has no solution
            if (a.kind == AtomC::DVD) return {};
            continue;  // the not-divisible constraint always holds
        }
        mpz_class n2 = a.n / g;
        if (n2 == 1) {
            // congruence always solvable: divisibility always holds
            if (a.kind == AtomC::NDVD) return {};
            continue;
        }
        mpz_class c2 = a.c / g, d2 = (-a.d) / g, inv;
        mpz_class c2m;
        mpz_mod(c2m.get_mpz_t(), c2.get_mpz_t(), n2.get_mpz_t());
        mpz_invert(inv.get_mpz_t(), c2m.get_mpz_t(), n2.get_mpz_t());
        mpz_class r2;
        mpz_mod(r2.get_mpz_t(), mpz_class(d2 * inv).get_mpz_t(), n2.get_mpz_t());
        (a.kind == AtomC::DVD ? dvds : ndvds).emplace_back(n2, r2);
    }

    mpz_class m = 1;
    for (const auto& [n2, r2] : dvds) mpz_lcm(m.get_mpz_t(), m.get_mpz_t(), n2.get_mpz_t());
    for (const auto& [n2, r2] : ndvds) mpz_lcm(m.get_mpz_t(), m.get_mpz_t(), n2.get_mpz_t());
    if (m > kModCap)
        throw Error("resource_cap", "congruence modulus " + m.get_str() + " exceeds the cap");

    std::vector<Region> regs;
    for (mpz_class rho = 0; rho < m; ++rho) {
        bool ok = true;
        for (const auto& [n2, r2] : dvds)
            if (!mpz_congruent_p(rho.get_mpz_t(), r2.get_mpz_t(), n2.get_mpz_t())) {
                ok = false;
                break;
            }
        if (!ok) continue;
        for (const auto& [n2, r2] : ndvds)
            if (mpz_congruent_p(rho.get_mpz_t(), r2.get_mpz_t(), n2.get_mpz_t())) {
                ok = false;
                break;
            }
        if (!ok) continue;
        Region reg;
        reg.lo = lo;
        reg.hi = hi;
        reg.m = m;
        reg.r = rho;
        regs.push_back(std::move(reg));
    }
    return regs;
}

}  // namespace

std::vector<Cell> canonicalize_cells(const std::vector<Cell>& cells) {
    return canonicalize_regions(regions_of_cells(cells));
}

std::vector<Cell> decompose(const FormulaPtr& f) {
    auto fv = f->mentioned_free.empty() ? free_vars(f) : f->mentioned_free;
    if (fv.size() != 1)
        throw Error("domain_violation", "cell decomposition needs exactly one free variable, found " +
                                            std::to_string(fv.size()));
    const std::string x = *fv.begin();

    FormulaPtr qf = to_nnf(eliminate_quantifiers(f), true);

    std::vector<std::vector<AtomC>> disjuncts;
    std::vector<AtomC> path;
    size_t budget = kNodeCap;
    dnf_of(qf, x, disjuncts, path, budget);

    std::vector<Region> regs;
    for (const auto& conj : disjuncts)
        for (auto& reg : solve_conjunct(conj)) regs.push_back(std::move(reg));
    return canonicalize_regions(std::move(regs));
}

// ---------------------------------------------------------------- subgroups

namespace {

// Members of the union within [-W, W], capped per cell per side.
std::vector<mpz_class> window_members(const std::vector<Cell>& cells, const mpz_class& W) {
    std::set<mpz_class> out;
    const long per_side = 48;
    for (const auto& c : cells) {
        if (c.is_point) {
            if (abs(c.point) <= W) out.insert(c.point);
            continue;
        }
        // k-range of members with |x| <= W, x = res + mod*k, clipped by cell bounds
        mpz_class klo = ceil_div(-W - c.res, c.mod);
        mpz_class khi = floor_div(W - c.res, c.mod);
        if (c.lo) {
            mpz_class b = floor_div(*c.lo - c.res, c.mod) + 1;
            if (b > klo) klo = b;
        }
        if (c.hi) {
            mpz_class b = ceil_div(*c.hi - c.res, c.mod) - 1;
            if (b < khi) khi = b;
        }
        if (klo > khi) continue;
        mpz_class count = khi - klo + 1;
        if (count <= 2 * per_side) {
            for (mpz_class k = klo; k <= khi; ++k) out.insert(c.res + c.mod * k);
        } else {
            for (long i = 0; i < per_side; ++i) {
                out.insert(c.res + c.mod * (klo + i));
                out.insert(c.res + c.mod * (khi - i));
            }
            // also sample near zero inside the range
            mpz_class k0 = floor_div(-c.res, c.mod);
            for (long i = -4; i <= 4; ++i) {
                mpz_class k = k0 + i;
                if (k >= klo && k <= khi) out.insert(c.res + c.mod * k);
            }
        }
    }
    return {out.begin(), out.end()};
}

mpz_class presentation_scale(const std::vector<Cell>& cells) {
    mpz_class B = 1;
    for (const auto& c : cells) {
        if (c.is_point) {
            mpz_class a = abs(c.point);
            if (a > B) B = a;
        } else {
            if (c.lo && abs(*c.lo) > B) B = abs(*c.lo);
            if (c.hi && abs(*c.hi) > B) B = abs(*c.hi);
            mpz_class l;
            mpz_lcm(l.get_mpz_t(), B.get_mpz_t(), c.mod.get_mpz_t());
            if (l > B) B = l;
        }
    }
    return B;
}

}  // namespace

SubgroupResult recognize_subgroup(const std::vector<Cell>& raw) {
    std::vector<Cell> cells = canonicalize_cells(raw);
    SubgroupResult res;

    if (!cells_contain(cells, 0)) {
        res.missing_zero = true;
        return res;
    }
    if (cells.size() == 1 && cells[0].is_point && cells[0].point == 0) {
        res.is_group = true;
        res.n = 0;
        return res;
    }

    mpz_class g = 0;
    for (const auto& c : cells) {
        if (c.is_point)
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.point.get_mpz_t());
        else {
            mpz_class h;
            mpz_gcd(h.get_mpz_t(), c.res.get_mpz_t(), c.mod.get_mpz_t());
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), h.get_mpz_t());
        }
    }

    if (g > 0) {
        std::vector<Cell> target{Cell::make_stripe(std::nullopt, std::nullopt, g, 0)};
        if (cells == target) {
            res.is_group = true;
            res.n = g;
            return res;
        }
    }

    // Not a group: hunt for u, v in the union with u - v outside it.
    const mpz_class B = presentation_scale(cells);

    // A multiple of g missing from the union, scanning outward from zero.
    std::optional<mpz_class> gap;
    if (g > 0) {
        mpz_class limit = 4 * B / g + 8;
        for (mpz_class k = 1; k <= limit && !gap; ++k) {
            if (!cells_contain(cells, g * k)) gap = g * k;
            else if (!cells_contain(cells, -g * k)) gap = -g * k;
        }
    }

    std::vector<mpz_class> widths{64, 2 * B + 64, 8 * B + 64};
    for (const auto& W : widths) {
        auto members = window_members(cells, W);
        if (gap) {
            for (const auto& s : members) {
                if (cells_contain(cells, *gap + s)) {
                    res.witness_pair = {*gap + s, s};
                    return res;
                }
            }
        }
        for (const auto& u : members)
            for (const auto& v : members)
                if (!cells_contain(cells, u - v)) {
                    res.witness_pair = {u, v};
                    return res;
                }
    }
    throw Error("internal_error", "no closure violation found for a non-subgroup");
}

} // namespace qp::presburger
