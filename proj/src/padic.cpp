#include "qp/padic.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace qp {

// ---------------------------------------------------------------- context

PadicContext::PadicContext(unsigned long p, int precision) : p_(p), n_(precision) {
    if (precision < 1)
        throw Error("bad_context", "precision must be >= 1, got " + std::to_string(precision));
    mpz_class pz(static_cast<unsigned long>(p));
    if (p < 2 || mpz_probab_prime_p(pz.get_mpz_t(), 40) == 0)
        throw Error("bad_context", "p must be prime, got " + std::to_string(p));
    mpz_ui_pow_ui(pn_.get_mpz_t(), p_, static_cast<unsigned long>(n_));
}

mpz_class PadicContext::prime_power(long k) const {
    if (k < 0) throw Error("bad_context", "prime_power wants k >= 0");
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), p_, static_cast<unsigned long>(k));
    return r;
}

Ctx make_context(unsigned long p, int precision) {
    return std::make_shared<const PadicContext>(p, precision);
}

// ---------------------------------------------------------------- Padic

Padic Padic::zero(Ctx ctx) { return Padic(std::move(ctx), true, 0, 0); }

Padic Padic::one(Ctx ctx) { return Padic(std::move(ctx), false, 0, 1); }

Padic Padic::canonical(Ctx ctx, long v, mpz_class exact) {
    if (exact == 0) return zero(std::move(ctx));
    mpz_class p(ctx->prime());
    v += static_cast<long>(mpz_remove(exact.get_mpz_t(), exact.get_mpz_t(), p.get_mpz_t()));
    mpz_class u;
    mpz_mod(u.get_mpz_t(), exact.get_mpz_t(), ctx->unit_modulus().get_mpz_t());
    return Padic(std::move(ctx), false, v, std::move(u));
}

Padic Padic::from_integer(Ctx ctx, const mpz_class& z) { return canonical(std::move(ctx), 0, z); }

Padic Padic::from_long(Ctx ctx, long z) { return from_integer(std::move(ctx), mpz_class(z)); }

Padic Padic::from_rational(Ctx ctx, const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw Error("division_by_zero", "rational with zero denominator");
    if (num == 0) return zero(std::move(ctx));
    mpz_class p(ctx->prime()), n(num), d(den);
    long v = static_cast<long>(mpz_remove(n.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
    v -= static_cast<long>(mpz_remove(d.get_mpz_t(), d.get_mpz_t(), p.get_mpz_t()));
    mpz_class dinv;
    if (mpz_invert(dinv.get_mpz_t(), d.get_mpz_t(), ctx->unit_modulus().get_mpz_t()) == 0)
        throw Error("division_by_zero", "denominator not invertible");  // unreachable: d coprime to p
    return canonical(std::move(ctx), v, n * dinv);
}

Padic Padic::from_parts(Ctx ctx, long v, const mpz_class& unit) {
    return canonical(std::move(ctx), v, unit);
}

long Padic::val() const {
    if (zero_) throw Error("zero_argument", "valuation of 0 is infinite");
    return v_;
}

const mpz_class& Padic::unit() const {
    if (zero_) throw Error("zero_argument", "0 has no unit part");
    return u_;
}

Padic Padic::angular_component() const {
    if (zero_) throw Error("zero_argument", "0 has no angular component");
    return Padic(ctx_, false, 0, u_);
}

void Padic::require_same_context(const Padic& o) const {
    if (!(*ctx_ == *o.ctx_))
        throw Error("context_mismatch",
                    "operands live in Q_" + std::to_string(ctx_->prime()) + " at precision " +
                        std::to_string(ctx_->precision()) + " vs Q_" + std::to_string(o.ctx_->prime()) +
                        " at precision " + std::to_string(o.ctx_->precision()));
}

Padic Padic::operator-() const {
    if (zero_) return *this;
    mpz_class u = ctx_->unit_modulus() - u_;
    return Padic(ctx_, false, v_, std::move(u));
}

Padic Padic::window_sum(Ctx ctx, long m, mpz_class scaled) {
    mpz_class r;
    mpz_mod(r.get_mpz_t(), scaled.get_mpz_t(), ctx->unit_modulus().get_mpz_t());
    if (r == 0) return zero(std::move(ctx));
    return canonical(std::move(ctx), m, std::move(r));
}

Padic Padic::operator+(const Padic& o) const {
    require_same_context(o);
    if (zero_) return o;
    if (o.zero_) return *this;
    long m = std::min(v_, o.v_);
    mpz_class s = u_ * ctx_->prime_power(v_ - m) + o.u_ * ctx_->prime_power(o.v_ - m);
    return window_sum(ctx_, m, std::move(s));
}

Padic Padic::operator-(const Padic& o) const {
    require_same_context(o);
    if (o.zero_) return *this;
    if (zero_) return -o;
    long m = std::min(v_, o.v_);
    mpz_class s = u_ * ctx_->prime_power(v_ - m) - o.u_ * ctx_->prime_power(o.v_ - m);
    return window_sum(ctx_, m, std::move(s));
}

Padic Padic::operator*(const Padic& o) const {
    require_same_context(o);
    if (zero_ || o.zero_) return zero(ctx_);
    mpz_class u = u_ * o.u_;
    mpz_mod(u.get_mpz_t(), u.get_mpz_t(), ctx_->unit_modulus().get_mpz_t());
    return Padic(ctx_, false, v_ + o.v_, std::move(u));
}

Padic Padic::inverse() const {
    if (zero_) throw Error("division_by_zero", "inverse of 0");
    mpz_class u;
    mpz_invert(u.get_mpz_t(), u_.get_mpz_t(), ctx_->unit_modulus().get_mpz_t());
    return Padic(ctx_, false, -v_, std::move(u));
}

Padic Padic::operator/(const Padic& o) const {
    require_same_context(o);
    if (o.zero_) throw Error("division_by_zero", "division by 0");
    if (zero_) return *this;
    return *this * o.inverse();
}

Padic Padic::pow(long e) const {
    if (zero_) {
        if (e > 0) return *this;
        if (e == 0) return one(ctx_);
        throw Error("division_by_zero", "0 to a negative power");
    }
    if (e == 0) return one(ctx_);
    Padic base = e < 0 ? inverse() : *this;
    unsigned long k = e < 0 ? 0ul - static_cast<unsigned long>(e) : static_cast<unsigned long>(e);
    mpz_class u;
    mpz_powm_ui(u.get_mpz_t(), base.u_.get_mpz_t(), k, ctx_->unit_modulus().get_mpz_t());
    return Padic(ctx_, false, base.v_ * static_cast<long>(k), std::move(u));
}

Padic Padic::shift(long k) const {
    if (zero_) return *this;
    return Padic(ctx_, false, v_ + k, u_);
}

bool Padic::operator==(const Padic& o) const {
    require_same_context(o);
    if (zero_ || o.zero_) return zero_ == o.zero_;
    return v_ == o.v_ && u_ == o.u_;
}

Padic Padic::to_precision(const Ctx& target) const {
    if (target->prime() != ctx_->prime())
        throw Error("context_mismatch", "precision change across different primes");
    if (target->precision() > ctx_->precision())
        throw Error("precision_insufficient", "cannot widen precision " +
                                                  std::to_string(ctx_->precision()) + " to " +
                                                  std::to_string(target->precision()));
    if (zero_) return zero(target);
    mpz_class u;
    mpz_mod(u.get_mpz_t(), u_.get_mpz_t(), target->unit_modulus().get_mpz_t());
    return Padic(target, false, v_, std::move(u));
}

std::vector<unsigned long> Padic::unit_digits() const {
    if (zero_) throw Error("zero_argument", "0 has no digits");
    std::vector<unsigned long> ds;
    mpz_class rest = u_, p(ctx_->prime()), d;
    while (rest != 0) {
        mpz_mod(d.get_mpz_t(), rest.get_mpz_t(), p.get_mpz_t());
        ds.push_back(d.get_ui());
        rest = (rest - d) / p;
    }
    return ds;  // nonempty: u_ >= 1
}

std::string Padic::to_sum_string() const {
    if (zero_) return "0";
    const std::string P = std::to_string(ctx_->prime());
    auto ds = unit_digits();
    std::ostringstream sum;
    bool first = true;
    for (size_t k = 0; k < ds.size(); ++k) {
        if (ds[k] == 0) continue;
        if (!first) sum << " + ";
        first = false;
        if (k == 0)
            sum << ds[k];
        else if (k == 1)
            sum << ds[k] << "*" << P;
        else
            sum << ds[k] << "*" << P << "^" << k;
    }
    if (v_ == 0) return sum.str();
    return P + "^" + std::to_string(v_) + " * (" + sum.str() + ")";
}

std::string Padic::to_digit_string() const {
    if (zero_) return "0";
    auto ds = unit_digits();
    std::ostringstream out;
    for (size_t i = ds.size(); i-- > 0;) {
        out << ds[i];
        if (i != 0) out << " ";
    }
    out << " (base " << ctx_->prime() << ")";
    if (v_ != 0) out << " * " << ctx_->prime() << "^" << v_;
    return out.str();
}

// ---------------------------------------------------------------- parsing

namespace {

struct Tok {
    enum Kind { Int, Punct, Word, Ellipsis, End } kind;
    mpz_class num;      // Int
    char punct = 0;     // Punct: one of ^ * + - / ( )
    std::string word;   // Word
    int col = 0;
};

std::vector<Tok> lex_literal(const std::string& s) {
    std::vector<Tok> ts;
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        int col = static_cast<int>(i) + 1;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (s.compare(i, 3, "...") == 0) {
            ts.push_back({Tok::Ellipsis, 0, 0, "", col});
            i += 3;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            ts.push_back({Tok::Int, mpz_class(s.substr(i, j - i)), 0, "", col});
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
            ts.push_back({Tok::Word, 0, 0, s.substr(i, j - i), col});
            i = j;
            continue;
        }
        if (std::string("^*+-/()").find(c) != std::string::npos) {
            ts.push_back({Tok::Punct, 0, c, "", col});
            ++i;
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "' in p-adic literal", 1, col);
    }
    ts.push_back({Tok::End, 0, 0, "", static_cast<int>(s.size()) + 1});
    return ts;
}

// Recursive-descent reader over the token list.
struct LitParser {
    const std::vector<Tok>& ts;
    size_t pos = 0;
    unsigned long p;

    const Tok& peek(size_t ahead = 0) const { return ts[std::min(pos + ahead, ts.size() - 1)]; }
    const Tok& next() { return ts[pos < ts.size() - 1 ? pos++ : pos]; }
    bool at_punct(char c, size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Punct && peek(ahead).punct == c;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what, 1, peek().col);
    }

    mpz_class read_int() {
        if (peek().kind != Tok::Int) fail("expected an integer");
        return next().num;
    }

    long read_signed_int() {
        bool neg = false;
        if (at_punct('-')) {
            next();
            neg = true;
        }
        mpz_class z = read_int();
        if (!z.fits_slong_p()) fail("exponent out of range");
        long v = z.get_si();
        return neg ? -v : v;
    }

    void expect_base(const mpz_class& b) {
        if (b != p) fail("power base " + b.get_str() + " does not match prime " + std::to_string(p));
    }

    // monomial := INT ['*' INT ['^' INT]] | INT '^' INT
    mpz_class read_monomial() {
        mpz_class coeff = read_int();
        mpz_class base = coeff;
        if (at_punct('*')) {
            next();
            base = read_int();
        } else if (at_punct('^')) {
            // "p^k" with implicit coefficient 1
            expect_base(coeff);
            next();
            mpz_class e = read_int();
            mpz_class r;
            mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e.get_ui());
            return r;
        } else {
            return coeff;  // bare integer digit
        }
        expect_base(base);
        mpz_class power = base;
        if (at_punct('^')) {
            next();
            mpz_class e = read_int();
            mpz_pow_ui(power.get_mpz_t(), base.get_mpz_t(), e.get_ui());
        }
        return coeff * power;
    }

    // sum := monomial (('+'|'-') monomial)*
    mpz_class read_sum() {
        mpz_class total = read_monomial();
        while (at_punct('+') || at_punct('-')) {
            bool minus = peek().punct == '-';
            next();
            mpz_class m = read_monomial();
            total += minus ? -m : m;
        }
        return total;
    }
};

}  // namespace

Padic Padic::parse(Ctx ctx, const std::string& text) {
    auto ts = lex_literal(text);
    LitParser lp{ts, 0, ctx->prime()};

    bool neg = false;
    if (lp.at_punct('-')) {
        lp.next();
        neg = true;
    }
    if (lp.peek().kind == Tok::Ellipsis) lp.next();

    // Digit form: two or more integers in a row, or "(base p)" after one.
    bool digit_form = false;
    {
        size_t k = 0;
        while (lp.peek(k).kind == Tok::Int) ++k;
        if (k >= 1 && lp.at_punct('(', k) && lp.peek(k + 1).kind == Tok::Word &&
            lp.peek(k + 1).word == "base")
            digit_form = true;
    }
    if (digit_form) {
        std::vector<mpz_class> digits;  // most significant first
        while (lp.peek().kind == Tok::Int) digits.push_back(lp.next().num);
        lp.next();  // '('
        lp.next();  // "base"
        mpz_class base = lp.read_int();
        lp.expect_base(base);
        if (!lp.at_punct(')')) lp.fail("expected ')' after base");
        lp.next();
        long v = 0;
        if (lp.at_punct('*')) {
            lp.next();
            mpz_class b2 = lp.read_int();
            lp.expect_base(b2);
            if (!lp.at_punct('^')) lp.fail("expected '^' in p^v suffix");
            lp.next();
            v = lp.read_signed_int();
        }
        if (lp.peek().kind != Tok::End) lp.fail("trailing input after digit literal");
        mpz_class unit = 0, P(ctx->prime());
        for (const auto& d : digits) {
            if (d >= P) throw ParseError("digit " + d.get_str() + " not below the base", 1, 1);
            unit = unit * P + d;
        }
        if (neg) unit = -unit;
        return canonical(std::move(ctx), v, unit);
    }

    // Prefixed sum form: p^v * ( sum )
    if (lp.peek().kind == Tok::Int && lp.at_punct('^', 1)) {
        size_t save = lp.pos;
        mpz_class base = lp.read_int();
        lp.next();  // '^'
        long v = lp.read_signed_int();
        if (lp.at_punct('*') && lp.at_punct('(', 1)) {
            lp.expect_base(base);
            lp.next();  // '*'
            lp.next();  // '('
            mpz_class unit = lp.read_sum();
            if (!lp.at_punct(')')) lp.fail("expected ')' closing the digit sum");
            lp.next();
            if (lp.peek().kind != Tok::End) lp.fail("trailing input after p-adic literal");
            if (neg) unit = -unit;
            return canonical(std::move(ctx), v, unit);
        }
        lp.pos = save;  // fall through: plain sum like "5^2" or "3 + ..." reparsed below
    }

    // Rational a/b.
    if (lp.peek().kind == Tok::Int && lp.at_punct('/', 1)) {
        mpz_class a = lp.read_int();
        lp.next();
        mpz_class b = lp.read_int();
        if (lp.peek().kind != Tok::End) lp.fail("trailing input after rational literal");
        if (neg) a = -a;
        return from_rational(std::move(ctx), a, b);
    }

    // Bare sum (covers plain integers and "(d0 + d1*p + ...)" without prefix).
    mpz_class total;
    if (lp.at_punct('(')) {
        lp.next();
        total = lp.read_sum();
        if (!lp.at_punct(')')) lp.fail("expected ')'");
        lp.next();
    } else {
        total = lp.read_sum();
    }
    if (lp.peek().kind != Tok::End) lp.fail("trailing input after p-adic literal");
    if (neg) total = -total;
    return canonical(std::move(ctx), 0, total);
}

// ---------------------------------------------------------------- PadicPoly

PadicPoly::PadicPoly(Ctx ctx, std::vector<Padic> coeffs) : ctx_(std::move(ctx)), coeffs_(std::move(coeffs)) {
    for (const auto& c : coeffs_)
        if (!(*c.ctx() == *ctx_)) throw Error("context_mismatch", "polynomial coefficient context differs");
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

PadicPoly PadicPoly::from_integers(Ctx ctx, const std::vector<long>& coeffs) {
    std::vector<Padic> cs;
    cs.reserve(coeffs.size());
    for (long c : coeffs) cs.push_back(Padic::from_long(ctx, c));
    return PadicPoly(ctx, std::move(cs));
}

Padic PadicPoly::coeff(int i) const {
    if (i >= 0 && i < static_cast<int>(coeffs_.size())) return coeffs_[static_cast<size_t>(i)];
    return Padic::zero(ctx_);
}

Padic PadicPoly::eval(const Padic& x) const {
    Padic acc = Padic::zero(ctx_);
    for (size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + coeffs_[i];
    return acc;
}

PadicPoly PadicPoly::derivative() const {
    std::vector<Padic> cs;
    for (size_t i = 1; i < coeffs_.size(); ++i)
        cs.push_back(coeffs_[i] * Padic::from_long(ctx_, static_cast<long>(i)));
    return PadicPoly(ctx_, std::move(cs));
}

// ---------------------------------------------------------------- Hensel

Padic hensel_lift(const PadicPoly& f, const Padic& x0) {
    const Padic fx0 = f.eval(x0);
    if (fx0.is_zero()) return x0;
    const PadicPoly fprime = f.derivative();
    const Padic fpx0 = fprime.eval(x0);
    if (fpx0.is_zero())
        throw Error("hensel_precondition", "need v(f(x0)) > 2 v(f'(x0)); got v(f(x0)) = " +
                                               fx0.valuation().str() + ", v(f'(x0)) = inf");
    if (!(fx0.val() > 2 * fpx0.val()))
        throw Error("hensel_precondition", "need v(f(x0)) > 2 v(f'(x0)); got v(f(x0)) = " +
                                               fx0.valuation().str() + ", v(f'(x0)) = " +
                                               fpx0.valuation().str());
    Padic x = x0;
    const int cap = 4 * x0.ctx()->precision() + 16;
    for (int i = 0; i < cap; ++i) {
        Padic fx = f.eval(x);
        if (fx.is_zero()) return x;
        Padic nx = x - fx / fprime.eval(x);
        if (nx == x) return x;
        x = nx;
    }
    throw Error("hensel_no_convergence", "Newton iteration failed to stabilize");
}

// ---------------------------------------------------------------- n-th powers

NthPowerResult is_nth_power(const Padic& x, long n) {
    if (x.is_zero()) throw Error("zero_argument", "is_nth_power wants x != 0");
    if (n < 1) throw Error("domain_violation", "is_nth_power wants n >= 1");
    if (n == 1) return {true, x};

    const Ctx& ctx = x.ctx();
    const unsigned long p = ctx->prime();

    long k = 0;  // v_p(n)
    {
        mpz_class nn(n), pz(p);
        k = static_cast<long>(mpz_remove(nn.get_mpz_t(), nn.get_mpz_t(), pz.get_mpz_t()));
    }
    if (ctx->precision() < 2 * k + 2)
        throw Error("precision_insufficient",
                    "deciding n-th powers with v_p(n) = " + std::to_string(k) + " needs N >= " +
                        std::to_string(2 * k + 2) + ", have " + std::to_string(ctx->precision()));

    if (x.val() % n != 0) return {false, std::nullopt};

    const long t = 2 * k + 1;
    const mpz_class pt = ctx->prime_power(t);
    mpz_class target;
    mpz_mod(target.get_mpz_t(), x.unit().get_mpz_t(), pt.get_mpz_t());

    mpz_class y0(0), yn;
    bool found = false;
    for (mpz_class c = 1; c < pt; ++c) {
        if (mpz_divisible_ui_p(c.get_mpz_t(), p)) continue;
        mpz_powm_ui(yn.get_mpz_t(), c.get_mpz_t(), static_cast<unsigned long>(n), pt.get_mpz_t());
        if (yn == target) {
            y0 = c;
            found = true;
            break;
        }
    }
    if (!found) return {false, std::nullopt};

    // Lift Y^n - u from the residue root; the precondition holds by choice of t.
    std::vector<Padic> cs(static_cast<size_t>(n) + 1, Padic::zero(ctx));
    cs[0] = -x.angular_component();
    cs[static_cast<size_t>(n)] = Padic::one(ctx);
    Padic root = hensel_lift(PadicPoly(ctx, std::move(cs)), Padic::from_integer(ctx, y0));
    return {true, root.shift(x.val() / n)};
}

// ---------------------------------------------------------------- square classes

unsigned long smallest_nonresidue(unsigned long p) {
    if (p == 2) throw Error("domain_violation", "no non-residue generator for p = 2");
    mpz_class pz(p);
    for (unsigned long u = 2; u < p; ++u) {
        mpz_class uz(u);
        if (mpz_legendre(uz.get_mpz_t(), pz.get_mpz_t()) == -1) return u;
    }
    throw Error("domain_violation", "no non-residue found");  // unreachable for odd primes
}

SquareClass square_class(const Padic& x) {
    if (x.is_zero()) throw Error("zero_argument", "square_class wants x != 0");
    const Ctx& ctx = x.ctx();
    const unsigned long p = ctx->prime();
    const long vpar = ((x.val() % 2) + 2) % 2;

    if (p == 2) {
        if (ctx->precision() < 3)
            throw Error("precision_insufficient", "square classes at p = 2 need N >= 3");
        mpz_class m8;
        mpz_mod_ui(m8.get_mpz_t(), x.unit().get_mpz_t(), 8);
        unsigned long rep = m8.get_ui() << (vpar ? 1 : 0);
        return {std::to_string(rep),
                Padic::from_parts(ctx, vpar, m8)};
    }

    mpz_class pz(p), um;
    mpz_mod(um.get_mpz_t(), x.unit().get_mpz_t(), pz.get_mpz_t());
    const bool nonres = mpz_legendre(um.get_mpz_t(), pz.get_mpz_t()) == -1;
    const unsigned long u = nonres ? smallest_nonresidue(p) : 1;

    std::string label = nonres ? (vpar ? "up" : "u") : (vpar ? "p" : "1");
    return {label, Padic::from_parts(ctx, vpar, mpz_class(u))};
}

SquareClass square_class_mul(const SquareClass& a, const SquareClass& b) {
    return square_class(a.representative * b.representative);
}

} // namespace qp
