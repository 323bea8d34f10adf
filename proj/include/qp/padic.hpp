#pragma once
#include <gmpxx.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qp/error.hpp"

namespace qp {

// Ambient field data: the prime p and the relative precision N >= 1.
// Every value points at its context; mixing contexts throws, never coerces.
class PadicContext {
public:
    PadicContext(unsigned long p, int precision);

    unsigned long prime() const { return p_; }
    int precision() const { return n_; }
    const mpz_class& unit_modulus() const { return pn_; }  // p^N
    mpz_class prime_power(long k) const;                   // p^k for k >= 0

    bool operator==(const PadicContext& o) const { return p_ == o.p_ && n_ == o.n_; }
    bool operator!=(const PadicContext& o) const { return !(*this == o); }

private:
    unsigned long p_;
    int n_;
    mpz_class pn_;
};

using Ctx = std::shared_ptr<const PadicContext>;

Ctx make_context(unsigned long p, int precision);

// Valuation extended by the point at infinity (the valuation of 0).
struct Val {
    bool inf = false;
    long v = 0;

    static Val infinite() { return Val{true, 0}; }
    static Val finite(long v) { return Val{false, v}; }
    bool operator==(const Val& o) const { return inf == o.inf && (inf || v == o.v); }
    bool operator!=(const Val& o) const { return !(*this == o); }
    // Finite values compare by v; infinity is larger than everything finite.
    bool operator<(const Val& o) const { return !inf && (o.inf || v < o.v); }
    bool operator<=(const Val& o) const { return *this < o || *this == o; }
    std::string str() const { return inf ? "inf" : std::to_string(v); }
};

// A p-adic number at relative precision N: exact zero, or p^v * u with
// u in [1, p^N) coprime to p. The stored representative is an exact rational;
// each operation computes on representatives and re-canonicalizes, so results
// are correct modulo p^(v + N). Exact zero is distinguished from "small", and
// equality of canonical forms is decidable.
class Padic {
public:
    static Padic zero(Ctx ctx);
    static Padic one(Ctx ctx);
    static Padic from_integer(Ctx ctx, const mpz_class& z);
    static Padic from_long(Ctx ctx, long z);
    static Padic from_rational(Ctx ctx, const mpz_class& num, const mpz_class& den);
    // p^v * unit, canonicalized (p-powers inside unit migrate into v).
    static Padic from_parts(Ctx ctx, long v, const mpz_class& unit);

    const Ctx& ctx() const { return ctx_; }
    bool is_zero() const { return zero_; }
    Val valuation() const { return zero_ ? Val::infinite() : Val::finite(v_); }
    long val() const;                // throws on zero
    const mpz_class& unit() const;   // throws on zero
    Padic angular_component() const; // x * p^(-v(x)); throws on zero

    Padic operator-() const;
    Padic operator+(const Padic& o) const;
    Padic operator-(const Padic& o) const;
    Padic operator*(const Padic& o) const;
    Padic operator/(const Padic& o) const;
    Padic inverse() const;
    Padic pow(long e) const;         // pow(0, 0) = 1 by convention
    Padic shift(long k) const;       // multiply by p^k, exact

    bool operator==(const Padic& o) const;
    bool operator!=(const Padic& o) const { return !(*this == o); }

    // Truncate to a coarser precision over the same prime.
    Padic to_precision(const Ctx& target) const;

    // Base-p digits of the unit, least significant first, trailing zeros
    // trimmed (never empty; digit 0 is nonzero by canonicity).
    std::vector<unsigned long> unit_digits() const;

    // "p^v * (d0 + d1*p + d2*p^2 + ...)" — the prefix is omitted when v = 0.
    std::string to_sum_string() const;
    // "dk ... d1 d0 (base p) * p^v" — digits most significant first.
    std::string to_digit_string() const;

    // Accepts "0", decimal integers, "a/b", and both printed forms above
    // (a leading "..." before digits is allowed and ignored). Exact round
    // trip with to_sum_string / to_digit_string.
    static Padic parse(Ctx ctx, const std::string& text);

private:
    Padic(Ctx ctx, bool zero, long v, mpz_class unit)
        : ctx_(std::move(ctx)), zero_(zero), v_(v), u_(std::move(unit)) {}

    static Padic canonical(Ctx ctx, long v, mpz_class exact);
    // Sum of two values whose shared window starts at p^m: digits at p^(m+N)
    // and above are outside both operands' windows and are dropped before
    // canonicalizing; full cancellation inside the window gives exact zero.
    static Padic window_sum(Ctx ctx, long m, mpz_class scaled);
    void require_same_context(const Padic& o) const;

    Ctx ctx_;
    bool zero_;
    long v_;
    mpz_class u_;
};

// Dense univariate polynomial over one context; coeffs[i] multiplies x^i.
class PadicPoly {
public:
    PadicPoly(Ctx ctx, std::vector<Padic> coeffs);
    static PadicPoly from_integers(Ctx ctx, const std::vector<long>& coeffs);

    const Ctx& ctx() const { return ctx_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    Padic coeff(int i) const;  // zero beyond the degree
    Padic eval(const Padic& x) const;
    PadicPoly derivative() const;

private:
    Ctx ctx_;
    std::vector<Padic> coeffs_;  // trailing zeros trimmed; empty = zero poly
};

// Newton iteration from x0. Requires v(f(x0)) > 2 v(f'(x0)); refuses with
// both valuations in the message otherwise. The result r satisfies
// v(r - x0) >= v(f(x0)) - v(f'(x0)) and f(r) = 0 at working precision.
Padic hensel_lift(const PadicPoly& f, const Padic& x0);

struct NthPowerResult {
    bool is_power = false;
    std::optional<Padic> witness;  // y with y^n = x at precision, when is_power
};

// Decides x in (Q_p^x)^n for n >= 1. Needs n | v(x) and then an n-th root of
// the unit part, decided by a residue search mod p^(2 v_p(n) + 1) followed by
// a Hensel lift. Requires N >= 2 v_p(n) + 2; pre: x != 0.
NthPowerResult is_nth_power(const Padic& x, long n);

struct SquareClass {
    std::string label;     // odd p: one of "1", "u", "p", "up"; p = 2: "1","3","5","7","2","6","10","14"
    Padic representative;  // canonical coset representative as a value
};

// Class of x in Q_p^x / (Q_p^x)^2. For odd p the four classes are generated
// by the smallest positive non-residue u and by p; for p = 2 there are eight,
// keyed by (v mod 2, unit mod 8). Pre: x != 0.
SquareClass square_class(const Padic& x);

// Class of the product, computed on representatives.
SquareClass square_class_mul(const SquareClass& a, const SquareClass& b);

// Smallest positive quadratic non-residue mod p (odd p).
unsigned long smallest_nonresidue(unsigned long p);

} // namespace qp
