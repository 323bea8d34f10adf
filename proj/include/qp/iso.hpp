#ifndef QP_ISO_HPP
#define QP_ISO_HPP

#include <vector>

#include "qp/elliptic.hpp"
#include "qp/padic.hpp"

namespace qp::iso {

// Dense truncated power series over one p-adic context. Arithmetic is
// exact modulo z^order; all coefficients share the context.
class PowerSeries {
public:
    PowerSeries(Ctx ctx, long order);  // the zero series
    static PowerSeries variable(Ctx ctx, long order);
    static PowerSeries constant(Ctx ctx, const Padic& c, long order);

    const Ctx& ctx() const { return ctx_; }
    long order() const { return static_cast<long>(c_.size()); }
    const Padic& coeff(long k) const;
    void set_coeff(long k, const Padic& v);

    PowerSeries truncated(long order) const;

    PowerSeries operator-() const;
    friend PowerSeries operator+(const PowerSeries& a, const PowerSeries& b);
    friend PowerSeries operator-(const PowerSeries& a, const PowerSeries& b);
    friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b);
    friend PowerSeries operator*(const Padic& c, const PowerSeries& a);

    PowerSeries derivative() const;
    // Term-by-term primitive with zero constant term; divides by the index.
    PowerSeries antiderivative() const;
    // 1/this; needs a unit constant term.
    PowerSeries inverse() const;
    // this(inner); needs inner(0) = 0.
    PowerSeries compose(const PowerSeries& inner) const;
    // Functional inverse; needs zero constant term and unit linear term.
    PowerSeries reversion() const;

    Padic evaluate(const Padic& z) const;

private:
    Ctx ctx_;
    std::vector<Padic> c_;
};

// Series in two variables truncated at a total degree.
class BivariateSeries {
public:
    BivariateSeries(Ctx ctx, long order);
    static BivariateSeries variable(Ctx ctx, long order, int which);  // 1 or 2
    static BivariateSeries from_univariate(const PowerSeries& f, int which, long order);
    // outer(inner) for univariate outer; needs inner(0, 0) = 0.
    static BivariateSeries compose(const PowerSeries& outer, const BivariateSeries& inner);

    const Ctx& ctx() const { return ctx_; }
    long order() const { return order_; }
    const Padic& coeff(long i, long j) const;
    void set_coeff(long i, long j, const Padic& v);

    BivariateSeries operator-() const;
    friend BivariateSeries operator+(const BivariateSeries& a, const BivariateSeries& b);
    friend BivariateSeries operator-(const BivariateSeries& a, const BivariateSeries& b);
    friend BivariateSeries operator*(const BivariateSeries& a, const BivariateSeries& b);
    friend BivariateSeries operator*(const Padic& c, const BivariateSeries& a);

    BivariateSeries inverse() const;  // needs a unit constant term
    BivariateSeries swapped() const;  // exchange the two variables

    Padic evaluate(const Padic& z1, const Padic& z2) const;

private:
    Ctx ctx_;
    long order_;
    std::vector<Padic> c_;  // (order x order) row-major; i + j >= order unused
};

// Local expansion of an integral Weierstrass curve at the origin in the
// parameter z = -x/y: the branch w(z) = -1/y, the coordinate unit u with
// x = z^-2 u(z) and y = -z^-3 u(z), the negation series, and the
// logarithm normalized to lambda(z) = z + O(z^2) whose derivative is the
// invariant differential.
struct CurveExpansion {
    PowerSeries w;
    PowerSeries u;
    PowerSeries negation;
    PowerSeries log_derivative;
    PowerSeries log;
};

CurveExpansion curve_expansion(const elliptic::WeierstrassCurve& e, long order);

// Two-variable addition law F(z1, z2) = z1 + z2 + ... of the expansion,
// truncated at the given total degree.
BivariateSeries addition_law(const elliptic::WeierstrassCurve& e, long order);

// One-unit logarithm and exponential. log needs v(u - 1) >= 1 (>= 2 when
// p = 2, where the smaller domain carries torsion); exp needs v(z) >= 1
// (>= 2 when p = 2, below which the series diverges). On these domains
// v(exp(z) - 1) = v(z) and v(log(u)) = v(u - 1), and the two maps are
// mutually inverse homomorphisms.
Padic padic_log(const Padic& u);
Padic padic_exp(const Padic& z);

// z -> (1+p)^z = exp(z * log(1+p)) for v(z) >= 0. Lands one level inside:
// v(result - 1) = v(z) + 1 for odd p and v(z) + 2 for p = 2.
Padic exp_one_units(const Padic& z);
// Inverse of the above: log(u) / log(1+p) for v(u-1) >= 1 (>= 2, p = 2).
Padic log_one_units(const Padic& u);

// Logarithm of a kernel-of-reduction point: lambda(-x/y). The valuation
// of the result equals the kernel depth alpha. Requires a minimal curve
// and alpha >= 1 (>= 2 when p = 2).
Padic elliptic_log(const elliptic::WeierstrassCurve& e, const elliptic::CurvePoint& pt);

// Inverse: the kernel point with elliptic_log = z, for v(z) >= 1 (>= 2
// when p = 2); z = 0 gives the point at infinity.
elliptic::CurvePoint elliptic_exp(const elliptic::WeierstrassCurve& e, const Padic& z);

struct TorusPoint {
    Padic x, y;
};

// Logarithm on the norm-one pairs x^2 - d y^2 = 1 near the identity: the
// sqrt(d)-coefficient of log(x + y sqrt(d)) computed in the quadratic
// extension. Needs d a non-square with v(d) in {0, 1} and
// v(x - 1), v(y) >= 1 (>= 2 when p = 2). For v(d) = 0 the valuation of
// the result equals v(y).
Padic torus_log(const Padic& d, const Padic& x, const Padic& y);

// Inverse: (C(z), S(z)) with C the even and S the odd part of
// exp(z sqrt(d)); satisfies C^2 - d S^2 = 1. Same domain as padic_exp.
TorusPoint torus_exp(const Padic& d, const Padic& z);

}  // namespace qp::iso

#endif
