#ifndef QP_ELLIPTIC_HPP
#define QP_ELLIPTIC_HPP

#include <vector>

#include "qp/padic.hpp"

namespace qp::elliptic {

// Long Weierstrass equation y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6
// over the p-adic field of the coefficients' shared context. The standard
// quantities b2, b4, b6, b8, c4, c6, the discriminant and the j-invariant
// are computed once at construction. A discriminant that vanishes at the
// working precision is rejected (singular_equation): every decision this
// module makes needs v(disc) determined.
class WeierstrassCurve {
public:
    WeierstrassCurve(Padic a1, Padic a2, Padic a3, Padic a4, Padic a6);

    const Ctx& ctx() const { return ctx_; }
    const Padic& a1() const { return a1_; }
    const Padic& a2() const { return a2_; }
    const Padic& a3() const { return a3_; }
    const Padic& a4() const { return a4_; }
    const Padic& a6() const { return a6_; }

    const Padic& b2() const { return b2_; }
    const Padic& b4() const { return b4_; }
    const Padic& b6() const { return b6_; }
    const Padic& b8() const { return b8_; }
    const Padic& c4() const { return c4_; }
    const Padic& c6() const { return c6_; }
    const Padic& disc() const { return disc_; }
    const Padic& j() const { return j_; }

    bool is_integral() const;  // all coefficients have valuation >= 0

private:
    Ctx ctx_;
    Padic a1_, a2_, a3_, a4_, a6_;
    Padic b2_, b4_, b6_, b8_, c4_, c6_, disc_, j_;
};

// Affine point or the point at infinity (the group identity).
class CurvePoint {
public:
    static CurvePoint at_infinity(Ctx ctx);
    CurvePoint(Padic x, Padic y);

    const Ctx& ctx() const { return ctx_; }
    bool is_infinity() const { return infinity_; }
    const Padic& x() const;  // affine points only
    const Padic& y() const;

private:
    explicit CurvePoint(Ctx ctx);
    Ctx ctx_;
    bool infinity_;
    std::vector<Padic> coords_;  // empty for the point at infinity
};

// Membership at working precision: the equation residual either cancels
// to the flagged zero or lands above the congruence window of the monomials
// involved (additions are only determined mod p^(min valuation + precision),
// so points produced by arithmetic may carry a residual at that level).
bool on_curve(const WeierstrassCurve& e, const CurvePoint& pt);

CurvePoint negate(const WeierstrassCurve& e, const CurvePoint& pt);

// Chord-tangent composition; identity is the point at infinity.
// Inputs must lie on the curve (not_on_curve).
CurvePoint add_points(const WeierstrassCurve& e, const CurvePoint& p, const CurvePoint& q);

// k-fold sum with k of either sign (double-and-add).
CurvePoint mul_point(const WeierstrassCurve& e, long k, const CurvePoint& pt);

// Substitution x = u^2 x' + r, y = u^3 y' + s u^2 x' + t; u must be nonzero.
struct CurveTransform {
    Padic u, r, s, t;
};

// The curve in the primed coordinates. u^12 disc' = disc holds exactly.
WeierstrassCurve change_of_variables(const WeierstrassCurve& e, const CurveTransform& t);

// Point transport: original coordinates -> primed, and its inverse.
CurvePoint transport(const CurveTransform& t, const CurvePoint& pt);
CurvePoint transport_back(const CurveTransform& t, const CurvePoint& pt);

// Single transform equivalent to applying `first` and then `then`.
CurveTransform compose(const CurveTransform& first, const CurveTransform& then);

struct MinimalModel {
    WeierstrassCurve curve;
    CurveTransform transform;  // maps the input curve to the minimal one
};

// True when the curve is integral and no scale-down step by u = p is
// admissible (such a step needs v(c4) >= 4, v(c6) >= 6, v(disc) >= 12
// and an (r, s, t) completion keeping the coefficients integral).
bool is_minimal(const WeierstrassCurve& e);

// Integralize by a power of p, then strip admissible factors of p from u
// until none remains. v(disc) strictly decreases by 12 per step.
MinimalModel minimal_model(const WeierstrassCurve& e);

enum class ReductionType { Good, Additive, SplitMultiplicative, NonsplitMultiplicative };

struct ReductionInfo {
    ReductionType type;
    bool has_singular_point = false;  // false exactly for Good
    long singular_x = 0, singular_y = 0;  // residues of the singular point
    long tangent_d = 0;  // a1bar^2 + 4 a2bar after recentering, mod p
};

// Reduction type of a minimal curve (not_minimal otherwise): good when
// v(disc) = 0; else recenter at the unique singular residue point and
// count the roots of the tangent cone T^2 + a1bar T - a2bar over F_p
// (2 roots split, 1 additive, 0 nonsplit).
ReductionInfo classify_reduction(const WeierstrassCurve& e);

struct FiltrationLevel {
    enum class Tier { NonsmoothImage, SmoothImage, KernelOfReduction };
    Tier tier;
    bool alpha_infinite = false;  // kernel only: true for the point at infinity
    long alpha = 0;               // kernel only: v(x/y) >= 1
};

// Position of a point of a minimal curve relative to the reduction map:
// outside the smooth locus, on it, or in the kernel (with its depth).
FiltrationLevel filtration_membership(const WeierstrassCurve& e, const CurvePoint& pt);

struct ResiduePoint {
    bool infinity;
    long x = 0, y = 0;
};

// Image of a point under reduction of primitive projective coordinates.
// Requires a minimal curve and a point mapping to the smooth locus
// (domain_violation otherwise).
ResiduePoint reduction_map(const WeierstrassCurve& e, const CurvePoint& pt);

}  // namespace qp::elliptic

#endif
