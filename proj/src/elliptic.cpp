#include "qp/elliptic.hpp"

#include <algorithm>
#include <optional>

#include "qp/error.hpp"

namespace qp::elliptic {

namespace {

Padic C(const Ctx& ctx, long n) { return Padic::from_long(ctx, n); }

bool integral(const Padic& x) { return x.is_zero() || x.val() >= 0; }

bool val_at_least(const Padic& x, long bound) { return x.is_zero() || x.val() >= bound; }

void require_same_ctx(const Ctx& a, const Ctx& b) {
    if (a->prime() != b->prime() || a->precision() != b->precision())
        throw Error("context_mismatch", "operands live in different p-adic contexts");
}

// Residue of an integral value mod p^k (k small, well below the precision).
mpz_class residue_mod(const Padic& x, const mpz_class& pk) {
    if (x.is_zero() || x.val() >= 0) {
        if (x.is_zero()) return 0;
        mpz_class r;
        mpz_class pv;
        mpz_ui_pow_ui(pv.get_mpz_t(), x.ctx()->prime(), static_cast<unsigned long>(x.val()));
        r = (x.unit() * pv) % pk;
        return r;
    }
    throw Error("internal_error", "residue of a non-integral value requested");
}

long residue_mod_p(const Padic& x) {
    mpz_class p(static_cast<unsigned long>(x.ctx()->prime()));
    return residue_mod(x, p).get_si();
}

}  // namespace

WeierstrassCurve::WeierstrassCurve(Padic a1, Padic a2, Padic a3, Padic a4, Padic a6)
    : ctx_(a1.ctx()),
      a1_(std::move(a1)),
      a2_(std::move(a2)),
      a3_(std::move(a3)),
      a4_(std::move(a4)),
      a6_(std::move(a6)),
      b2_(a1_ * a1_ + C(ctx_, 4) * a2_),
      b4_(C(ctx_, 2) * a4_ + a1_ * a3_),
      b6_(a3_ * a3_ + C(ctx_, 4) * a6_),
      b8_(a1_ * a1_ * a6_ + C(ctx_, 4) * a2_ * a6_ - a1_ * a3_ * a4_ + a2_ * a3_ * a3_ -
          a4_ * a4_),
      c4_(b2_ * b2_ - C(ctx_, 24) * b4_),
      c6_(Padic::zero(ctx_) - b2_ * b2_ * b2_ + C(ctx_, 36) * b2_ * b4_ - C(ctx_, 216) * b6_),
      disc_(Padic::zero(ctx_) - b2_ * b2_ * b8_ - C(ctx_, 8) * b4_ * b4_ * b4_ -
            C(ctx_, 27) * b6_ * b6_ + C(ctx_, 9) * b2_ * b4_ * b6_),
      j_(Padic::zero(ctx_)) {
    if (disc_.is_zero())
        throw Error("singular_equation", "discriminant vanishes at working precision");
    j_ = c4_ * c4_ * c4_ / disc_;
}

bool WeierstrassCurve::is_integral() const {
    return integral(a1_) && integral(a2_) && integral(a3_) && integral(a4_) && integral(a6_);
}

CurvePoint::CurvePoint(Ctx ctx) : ctx_(std::move(ctx)), infinity_(true) {}

CurvePoint CurvePoint::at_infinity(Ctx ctx) { return CurvePoint(std::move(ctx)); }

CurvePoint::CurvePoint(Padic x, Padic y) : ctx_(x.ctx()), infinity_(false) {
    require_same_ctx(x.ctx(), y.ctx());
    coords_.push_back(std::move(x));
    coords_.push_back(std::move(y));
}

const Padic& CurvePoint::x() const {
    if (infinity_) throw Error("internal_error", "the point at infinity has no affine x");
    return coords_[0];
}

const Padic& CurvePoint::y() const {
    if (infinity_) throw Error("internal_error", "the point at infinity has no affine y");
    return coords_[1];
}

bool on_curve(const WeierstrassCurve& e, const CurvePoint& pt) {
    if (pt.is_infinity()) return true;
    require_same_ctx(e.ctx(), pt.ctx());
    const Padic& x = pt.x();
    const Padic& y = pt.y();
    Padic terms[7] = {y * y,           e.a1() * x * y, e.a3() * y, x * x * x,
                      e.a2() * x * x,  e.a4() * x,     e.a6()};
    bool any = false;
    long floor = 0;
    for (const Padic& t : terms) {
        if (t.is_zero()) continue;
        floor = any ? std::min(floor, t.val()) : t.val();
        any = true;
    }
    if (!any) return true;
    Padic res = terms[0] + terms[1] + terms[2] - terms[3] - terms[4] - terms[5] - terms[6];
    // Coordinates that came out of the windowed chord-tangent chain are
    // accurate to an absolute p^N at best (integral chains) and to
    // p^(floor + N) for points deep below the integral range, even when a
    // cancellation parked their stored valuation higher. First-order
    // sensitivity keeps the residual of such a point at or above one full
    // window over the negative part of the monomial floor, so that is the
    // line between noise and a genuine miss.
    return res.is_zero() || res.val() >= std::min(floor, 0L) + e.ctx()->precision();
}

CurvePoint negate(const WeierstrassCurve& e, const CurvePoint& pt) {
    if (pt.is_infinity()) return pt;
    Padic ny = Padic::zero(e.ctx()) - pt.y() - e.a1() * pt.x() - e.a3();
    return CurvePoint(pt.x(), std::move(ny));
}

CurvePoint add_points(const WeierstrassCurve& e, const CurvePoint& p, const CurvePoint& q) {
    if (!on_curve(e, p) || !on_curve(e, q))
        throw Error("not_on_curve", "chord-tangent composition needs points on the curve");
    if (p.is_infinity()) return q;
    if (q.is_infinity()) return p;
    const Padic& x1 = p.x();
    const Padic& y1 = p.y();
    const Padic& x2 = q.x();
    const Padic& y2 = q.y();
    const Ctx& ctx = e.ctx();
    Padic lam = Padic::zero(ctx);
    if (x1 == x2) {
        Padic mirror = Padic::zero(ctx) - y1 - e.a1() * x1 - e.a3();
        if (y2 == mirror) return CurvePoint::at_infinity(ctx);
        Padic num = C(ctx, 3) * x1 * x1 + C(ctx, 2) * e.a2() * x1 + e.a4() - e.a1() * y1;
        Padic den = C(ctx, 2) * y1 + e.a1() * x1 + e.a3();
        lam = num / den;
    } else {
        lam = (y2 - y1) / (x2 - x1);
    }
    Padic x3 = lam * lam + e.a1() * lam - e.a2() - x1 - x2;
    Padic y3 = lam * (x1 - x3) - y1 - e.a1() * x3 - e.a3();
    return CurvePoint(std::move(x3), std::move(y3));
}

CurvePoint mul_point(const WeierstrassCurve& e, long k, const CurvePoint& pt) {
    if (k < 0) return mul_point(e, -k, negate(e, pt));
    CurvePoint acc = CurvePoint::at_infinity(e.ctx());
    CurvePoint base = pt;
    while (k > 0) {
        if (k & 1) acc = add_points(e, acc, base);
        k >>= 1;
        if (k > 0) base = add_points(e, base, base);
    }
    return acc;
}

WeierstrassCurve change_of_variables(const WeierstrassCurve& e, const CurveTransform& t) {
    if (t.u.is_zero()) throw Error("domain_violation", "transform scale u must be nonzero");
    const Ctx& ctx = e.ctx();
    const Padic &u = t.u, &r = t.r, &s = t.s, &tt = t.t;
    Padic u2 = u * u;
    Padic u3 = u2 * u;
    Padic u4 = u2 * u2;
    Padic u6 = u3 * u3;
    Padic a1 = (e.a1() + C(ctx, 2) * s) / u;
    Padic a2 = (e.a2() - s * e.a1() + C(ctx, 3) * r - s * s) / u2;
    Padic a3 = (e.a3() + r * e.a1() + C(ctx, 2) * tt) / u3;
    Padic a4 = (e.a4() - s * e.a3() + C(ctx, 2) * r * e.a2() - (tt + r * s) * e.a1() +
                C(ctx, 3) * r * r - C(ctx, 2) * s * tt) /
               u4;
    Padic a6 = (e.a6() + r * e.a4() + r * r * e.a2() + r * r * r - tt * e.a3() - tt * tt -
                r * tt * e.a1()) /
               u6;
    return WeierstrassCurve(std::move(a1), std::move(a2), std::move(a3), std::move(a4),
                            std::move(a6));
}

CurvePoint transport(const CurveTransform& t, const CurvePoint& pt) {
    if (t.u.is_zero()) throw Error("domain_violation", "transform scale u must be nonzero");
    if (pt.is_infinity()) return pt;
    Padic u2 = t.u * t.u;
    Padic u3 = u2 * t.u;
    Padic xs = pt.x() - t.r;
    Padic xp = xs / u2;
    Padic yp = (pt.y() - t.s * xs - t.t) / u3;
    return CurvePoint(std::move(xp), std::move(yp));
}

CurvePoint transport_back(const CurveTransform& t, const CurvePoint& pt) {
    if (t.u.is_zero()) throw Error("domain_violation", "transform scale u must be nonzero");
    if (pt.is_infinity()) return pt;
    Padic u2 = t.u * t.u;
    Padic u3 = u2 * t.u;
    Padic x = u2 * pt.x() + t.r;
    Padic y = u3 * pt.y() + t.s * u2 * pt.x() + t.t;
    return CurvePoint(std::move(x), std::move(y));
}

CurveTransform compose(const CurveTransform& first, const CurveTransform& then) {
    Padic u = first.u * then.u;
    Padic u1sq = first.u * first.u;
    Padic r = first.r + u1sq * then.r;
    Padic s = first.s + first.u * then.s;
    Padic t = first.t + u1sq * first.u * then.t + u1sq * then.r * first.s;
    return CurveTransform{std::move(u), std::move(r), std::move(s), std::move(t)};
}

namespace {

// Candidate (u = p, r, s, t) making the scaled-down model integral, if one
// exists. For p >= 5 the residues of s, r, t are forced one after another
// (mod p, p^2, p^3) by the integrality of a1', a2', a3'; for p in {2, 3}
// the whole residue box is searched.
std::optional<CurveTransform> scale_down_step(const WeierstrassCurve& e) {
    if (!e.is_integral()) return std::nullopt;
    if (!val_at_least(e.c4(), 4) || !val_at_least(e.c6(), 6) || !val_at_least(e.disc(), 12))
        return std::nullopt;
    const Ctx& ctx = e.ctx();
    unsigned long p = ctx->prime();
    Padic up = C(ctx, static_cast<long>(p));
    auto attempt = [&](long r, long s, long t) -> std::optional<CurveTransform> {
        CurveTransform cand{up, C(ctx, r), C(ctx, s), C(ctx, t)};
        WeierstrassCurve moved = change_of_variables(e, cand);
        if (moved.is_integral()) return cand;
        return std::nullopt;
    };
    long pl = static_cast<long>(p);
    if (p <= 3) {
        for (long r = 0; r < pl * pl; ++r)
            for (long s = 0; s < pl; ++s)
                for (long t = 0; t < pl * pl * pl; ++t)
                    if (auto c = attempt(r, s, t)) return c;
        return std::nullopt;
    }
    mpz_class P(p), P2 = P * P, P3 = P2 * P;
    mpz_class a1 = residue_mod(e.a1(), P3), a2 = residue_mod(e.a2(), P3),
              a3 = residue_mod(e.a3(), P3);
    mpz_class inv2, inv3, two(2), three(3);
    mpz_invert(inv2.get_mpz_t(), two.get_mpz_t(), P3.get_mpz_t());
    mpz_invert(inv3.get_mpz_t(), three.get_mpz_t(), P2.get_mpz_t());
    mpz_class s = (-a1 * inv2) % P;
    if (s < 0) s += P;
    mpz_class r = ((s * a1 + s * s - a2) * inv3) % P2;
    if (r < 0) r += P2;
    mpz_class t = (-(a3 + r * a1) * inv2) % P3;
    if (t < 0) t += P3;
    return attempt(r.get_si(), s.get_si(), t.get_si());
}

void require_workable_precision(const WeierstrassCurve& e) {
    if (e.ctx()->precision() < 8)
        throw Error("precision_insufficient",
                    "minimality decisions need at least 8 digits of precision");
}

}  // namespace

bool is_minimal(const WeierstrassCurve& e) {
    require_workable_precision(e);
    return e.is_integral() && !scale_down_step(e).has_value();
}

MinimalModel minimal_model(const WeierstrassCurve& e) {
    require_workable_precision(e);
    const Ctx& ctx = e.ctx();
    // Clear denominators: a_i has weight i, so scaling by u = p^-m multiplies
    // it by p^(i m).
    long m = 0;
    const Padic* as[5] = {&e.a1(), &e.a2(), &e.a3(), &e.a4(), &e.a6()};
    const long weights[5] = {1, 2, 3, 4, 6};
    for (int i = 0; i < 5; ++i) {
        if (as[i]->is_zero() || as[i]->val() >= 0) continue;
        long need = (-as[i]->val() + weights[i] - 1) / weights[i];
        m = std::max(m, need);
    }
    Padic one = Padic::one(ctx);
    Padic zero = Padic::zero(ctx);
    CurveTransform acc{one, zero, zero, zero};
    WeierstrassCurve cur = e;
    if (m > 0) {
        CurveTransform clear{Padic::from_parts(ctx, -m, 1), zero, zero, zero};
        cur = change_of_variables(cur, clear);
        acc = clear;
    }
    while (auto step = scale_down_step(cur)) {
        cur = change_of_variables(cur, *step);
        acc = compose(acc, *step);
    }
    return MinimalModel{std::move(cur), std::move(acc)};
}

namespace {

struct ResidueCurve {
    long p;
    long a1, a2, a3, a4, a6;
};

ResidueCurve reduce_curve(const WeierstrassCurve& e) {
    long p = static_cast<long>(e.ctx()->prime());
    return ResidueCurve{p,
                        residue_mod_p(e.a1()),
                        residue_mod_p(e.a2()),
                        residue_mod_p(e.a3()),
                        residue_mod_p(e.a4()),
                        residue_mod_p(e.a6())};
}

long fp_mod(long v, long p) {
    long r = v % p;
    return r < 0 ? r + p : r;
}

// The unique singular point of a degenerate reduced equation, by direct
// search: the equation and both partial derivatives vanish.
std::optional<std::pair<long, long>> singular_residue_point(const ResidueCurve& c) {
    if (c.p > 2000)
        throw Error("resource_cap", "singular point search is quadratic in p; p is capped at 2000");
    std::optional<std::pair<long, long>> found;
    int count = 0;
    for (long x = 0; x < c.p; ++x) {
        for (long y = 0; y < c.p; ++y) {
            long f = fp_mod(y * y + c.a1 * x * y + c.a3 * y - x * x * x - c.a2 * x * x -
                                c.a4 * x - c.a6,
                            c.p);
            long fy = fp_mod(2 * y + c.a1 * x + c.a3, c.p);
            long fx = fp_mod(c.a1 * y - 3 * x * x - 2 * c.a2 * x - c.a4, c.p);
            if (f == 0 && fx == 0 && fy == 0) {
                found = {x, y};
                ++count;
            }
        }
    }
    if (count > 1)
        throw Error("internal_error", "degenerate equation with more than one singular point");
    return found;
}

}  // namespace

ReductionInfo classify_reduction(const WeierstrassCurve& e) {
    if (!is_minimal(e))
        throw Error("not_minimal", "reduction type is defined for minimal equations only");
    if (e.disc().val() == 0) return ReductionInfo{ReductionType::Good, false, 0, 0, 0};
    ResidueCurve rc = reduce_curve(e);
    auto sing = singular_residue_point(rc);
    if (!sing)
        throw Error("internal_error", "positive discriminant valuation but no singular point");
    auto [x0, y0] = *sing;
    const Ctx& ctx = e.ctx();
    CurveTransform shift{Padic::one(ctx), C(ctx, x0), Padic::zero(ctx), C(ctx, y0)};
    WeierstrassCurve centered = change_of_variables(e, shift);
    ResidueCurve cc = reduce_curve(centered);
    if (cc.a3 != 0 || cc.a4 != 0 || cc.a6 != 0)
        throw Error("internal_error", "recentering did not move the singular point to the origin");
    long d = fp_mod(cc.a1 * cc.a1 + 4 * cc.a2, rc.p);
    int roots = 0;
    for (long T = 0; T < rc.p; ++T)
        if (fp_mod(T * T + cc.a1 * T - cc.a2, rc.p) == 0) ++roots;
    ReductionInfo info;
    info.has_singular_point = true;
    info.singular_x = x0;
    info.singular_y = y0;
    info.tangent_d = d;
    if (roots == 2) {
        info.type = ReductionType::SplitMultiplicative;
        if (e.j().is_zero() || e.j().val() >= 0)
            throw Error("internal_error",
                        "split multiplicative reduction forces negative j valuation");
    } else if (roots == 1) {
        info.type = ReductionType::Additive;
    } else {
        info.type = ReductionType::NonsplitMultiplicative;
    }
    return info;
}

FiltrationLevel filtration_membership(const WeierstrassCurve& e, const CurvePoint& pt) {
    if (!is_minimal(e))
        throw Error("not_minimal", "the reduction filtration is defined on minimal equations");
    if (!on_curve(e, pt)) throw Error("not_on_curve", "filtration level of an off-curve point");
    using Tier = FiltrationLevel::Tier;
    if (pt.is_infinity()) return FiltrationLevel{Tier::KernelOfReduction, true, 0};
    bool x_deep = !pt.x().is_zero() && pt.x().val() < 0;
    if (x_deep) {
        if (pt.y().is_zero() || pt.y().val() >= 0)
            throw Error("internal_error", "non-integral x with integral y cannot lie on the curve");
        long vx = pt.x().val();
        long vy = pt.y().val();
        if (vx % 2 != 0 || vy != 3 * (vx / 2))
            throw Error("internal_error", "kernel point valuations must follow (-2k, -3k)");
        return FiltrationLevel{Tier::KernelOfReduction, false, vx - vy};
    }
    if (!pt.y().is_zero() && pt.y().val() < 0)
        throw Error("internal_error", "integral x with non-integral y cannot lie on the curve");
    if (e.disc().val() == 0) return FiltrationLevel{Tier::SmoothImage, false, 0};
    auto sing = singular_residue_point(reduce_curve(e));
    if (sing && sing->first == residue_mod_p(pt.x()) && sing->second == residue_mod_p(pt.y()))
        return FiltrationLevel{Tier::NonsmoothImage, false, 0};
    return FiltrationLevel{Tier::SmoothImage, false, 0};
}

ResiduePoint reduction_map(const WeierstrassCurve& e, const CurvePoint& pt) {
    FiltrationLevel lvl = filtration_membership(e, pt);
    if (lvl.tier == FiltrationLevel::Tier::NonsmoothImage)
        throw Error("domain_violation", "point reduces to the singular point");
    if (lvl.tier == FiltrationLevel::Tier::KernelOfReduction) return ResiduePoint{true, 0, 0};
    return ResiduePoint{false, residue_mod_p(pt.x()), residue_mod_p(pt.y())};
}

}  // namespace qp::elliptic
