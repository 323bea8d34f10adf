#ifndef QPTEST_ELLIPTIC_ORACLES_HPP
#define QPTEST_ELLIPTIC_ORACLES_HPP

// Independent reference implementations the elliptic tests compare against:
// a projective line-intersection group law over exact rationals, and a
// chord-tangent law over F_p. Neither shares code with the library lane.

#include <gmpxx.h>

#include <stdexcept>

namespace qptest {

struct QCurve {
    mpq_class a1, a2, a3, a4, a6;
};

struct QPoint {
    mpq_class X, Y, Z;  // projective; the identity is (0 : 1 : 0)
};

inline QPoint q_affine(const mpq_class& x, const mpq_class& y) { return QPoint{x, y, 1}; }

inline QPoint q_infinity() { return QPoint{0, 1, 0}; }

inline bool q_same(const QPoint& a, const QPoint& b) {
    return a.X * b.Y == a.Y * b.X && a.X * b.Z == a.Z * b.X && a.Y * b.Z == a.Z * b.Y;
}

// Homogeneous Weierstrass form.
inline mpq_class q_eval(const QCurve& c, const QPoint& p) {
    const mpq_class &X = p.X, &Y = p.Y, &Z = p.Z;
    return Y * Y * Z + c.a1 * X * Y * Z + c.a3 * Y * Z * Z - X * X * X - c.a2 * X * X * Z -
           c.a4 * X * Z * Z - c.a6 * Z * Z * Z;
}

inline QPoint q_negate(const QCurve& c, const QPoint& p) {
    return QPoint{p.X, -p.Y - c.a1 * p.X - c.a3 * p.Z, p.Z};
}

namespace detail {

inline QPoint q_combine(const QPoint& p, const mpq_class& t, const QPoint& d) {
    return QPoint{p.X + t * d.X, p.Y + t * d.Y, p.Z + t * d.Z};
}

// Coefficients of the cubic F(p + t d) in t, recovered by finite
// differences from four evaluations.
struct LineCubic {
    mpq_class c0, c1, c2, c3;
};

inline LineCubic q_line_cubic(const QCurve& c, const QPoint& p, const QPoint& d) {
    mpq_class g0 = q_eval(c, q_combine(p, 0, d));
    mpq_class g1 = q_eval(c, q_combine(p, 1, d));
    mpq_class g2 = q_eval(c, q_combine(p, 2, d));
    mpq_class g3 = q_eval(c, q_combine(p, 3, d));
    LineCubic lc;
    lc.c0 = g0;
    lc.c3 = (g3 - 3 * g2 + 3 * g1 - g0) / 6;
    lc.c2 = (g2 - 2 * g1 + g0) / 2 - 3 * lc.c3;
    lc.c1 = g1 - g0 - lc.c2 - lc.c3;
    return lc;
}

inline bool q_is_zero_point(const QPoint& p) { return p.X == 0 && p.Y == 0 && p.Z == 0; }

}  // namespace detail

// Line-intersection addition: draw the line through the two points (the
// tangent when they coincide), find the third intersection with the cubic,
// reflect it. Works entirely in projective coordinates.
inline QPoint q_add(const QCurve& c, const QPoint& p, const QPoint& q) {
    using namespace detail;
    if (q_eval(c, p) != 0 || q_eval(c, q) != 0)
        throw std::invalid_argument("oracle points must lie on the curve");
    if (p.Z == 0) return q;  // (0:1:0) is the only point at infinity
    if (q.Z == 0) return p;
    QPoint third = q_infinity();
    if (q_same(p, q)) {
        // Tangent direction: any second point of the line grad(F)(p) . R = 0.
        mpq_class fx = c.a1 * p.Y * p.Z - 3 * p.X * p.X - 2 * c.a2 * p.X * p.Z -
                       c.a4 * p.Z * p.Z;
        mpq_class fy = 2 * p.Y * p.Z + c.a1 * p.X * p.Z + c.a3 * p.Z * p.Z;
        mpq_class fz = p.Y * p.Y + c.a1 * p.X * p.Y + 2 * c.a3 * p.Y * p.Z -
                       c.a2 * p.X * p.X - 2 * c.a4 * p.X * p.Z - 3 * c.a6 * p.Z * p.Z;
        QPoint candidates[3] = {QPoint{-fy, fx, 0}, QPoint{0, -fz, fy}, QPoint{-fz, 0, fx}};
        QPoint dir = q_infinity();
        bool have = false;
        for (const QPoint& d : candidates) {
            if (q_is_zero_point(d) || q_same(d, p)) continue;
            dir = d;
            have = true;
            break;
        }
        if (!have) throw std::logic_error("singular point fed to the tangent construction");
        LineCubic lc = q_line_cubic(c, p, dir);
        if (lc.c0 != 0 || lc.c1 != 0) throw std::logic_error("tangent line is not tangent");
        if (lc.c3 == 0) {
            third = dir;  // the direction point itself lies on the curve
        } else if (lc.c2 == 0) {
            third = p;  // inflection: the tangent meets the curve thrice at p
        } else {
            third = q_combine(p, -lc.c2 / lc.c3, dir);
        }
    } else {
        LineCubic lc = q_line_cubic(c, p, q);
        if (lc.c0 != 0 || lc.c3 != 0) throw std::logic_error("chord endpoints drifted off curve");
        if (lc.c2 == 0) {
            third = q;  // the line is tangent at q
        } else {
            third = q_combine(p, -lc.c1 / lc.c2, q);
        }
    }
    return q_negate(c, third);
}

// ---- chord-tangent over F_p

struct FpCurve {
    long p;
    long a1, a2, a3, a4, a6;
};

struct FpPt {
    bool inf;
    long x = 0, y = 0;
};

inline long fp_norm(long v, long p) {
    long r = v % p;
    return r < 0 ? r + p : r;
}

inline long fp_inv(long a, long p) {
    long t = 0, nt = 1, r = p, nr = fp_norm(a, p);
    while (nr != 0) {
        long qv = r / nr;
        long tmp = t - qv * nt;
        t = nt;
        nt = tmp;
        tmp = r - qv * nr;
        r = nr;
        nr = tmp;
    }
    if (r != 1) throw std::invalid_argument("not invertible mod p");
    return fp_norm(t, p);
}

inline bool fp_same(const FpPt& a, const FpPt& b) {
    if (a.inf || b.inf) return a.inf == b.inf;
    return a.x == b.x && a.y == b.y;
}

inline FpPt fp_add(const FpCurve& c, const FpPt& a, const FpPt& b) {
    if (a.inf) return b;
    if (b.inf) return a;
    long p = c.p;
    long lam;
    if (a.x == b.x) {
        long mirror = fp_norm(-b.y - c.a1 * b.x - c.a3, p);
        if (a.y == mirror) return FpPt{true, 0, 0};
        long num = fp_norm(3 * a.x * a.x + 2 * c.a2 * a.x + c.a4 - c.a1 * a.y, p);
        long den = fp_norm(2 * a.y + c.a1 * a.x + c.a3, p);
        lam = fp_norm(num * fp_inv(den, p), p);
    } else {
        lam = fp_norm(fp_norm(b.y - a.y, p) * fp_inv(fp_norm(b.x - a.x, p), p), p);
    }
    long x3 = fp_norm(lam * lam + c.a1 * lam - c.a2 - a.x - b.x, p);
    long y3 = fp_norm(lam * fp_norm(a.x - x3, p) - a.y - c.a1 * x3 - c.a3, p);
    return FpPt{false, x3, y3};
}

}  // namespace qptest

#endif
