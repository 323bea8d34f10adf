#include "qp/catalog.hpp"

#include <gmpxx.h>

namespace qp::catalog {

namespace {

constexpr long kIndexCap = 1000000L;

long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

bool val_at_least(const Padic& x, long bound) {
    return x.is_zero() || x.val() >= bound;
}

void require_same_descriptor(const GroupElement& g, const GroupElement& h) {
    if (g.descriptor() != h.descriptor())
        throw Error("descriptor_mismatch", "operands belong to different groups");
}

// square root of s with v(1 - root) >= alpha, for s = 1 + (something deep)
Padic sqrt_near_one(const Padic& s, long alpha) {
    auto r = is_nth_power(s, 2);
    if (!r.is_power || !r.witness)
        throw Error("internal_error", "expected a square near one");
    const Padic& w = *r.witness;
    auto one = Padic::one(w.ctx());
    if (val_at_least(one - w, alpha)) return w;
    if (val_at_least(one + w, alpha)) return -w;
    throw Error("internal_error", "neither square root is near one");
}

} // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::AdditiveQp: return "AdditiveQp";
        case Family::AdditiveDalpha: return "AdditiveDalpha";
        case Family::PowersOfUnits: return "PowersOfUnits";
        case Family::Ualpha: return "Ualpha";
        case Family::LatticeQuotient: return "LatticeQuotient";
        case Family::TwistedTorus: return "TwistedTorus";
        case Family::TorusFalpha: return "TorusFalpha";
    }
    throw Error("internal_error", "unknown family tag");
}

Family family_from_name(const std::string& name) {
    for (Family f : {Family::AdditiveQp, Family::AdditiveDalpha, Family::PowersOfUnits,
                     Family::Ualpha, Family::LatticeQuotient, Family::TwistedTorus,
                     Family::TorusFalpha})
        if (family_name(f) == name) return f;
    throw Error("bad_descriptor", "unknown family name: " + name);
}

GroupDescriptor GroupDescriptor::additive_qp(const Ctx& ctx) {
    return GroupDescriptor(Family::AdditiveQp, ctx);
}

GroupDescriptor GroupDescriptor::additive_d(const Ctx& ctx, long alpha) {
    if (alpha < 0) throw Error("bad_descriptor", "additive level requires alpha >= 0");
    GroupDescriptor d(Family::AdditiveDalpha, ctx);
    d.alpha_ = alpha;
    return d;
}

GroupDescriptor GroupDescriptor::nth_powers(const Ctx& ctx, long n) {
    if (n < 1) throw Error("bad_descriptor", "power family requires n >= 1");
    GroupDescriptor d(Family::PowersOfUnits, ctx);
    d.n_ = n;
    return d;
}

GroupDescriptor GroupDescriptor::one_units(const Ctx& ctx, long alpha) {
    long min_alpha = ctx->prime() == 2 ? 2 : 1;
    if (alpha < min_alpha)
        throw Error("bad_descriptor", "one-unit level requires alpha >= " + std::to_string(min_alpha) +
                                          " for p = " + std::to_string(ctx->prime()));
    GroupDescriptor d(Family::Ualpha, ctx);
    d.alpha_ = alpha;
    return d;
}

GroupDescriptor GroupDescriptor::lattice_quotient(const Ctx& ctx, const Padic& a) {
    if (a.is_zero() || a.val() < 1)
        throw Error("bad_descriptor", "lattice modulus requires finite v(a) >= 1");
    GroupDescriptor d(Family::LatticeQuotient, ctx);
    d.a_ = a.to_precision(ctx);
    return d;
}

namespace {

Padic normalized_torus_d(const Ctx& ctx, const Padic& d) {
    if (d.is_zero()) throw Error("bad_descriptor", "torus parameter d must be nonzero");
    // strip even-valuation square factors so v(d) lands in {0, 1}
    Padic nd = d.to_precision(ctx).shift(-2 * floor_div(d.val(), 2));
    if (square_class(nd).label == "1")
        throw Error("bad_descriptor", "torus parameter d must be a non-square");
    return nd;
}

} // namespace

GroupDescriptor GroupDescriptor::twisted_torus(const Ctx& ctx, const Padic& d) {
    GroupDescriptor g(Family::TwistedTorus, ctx);
    g.d_ = normalized_torus_d(ctx, d);
    return g;
}

GroupDescriptor GroupDescriptor::torus_level(const Ctx& ctx, const Padic& d, long alpha) {
    long min_alpha = ctx->prime() == 2 ? 2 : 1;
    if (alpha < min_alpha)
        throw Error("bad_descriptor", "torus level requires alpha >= " + std::to_string(min_alpha) +
                                          " for p = " + std::to_string(ctx->prime()));
    GroupDescriptor g(Family::TorusFalpha, ctx);
    g.d_ = normalized_torus_d(ctx, d);
    g.alpha_ = alpha;
    return g;
}

long GroupDescriptor::alpha() const {
    if (family_ != Family::AdditiveDalpha && family_ != Family::Ualpha &&
        family_ != Family::TorusFalpha)
        throw Error("bad_descriptor", "family has no level parameter");
    return alpha_;
}

long GroupDescriptor::n() const {
    if (family_ != Family::PowersOfUnits)
        throw Error("bad_descriptor", "family has no exponent parameter");
    return n_;
}

const Padic& GroupDescriptor::a() const {
    if (!a_) throw Error("bad_descriptor", "family has no lattice modulus");
    return *a_;
}

const Padic& GroupDescriptor::d() const {
    if (!d_) throw Error("bad_descriptor", "family has no torus parameter");
    return *d_;
}

bool GroupDescriptor::is_pair_family() const {
    return family_ == Family::TwistedTorus || family_ == Family::TorusFalpha;
}

bool GroupDescriptor::operator==(const GroupDescriptor& o) const {
    if (family_ != o.family_) return false;
    if (ctx_->prime() != o.ctx_->prime() || ctx_->precision() != o.ctx_->precision()) return false;
    if (alpha_ != o.alpha_ || n_ != o.n_) return false;
    if (a_.has_value() != o.a_.has_value() || (a_ && !(*a_ == *o.a_))) return false;
    if (d_.has_value() != o.d_.has_value() || (d_ && !(*d_ == *o.d_))) return false;
    return true;
}

GroupElement::GroupElement(GroupDescriptor desc, Padic x)
    : desc_(std::move(desc)), x_(std::move(x)) {
    if (desc_.is_pair_family())
        throw Error("bad_descriptor", "torus elements need a coordinate pair");
    if (!contains(desc_, x_))
        throw Error("not_a_member", "payload fails the membership predicate of " +
                                        family_name(desc_.family()));
}

GroupElement::GroupElement(GroupDescriptor desc, Padic x, Padic y)
    : desc_(std::move(desc)), x_(std::move(x)), y_(std::move(y)) {
    if (!desc_.is_pair_family())
        throw Error("bad_descriptor", "scalar families take a single payload");
    if (!contains(desc_, x_, *y_))
        throw Error("not_a_member", "pair fails the membership predicate of " +
                                        family_name(desc_.family()));
}

const Padic& GroupElement::y() const {
    if (!y_) throw Error("bad_descriptor", "scalar element has no second coordinate");
    return *y_;
}

bool contains(const GroupDescriptor& d, const Padic& x) {
    switch (d.family()) {
        case Family::AdditiveQp:
            return true;
        case Family::AdditiveDalpha:
            return val_at_least(x, d.alpha());
        case Family::PowersOfUnits:
            return !x.is_zero() && is_nth_power(x, d.n()).is_power;
        case Family::Ualpha:
            return !x.is_zero() && val_at_least(Padic::one(d.ctx()) - x, d.alpha());
        case Family::LatticeQuotient:
            return !x.is_zero() && x.val() >= 0 && x.val() < d.a().val();
        default:
            throw Error("bad_descriptor", "torus membership takes a coordinate pair");
    }
}

bool contains(const GroupDescriptor& d, const Padic& x, const Padic& y) {
    if (!d.is_pair_family())
        throw Error("bad_descriptor", "scalar membership takes a single payload");
    auto one = Padic::one(d.ctx());
    if (!(x * x - d.d() * y * y == one)) return false;
    if (d.family() == Family::TwistedTorus) return true;
    return val_at_least(one - x, d.alpha()) && val_at_least(y, d.alpha());
}

GroupElement identity(const GroupDescriptor& d) {
    switch (d.family()) {
        case Family::AdditiveQp:
        case Family::AdditiveDalpha:
            return GroupElement(d, Padic::zero(d.ctx()));
        case Family::PowersOfUnits:
        case Family::Ualpha:
        case Family::LatticeQuotient:
            return GroupElement(d, Padic::one(d.ctx()));
        case Family::TwistedTorus:
        case Family::TorusFalpha:
            return GroupElement(d, Padic::one(d.ctx()), Padic::zero(d.ctx()));
    }
    throw Error("internal_error", "unknown family tag");
}

GroupElement group_op(const GroupElement& g, const GroupElement& h) {
    require_same_descriptor(g, h);
    const GroupDescriptor& d = g.descriptor();
    switch (d.family()) {
        case Family::AdditiveQp:
        case Family::AdditiveDalpha:
            return GroupElement(d, g.x() + h.x());
        case Family::PowersOfUnits:
        case Family::Ualpha:
            return GroupElement(d, g.x() * h.x());
        case Family::LatticeQuotient: {
            // wrapped product: divide by a when the valuations spill over
            Padic prod = g.x() * h.x();
            if (g.x().val() + h.x().val() >= d.a().val()) prod = prod / d.a();
            return GroupElement(d, prod);
        }
        case Family::TwistedTorus:
        case Family::TorusFalpha: {
            Padic x = g.x() * h.x() + d.d() * g.y() * h.y();
            Padic y = g.x() * h.y() + g.y() * h.x();
            return GroupElement(d, x, y);
        }
    }
    throw Error("internal_error", "unknown family tag");
}

GroupElement inverse(const GroupElement& g) {
    const GroupDescriptor& d = g.descriptor();
    switch (d.family()) {
        case Family::AdditiveQp:
        case Family::AdditiveDalpha:
            return GroupElement(d, -g.x());
        case Family::PowersOfUnits:
        case Family::Ualpha:
            return GroupElement(d, g.x().inverse());
        case Family::LatticeQuotient: {
            Padic inv = g.x().inverse();
            if (g.x().val() > 0) inv = inv * d.a();
            return GroupElement(d, inv);
        }
        case Family::TwistedTorus:
        case Family::TorusFalpha:
            return GroupElement(d, g.x(), -g.y());
    }
    throw Error("internal_error", "unknown family tag");
}

bool equals(const GroupElement& g, const GroupElement& h) {
    require_same_descriptor(g, h);
    if (g.is_pair()) return g.x() == h.x() && g.y() == h.y();
    return g.x() == h.x();
}

GroupElement lattice_reduce(const GroupDescriptor& d, const Padic& b) {
    if (d.family() != Family::LatticeQuotient)
        throw Error("domain_violation", "lattice reduction needs a LatticeQuotient descriptor");
    if (b.is_zero() || b.val() < 0)
        throw Error("not_a_member", "lattice reduction requires finite v(b) >= 0");
    long m = d.a().val();
    long k = b.val() / m;
    return GroupElement(d, b / d.a().pow(k));
}

long filtration_index(const GroupDescriptor& d, long alpha, long beta) {
    long p2 = d.ctx()->prime() == 2 ? 2 : 1;
    long min_alpha;
    switch (d.family()) {
        case Family::AdditiveDalpha: min_alpha = 0; break;
        case Family::Ualpha: min_alpha = std::max(1L, p2); break;
        case Family::TorusFalpha: min_alpha = 2; break;
        default:
            throw Error("domain_violation", "filtration index needs a filtered family");
    }
    if (alpha < min_alpha || beta < alpha)
        throw Error("domain_violation", "filtration levels require " + std::to_string(min_alpha) +
                                            " <= alpha <= beta");
    if (d.ctx()->precision() < beta)
        throw Error("precision_insufficient",
                    "coset enumeration at level " + std::to_string(beta) + " needs precision >= " +
                        std::to_string(beta));
    mpz_class expected;
    mpz_ui_pow_ui(expected.get_mpz_t(), d.ctx()->prime(), static_cast<unsigned long>(beta - alpha));
    if (expected > kIndexCap)
        throw Error("resource_cap", "filtration index exceeds the enumeration bound");

    const Ctx& ctx = d.ctx();
    if (d.family() == Family::AdditiveDalpha) {
        // cosets of p^beta Z_p in p^alpha Z_p: walk multiples of p^alpha mod p^beta
        mpz_class mod = ctx->prime_power(beta);
        mpz_class step = ctx->prime_power(alpha);
        mpz_class x = step % mod;
        long count = 1;
        while (x != 0) {
            x = (x + step) % mod;
            ++count;
        }
        return count;
    }
    if (d.family() == Family::Ualpha) {
        // cosets of U_beta in U_alpha: powers of 1 + p^alpha mod p^beta
        mpz_class mod = ctx->prime_power(beta);
        mpz_class gen = (1 + ctx->prime_power(alpha)) % mod;
        mpz_class x = gen;
        long count = 1;
        while (x != 1) {
            x = (x * gen) % mod;
            ++count;
        }
        return count;
    }
    // torus: walk powers of a level-alpha generator until it falls into
    // level beta; the filtration quotient is cyclic, carried over from the
    // additive one
    GroupDescriptor walk = GroupDescriptor::torus_level(ctx, d.d(), alpha);
    Padic y0 = Padic::from_parts(ctx, alpha, 1);
    Padic s = Padic::one(ctx) + walk.d() * y0 * y0;
    GroupElement t(walk, sqrt_near_one(s, alpha), y0);
    auto one = Padic::one(ctx);
    auto in_beta = [&](const GroupElement& g) {
        return val_at_least(one - g.x(), beta) && val_at_least(g.y(), beta);
    };
    GroupElement cur = t;
    long count = 1;
    long guard = 4 * mpz_get_si(expected.get_mpz_t()) + 8;
    while (!in_beta(cur)) {
        cur = group_op(cur, t);
        if (++count > guard)
            throw Error("internal_error", "coset walk failed to close");
    }
    return count;
}

} // namespace qp::catalog
