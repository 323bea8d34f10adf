#pragma once
#include <optional>
#include <string>

#include "qp/error.hpp"
#include "qp/padic.hpp"

namespace qp::catalog {

// The non-elliptic one-dimensional group families over Q_p. Scalar families
// carry a single p-adic payload, torus families a norm-one pair (x, y) with
// x^2 - d y^2 = 1.
enum class Family {
    AdditiveQp,      // (Q_p, +)
    AdditiveDalpha,  // D_alpha = {v(x) >= alpha} under +, D_0 = Z_p
    PowersOfUnits,   // ((Q_p^x)^n, *)
    Ualpha,          // one-units of level alpha: v(1 - x) >= alpha
    LatticeQuotient, // H_a: residues {0 <= v(b) < v(a)} with wrapped product
    TwistedTorus,    // G(d): norm-one pairs over Q_p(sqrt d)
    TorusFalpha,     // F_alpha inside G(d): v(1-x) >= alpha, v(y) >= alpha
};

std::string family_name(Family f);
Family family_from_name(const std::string& name);

class GroupDescriptor {
public:
    static GroupDescriptor additive_qp(const Ctx& ctx);
    static GroupDescriptor additive_d(const Ctx& ctx, long alpha);
    static GroupDescriptor nth_powers(const Ctx& ctx, long n);
    static GroupDescriptor one_units(const Ctx& ctx, long alpha);
    static GroupDescriptor lattice_quotient(const Ctx& ctx, const Padic& a);
    static GroupDescriptor twisted_torus(const Ctx& ctx, const Padic& d);
    static GroupDescriptor torus_level(const Ctx& ctx, const Padic& d, long alpha);

    Family family() const { return family_; }
    const Ctx& ctx() const { return ctx_; }
    long alpha() const;
    long n() const;
    const Padic& a() const;  // LatticeQuotient
    const Padic& d() const;  // torus families, normalized to v(d) in {0,1}
    bool is_pair_family() const;

    bool operator==(const GroupDescriptor& o) const;
    bool operator!=(const GroupDescriptor& o) const { return !(*this == o); }

private:
    GroupDescriptor(Family f, Ctx ctx) : family_(f), ctx_(std::move(ctx)) {}
    Family family_;
    Ctx ctx_;
    long alpha_ = 0;
    long n_ = 1;
    std::optional<Padic> a_;
    std::optional<Padic> d_;
};

class GroupElement {
public:
    GroupElement(GroupDescriptor desc, Padic x);
    GroupElement(GroupDescriptor desc, Padic x, Padic y);

    const GroupDescriptor& descriptor() const { return desc_; }
    const Padic& x() const { return x_; }
    const Padic& y() const;
    bool is_pair() const { return y_.has_value(); }

private:
    GroupDescriptor desc_;
    Padic x_;
    std::optional<Padic> y_;
};

bool contains(const GroupDescriptor& d, const Padic& x);
bool contains(const GroupDescriptor& d, const Padic& x, const Padic& y);

GroupElement identity(const GroupDescriptor& d);
GroupElement group_op(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);
bool equals(const GroupElement& g, const GroupElement& h);

// Canonical surjection O(a) -> H_a: divides out a-powers until the payload
// valuation lands in [0, v(a)). Requires v(b) >= 0.
GroupElement lattice_reduce(const GroupDescriptor& d, const Padic& b);

// Index [level_alpha : level_beta] of the valuation filtration, by coset
// enumeration. Families: AdditiveDalpha (alpha >= 0), Ualpha (alpha >= 1,
// alpha >= 2 at p = 2), TorusFalpha (alpha >= 2). Needs beta >= alpha and
// context precision >= beta.
long filtration_index(const GroupDescriptor& d, long alpha, long beta);

} // namespace qp::catalog
