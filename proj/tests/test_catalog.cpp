#include <functional>
#include <string>
#include <vector>

#include "catalog_samplers.hpp"
#include "doctest.h"
#include "qp/catalog.hpp"

using namespace qp::catalog;
using qp::Ctx;
using qp::Error;
using qp::Padic;
using qp::make_context;

namespace {

void check_error_code(const std::function<void()>& fn, const std::string& code) {
    try {
        fn();
        FAIL("expected error with code ", code);
    } catch (const Error& e) {
        CHECK(e.code() == code);
    }
}

// every family instantiable at this odd prime, both torus square classes
std::vector<GroupDescriptor> odd_prime_descriptors(const Ctx& ctx) {
    long p = static_cast<long>(ctx->prime());
    Padic unit_d = Padic::from_long(ctx, static_cast<long>(qp::smallest_nonresidue(ctx->prime())));
    Padic ramified_d = Padic::from_long(ctx, p);
    return {
        GroupDescriptor::additive_qp(ctx),
        GroupDescriptor::additive_d(ctx, 0),
        GroupDescriptor::additive_d(ctx, 2),
        GroupDescriptor::nth_powers(ctx, 2),
        GroupDescriptor::nth_powers(ctx, 3),
        GroupDescriptor::nth_powers(ctx, p),
        GroupDescriptor::one_units(ctx, 1),
        GroupDescriptor::one_units(ctx, 2),
        GroupDescriptor::lattice_quotient(ctx, Padic::from_parts(ctx, 3, 1)),
        GroupDescriptor::lattice_quotient(ctx, Padic::from_parts(ctx, 5, 1 + p)),
        GroupDescriptor::twisted_torus(ctx, unit_d),
        GroupDescriptor::twisted_torus(ctx, ramified_d),
        GroupDescriptor::torus_level(ctx, unit_d, 1),
        GroupDescriptor::torus_level(ctx, ramified_d, 2),
    };
}

// Multiplicative families compute exactly on canonical forms. Families built
// on addition inherit the window semantics of the number model: a sum whose
// valuation jumps carries a higher window, so the two association orders can
// disagree above the input-determined precision. Those families are compared
// at congruence level min(input valuations) + N, the precision the inputs
// determine; the multiplicative ones canonically.
bool window_congruent(const Padic& u, const Padic& v, long level) {
    Padic d = u - v;
    return d.is_zero() || d.val() >= level;
}

long payload_floor(const GroupElement& g) {
    long f = 0;
    if (!g.x().is_zero()) f = std::min(f, g.x().val());
    if (g.is_pair() && !g.y().is_zero()) f = std::min(f, g.y().val());
    return f;
}

bool equal_at_inputs(const GroupElement& u, const GroupElement& v, long floor_val) {
    switch (u.descriptor().family()) {
        case Family::PowersOfUnits:
        case Family::Ualpha:
        case Family::LatticeQuotient:
            return equals(u, v);
        default: {
            long level = floor_val + u.descriptor().ctx()->precision();
            if (!window_congruent(u.x(), v.x(), level)) return false;
            if (u.is_pair() && !window_congruent(u.y(), v.y(), level)) return false;
            return true;
        }
    }
}

void check_axioms(std::mt19937_64& rng, const GroupDescriptor& desc, int triples) {
    auto e = identity(desc);
    for (int i = 0; i < triples; ++i) {
        auto a = qptest::random_element(rng, desc);
        auto b = qptest::random_element(rng, desc);
        auto c = qptest::random_element(rng, desc);
        long f3 = std::min({payload_floor(a), payload_floor(b), payload_floor(c)});
        CHECK(equal_at_inputs(group_op(group_op(a, b), c), group_op(a, group_op(b, c)), f3));
        CHECK(equals(group_op(a, b), group_op(b, a)));
        CHECK(equals(group_op(a, e), a));
        CHECK(equals(group_op(e, a), a));
        CHECK(equals(group_op(a, inverse(a)), e));
        CHECK(equals(group_op(inverse(a), a), e));
    }
}

} // namespace

TEST_CASE("descriptor construction validates parameters") {
    auto c5 = make_context(5, 20);
    auto c2 = make_context(2, 20);
    check_error_code([&] { GroupDescriptor::additive_d(c5, -1); }, "bad_descriptor");
    check_error_code([&] { GroupDescriptor::nth_powers(c5, 0); }, "bad_descriptor");
    check_error_code([&] { GroupDescriptor::one_units(c5, 0); }, "bad_descriptor");
    check_error_code([&] { GroupDescriptor::one_units(c2, 1); }, "bad_descriptor");
    CHECK(GroupDescriptor::one_units(c2, 2).alpha() == 2);
    check_error_code([&] { GroupDescriptor::lattice_quotient(c5, Padic::one(c5)); },
                     "bad_descriptor");
    check_error_code([&] { GroupDescriptor::lattice_quotient(c5, Padic::zero(c5)); },
                     "bad_descriptor");
    check_error_code(
        [&] { GroupDescriptor::torus_level(c2, Padic::from_long(c2, 3), 1); },
        "bad_descriptor");
    CHECK(GroupDescriptor::torus_level(c2, Padic::from_long(c2, 3), 2).alpha() == 2);
    check_error_code([&] { GroupDescriptor::twisted_torus(c5, Padic::zero(c5)); },
                     "bad_descriptor");
}

TEST_CASE("torus parameter is normalized to v(d) in {0,1} and must be a non-square") {
    auto ctx = make_context(5, 20);
    auto d50 = GroupDescriptor::twisted_torus(ctx, Padic::from_long(ctx, 50));
    CHECK(d50.d() == Padic::from_long(ctx, 2));
    auto d125 = GroupDescriptor::twisted_torus(ctx, Padic::from_long(ctx, 125));
    CHECK(d125.d() == Padic::from_long(ctx, 5));
    auto d20 = GroupDescriptor::twisted_torus(ctx, Padic::from_long(ctx, 20));
    CHECK(d20.d() == Padic::from_long(ctx, 20));
    check_error_code([&] { GroupDescriptor::twisted_torus(ctx, Padic::from_long(ctx, 4)); },
                     "bad_descriptor");
    check_error_code([&] { GroupDescriptor::twisted_torus(ctx, Padic::from_long(ctx, 100)); },
                     "bad_descriptor");
}

TEST_CASE("family names round trip") {
    for (Family f : {Family::AdditiveQp, Family::AdditiveDalpha, Family::PowersOfUnits,
                     Family::Ualpha, Family::LatticeQuotient, Family::TwistedTorus,
                     Family::TorusFalpha})
        CHECK(family_from_name(family_name(f)) == f);
    check_error_code([] { family_from_name("NoSuchFamily"); }, "bad_descriptor");
}

TEST_CASE("group axioms hold for every family at odd primes") {
    auto rng = qptest::make_rng(0xabcddcba01ull);
    for (unsigned long p : {3ul, 5ul, 7ul}) {
        auto ctx = make_context(p, 20);
        for (const auto& desc : odd_prime_descriptors(ctx)) check_axioms(rng, desc, 12);
    }
}

TEST_CASE("group axioms hold at p = 2 with the level restriction") {
    auto rng = qptest::make_rng(0xabcddcba02ull);
    auto ctx = make_context(2, 20);
    Padic d3 = Padic::from_long(ctx, 3);
    std::vector<GroupDescriptor> descs = {
        GroupDescriptor::additive_qp(ctx),
        GroupDescriptor::additive_d(ctx, 1),
        GroupDescriptor::nth_powers(ctx, 3),
        GroupDescriptor::one_units(ctx, 2),
        GroupDescriptor::lattice_quotient(ctx, Padic::from_parts(ctx, 4, 1)),
        GroupDescriptor::twisted_torus(ctx, d3),
        GroupDescriptor::torus_level(ctx, d3, 2),
    };
    for (const auto& desc : descs) check_axioms(rng, desc, 10);
}

TEST_CASE("lattice product wraps valuations past v(a)") {
    auto ctx = make_context(5, 20);
    auto desc = GroupDescriptor::lattice_quotient(ctx, Padic::from_long(ctx, 125));
    GroupElement g(desc, Padic::from_long(ctx, 5));
    GroupElement h(desc, Padic::from_long(ctx, 25));
    auto prod = group_op(g, h);
    CHECK(prod.x() == Padic::one(ctx));
    auto sq = group_op(h, h);
    CHECK(sq.x() == Padic::from_long(ctx, 5));
    auto low = group_op(g, g);
    CHECK(low.x() == Padic::from_long(ctx, 25));
}

TEST_CASE("lattice reduction is the canonical surjection") {
    auto rng = qptest::make_rng(0xabcddcba03ull);
    for (unsigned long p : {3ul, 7ul}) {
        auto ctx = make_context(p, 20);
        auto desc = GroupDescriptor::lattice_quotient(ctx, Padic::from_parts(ctx, 3, 1));
        for (int i = 0; i < 40; ++i) {
            Padic b1 = qptest::random_padic(rng, ctx, 0, 8);
            Padic b2 = qptest::random_padic(rng, ctx, 0, 8);
            auto direct = lattice_reduce(desc, b1 * b2);
            auto stepwise = group_op(lattice_reduce(desc, b1), lattice_reduce(desc, b2));
            CHECK(equals(direct, stepwise));
        }
        check_error_code([&] { lattice_reduce(desc, Padic::zero(ctx)); }, "not_a_member");
        check_error_code([&] { lattice_reduce(desc, Padic::from_parts(ctx, -1, 1)); },
                         "not_a_member");
        check_error_code(
            [&] { lattice_reduce(GroupDescriptor::additive_qp(ctx), Padic::one(ctx)); },
            "domain_violation");
    }
}

TEST_CASE("power family membership is witness based") {
    auto ctx = make_context(5, 20);
    auto squares = GroupDescriptor::nth_powers(ctx, 2);
    CHECK(contains(squares, Padic::from_long(ctx, 4)));
    CHECK(contains(squares, Padic::from_long(ctx, 9)));
    CHECK(!contains(squares, Padic::from_long(ctx, 2)));
    CHECK(!contains(squares, Padic::from_long(ctx, 5)));
    CHECK(!contains(squares, Padic::zero(ctx)));
    check_error_code([&] { GroupElement(squares, Padic::from_long(ctx, 2)); }, "not_a_member");
}

TEST_CASE("membership violations are rejected at construction") {
    auto ctx = make_context(5, 20);
    check_error_code(
        [&] { GroupElement(GroupDescriptor::one_units(ctx, 1), Padic::from_long(ctx, 2)); },
        "not_a_member");
    check_error_code(
        [&] { GroupElement(GroupDescriptor::additive_d(ctx, 2), Padic::from_long(ctx, 5)); },
        "not_a_member");
    auto h = GroupDescriptor::lattice_quotient(ctx, Padic::from_long(ctx, 125));
    check_error_code([&] { GroupElement(h, Padic::from_long(ctx, 125)); }, "not_a_member");
    check_error_code([&] { GroupElement(h, Padic::zero(ctx)); }, "not_a_member");
    auto torus = GroupDescriptor::twisted_torus(ctx, Padic::from_long(ctx, 2));
    check_error_code([&] { GroupElement(torus, Padic::from_long(ctx, 2), Padic::zero(ctx)); },
                     "not_a_member");
    check_error_code([&] { GroupElement(torus, Padic::one(ctx)); }, "bad_descriptor");
    check_error_code(
        [&] { GroupElement(GroupDescriptor::additive_qp(ctx), Padic::one(ctx), Padic::one(ctx)); },
        "bad_descriptor");
}

TEST_CASE("operands must share a descriptor") {
    auto c3 = make_context(3, 20);
    auto c5 = make_context(5, 20);
    GroupElement a(GroupDescriptor::additive_qp(c3), Padic::one(c3));
    GroupElement b(GroupDescriptor::additive_qp(c5), Padic::one(c5));
    check_error_code([&] { group_op(a, b); }, "descriptor_mismatch");
    GroupElement c(GroupDescriptor::additive_d(c3, 0), Padic::one(c3));
    check_error_code([&] { group_op(a, c); }, "descriptor_mismatch");
    check_error_code([&] { equals(a, c); }, "descriptor_mismatch");
}

TEST_CASE("torus product matches the embedded matrix product") {
    auto rng = qptest::make_rng(0xabcddcba04ull);
    for (unsigned long p : {3ul, 7ul}) {
        auto ctx = make_context(p, 20);
        for (const Padic& d : {Padic::from_long(ctx, static_cast<long>(qp::smallest_nonresidue(p))),
                               Padic::from_long(ctx, static_cast<long>(p))}) {
            auto desc = GroupDescriptor::twisted_torus(ctx, d);
            for (int i = 0; i < 15; ++i) {
                auto g = qptest::random_element(rng, desc);
                auto h = qptest::random_element(rng, desc);
                auto prod = group_op(g, h);
                // [[x, dy], [y, x]] times the primed matrix, entrywise
                Padic tl = g.x() * h.x() + desc.d() * g.y() * h.y();
                Padic bl = g.y() * h.x() + g.x() * h.y();
                Padic tr = g.x() * desc.d() * h.y() + desc.d() * g.y() * h.x();
                Padic br = g.y() * desc.d() * h.y() + g.x() * h.x();
                long prec = ctx->precision();
                CHECK(prod.x() == tl);
                CHECK(prod.y() == bl);
                CHECK(window_congruent(tr, desc.d() * prod.y(), prec));
                CHECK(window_congruent(br, prod.x(), prec));
                // determinant is the norm, so it stays 1
                CHECK(prod.x() * prod.x() - desc.d() * prod.y() * prod.y() == Padic::one(ctx));
            }
        }
    }
}

TEST_CASE("filtration indices match residue counts") {
    auto c5 = make_context(5, 20);
    CHECK(filtration_index(GroupDescriptor::one_units(c5, 1), 1, 2) == 5);
    CHECK(filtration_index(GroupDescriptor::one_units(c5, 1), 1, 1) == 1);
    CHECK(filtration_index(GroupDescriptor::additive_d(c5, 0), 0, 2) == 25);
    CHECK(filtration_index(GroupDescriptor::additive_d(c5, 0), 3, 3) == 1);
    auto c2 = make_context(2, 20);
    CHECK(filtration_index(GroupDescriptor::one_units(c2, 2), 2, 5) == 8);
    for (unsigned long p : {3ul, 5ul}) {
        auto ctx = make_context(p, 20);
        Padic d = Padic::from_long(ctx, static_cast<long>(qp::smallest_nonresidue(p)));
        auto f = GroupDescriptor::torus_level(ctx, d, 2);
        CHECK(filtration_index(f, 2, 3) == static_cast<long>(p));
        CHECK(filtration_index(f, 2, 4) == static_cast<long>(p * p));
    }
    Padic d2 = Padic::from_long(c2, 3);
    CHECK(filtration_index(GroupDescriptor::torus_level(c2, d2, 2), 2, 4) == 4);
}

TEST_CASE("filtration indices multiply along towers") {
    for (unsigned long p : {3ul, 5ul, 7ul}) {
        auto ctx = make_context(p, 20);
        auto u = GroupDescriptor::one_units(ctx, 1);
        CHECK(filtration_index(u, 1, 4) == filtration_index(u, 1, 2) * filtration_index(u, 2, 4));
        auto dd = GroupDescriptor::additive_d(ctx, 0);
        CHECK(filtration_index(dd, 0, 3) == filtration_index(dd, 0, 1) * filtration_index(dd, 1, 3));
        Padic d = Padic::from_long(ctx, static_cast<long>(qp::smallest_nonresidue(p)));
        auto f = GroupDescriptor::torus_level(ctx, d, 2);
        CHECK(filtration_index(f, 2, 4) == filtration_index(f, 2, 3) * filtration_index(f, 3, 4));
    }
}

TEST_CASE("filtration preconditions and limits") {
    auto ctx = make_context(5, 20);
    auto u = GroupDescriptor::one_units(ctx, 1);
    check_error_code([&] { filtration_index(u, 0, 2); }, "domain_violation");
    check_error_code([&] { filtration_index(u, 3, 2); }, "domain_violation");
    check_error_code([&] { filtration_index(u, 1, 25); }, "precision_insufficient");
    check_error_code([&] { filtration_index(u, 1, 12); }, "resource_cap");
    check_error_code([&] { filtration_index(GroupDescriptor::additive_qp(ctx), 1, 2); },
                     "domain_violation");
    check_error_code(
        [&] { filtration_index(GroupDescriptor::twisted_torus(ctx, Padic::from_long(ctx, 2)), 2, 3); },
        "domain_violation");
    auto f = GroupDescriptor::torus_level(ctx, Padic::from_long(ctx, 2), 2);
    check_error_code([&] { filtration_index(f, 1, 3); }, "domain_violation");
    auto c2 = make_context(2, 20);
    check_error_code([&] { filtration_index(GroupDescriptor::one_units(c2, 2), 1, 3); },
                     "domain_violation");
}

TEST_CASE("descriptor equality distinguishes parameters") {
    auto ctx = make_context(5, 20);
    CHECK(GroupDescriptor::one_units(ctx, 1) == GroupDescriptor::one_units(ctx, 1));
    CHECK(GroupDescriptor::one_units(ctx, 1) != GroupDescriptor::one_units(ctx, 2));
    CHECK(GroupDescriptor::nth_powers(ctx, 2) != GroupDescriptor::nth_powers(ctx, 3));
    CHECK(GroupDescriptor::twisted_torus(ctx, Padic::from_long(ctx, 2)) !=
          GroupDescriptor::twisted_torus(ctx, Padic::from_long(ctx, 5)));
    auto other = make_context(5, 24);
    CHECK(GroupDescriptor::additive_qp(ctx) != GroupDescriptor::additive_qp(other));
}
