#pragma once
#include <random>

#include "qp/padic.hpp"

// Deterministic randomness shared by the test files. Every suite draws from
// its own engine so test order does not change what gets sampled.
namespace qptest {

inline std::mt19937_64 make_rng(unsigned long long seed = 0x9e3779b97f4a7c15ull) {
    return std::mt19937_64(seed);
}

inline long rand_long(std::mt19937_64& g, long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(g);
}

inline mpz_class rand_mpz_below(std::mt19937_64& g, const mpz_class& bound) {
    mpz_class r = 0;
    size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2) + 64;
    for (size_t got = 0; got < bits; got += 64) {
        r <<= 64;
        r += mpz_class(static_cast<unsigned long>(g()));
    }
    mpz_class out;
    mpz_mod(out.get_mpz_t(), r.get_mpz_t(), bound.get_mpz_t());
    return out;
}

// Nonzero element with valuation in [vmin, vmax].
inline qp::Padic random_padic(std::mt19937_64& g, const qp::Ctx& ctx, long vmin = -6, long vmax = 6) {
    long v = rand_long(g, vmin, vmax);
    mpz_class u;
    do {
        u = rand_mpz_below(g, ctx->unit_modulus());
    } while (u == 0 || mpz_divisible_ui_p(u.get_mpz_t(), ctx->prime()));
    return qp::Padic::from_parts(ctx, v, u);
}

inline qp::Padic random_unit(std::mt19937_64& g, const qp::Ctx& ctx) {
    return random_padic(g, ctx, 0, 0);
}

inline qp::Padic random_padic_or_zero(std::mt19937_64& g, const qp::Ctx& ctx, long vmin = -6,
                                      long vmax = 6) {
    if (rand_long(g, 0, 9) == 0) return qp::Padic::zero(ctx);
    return random_padic(g, ctx, vmin, vmax);
}

} // namespace qptest
