#pragma once
#include <optional>
#include <string>
#include <vector>

#include "qp/error.hpp"

namespace qp::abelian {

// Finite abelian group in invariant factor form: Z/n1 x ... x Z/nk with
// n1 | n2 | ... | nk, elements as integer tuples reduced componentwise.
class FiniteAbelian {
public:
    using Elem = std::vector<long>;

    // Requires the divisibility chain (use from_orders to normalize first).
    explicit FiniteAbelian(std::vector<long> invariant_factors);

    // Any list of cyclic orders, normalized to invariant factor form.
    static FiniteAbelian from_orders(const std::vector<long>& orders);

    const std::vector<long>& orders() const { return orders_; }
    size_t rank() const { return orders_.size(); }
    long order() const { return order_; }
    long exponent() const { return orders_.empty() ? 1 : orders_.back(); }

    Elem zero() const;
    Elem reduce(const Elem& raw) const;  // componentwise mod; checks arity
    Elem add(const Elem& a, const Elem& b) const;
    Elem neg(const Elem& a) const;
    Elem mul(long k, const Elem& a) const;
    bool is_zero(const Elem& a) const;

    // dense element index in [0, order) and back, row-major by component
    long index_of(const Elem& a) const;
    Elem element_at(long index) const;

    // All elements of the subgroup generated by gens, sorted by index.
    std::vector<Elem> span(const std::vector<Elem>& gens) const;

private:
    std::vector<long> orders_;
    long order_ = 1;
};

struct SplitResult {
    bool split = false;
    // split: images of the standard generators e_1..e_k under a homomorphic
    // retraction G -> K that is the identity on K
    std::vector<FiniteAbelian::Elem> retraction;
    // not split: an n with nG meet K != nK, and an element of the difference
    long witness_n = 0;
    FiniteAbelian::Elem witness;
};

// Decides whether the subgroup generated by gens is a direct summand, by the
// divisor criterion (nG meet K = nK for every n dividing the exponent). When
// it holds a retraction is built explicitly: Smith normal form of the
// combined relation matrix gives G/K as cyclic factors, their lifts are
// corrected inside K, and the complement they span determines the retraction.
SplitResult torsion_split(const FiniteAbelian& g, const std::vector<FiniteAbelian::Elem>& gens);

// Apply a retraction (images of standard generators) to an element.
FiniteAbelian::Elem apply_on_basis(const FiniteAbelian& g,
                                   const std::vector<FiniteAbelian::Elem>& images,
                                   const FiniteAbelian::Elem& x);

// Every subgroup, as sorted element-index lists, by closure BFS over the
// lattice. Needs order <= 64 (the acceptance sweep bound); throws
// "resource_cap" beyond that.
std::vector<std::vector<long>> all_subgroups(const FiniteAbelian& g);

} // namespace qp::abelian
