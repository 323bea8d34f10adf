#pragma once
// Reference evaluator for formulas, fully independent of the quantifier
// elimination and cell pipeline. Quantifiers are decided over a finite
// candidate set: every atom boundary for the bound variable smeared by the
// lcm of the divisibility moduli, plus probes past both extremes. Beyond the
// outermost boundary every atom's truth is periodic with period dividing that
// lcm, so the candidate set is complete for the fragment we feed it.
//
// Limitation, enforced loudly: no atom may mention two distinct variables
// that are both still unbound (e.g. two nested quantified variables in one
// atom). The corpus stays inside this fragment.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qp/presburger.hpp"

namespace qptest {

using qp::presburger::Formula;
using qp::presburger::FormulaPtr;
using qp::presburger::Term;

inline long long oracle_term(const Term& t, const std::map<std::string, long long>& env) {
    long long s = t.constant.get_si();
    for (const auto& [v, c] : t.coeffs) s += c.get_si() * env.at(v);
    return s;
}

inline long long oracle_delta(const FormulaPtr& f, const std::string& v) {
    switch (f->kind) {
        case Formula::Dvd:
        case Formula::NotDvd:
            return f->t.coeff(v) != 0 ? f->n.get_si() : 1;
        case Formula::Not:
            return oracle_delta(f->a, v);
        case Formula::And:
        case Formula::Or:
            return std::lcm(oracle_delta(f->a, v), oracle_delta(f->b, v));
        case Formula::Exists:
        case Formula::Forall:
            return f->var == v ? 1 : oracle_delta(f->a, v);
        default:
            return 1;
    }
}

inline void oracle_bounds(const FormulaPtr& f, const std::string& v,
                          const std::map<std::string, long long>& env,
                          std::vector<long long>& out) {
    switch (f->kind) {
        case Formula::Leq0: {
            long long c = f->t.coeff(v).get_si();
            if (c == 0) return;
            long long rest = f->t.constant.get_si();
            for (const auto& [w, cw] : f->t.coeffs) {
                if (w == v) continue;
                auto it = env.find(w);
                if (it == env.end())
                    throw std::logic_error("oracle fragment: atom couples two unbound variables");
                rest += cw.get_si() * it->second;
            }
            // boundary of c*v + rest = 0, both roundings
            long long q = rest / c;
            out.push_back(-q);
            out.push_back(-q - 1);
            out.push_back(-q + 1);
            return;
        }
        case Formula::Not:
            oracle_bounds(f->a, v, env, out);
            return;
        case Formula::And:
        case Formula::Or:
            oracle_bounds(f->a, v, env, out);
            oracle_bounds(f->b, v, env, out);
            return;
        case Formula::Exists:
        case Formula::Forall:
            if (f->var != v) oracle_bounds(f->a, v, env, out);
            return;
        default:
            return;
    }
}

inline bool oracle_eval(const FormulaPtr& f, std::map<std::string, long long>& env) {
    switch (f->kind) {
        case Formula::True:
            return true;
        case Formula::False:
            return false;
        case Formula::Leq0:
            return oracle_term(f->t, env) <= 0;
        case Formula::Dvd:
            return oracle_term(f->t, env) % f->n.get_si() == 0;
        case Formula::NotDvd:
            return oracle_term(f->t, env) % f->n.get_si() != 0;
        case Formula::Not:
            return !oracle_eval(f->a, env);
        case Formula::And:
            return oracle_eval(f->a, env) && oracle_eval(f->b, env);
        case Formula::Or:
            return oracle_eval(f->a, env) || oracle_eval(f->b, env);
        case Formula::Exists:
        case Formula::Forall: {
            long long delta = oracle_delta(f->a, f->var);
            std::vector<long long> bs;
            oracle_bounds(f->a, f->var, env, bs);
            std::set<long long> cand;
            if (bs.empty()) {
                for (long long j = 0; j < delta; ++j) cand.insert(j);
            } else {
                long long lo = *std::min_element(bs.begin(), bs.end());
                long long hi = *std::max_element(bs.begin(), bs.end());
                for (long long b : bs)
                    for (long long j = -delta; j <= delta; ++j) cand.insert(b + j);
                for (long long j = 0; j < delta; ++j) {
                    cand.insert(lo - delta - j);
                    cand.insert(hi + delta + j);
                }
            }
            auto saved = env.find(f->var) != env.end()
                             ? std::optional<long long>(env[f->var])
                             : std::nullopt;
            bool result = f->kind == Formula::Forall;
            for (long long c : cand) {
                env[f->var] = c;
                bool b = oracle_eval(f->a, env);
                if (f->kind == Formula::Exists ? b : !b) {
                    result = f->kind == Formula::Exists;
                    break;
                }
            }
            if (saved)
                env[f->var] = *saved;
            else
                env.erase(f->var);
            return result;
        }
    }
    throw std::logic_error("unreachable formula kind");
}

inline bool oracle_member(const FormulaPtr& f, const std::string& var, long long x) {
    std::map<std::string, long long> env{{var, x}};
    return oracle_eval(f, env);
}

} // namespace qptest
