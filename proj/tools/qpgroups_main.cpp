// qpgroups: JSON front end for the library. Subcommands are grouped by
// module; every result is a single JSON document on stdout. Exit codes:
// 0 success, 1 domain error (JSON error envelope with a stable code),
// 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "qp/abelian.hpp"
#include "qp/catalog.hpp"
#include "qp/elliptic.hpp"
#include "qp/padic.hpp"
#include "qp/presburger.hpp"

using nlohmann::ordered_json;

namespace {

struct Options {
    unsigned long p = 5;
    int prec = 0;  // 0 = take the default below
    bool pretty = false;
    std::string in_file;
};

int default_precision() {
    if (const char* s = std::getenv("PADIC_DEFAULT_PREC")) {
        char* end = nullptr;
        long v = std::strtol(s, &end, 10);
        if (end && *end == '\0' && v > 0 && v < 100000) return static_cast<int>(v);
    }
    return 24;
}

qp::Ctx context_of(const Options& o) {
    return qp::make_context(o.p, o.prec > 0 ? o.prec : default_precision());
}

void emit(const ordered_json& j, const Options& o) {
    std::cout << (o.pretty ? j.dump(2) : j.dump()) << "\n";
}

// Positional payload, overridden by --in <file>.
std::string payload(const Options& o, const std::string& positional) {
    if (o.in_file.empty()) return positional;
    std::ifstream in(o.in_file);
    if (!in) throw qp::Error("io_error", "cannot open input file: " + o.in_file);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string s = buf.str();
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

ordered_json mpz_json(const mpz_class& z) {
    if (z.fits_slong_p()) return z.get_si();
    return z.get_str();
}

ordered_json padic_json(const qp::Padic& x) {
    ordered_json j;
    j["p"] = static_cast<long>(x.ctx()->prime());
    j["precision"] = x.ctx()->precision();
    j["is_zero"] = x.is_zero();
    if (x.is_zero()) {
        j["valuation"] = "inf";
    } else {
        j["valuation"] = x.val();
        j["unit"] = mpz_json(x.unit());
    }
    j["sum_form"] = x.to_sum_string();
    j["digit_form"] = x.to_digit_string();
    return j;
}

ordered_json cell_json(const qp::presburger::Cell& c) {
    ordered_json j;
    if (c.is_point) {
        j["point"] = mpz_json(c.point);
        return j;
    }
    j["lo"] = c.lo ? mpz_json(*c.lo) : ordered_json("-inf");
    j["hi"] = c.hi ? mpz_json(*c.hi) : ordered_json("+inf");
    j["mod"] = mpz_json(c.mod);
    j["res"] = mpz_json(c.res);
    return j;
}

mpz_class mpz_of_json(const ordered_json& j) {
    if (j.is_number_integer()) return mpz_class(j.get<long>());
    if (j.is_string()) return mpz_class(j.get<std::string>());
    throw qp::Error("parse_error", "expected an integer or integer string in cell JSON");
}

qp::presburger::Cell cell_from_json(const ordered_json& j) {
    using qp::presburger::Cell;
    if (!j.is_object()) throw qp::Error("parse_error", "cell JSON must be an object");
    if (j.contains("point")) return Cell::make_point(mpz_of_json(j.at("point")));
    std::optional<mpz_class> lo, hi;
    const auto& jlo = j.at("lo");
    const auto& jhi = j.at("hi");
    if (!(jlo.is_string() && jlo.get<std::string>() == "-inf")) lo = mpz_of_json(jlo);
    if (!(jhi.is_string() && jhi.get<std::string>() == "+inf")) hi = mpz_of_json(jhi);
    return Cell::make_stripe(lo, hi, mpz_of_json(j.at("mod")), mpz_of_json(j.at("res")));
}

std::vector<qp::presburger::Cell> cells_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    if (!j.is_array()) throw qp::Error("parse_error", "expected a JSON array of cells");
    std::vector<qp::presburger::Cell> cells;
    for (const auto& item : j) cells.push_back(cell_from_json(item));
    return cells;
}

const ordered_json& field(const ordered_json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw qp::Error("parse_error", std::string("missing \"") + key + "\" in input JSON");
    return j.at(key);
}

// Descriptor JSON: {"family": ..., "p", "precision", "alpha", "n", "a", "d"},
// where p and precision fall back to the global flags when absent.
qp::catalog::GroupDescriptor descriptor_from_json(const Options& o, const ordered_json& j) {
    using qp::catalog::Family;
    using qp::catalog::GroupDescriptor;
    if (!j.is_object()) throw qp::Error("parse_error", "descriptor must be a JSON object");
    if (!field(j, "family").is_string())
        throw qp::Error("parse_error", "descriptor \"family\" must be a string");
    unsigned long p = o.p;
    int prec = o.prec > 0 ? o.prec : default_precision();
    if (j.contains("p")) p = j.at("p").get<unsigned long>();
    if (j.contains("precision")) prec = j.at("precision").get<int>();
    qp::Ctx ctx = qp::make_context(p, prec);
    Family fam = qp::catalog::family_from_name(j.at("family").get<std::string>());
    auto field_long = [&](const char* key) {
        if (!field(j, key).is_number_integer())
            throw qp::Error("parse_error",
                            std::string("descriptor \"") + key + "\" must be an integer");
        return j.at(key).get<long>();
    };
    auto field_padic = [&](const char* key) {
        if (!field(j, key).is_string())
            throw qp::Error("parse_error",
                            std::string("descriptor \"") + key + "\" must be a p-adic literal");
        return qp::Padic::parse(ctx, j.at(key).get<std::string>());
    };
    switch (fam) {
        case Family::AdditiveQp: return GroupDescriptor::additive_qp(ctx);
        case Family::AdditiveDalpha: return GroupDescriptor::additive_d(ctx, field_long("alpha"));
        case Family::PowersOfUnits: return GroupDescriptor::nth_powers(ctx, field_long("n"));
        case Family::Ualpha: return GroupDescriptor::one_units(ctx, field_long("alpha"));
        case Family::LatticeQuotient: return GroupDescriptor::lattice_quotient(ctx, field_padic("a"));
        case Family::TwistedTorus: return GroupDescriptor::twisted_torus(ctx, field_padic("d"));
        case Family::TorusFalpha:
            return GroupDescriptor::torus_level(ctx, field_padic("d"), field_long("alpha"));
    }
    throw qp::Error("internal_error", "unhandled family");
}

// Element payload: a single p-adic literal for scalar families, or an
// {"x": ..., "y": ...} object for the torus families.
struct RawCoords {
    qp::Padic x;
    std::optional<qp::Padic> y;
};

RawCoords coords_from_json(const qp::catalog::GroupDescriptor& d, const ordered_json& j) {
    if (j.is_string()) return {qp::Padic::parse(d.ctx(), j.get<std::string>()), std::nullopt};
    if (j.is_object() && j.contains("x") && j.contains("y")) {
        if (!j.at("x").is_string() || !j.at("y").is_string())
            throw qp::Error("parse_error", "coordinate values must be p-adic literals");
        return {qp::Padic::parse(d.ctx(), j.at("x").get<std::string>()),
                qp::Padic::parse(d.ctx(), j.at("y").get<std::string>())};
    }
    throw qp::Error("parse_error",
                    "element must be a p-adic literal or an object with \"x\" and \"y\"");
}

qp::catalog::GroupElement element_from_json(const qp::catalog::GroupDescriptor& d,
                                            const ordered_json& j) {
    RawCoords c = coords_from_json(d, j);
    if (d.is_pair_family()) {
        if (!c.y) throw qp::Error("bad_descriptor", "this family takes a coordinate pair");
        return qp::catalog::GroupElement(d, c.x, *c.y);
    }
    if (c.y) throw qp::Error("bad_descriptor", "this family takes a single coordinate");
    return qp::catalog::GroupElement(d, c.x);
}

ordered_json element_json(const qp::catalog::GroupElement& g) {
    ordered_json j;
    j["x"] = padic_json(g.x());
    if (g.is_pair()) j["y"] = padic_json(g.y());
    return j;
}

// ---- subcommand bodies

ordered_json run_padic_eval(const Options& o, const std::string& text) {
    return padic_json(qp::Padic::parse(context_of(o), text));
}

ordered_json run_padic_class(const Options& o, const std::string& text) {
    auto cls = qp::square_class(qp::Padic::parse(context_of(o), text));
    ordered_json j;
    j["p"] = static_cast<long>(o.p);
    j["label"] = cls.label;
    j["representative"] = cls.representative.to_sum_string();
    return j;
}

ordered_json run_presburger_parse(const std::string& text) {
    auto f = qp::presburger::parse_formula(text);
    ordered_json j;
    j["free_variables"] = ordered_json::array();
    for (const auto& v : f->mentioned_free) j["free_variables"].push_back(v);
    j["nodes"] = f->size;
    return j;
}

ordered_json run_presburger_decompose(const std::string& text) {
    auto cells = qp::presburger::decompose(qp::presburger::parse_formula(text));
    ordered_json j = ordered_json::array();
    for (const auto& c : cells) j.push_back(cell_json(c));
    return j;
}

ordered_json run_presburger_subgroup(const Options& o, const std::string& text) {
    using namespace qp::presburger;
    std::vector<Cell> cells;
    if (!o.in_file.empty() || (!text.empty() && text[0] == '[')) {
        cells = cells_from_json(text);
    } else {
        cells = decompose(parse_formula(text));
    }
    auto r = recognize_subgroup(cells);
    ordered_json j;
    j["is_group"] = r.is_group;
    if (r.is_group) {
        j["n"] = mpz_json(r.n);
    } else if (r.missing_zero) {
        j["reason"] = "missing_zero";
    } else {
        j["reason"] = "not_closed";
        ordered_json w;
        w["u"] = mpz_json(r.witness_pair->first);
        w["v"] = mpz_json(r.witness_pair->second);
        w["difference"] = mpz_json(r.witness_pair->first - r.witness_pair->second);
        j["witness"] = w;
    }
    return j;
}

ordered_json run_group_check(const Options& o, const std::string& text) {
    ordered_json in = ordered_json::parse(text);
    auto desc = descriptor_from_json(o, field(in, "descriptor"));
    RawCoords c = coords_from_json(desc, field(in, "element"));
    bool member;
    if (desc.is_pair_family()) {
        if (!c.y) throw qp::Error("bad_descriptor", "this family takes a coordinate pair");
        member = qp::catalog::contains(desc, c.x, *c.y);
    } else {
        if (c.y) throw qp::Error("bad_descriptor", "this family takes a single coordinate");
        member = qp::catalog::contains(desc, c.x);
    }
    ordered_json out;
    out["family"] = qp::catalog::family_name(desc.family());
    out["member"] = member;
    return out;
}

ordered_json run_group_op(const Options& o, const std::string& text) {
    ordered_json in = ordered_json::parse(text);
    auto desc = descriptor_from_json(o, field(in, "descriptor"));
    auto g = element_from_json(desc, field(in, "g"));
    auto h = element_from_json(desc, field(in, "h"));
    return element_json(qp::catalog::group_op(g, h));
}

ordered_json run_group_index(const Options& o, const std::string& text) {
    ordered_json in = ordered_json::parse(text);
    auto desc = descriptor_from_json(o, field(in, "descriptor"));
    if (!field(in, "alpha").is_number_integer() || !field(in, "beta").is_number_integer())
        throw qp::Error("parse_error", "alpha and beta must be integers");
    long alpha = in.at("alpha").get<long>();
    long beta = in.at("beta").get<long>();
    ordered_json out;
    out["family"] = qp::catalog::family_name(desc.family());
    out["alpha"] = alpha;
    out["beta"] = beta;
    out["index"] = qp::catalog::filtration_index(desc, alpha, beta);
    return out;
}

ordered_json run_group_split(const std::string& text) {
    using qp::abelian::FiniteAbelian;
    ordered_json in = ordered_json::parse(text);
    std::vector<long> orders;
    for (const auto& v : field(in, "orders")) {
        if (!v.is_number_integer()) throw qp::Error("parse_error", "orders must be integers");
        orders.push_back(v.get<long>());
    }
    // The orders are taken literally (invariant factor chain), so element
    // coordinates keep their meaning; a broken chain is rejected.
    FiniteAbelian g{orders};
    std::vector<FiniteAbelian::Elem> gens;
    for (const auto& gj : field(in, "subgroup")) {
        if (!gj.is_array()) throw qp::Error("parse_error", "subgroup generators must be arrays");
        FiniteAbelian::Elem e;
        for (const auto& c : gj) {
            if (!c.is_number_integer())
                throw qp::Error("parse_error", "generator entries must be integers");
            e.push_back(c.get<long>());
        }
        gens.push_back(std::move(e));
    }
    auto r = qp::abelian::torsion_split(g, gens);
    ordered_json out;
    out["orders"] = orders;
    out["split"] = r.split;
    if (r.split) {
        ordered_json rows = ordered_json::array();
        for (const auto& row : r.retraction) rows.push_back(row);
        out["retraction"] = rows;
    } else {
        out["n"] = r.witness_n;
        out["witness"] = r.witness;
    }
    return out;
}

// Curve JSON: {"p": ..., "precision": ..., "a": [a1,a2,a3,a4,a6]} with the
// coefficients as p-adic literals (rationals allowed); p and precision fall
// back to the global flags.
qp::elliptic::WeierstrassCurve curve_from_json(const Options& o, const ordered_json& j) {
    if (!j.is_object()) throw qp::Error("parse_error", "curve must be a JSON object");
    unsigned long p = o.p;
    int prec = o.prec > 0 ? o.prec : default_precision();
    if (j.contains("p")) p = j.at("p").get<unsigned long>();
    if (j.contains("precision")) prec = j.at("precision").get<int>();
    qp::Ctx ctx = qp::make_context(p, prec);
    const ordered_json& arr = field(j, "a");
    if (!arr.is_array() || arr.size() != 5)
        throw qp::Error("parse_error", "curve \"a\" must list the five coefficients a1..a6");
    qp::Padic a[5] = {qp::Padic::zero(ctx), qp::Padic::zero(ctx), qp::Padic::zero(ctx),
                      qp::Padic::zero(ctx), qp::Padic::zero(ctx)};
    for (size_t i = 0; i < 5; ++i) {
        const auto& v = arr[i];
        if (v.is_number_integer())
            a[i] = qp::Padic::from_long(ctx, v.get<long>());
        else if (v.is_string())
            a[i] = qp::Padic::parse(ctx, v.get<std::string>());
        else
            throw qp::Error("parse_error", "curve coefficients must be literals or integers");
    }
    return qp::elliptic::WeierstrassCurve(a[0], a[1], a[2], a[3], a[4]);
}

// The subcommands that need more than the curve wrap it as {"curve": ...};
// the curve-only subcommands take the curve object directly.
qp::elliptic::WeierstrassCurve curve_of_input(const Options& o, const ordered_json& in) {
    if (in.is_object() && in.contains("curve")) return curve_from_json(o, in.at("curve"));
    return curve_from_json(o, in);
}

std::string lit(const qp::Padic& x) { return x.to_sum_string(); }

qp::elliptic::CurvePoint point_from_json(const qp::Ctx& ctx, const ordered_json& j) {
    if (j.is_object() && j.contains("infinity")) {
        if (j.at("infinity") != true)
            throw qp::Error("parse_error", "\"infinity\" may only be true");
        return qp::elliptic::CurvePoint::at_infinity(ctx);
    }
    if (j.is_object() && j.contains("x") && j.contains("y")) {
        auto coord = [&](const char* key) {
            const auto& v = j.at(key);
            if (v.is_number_integer()) return qp::Padic::from_long(ctx, v.get<long>());
            if (v.is_string()) return qp::Padic::parse(ctx, v.get<std::string>());
            throw qp::Error("parse_error", "point coordinates must be literals or integers");
        };
        return qp::elliptic::CurvePoint(coord("x"), coord("y"));
    }
    throw qp::Error("parse_error",
                    "point must be {\"x\", \"y\"} or {\"infinity\": true}");
}

ordered_json point_json(const qp::elliptic::CurvePoint& pt) {
    ordered_json j;
    if (pt.is_infinity()) {
        j["infinity"] = true;
        return j;
    }
    j["x"] = lit(pt.x());
    j["y"] = lit(pt.y());
    return j;
}

ordered_json curve_json(const qp::elliptic::WeierstrassCurve& e) {
    ordered_json j;
    j["p"] = static_cast<long>(e.ctx()->prime());
    j["precision"] = e.ctx()->precision();
    j["a"] = {lit(e.a1()), lit(e.a2()), lit(e.a3()), lit(e.a4()), lit(e.a6())};
    return j;
}

qp::elliptic::CurveTransform transform_from_json(const qp::Ctx& ctx, const ordered_json& j) {
    auto part = [&](const char* key) {
        const auto& v = field(j, key);
        if (v.is_number_integer()) return qp::Padic::from_long(ctx, v.get<long>());
        if (v.is_string()) return qp::Padic::parse(ctx, v.get<std::string>());
        throw qp::Error("parse_error", "transform entries must be literals or integers");
    };
    return qp::elliptic::CurveTransform{part("u"), part("r"), part("s"), part("t")};
}

ordered_json transform_json(const qp::elliptic::CurveTransform& t) {
    ordered_json j;
    j["u"] = lit(t.u);
    j["r"] = lit(t.r);
    j["s"] = lit(t.s);
    j["t"] = lit(t.t);
    return j;
}

ordered_json run_curve_invariants(const Options& o, const std::string& text) {
    auto e = curve_of_input(o, ordered_json::parse(text));
    ordered_json j = curve_json(e);
    j["b2"] = lit(e.b2());
    j["b4"] = lit(e.b4());
    j["b6"] = lit(e.b6());
    j["b8"] = lit(e.b8());
    j["c4"] = lit(e.c4());
    j["c6"] = lit(e.c6());
    j["disc"] = lit(e.disc());
    j["disc_valuation"] = e.disc().val();
    j["j"] = lit(e.j());
    return j;
}

ordered_json run_curve_add(const Options& o, const std::string& text) {
    ordered_json in = ordered_json::parse(text);
    auto e = curve_of_input(o, in);
    auto P = point_from_json(e.ctx(), field(in, "P"));
    auto Q = point_from_json(e.ctx(), field(in, "Q"));
    return point_json(qp::elliptic::add_points(e, P, Q));
}

ordered_json run_curve_transform(const Options& o, const std::string& text) {
    ordered_json in = ordered_json::parse(text);
    auto e = curve_of_input(o, in);
    auto t = transform_from_json(e.ctx(), field(in, "transform"));
    ordered_json out;
    out["curve"] = curve_json(qp::elliptic::change_of_variables(e, t));
    if (in.contains("point"))
        out["point"] = point_json(
            qp::elliptic::transport(t, point_from_json(e.ctx(), in.at("point"))));
    return out;
}

ordered_json run_curve_minimal(const Options& o, const std::string& text) {
    auto e = curve_of_input(o, ordered_json::parse(text));
    auto mm = qp::elliptic::minimal_model(e);
    ordered_json out;
    out["curve"] = curve_json(mm.curve);
    out["transform"] = transform_json(mm.transform);
    out["disc_valuation"] = mm.curve.disc().val();
    bool identity = mm.transform.u == qp::Padic::one(e.ctx()) && mm.transform.r.is_zero() &&
                    mm.transform.s.is_zero() && mm.transform.t.is_zero();
    out["already_minimal"] = identity;
    return out;
}

const char* reduction_type_name(qp::elliptic::ReductionType t) {
    using qp::elliptic::ReductionType;
    switch (t) {
        case ReductionType::Good: return "good";
        case ReductionType::Additive: return "additive";
        case ReductionType::SplitMultiplicative: return "split_multiplicative";
        case ReductionType::NonsplitMultiplicative: return "nonsplit_multiplicative";
    }
    return "unknown";
}

ordered_json run_curve_classify(const Options& o, const std::string& text) {
    auto e = curve_of_input(o, ordered_json::parse(text));
    auto info = qp::elliptic::classify_reduction(e);
    ordered_json out;
    out["type"] = reduction_type_name(info.type);
    if (info.has_singular_point) {
        out["singular_point"] = {info.singular_x, info.singular_y};
        out["d"] = info.tangent_d;
    }
    return out;
}

ordered_json run_curve_filtration(const Options& o, const std::string& text) {
    ordered_json in = ordered_json::parse(text);
    auto e = curve_of_input(o, in);
    auto pt = point_from_json(e.ctx(), field(in, "point"));
    auto lvl = qp::elliptic::filtration_membership(e, pt);
    using Tier = qp::elliptic::FiltrationLevel::Tier;
    ordered_json out;
    switch (lvl.tier) {
        case Tier::NonsmoothImage: out["tier"] = "nonsmooth_reduction"; break;
        case Tier::SmoothImage: out["tier"] = "smooth_reduction"; break;
        case Tier::KernelOfReduction: out["tier"] = "kernel_of_reduction"; break;
    }
    if (lvl.tier == Tier::KernelOfReduction) {
        if (lvl.alpha_infinite)
            out["alpha"] = "inf";
        else
            out["alpha"] = lvl.alpha;
    }
    return out;
}

ordered_json run_curve_reduce(const Options& o, const std::string& text) {
    ordered_json in = ordered_json::parse(text);
    auto e = curve_of_input(o, in);
    auto pt = point_from_json(e.ctx(), field(in, "point"));
    auto r = qp::elliptic::reduction_map(e, pt);
    ordered_json out;
    if (r.infinity) {
        out["infinity"] = true;
    } else {
        out["x"] = r.x;
        out["y"] = r.y;
    }
    return out;
}

ordered_json run_catalog_list(const Options& o) {
    long p = static_cast<long>(o.p);
    auto entry = [&](int item, const char* family, const char* description) {
        ordered_json e;
        e["item"] = item;
        e["family"] = family;
        e["p"] = p;
        e["description"] = description;
        e["parameters"] = ordered_json::object();
        return e;
    };
    ordered_json out = ordered_json::array();

    auto e1 = entry(1, "AdditiveQp", "the whole field under addition");
    out.push_back(e1);

    auto e2 = entry(2, "AdditiveDalpha", "additive ball of elements with valuation at least alpha");
    e2["parameters"]["alpha"] = "integer >= 0";
    out.push_back(e2);

    auto e3 = entry(3, "PowersOfUnits", "n-th powers of the nonzero elements under multiplication");
    e3["parameters"]["n"] = "integer >= 1";
    out.push_back(e3);

    auto e4 = entry(4, "Ualpha", "units congruent to 1 modulo p^alpha under multiplication");
    e4["parameters"]["alpha"] = "integer >= 1 (>= 2 when p = 2)";
    out.push_back(e4);

    auto e5 = entry(5, "LatticeQuotient",
                    "finite-valuation shell 0 <= v(x) < v(a) with product wrapped by a");
    e5["parameters"]["a"] = "p-adic literal with v(a) >= 1";
    out.push_back(e5);

    auto e6 = entry(6, "TorusFalpha",
                    "norm-one torus pairs (x, y), x^2 - d y^2 = 1, within distance "
                    "p^-alpha of the identity");
    e6["parameters"]["d"] = "p-adic literal that is not a square";
    e6["parameters"]["alpha"] = "integer >= 1 (>= 2 when p = 2)";
    out.push_back(e6);

    auto e7 = entry(7, "EllipticFiltration",
                    "points of an elliptic curve within the alpha-th kernel of reduction");
    e7["parameters"]["curve"] = "Weierstrass coefficients a1..a6";
    e7["parameters"]["alpha"] = "integer >= 1";
    out.push_back(e7);

    auto e8 = entry(8, "TateLatticeQuotient",
                    "finite-valuation shell of a Tate curve with product wrapped by the period");
    e8["parameters"]["q"] = "p-adic literal with 0 < v(q)";
    e8["parameters"]["n"] = "integer >= 1";
    out.push_back(e8);

    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-precision p-adic groups toolkit"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--p", opt.p, "prime of the base field")->check(CLI::PositiveNumber);
    app.add_option("--prec", opt.prec, "working precision (digits of p)");
    app.add_flag("--pretty", opt.pretty, "indent JSON output");
    app.add_option("--in", opt.in_file, "read the input payload from a file");

    std::string arg_padic, arg_pres;

    auto* padic = app.add_subcommand("padic", "p-adic scalar operations");
    padic->fallthrough();
    padic->require_subcommand(1);
    auto* padic_eval = padic->add_subcommand("eval", "parse a literal and print canonical forms");
    padic_eval->fallthrough();
    padic_eval->add_option("literal", arg_padic, "p-adic literal");
    auto* padic_class = padic->add_subcommand("class", "square class of a literal");
    padic_class->fallthrough();
    padic_class->add_option("literal", arg_padic, "p-adic literal");

    auto* pres = app.add_subcommand("presburger", "one-variable Presburger sets");
    pres->fallthrough();
    pres->require_subcommand(1);
    auto* pres_parse = pres->add_subcommand("parse", "parse a formula and report its shape");
    pres_parse->fallthrough();
    pres_parse->add_option("formula", arg_pres, "formula text");
    auto* pres_dec = pres->add_subcommand("decompose", "cell decomposition of a formula");
    pres_dec->fallthrough();
    pres_dec->add_option("formula", arg_pres, "formula text");
    auto* pres_sub = pres->add_subcommand("subgroup",
                                          "recognize a subgroup of the integers from a formula "
                                          "or a JSON cell list");
    pres_sub->add_option("input", arg_pres, "formula text or JSON cells");
    pres_sub->fallthrough();

    std::string arg_group;

    auto* grp = app.add_subcommand("group", "operations in the classified group families");
    grp->fallthrough();
    grp->require_subcommand(1);
    auto* grp_check = grp->add_subcommand("check", "membership test for a group element");
    grp_check->fallthrough();
    grp_check->add_option("input", arg_group, "JSON with \"descriptor\" and \"element\"");
    auto* grp_op = grp->add_subcommand("op", "apply the group operation to two elements");
    grp_op->fallthrough();
    grp_op->add_option("input", arg_group, "JSON with \"descriptor\", \"g\" and \"h\"");
    auto* grp_index = grp->add_subcommand("index",
                                          "index of one filtration level inside another");
    grp_index->fallthrough();
    grp_index->add_option("input", arg_group, "JSON with \"descriptor\", \"alpha\" and \"beta\"");
    auto* grp_split = grp->add_subcommand("split",
                                          "direct-summand test for a finite abelian subgroup");
    grp_split->fallthrough();
    grp_split->add_option("input", arg_group, "JSON with \"orders\" and \"subgroup\"");

    std::string arg_curve;
    auto* crv = app.add_subcommand("curve", "elliptic curves in Weierstrass form");
    crv->fallthrough();
    crv->require_subcommand(1);
    auto* crv_inv = crv->add_subcommand("invariants", "b, c, discriminant and j invariants");
    crv_inv->fallthrough();
    crv_inv->add_option("input", arg_curve, "curve JSON {\"p\", \"precision\", \"a\"}");
    auto* crv_add = crv->add_subcommand("add", "chord-tangent sum of two points");
    crv_add->fallthrough();
    crv_add->add_option("input", arg_curve, "JSON with \"curve\", \"P\" and \"Q\"");
    auto* crv_tr = crv->add_subcommand("transform",
                                       "apply a (u, r, s, t) change of variables");
    crv_tr->fallthrough();
    crv_tr->add_option("input", arg_curve,
                       "JSON with \"curve\", \"transform\" and optionally \"point\"");
    auto* crv_min = crv->add_subcommand("minimal", "minimal integral model at p");
    crv_min->fallthrough();
    crv_min->add_option("input", arg_curve, "curve JSON {\"p\", \"precision\", \"a\"}");
    auto* crv_cls = crv->add_subcommand("classify", "reduction type of a minimal curve");
    crv_cls->fallthrough();
    crv_cls->add_option("input", arg_curve, "curve JSON {\"p\", \"precision\", \"a\"}");
    auto* crv_fil = crv->add_subcommand("filtration",
                                        "position of a point relative to reduction");
    crv_fil->fallthrough();
    crv_fil->add_option("input", arg_curve, "JSON with \"curve\" and \"point\"");
    auto* crv_red = crv->add_subcommand("reduce", "image of a point on the residue curve");
    crv_red->fallthrough();
    crv_red->add_option("input", arg_curve, "JSON with \"curve\" and \"point\"");

    auto* cat = app.add_subcommand("catalog", "the classified families");
    cat->fallthrough();
    cat->require_subcommand(1);
    auto* cat_list = cat->add_subcommand("list", "list every family with its parameter schema");
    cat_list->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        ordered_json out;
        if (padic_eval->parsed())
            out = run_padic_eval(opt, payload(opt, arg_padic));
        else if (padic_class->parsed())
            out = run_padic_class(opt, payload(opt, arg_padic));
        else if (pres_parse->parsed())
            out = run_presburger_parse(payload(opt, arg_pres));
        else if (pres_dec->parsed())
            out = run_presburger_decompose(payload(opt, arg_pres));
        else if (pres_sub->parsed())
            out = run_presburger_subgroup(opt, payload(opt, arg_pres));
        else if (grp_check->parsed())
            out = run_group_check(opt, payload(opt, arg_group));
        else if (grp_op->parsed())
            out = run_group_op(opt, payload(opt, arg_group));
        else if (grp_index->parsed())
            out = run_group_index(opt, payload(opt, arg_group));
        else if (grp_split->parsed())
            out = run_group_split(payload(opt, arg_group));
        else if (crv_inv->parsed())
            out = run_curve_invariants(opt, payload(opt, arg_curve));
        else if (crv_add->parsed())
            out = run_curve_add(opt, payload(opt, arg_curve));
        else if (crv_tr->parsed())
            out = run_curve_transform(opt, payload(opt, arg_curve));
        else if (crv_min->parsed())
            out = run_curve_minimal(opt, payload(opt, arg_curve));
        else if (crv_cls->parsed())
            out = run_curve_classify(opt, payload(opt, arg_curve));
        else if (crv_fil->parsed())
            out = run_curve_filtration(opt, payload(opt, arg_curve));
        else if (crv_red->parsed())
            out = run_curve_reduce(opt, payload(opt, arg_curve));
        else if (cat_list->parsed())
            out = run_catalog_list(opt);
        emit(out, opt);
        return 0;
    } catch (const qp::ParseError& e) {
        ordered_json err;
        err["error"]["code"] = e.code();
        err["error"]["message"] = e.what();
        err["error"]["line"] = e.line();
        err["error"]["col"] = e.col();
        emit(err, opt);
        return 1;
    } catch (const qp::Error& e) {
        ordered_json err;
        err["error"]["code"] = e.code();
        err["error"]["message"] = e.what();
        emit(err, opt);
        return 1;
    } catch (const nlohmann::json::exception& e) {
        ordered_json err;
        err["error"]["code"] = "parse_error";
        err["error"]["message"] = e.what();
        emit(err, opt);
        return 1;
    }
}
