#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "smlab/conclab.hpp"
#include "smlab/covnum.hpp"
#include "smlab/metric.hpp"
#include "smlab/submeasure.hpp"

namespace smlab::io {

using nlohmann::json;

// ---- exact scalars ----------------------------------------------------

inline json rat_to_json(const Rat& r) { return format_rat(r); }

inline Rat rat_from_json(const json& j) {
    if (j.is_string()) return parse_rat(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long long>());
    if (j.is_number_float()) return Rat(j.get<double>()); // exact dyadic reading
    throw std::invalid_argument("expected a rational: \"p/q\", integer, or decimal");
}

// rationals serialize as "p/q"; a single root term as {"p": "a/b", "q": n}
// meaning (a/b)*sqrt(n); general sums as {"terms": [...]}
inline json rootsum_to_json(const RootSum& v) {
    if (v.is_rational()) return rat_to_json(v.as_rational());
    const auto& terms = v.terms();
    if (terms.size() == 1)
        return json{{"p", format_rat(terms[0].second)}, {"q", terms[0].first}};
    json arr = json::array();
    for (const auto& [q, p] : terms) arr.push_back(json{{"p", format_rat(p)}, {"q", q}});
    return json{{"terms", arr}};
}

inline RootSum rootsum_from_json(const json& j) {
    if (j.is_string() || j.is_number()) return RootSum(rat_from_json(j));
    if (j.is_object() && j.contains("p"))
        return RootSum::root(rat_from_json(j.at("p")), j.at("q").get<std::uint64_t>());
    if (j.is_object() && j.contains("terms")) {
        RootSum v;
        for (const auto& t : j.at("terms"))
            v += RootSum::root(rat_from_json(t.at("p")), t.at("q").get<std::uint64_t>());
        return v;
    }
    throw std::invalid_argument("expected an exact value: \"p/q\" or {\"p\":...,\"q\":...}");
}

// ---- sets, covers, partitions ------------------------------------------

inline json atomset_to_json(const AtomSet& a) { return json(a.atoms()); }

inline AtomSet atomset_from_json(const json& j, GroundSet g) {
    return AtomSet(g, j.get<std::vector<int>>());
}

inline json cover_to_json(const Cover& c) {
    json sets = json::array();
    for (const auto& s : c.sets) sets.push_back(atomset_to_json(s));
    json out{{"sets", sets}};
    if (!c.weights.empty()) {
        json w = json::array();
        for (const auto& v : c.weights) w.push_back(rootsum_to_json(v));
        out["weights"] = w;
    }
    return out;
}

inline Cover cover_from_json(const json& j, GroundSet g) {
    if (j.is_string() && j.get<std::string>() == "singletons") {
        std::vector<AtomSet> sets = singleton_partition(g).blocks;
        std::vector<RootSum> w(sets.size(), RootSum(Rat(1, g.n_atoms)));
        return Cover(std::move(sets), std::move(w));
    }
    std::vector<AtomSet> sets;
    for (const auto& s : j.at("sets")) sets.push_back(atomset_from_json(s, g));
    std::vector<RootSum> w;
    if (j.contains("weights"))
        for (const auto& v : j.at("weights")) w.push_back(rootsum_from_json(v));
    return Cover(std::move(sets), std::move(w));
}

inline Partition partition_from_json(const json& j, GroundSet g) {
    std::vector<AtomSet> blocks;
    for (const auto& b : j) blocks.push_back(atomset_from_json(b, g));
    return Partition(std::move(blocks));
}

// ---- submeasures --------------------------------------------------------

struct SubmeasureDoc {
    Submeasure phi;
    // populated for the truncated product construction
    std::vector<AtomMeasure> companions;
    std::vector<RootSum> xi;
    LevelBlockIndex index;
    bool is_example_easy = false;
    int depth = 0;
};

inline SubmeasureDoc submeasure_from_json(const json& j) {
    SubmeasureDoc doc;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "measure") {
        GroundSet g(j.at("n_atoms").get<int>());
        std::vector<RootSum> w;
        for (const auto& v : j.at("atom_weights")) w.push_back(rootsum_from_json(v));
        doc.phi = Submeasure::measure(AtomMeasure(g, std::move(w)));
        return doc;
    }
    if (kind == "table") {
        GroundSet g(j.at("n_atoms").get<int>());
        std::vector<RootSum> vals;
        for (const auto& v : j.at("values")) vals.push_back(rootsum_from_json(v));
        doc.phi = Submeasure::table(g, std::move(vals));
        return doc;
    }
    if (kind == "cover_generated") {
        GroundSet g(j.at("n_atoms").get<int>());
        WeightedCoverFamily fam;
        fam.ground = g;
        for (const auto& e : j.at("generators"))
            fam.generators.emplace_back(atomset_from_json(e.at("set"), g),
                                        rootsum_from_json(e.at("weight")));
        if (j.contains("fallback_weight"))
            fam.fallback_weight = rootsum_from_json(j.at("fallback_weight"));
        doc.phi = make_cover_generated(std::move(fam));
        return doc;
    }
    if (kind == "example_easy") {
        int depth = j.at("depth").get<int>();
        auto ex = example_easy(depth);
        doc.phi = ex.phi;
        doc.companions = ex.mu;
        doc.xi = ex.xi;
        doc.index = ex.index;
        doc.is_example_easy = true;
        doc.depth = depth;
        return doc;
    }
    throw std::invalid_argument("unknown submeasure kind '" + kind + "'");
}

// ---- scenarios ------------------------------------------------------------

inline FiniteDist dist_from_json(const json& j) {
    std::vector<Rat> p;
    for (const auto& v : j.at("p")) p.push_back(rat_from_json(v));
    return FiniteDist(std::move(p));
}

inline Scenario scenario_from_json(const json& j) {
    Scenario s;
    s.n = j.at("n").get<int>();
    if (j.contains("alphabets") && j.at("alphabets").is_array())
        s.alphabet = j.at("alphabets").get<std::vector<int>>();
    else
        s.alphabet.assign((std::size_t)s.n, 2);
    if (!j.contains("dists") || (j.at("dists").is_string() &&
                                 j.at("dists").get<std::string>() == "fair")) {
        for (int i = 0; i < s.n; ++i) s.dists.factors.push_back(FiniteDist::uniform(s.alphabet[i]));
    } else {
        for (const auto& d : j.at("dists")) s.dists.factors.push_back(dist_from_json(d));
    }
    GroundSet g(s.n);
    s.cover = j.contains("cover") ? cover_from_json(j.at("cover"), g)
                                  : cover_from_json(json("singletons"), g);
    if (j.contains("lipschitz")) {
        const json& f = j.at("lipschitz");
        std::string kind = f.at("kind").get<std::string>();
        if (kind == "coordinate_mean") {
            s.f.kind = LipschitzSelector::Kind::coordinate_mean;
        } else if (kind == "weighted_sum") {
            s.f.kind = LipschitzSelector::Kind::weighted_sum;
            s.f.u = f.at("u").get<std::vector<double>>();
        } else if (kind == "dist_to_point") {
            s.f.kind = LipschitzSelector::Kind::dist_to_point;
            s.f.anchor = f.at("anchor").get<std::vector<std::uint32_t>>();
        } else {
            throw std::invalid_argument("unknown lipschitz selector '" + kind + "'");
        }
    }
    if (j.contains("r_grid")) s.r_grid = j.at("r_grid").get<std::vector<double>>();
    if (j.contains("trials")) s.trials = j.at("trials").get<long>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

inline TreeSpec treespec_from_json(const json& j) {
    TreeSpec spec;
    spec.M = j.at("M").get<std::vector<int>>();
    spec.d = j.at("d").get<std::vector<double>>();
    spec.validate();
    return spec;
}

// ---- reports --------------------------------------------------------------

inline json certificate_to_json(const CoveringCertificate& c) {
    json primal = json::array();
    for (const auto& [s, mult] : c.primal)
        primal.push_back(json{{"set", atomset_to_json(s)}, {"multiplicity", mult}});
    json out{{"value", rat_to_json(c.value)},
             {"primal", primal},
             {"primal_length", c.primal_length},
             {"primal_hits", c.primal_hits},
             {"dual_unbounded", c.dual_unbounded}};
    if (!c.dual_unbounded) {
        json dual = json::array();
        for (const Rat& m : c.dual_atom_mass) dual.push_back(rat_to_json(m));
        out["dual_atom_mass"] = dual;
    }
    return out;
}

inline json hphi_to_json(const HPhiResult& h) {
    json out{{"xi", rootsum_to_json(h.xi)},
             {"c", rat_to_json(h.c)},
             {"h", h.h_double()},
             {"lower_bound_only", h.lower_bound},
             {"family_size", h.family_size},
             {"certificate", certificate_to_json(h.cert)}};
    if (!h.dual_measure.empty()) {
        json dual = json::array();
        for (const auto& v : h.dual_measure) dual.push_back(rootsum_to_json(v));
        out["dual_measure"] = dual;
    }
    return out;
}

inline json pathology_to_json(const PathologyResult& p) {
    json witness = json::array();
    for (const Rat& w : p.witness) witness.push_back(rat_to_json(w));
    return json{{"mass_lower", rat_to_json(p.lower)},
                {"mass_upper", rat_to_json(p.upper)},
                {"exact", p.exact},
                {"witness", witness}};
}

// line/column diagnostics for parse failures
inline std::pair<std::size_t, std::size_t> text_position(const std::string& text,
                                                         std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

} // namespace smlab::io
