#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "smlab/json_io.hpp"

namespace smlab::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitLimit = 3;

struct RunConfig {
    std::string subcommand;
    std::string input_path;
    std::string out_dir = ".";
    std::string format = "json"; // "csv" or "json"
    std::uint64_t seed = 0;
    bool seed_set = false;
    long trials = 0;          // overrides the scenario when > 0
    std::string xi_grid;      // comma-separated exact values
    std::string epsilon;      // exact value
    int depth = 0;
    int max_atoms = kDefaultAtomLimit;
    long trial_cap = 10'000'000;
    int threads = 1;
};

namespace detail {

// fixed formatting keeps byte-identical outputs for identical inputs
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Outputs {
    std::filesystem::path dir;
    std::string stem;
    bool want_csv = false;
    bool want_json = false;

    void write_json(const json& j) const {
        if (!want_json) return;
        std::ofstream out(dir / (stem + ".json"));
        out << j.dump(2) << '\n';
    }
    void write_csv(const std::string& text) const {
        if (!want_csv) return;
        std::ofstream out(dir / (stem + ".csv"));
        out << text;
    }
};

inline Outputs make_outputs(const RunConfig& cfg) {
    Outputs o;
    o.dir = cfg.out_dir;
    o.stem = cfg.subcommand;
    std::filesystem::create_directories(o.dir);
    o.want_csv = cfg.format == "csv";
    o.want_json = cfg.format == "json";
    return o;
}

inline json load_input(const RunConfig& cfg) {
    if (cfg.input_path.empty())
        throw std::invalid_argument("subcommand '" + cfg.subcommand + "' needs --input");
    std::ifstream in(cfg.input_path);
    if (!in) throw std::invalid_argument("cannot open input file '" + cfg.input_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = io::text_position(text, e.byte ? e.byte - 1 : 0);
        throw std::invalid_argument("JSON parse error at line " + std::to_string(line) +
                                    ", column " + std::to_string(col) + ": " + e.what());
    }
}

inline std::vector<RootSum> parse_grid(const std::string& text) {
    std::vector<RootSum> grid;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) grid.push_back(RootSum(parse_rat(tok)));
    return grid;
}

inline json report_head(const RunConfig& cfg) {
    return json{{"tool", "smlab"},
                {"schema", "smlab-report-v1"},
                {"subcommand", cfg.subcommand},
                {"rng", Rng::name()},
                {"seed", cfg.seed}};
}

// ---- subcommands -----------------------------------------------------------

inline int run_covnum(const RunConfig& cfg) {
    json in = load_input(cfg);
    GroundSet g(in.at("n_atoms").get<int>());
    if (g.n_atoms > cfg.max_atoms) throw limit_error("covnum: ground set above --max-atoms");
    std::vector<AtomSet> family;
    for (const auto& s : in.at("sets")) family.push_back(io::atomset_from_json(s, g));
    auto cert = covering_number(g, family);
    json rep = report_head(cfg);
    rep["certificate"] = io::certificate_to_json(cert);
    auto out = make_outputs(cfg);
    out.write_json(rep);
    std::string csv = "value,primal_hits,primal_length,dual_unbounded\n";
    csv += format_rat(cert.value) + "," + std::to_string(cert.primal_hits) + "," +
           std::to_string(cert.primal_length) + "," + (cert.dual_unbounded ? "1" : "0") + "\n";
    out.write_csv(csv);
    std::cout << "covering number = " << format_rat(cert.value) << "\n";
    return kExitOk;
}

inline int run_hphi(const RunConfig& cfg) {
    json in = load_input(cfg);
    auto doc = io::submeasure_from_json(in.at("submeasure"));
    if (doc.phi.ground().n_atoms > cfg.max_atoms)
        throw limit_error("hphi: ground set above --max-atoms");
    std::vector<RootSum> grid;
    if (!cfg.xi_grid.empty()) grid = parse_grid(cfg.xi_grid);
    else if (in.contains("xi_grid"))
        for (const auto& v : in.at("xi_grid")) grid.push_back(io::rootsum_from_json(v));
    else grid = default_xi_grid(doc.phi);
    json rows = json::array();
    std::string csv = "xi,c,h,xi_h,lower_bound_only,family_size\n";
    for (const auto& xi : grid) {
        auto h = h_phi(doc.phi, xi);
        rows.push_back(io::hphi_to_json(h));
        csv += fmt(xi.to_double()) + "," + format_rat(h.c) + "," + fmt(h.h_double()) + "," +
               fmt(to_double(h.c)) + "," + (h.lower_bound ? "1" : "0") + "," +
               std::to_string(h.family_size) + "\n";
    }
    json rep = report_head(cfg);
    rep["grid"] = rows;
    auto out = make_outputs(cfg);
    out.write_json(rep);
    out.write_csv(csv);
    std::cout << "evaluated h at " << grid.size() << " thresholds\n";
    return kExitOk;
}

inline int run_classify(const RunConfig& cfg) {
    json in = load_input(cfg);
    auto doc = io::submeasure_from_json(in.at("submeasure"));
    if (doc.phi.ground().n_atoms > cfg.max_atoms)
        throw limit_error("classify: ground set above --max-atoms");
    std::vector<RootSum> grid;
    if (!cfg.xi_grid.empty()) grid = parse_grid(cfg.xi_grid);
    else if (in.contains("xi_grid"))
        for (const auto& v : in.at("xi_grid")) grid.push_back(io::rootsum_from_json(v));
    else grid = default_xi_grid(doc.phi);
    auto rep = classify(doc.phi, grid);
    json out_json = report_head(cfg);
    out_json["verdict"] = verdict_name(rep.verdict);
    out_json["truncation_exhausted"] = rep.truncation_exhausted;
    if (!rep.note.empty()) out_json["note"] = rep.note;
    out_json["pathology"] = io::pathology_to_json(rep.pathology);
    json rows = json::array();
    std::string csv = "xi,c,h,xi_h\n";
    for (const auto& h : rep.grid) {
        rows.push_back(io::hphi_to_json(h));
        csv += fmt(h.xi.to_double()) + "," + format_rat(h.c) + "," + fmt(h.h_double()) + "," +
               fmt(to_double(h.c)) + "\n";
    }
    out_json["grid"] = rows;
    auto out = make_outputs(cfg);
    out.write_json(out_json);
    out.write_csv(csv);
    std::cout << "verdict: " << verdict_name(rep.verdict) << "\n";
    return kExitOk;
}

inline int run_pathology(const RunConfig& cfg) {
    json in = load_input(cfg);
    auto doc = io::submeasure_from_json(in.at("submeasure"));
    auto p = pathology_index(doc.phi);
    json rep = report_head(cfg);
    rep["pathology"] = io::pathology_to_json(p);
    auto out = make_outputs(cfg);
    out.write_json(rep);
    std::string csv = "mass_lower,mass_upper,exact\n";
    csv += format_rat(p.lower) + "," + format_rat(p.upper) + "," + (p.exact ? "1" : "0") + "\n";
    out.write_csv(csv);
    std::cout << "dominated mass in [" << format_rat(p.lower) << ", " << format_rat(p.upper)
              << "]\n";
    return kExitOk;
}

inline int run_dist(const RunConfig& cfg) {
    json in = load_input(cfg);
    GroundSet g(in.at("n").get<int>());
    Cover cover = io::cover_from_json(in.at("cover"), g);
    json rows = json::array();
    std::string csv = "pair,distance\n";
    std::size_t idx = 0;
    for (const auto& pr : in.at("pairs")) {
        ProductPoint x{pr.at("x").get<std::vector<std::uint32_t>>()};
        ProductPoint y{pr.at("y").get<std::vector<std::uint32_t>>()};
        RootSum d = dist_cover(x, y, cover);
        rows.push_back(json{{"pair", idx}, {"distance", io::rootsum_to_json(d)},
                            {"distance_fp", d.to_double()}});
        csv += std::to_string(idx) + "," + fmt(d.to_double()) + "\n";
        ++idx;
    }
    json rep = report_head(cfg);
    rep["distances"] = rows;
    auto out = make_outputs(cfg);
    out.write_json(rep);
    out.write_csv(csv);
    std::cout << "computed " << idx << " distances\n";
    return kExitOk;
}

inline int run_entropy_check(const RunConfig& cfg) {
    json in = load_input(cfg);
    std::string suite = in.at("suite").get<std::string>();
    std::uint64_t seed = cfg.seed_set ? cfg.seed : in.value("seed", 0ull);
    json rep = report_head(cfg);
    rep["seed"] = seed;
    rep["suite"] = suite;
    auto out = make_outputs(cfg);
    Rng rng(seed);
    auto rnd_f = [&](std::size_t n) {
        std::vector<double> f(n);
        for (auto& v : f) v = 3.0 * rng.uniform();
        return f;
    };
    if (suite == "ledoux") {
        int points = in.value("points", 12);
        long instances = in.value("instances", 10000L);
        double min_slack = 0;
        long failures = 0;
        for (long i = 0; i < instances; ++i) {
            int n = 2 + (int)rng.below((std::uint64_t)points - 1);
            std::vector<Rat> masses;
            for (int k = 0; k < n; ++k) masses.emplace_back(1 + (long)rng.below(9));
            FiniteDist mu(masses);
            std::vector<double> f(n);
            for (auto& v : f) v = 4.0 * rng.uniform() - 2.0;
            auto r = ledoux_check(f, mu);
            min_slack = std::min(min_slack, r.slack());
            if (!r.ok()) ++failures;
        }
        rep["instances"] = instances;
        rep["failures"] = failures;
        rep["min_slack"] = min_slack;
        out.write_json(rep);
        out.write_csv("instances,failures,min_slack\n" + std::to_string(instances) + "," +
                      std::to_string(failures) + "," + fmt(min_slack) + "\n");
        std::cout << suite << ": " << failures << " failures over " << instances << "\n";
        return failures ? kExitValidation : kExitOk;
    }
    if (suite == "shearer") {
        int n = in.value("n", 3);
        long instances = in.value("instances", 100L);
        GroundSet g(n);
        std::vector<Cover> covers;
        covers.emplace_back(singleton_partition(g).blocks);
        if (n == 3) {
            std::vector<AtomSet> cyc{AtomSet(g, {0, 1}), AtomSet(g, {1, 2}), AtomSet(g, {0, 2})};
            covers.emplace_back(cyc);
            std::vector<AtomSet> twice = cyc;
            twice.insert(twice.end(), cyc.begin(), cyc.end());
            covers.emplace_back(std::move(twice));
        }
        double min_slack = 0;
        long failures = 0, checks = 0;
        for (const auto& cover : covers) {
            int k = covering_multiplicity(cover);
            for (long i = 0; i < instances; ++i) {
                ProductDist d;
                for (int j = 0; j < n; ++j) {
                    long a = 1 + (long)rng.below(9);
                    long b = 1 + (long)rng.below(9);
                    d.factors.push_back(FiniteDist(std::vector<Rat>{Rat(a), Rat(b)}));
                }
                auto f = rnd_f(d.points());
                auto r = shearer_check(f, d, cover, k);
                min_slack = std::min(min_slack, r.slack());
                if (!r.ok()) ++failures;
                ++checks;
            }
        }
        rep["checks"] = checks;
        rep["failures"] = failures;
        rep["min_slack"] = min_slack;
        out.write_json(rep);
        out.write_csv("checks,failures,min_slack\n" + std::to_string(checks) + "," +
                      std::to_string(failures) + "," + fmt(min_slack) + "\n");
        std::cout << suite << ": " << failures << " failures over " << checks << "\n";
        return failures ? kExitValidation : kExitOk;
    }
    if (suite == "herbst") {
        int n = in.value("n", 8);
        ProductDist d;
        for (int j = 0; j < n; ++j) d.factors.push_back(FiniteDist::uniform(2));
        std::vector<double> f(d.points());
        for (std::size_t i = 0; i < f.size(); ++i) {
            auto c = d.decode(i);
            double s = 0;
            for (int j = 0; j < n; ++j) s += c[j] ? 0.5 : -0.5;
            f[i] = s / n;
        }
        double D = in.value("D", 2.0 / n);
        std::vector<double> lambdas =
            in.contains("lambda_grid") ? in.at("lambda_grid").get<std::vector<double>>()
                                       : std::vector<double>{0.25, 0.5, 1.0, 2.0, 4.0};
        std::vector<double> rs = in.contains("r_grid")
                                     ? in.at("r_grid").get<std::vector<double>>()
                                     : std::vector<double>{0.1, 0.25, 0.5};
        auto r = herbst_chain_check(f, d, D, lambdas, rs);
        rep["any_violation"] = r.any_violation;
        rep["jensen_ok"] = r.jensen_ok;
        json rows = json::array();
        std::string csv = "lambda,ent,ent_bound,mgf,mgf_bound,hypothesis,conclusion\n";
        for (const auto& row : r.rows) {
            rows.push_back(json{{"lambda", row.lambda},
                                {"ent", row.ent_value},
                                {"ent_bound", row.ent_bound},
                                {"mgf_centered", row.mgf_centered},
                                {"mgf_bound", row.mgf_bound},
                                {"hypothesis", row.hypothesis},
                                {"conclusion", row.conclusion}});
            csv += fmt(row.lambda) + "," + fmt(row.ent_value) + "," + fmt(row.ent_bound) + "," +
                   fmt(row.mgf_centered) + "," + fmt(row.mgf_bound) + "," +
                   (row.hypothesis ? "1" : "0") + "," + (row.conclusion ? "1" : "0") + "\n";
        }
        rep["rows"] = rows;
        json tails = json::array();
        for (const auto& t : r.tails)
            tails.push_back(json{{"r", t.r}, {"tail", t.tail}, {"bound", t.bound}, {"ok", t.ok}});
        rep["tails"] = tails;
        out.write_json(rep);
        out.write_csv(csv);
        std::cout << suite << ": violation=" << (r.any_violation ? "yes" : "no") << "\n";
        return r.any_violation ? kExitValidation : kExitOk;
    }
    throw std::invalid_argument("unknown entropy suite '" + suite + "'");
}

inline int run_concentrate(const RunConfig& cfg) {
    json in = load_input(cfg);
    Scenario s = io::scenario_from_json(in);
    if (cfg.seed_set) s.seed = cfg.seed;
    if (cfg.trials > 0) s.trials = cfg.trials;
    if (s.trials > cfg.trial_cap) throw limit_error("concentrate: trials above the cap");
    std::string mode = in.value("mode", "mc");
    auto out = make_outputs(cfg);
    json rep = report_head(cfg);
    rep["seed"] = s.seed;
    rep["mode"] = mode;
    if (mode == "mc") {
        auto res = mc_tail(s, cfg.threads);
        rep["trials"] = res.trials;
        rep["mean"] = res.mean;
        rep["k"] = res.k;
        rep["w_norm2"] = res.w_norm2;
        json rows = json::array();
        std::string csv = "r,empirical,ci_lo,ci_hi,bound\n";
        for (const auto& row : res.rows) {
            rows.push_back(json{{"r", row.r},
                                {"count", row.count},
                                {"empirical", row.empirical},
                                {"ci_lo", row.ci_lo},
                                {"ci_hi", row.ci_hi},
                                {"bound", row.bound}});
            csv += fmt(row.r) + "," + fmt(row.empirical) + "," + fmt(row.ci_lo) + "," +
                   fmt(row.ci_hi) + "," + fmt(row.bound) + "\n";
        }
        rep["rows"] = rows;
        out.write_json(rep);
        out.write_csv(csv);
        std::cout << "mc tail over " << res.trials << " trials, mean " << res.mean << "\n";
        return kExitOk;
    }
    std::vector<RootSum> epsilons;
    if (!cfg.epsilon.empty()) epsilons.push_back(RootSum(parse_rat(cfg.epsilon)));
    else if (in.contains("epsilon"))
        for (const auto& e : in.at("epsilon")) epsilons.push_back(io::rootsum_from_json(e));
    if (epsilons.empty()) throw std::invalid_argument("concentrate: alpha modes need epsilon");
    json rows = json::array();
    std::string csv = "epsilon,alpha,exact\n";
    for (const auto& eps : epsilons) {
        if (mode == "alpha_exact") {
            auto a = alpha_exact(s, eps);
            rows.push_back(json{{"epsilon", io::rootsum_to_json(eps)},
                                {"alpha", format_rat(a.alpha)},
                                {"alpha_fp", to_double(a.alpha)},
                                {"witness_mask", a.witness}});
            csv += fmt(eps.to_double()) + "," + fmt(to_double(a.alpha)) + ",1\n";
        } else if (mode == "alpha_sampled") {
            int budget = in.value("family_budget", 64);
            auto a = alpha_sampled(s, eps, budget, s.seed);
            rows.push_back(json{{"epsilon", io::rootsum_to_json(eps)},
                                {"alpha_estimate", a.alpha},
                                {"ci_half", a.ci_half},
                                {"candidates", a.candidates},
                                {"exact_candidates", a.exact_candidates},
                                {"lower_bound_estimate", a.lower_bound_estimate}});
            csv += fmt(eps.to_double()) + "," + fmt(a.alpha) + ",0\n";
        } else {
            throw std::invalid_argument("unknown concentrate mode '" + mode + "'");
        }
    }
    rep["rows"] = rows;
    out.write_json(rep);
    out.write_csv(csv);
    std::cout << mode << " over " << epsilons.size() << " thresholds\n";
    return kExitOk;
}

inline int run_probe(const RunConfig& cfg) {
    json in = load_input(cfg);
    auto doc = io::submeasure_from_json(in.at("submeasure"));
    GroundSet g = doc.phi.ground();
    std::vector<Partition> chain;
    if (in.at("chain").is_string() &&
        in.at("chain").get<std::string>() == "example_easy_levels") {
        if (!doc.is_example_easy)
            throw std::invalid_argument("probe: level chain needs the example_easy submeasure");
        // prefix partitions: cells determined by the first n levels
        for (int d = 1; d <= doc.depth; ++d) {
            Partition p = doc.index.level_partition(g, 1);
            for (int lvl = 2; lvl <= d; ++lvl)
                p = refine_partitions(p, doc.index.level_partition(g, lvl));
            chain.push_back(std::move(p));
        }
    } else {
        for (const auto& pj : in.at("chain")) chain.push_back(io::partition_from_json(pj, g));
    }
    RootSum eps = !cfg.epsilon.empty() ? RootSum(parse_rat(cfg.epsilon))
                                       : io::rootsum_from_json(in.at("epsilon"));
    std::uint64_t seed = cfg.seed_set ? cfg.seed : in.value("seed", 0ull);
    auto rep = covering_concentration_probe(doc.phi, chain, eps, seed);
    json out_json = report_head(cfg);
    out_json["seed"] = seed;
    out_json["epsilon"] = eps.to_double();
    out_json["note"] = "finitely many refinements probed; evidence only, never a verdict";
    json rows = json::array();
    std::string csv = "blocks,alpha,alpha_is_exact,bound,cert_hits,cert_length\n";
    for (const auto& row : rep.rows) {
        rows.push_back(json{{"blocks", row.blocks},
                            {"alpha", row.alpha},
                            {"alpha_is_exact", row.exact},
                            {"bound", row.bound},
                            {"cert_hits", row.cert_hits},
                            {"cert_length", row.cert_length},
                            {"xi", row.xi},
                            {"family_truncated", row.family_truncated}});
        csv += std::to_string(row.blocks) + "," + fmt(row.alpha) + "," +
               (row.exact ? "1" : "0") + "," + fmt(row.bound) + "," +
               std::to_string(row.cert_hits) + "," + std::to_string(row.cert_length) + "\n";
    }
    out_json["rows"] = rows;
    auto out = make_outputs(cfg);
    out.write_json(out_json);
    out.write_csv(csv);
    std::cout << "probed " << chain.size() << " partitions\n";
    return kExitOk;
}

inline int run_example_easy(const RunConfig& cfg) {
    int depth = cfg.depth > 0 ? cfg.depth : 2;
    auto ex = example_easy(depth);
    json rep = report_head(cfg);
    rep["depth"] = depth;
    rep["n_atoms"] = ex.ground.n_atoms;
    json levels = json::array();
    for (int n = 1; n <= depth; ++n) {
        json blocks = json::array();
        for (int i = 0; i < ex.index.level_sizes[(std::size_t)n - 1]; ++i) {
            AtomSet blk = ex.index.block(ex.ground, n, i);
            blocks.push_back(json{{"block", io::atomset_to_json(blk)},
                                  {"phi", io::rootsum_to_json(ex.phi(blk))}});
        }
        levels.push_back(json{{"level", n},
                              {"M", ex.M[(std::size_t)n - 1]},
                              {"xi", io::rootsum_to_json(ex.xi[(std::size_t)n])},
                              {"mu_total", io::rootsum_to_json(ex.mu[(std::size_t)n - 1].total())},
                              {"blocks", blocks}});
    }
    rep["levels"] = levels;

    // domination audit: exhaustive on small truncations, sampled beyond
    long checked = 0, failures = 0;
    if (ex.ground.n_atoms <= kSubsetSweepLimit) {
        for (std::uint64_t m = 0; m <= ex.ground.full_mask64(); ++m) {
            AtomSet a(ex.ground, m);
            RootSum pa = ex.phi(a);
            for (int n = 1; n <= depth; ++n)
                if (pa <= ex.xi[(std::size_t)n]) {
                    ++checked;
                    if (!(ex.mu[(std::size_t)n - 1](a) <= pa)) ++failures;
                }
        }
        rep["domination_mode"] = "exhaustive";
    } else {
        long samples = cfg.trials > 0 ? cfg.trials : 100000;
        Rng rng(cfg.seed);
        for (long t = 0; t < samples; ++t) {
            AtomSet a(ex.ground, Bits(rng.bits()) & ex.ground.full_mask());
            RootSum pa = ex.phi(a);
            for (int n = 1; n <= depth; ++n)
                if (pa <= ex.xi[(std::size_t)n]) {
                    ++checked;
                    if (!(ex.mu[(std::size_t)n - 1](a) <= pa)) ++failures;
                }
        }
        rep["domination_mode"] = "sampled";
    }
    rep["domination_checked"] = checked;
    rep["domination_failures"] = failures;
    auto out = make_outputs(cfg);
    out.write_json(rep);
    std::string csv = "level,M,xi,mu_total\n";
    for (int n = 1; n <= depth; ++n)
        csv += std::to_string(n) + "," + std::to_string(ex.M[(std::size_t)n - 1]) + "," +
               fmt(ex.xi[(std::size_t)n].to_double()) + "," +
               fmt(ex.mu[(std::size_t)n - 1].total().to_double()) + "\n";
    out.write_csv(csv);
    std::cout << "depth " << depth << ": " << failures << " domination failures over " << checked
              << " checks\n";
    return failures ? kExitValidation : kExitOk;
}

inline int run_example_pathological(const RunConfig& cfg) {
    json in = load_input(cfg);
    double p = 1.0, c34 = 1.0;
    if (in.contains("theta")) {
        if (in.at("theta").value("kind", "power") != std::string("power"))
            throw std::invalid_argument("example-pathological: only power thetas are built in");
        p = in.at("theta").value("p", 1.0);
    }
    c34 = in.value("C34", 1.0);
    int i_max = in.value("i_max", 3);
    auto params = berry_esseen_params(power_theta_log2(p), i_max, c34);
    json rep = report_head(cfg);
    rep["params"] = json{{"ok", params.ok},
                         {"K", params.K},
                         {"log2_w", params.log2_w},
                         {"log2_M", params.log2_M},
                         {"M_int", params.M_int},
                         {"log2_eps", params.log2_eps},
                         {"w_bound_ok", params.w_bound_ok},
                         {"sandwich_ok", params.sandwich_ok},
                         {"eps_positive", params.eps_positive},
                         {"eps0_small", params.eps0_small},
                         {"eps_decreasing", params.eps_decreasing}};
    if (!params.error.empty()) rep["params"]["error"] = params.error;
    bool claim_ok = true;
    if (in.contains("tree")) {
        TreeSpec spec = io::treespec_from_json(in.at("tree"));
        auto claim = claim_msds_check(spec);
        claim_ok = claim.size_ok && (!claim.inclusion_checked || claim.inclusion_holds);
        rep["claim"] = json{{"size_a", claim.size_a},
                            {"size_b", claim.size_b},
                            {"lower_bound", claim.lower_bound},
                            {"size_ok", claim.size_ok},
                            {"inclusion_checked", claim.inclusion_checked},
                            {"inclusion_holds", claim.inclusion_holds}};
    }
    auto out = make_outputs(cfg);
    out.write_json(rep);
    std::string csv = "level,log2_w,log2_M\n";
    for (std::size_t i = 0; i < params.log2_w.size(); ++i)
        csv += std::to_string(i + 1) + "," + fmt(params.log2_w[i]) + "," +
               fmt(params.log2_M[i]) + "\n";
    out.write_csv(csv);
    std::cout << "params " << (params.ok ? "ok" : ("FAILED: " + params.error)) << "\n";
    return params.ok && claim_ok ? kExitOk : kExitValidation;
}

} // namespace detail

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{
        "covnum",     "hphi",  "classify",     "pathology",
        "dist",       "entropy-check", "concentrate", "probe",
        "example-easy", "example-pathological"};
    return names;
}

// dispatch; validation problems exit 2, limit breaches exit 3
inline int run(const RunConfig& cfg) {
    try {
        if (cfg.subcommand == "covnum") return detail::run_covnum(cfg);
        if (cfg.subcommand == "hphi") return detail::run_hphi(cfg);
        if (cfg.subcommand == "classify") return detail::run_classify(cfg);
        if (cfg.subcommand == "pathology") return detail::run_pathology(cfg);
        if (cfg.subcommand == "dist") return detail::run_dist(cfg);
        if (cfg.subcommand == "entropy-check") return detail::run_entropy_check(cfg);
        if (cfg.subcommand == "concentrate") return detail::run_concentrate(cfg);
        if (cfg.subcommand == "probe") return detail::run_probe(cfg);
        if (cfg.subcommand == "example-easy") return detail::run_example_easy(cfg);
        if (cfg.subcommand == "example-pathological")
            return detail::run_example_pathological(cfg);
        std::cerr << "unknown subcommand '" << cfg.subcommand << "'\n";
        std::cerr << "available:";
        for (const auto& s : subcommands()) std::cerr << " " << s;
        std::cerr << "\n";
        return kExitValidation;
    } catch (const limit_error& e) {
        std::cerr << "limit breach: " << e.what() << "\n";
        return kExitLimit;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    }
}

} // namespace smlab::cli
