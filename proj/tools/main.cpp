// tilelab: density invariants, perturbed-model sampling, exact and heuristic
// perfect-tiling search, regularity checks, and Monte Carlo threshold sweeps.
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tilelab/density.hpp"
#include "tilelab/graph.hpp"
#include "tilelab/graph_io.hpp"
#include "tilelab/pair_completion.hpp"
#include "tilelab/random_models.hpp"
#include "tilelab/regularity.hpp"
#include "tilelab/sweep.hpp"
#include "tilelab/tiling.hpp"

using namespace tilelab;
using nlohmann::json;

namespace {

Graph read_graph(const std::string& path, const std::string& format) {
    GraphFormat f = GraphFormat::Auto;
    if (format == "edgelist") f = GraphFormat::EdgeList;
    if (format == "graph6") f = GraphFormat::Graph6;
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return parse_graph(buf.str(), f);
    }
    return load_graph(path, f);
}

// "0,1,4-7" -> {0,1,4,5,6,7}
VertexSet parse_vertex_list(const std::string& text) {
    std::vector<int> members;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        auto dash = item.find('-', 1);
        if (dash == std::string::npos) {
            members.push_back(std::stoi(item));
        } else {
            int from = std::stoi(item.substr(0, dash));
            int to = std::stoi(item.substr(dash + 1));
            for (int v = from; v <= to; ++v) members.push_back(v);
        }
    }
    return VertexSet(std::move(members));
}

std::vector<Rational> parse_rational_list(const std::string& text) {
    std::vector<Rational> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(parse_rational(item));
    }
    return out;
}

json vertex_set_json(const VertexSet& s) { return json(s.members); }

json tiling_json(const Tiling& tiling) {
    json copies = json::array();
    for (const auto& e : tiling.embeddings) {
        json edges = json::array();
        for (auto [u, v] : e.edge_image) edges.push_back({u, v});
        copies.push_back({{"image", e.image_map}, {"vertices", e.vertices}, {"edges", edges}});
    }
    return copies;
}

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + out_path);
    f << text;
}

BaseSpec parse_base_spec(const std::string& text, int pattern_size) {
    if (text == "empty") return BaseSpec::empty();
    if (text.rfind("extremal:", 0) == 0)
        return BaseSpec::extremal(parse_rational(text.substr(9)), pattern_size);
    if (text.rfind("mindeg:", 0) == 0) return BaseSpec::min_degree(parse_rational(text.substr(7)));
    if (text.rfind("file:", 0) == 0) return BaseSpec::explicit_graph(load_graph(text.substr(5)));
    throw std::invalid_argument("unknown base spec: " + text +
                                " (expected empty|extremal:a|mindeg:alpha|file:PATH)");
}

SweepConfig config_from_json(const json& j) {
    SweepConfig cfg;
    cfg.pattern_spec = j.value("pattern", std::string("k3"));
    Pattern pattern = load_pattern(cfg.pattern_spec);
    cfg.n_values = j.at("n_values").get<std::vector<int>>();
    if (j.contains("base")) {
        const auto& b = j.at("base");
        std::string kind = b.value("kind", std::string("empty"));
        if (kind == "empty")
            cfg.base = BaseSpec::empty();
        else if (kind == "extremal")
            cfg.base = BaseSpec::extremal(parse_rational(b.at("a").get<std::string>()),
                                          pattern.size());
        else if (kind == "mindeg")
            cfg.base = BaseSpec::min_degree(parse_rational(b.at("alpha").get<std::string>()));
        else if (kind == "file")
            cfg.base = BaseSpec::explicit_graph(load_graph(b.at("path").get<std::string>()));
        else
            throw std::invalid_argument("unknown base kind in config: " + kind);
    }
    if (j.contains("c_grid")) {
        for (const auto& c : j.at("c_grid")) cfg.c_grid.push_back(parse_rational(c.get<std::string>()));
    } else {
        cfg.c_grid = default_c_grid();
    }
    cfg.trials = j.value("trials", 1);
    cfg.seed = Seed{j.value("seed", std::uint64_t{0})};
    cfg.budget = j.value("budget", cfg.budget);
    cfg.greedy_passes = j.value("greedy_passes", cfg.greedy_passes);
    cfg.workers = j.value("workers", cfg.workers);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"perfect H-tilings in randomly perturbed dense graphs"};
    app.require_subcommand(1);

    // --- classify -----------------------------------------------------------
    std::string cls_input = "-", cls_format = "auto";
    auto* cls = app.add_subcommand("classify", "density invariants and balancedness of a template");
    cls->add_option("input", cls_input, "graph file (edge list or graph6), - for stdin");
    cls->add_option("--format", cls_format, "edgelist|graph6|auto")->default_str("auto");

    // --- sample --------------------------------------------------------------
    int smp_n = 12;
    double smp_p = 0.0;
    std::uint64_t smp_seed = 0;
    std::string smp_base = "empty", smp_format = "edgelist", smp_out = "-", smp_emit = "perturbed";
    std::string smp_pattern = "k3";
    auto* smp = app.add_subcommand("sample", "sample the perturbed model G u G_{n,p}");
    smp->add_option("--n", smp_n, "vertex count")->required();
    smp->add_option("--p", smp_p, "edge probability")->required();
    smp->add_option("--seed", smp_seed, "64-bit seed");
    smp->add_option("--base", smp_base, "empty|extremal:a|mindeg:alpha|file:PATH");
    smp->add_option("--pattern", smp_pattern, "template, constrains the extremal base");
    smp->add_option("--format", smp_format, "edgelist|graph6");
    smp->add_option("--out", smp_out, "output path, - for stdout");
    smp->add_option("--emit", smp_emit, "perturbed|base");

    // --- tile ----------------------------------------------------------------
    std::string til_host, til_pattern = "k3", til_mode = "perfect";
    long long til_budget = kDefaultBudget;
    std::uint64_t til_seed = 0;
    int til_passes = 6;
    auto* til = app.add_subcommand("tile", "decide or build H-tilings of a host graph");
    til->add_option("--host", til_host, "host graph file")->required();
    til->add_option("--pattern", til_pattern, "k2|k3|k4|c4|c5|p3|k13|file:PATH");
    til->add_option("--mode", til_mode, "perfect|max|greedy");
    til->add_option("--budget", til_budget, "search node budget");
    til->add_option("--seed", til_seed, "seed for greedy restarts");
    til->add_option("--passes", til_passes, "greedy restart passes");

    // --- check-regular ---------------------------------------------------------
    std::string reg_host, reg_a, reg_b, reg_mode = "exact";
    std::string reg_eps = "1/4", reg_d;
    int reg_trials = 2000;
    std::uint64_t reg_seed = 0;
    auto* reg = app.add_subcommand("check-regular", "eps-regularity / super-regularity of a pair");
    reg->add_option("--host", reg_host, "host graph file")->required();
    reg->add_option("--a", reg_a, "side A, e.g. 0-13 or 0,1,2")->required();
    reg->add_option("--b", reg_b, "side B")->required();
    reg->add_option("--eps", reg_eps, "epsilon (rational)");
    reg->add_option("--d", reg_d, "density bound: when set, run the super-regularity check");
    reg->add_option("--mode", reg_mode, "exact|sampled");
    reg->add_option("--trials", reg_trials, "sampled-mode trials");
    reg->add_option("--seed", reg_seed, "sampled-mode seed");

    // --- star-tile -------------------------------------------------------------
    std::string star_host;
    int star_t = 3;
    std::string star_eps = "1/10";
    auto* star = app.add_subcommand("star-tile", "greedy K_{1,t} tiling");
    star->add_option("--host", star_host, "host graph file")->required();
    star->add_option("--t", star_t, "leaves per star");
    star->add_option("--eps", star_eps, "target uncovered fraction (rational)");

    // --- complete-pair -----------------------------------------------------------
    std::string cp_cross, cp_random, cp_s, cp_t, cp_pattern = "k3";
    std::string cp_eps5 = "1/5", cp_phi = "1/50", cp_d1 = "1/10";
    std::uint64_t cp_seed = 7;
    long long cp_budget = kDefaultBudget;
    auto* cp = app.add_subcommand("complete-pair", "perfect tiling of a super-regular pair");
    cp->add_option("--cross", cp_cross, "cross layer graph file")->required();
    cp->add_option("--random", cp_random, "random layer graph file")->required();
    cp->add_option("--s", cp_s, "side S")->required();
    cp->add_option("--t", cp_t, "side T")->required();
    cp->add_option("--pattern", cp_pattern, "template");
    cp->add_option("--eps5", cp_eps5, "stage constant eps5");
    cp->add_option("--phi", cp_phi, "stage constant phi");
    cp->add_option("--d1", cp_d1, "stage constant d1");
    cp->add_option("--seed", cp_seed, "seed");
    cp->add_option("--budget", cp_budget, "fallback solver budget");

    // --- sweep -------------------------------------------------------------------
    std::string sw_config, sw_out = "-", sw_format = "csv";
    std::uint64_t sw_seed = 0;
    auto* sw = app.add_subcommand("sweep", "Monte Carlo threshold sweep from a JSON config");
    sw->add_option("--config", sw_config, "JSON config file")->required();
    sw->add_option("--out", sw_out, "output path, - for stdout");
    sw->add_option("--format", sw_format, "csv|json");
    auto* sw_seed_opt = sw->add_option("--seed", sw_seed, "override the config seed");

    // --- extremal-demo --------------------------------------------------------------
    std::string xd_pattern = "k3", xd_a = "1/4", xd_grid, xd_out = "-", xd_format = "csv";
    int xd_n = 60, xd_trials = 50;
    std::uint64_t xd_seed = 0;
    long long xd_budget = 25'000;
    auto* xd = app.add_subcommand("extremal-demo",
                                  "perfect-tiling failure on the complete bipartite base");
    xd->add_option("--pattern", xd_pattern, "template");
    xd->add_option("--n", xd_n, "vertex count");
    xd->add_option("--a", xd_a, "small class fraction (rational)");
    xd->add_option("--c-grid", xd_grid, "comma-separated c values");
    xd->add_option("--trials", xd_trials, "trials per grid point");
    xd->add_option("--seed", xd_seed, "seed");
    xd->add_option("--budget", xd_budget, "exact solver budget per trial");
    xd->add_option("--out", xd_out, "sweep output path");
    xd->add_option("--format", xd_format, "csv|json");

    // --- compare-base ------------------------------------------------------------------
    std::string cb_pattern = "k3", cb_alpha = "1/4", cb_grid, cb_out_empty, cb_out_dense,
                cb_format = "csv";
    int cb_n = 60, cb_trials = 50;
    std::uint64_t cb_seed = 0;
    long long cb_budget = 25'000;
    auto* cb = app.add_subcommand("compare-base", "empty vs min-degree base, coupled trials");
    cb->add_option("--pattern", cb_pattern, "template");
    cb->add_option("--n", cb_n, "vertex count");
    cb->add_option("--alpha", cb_alpha, "minimum degree fraction (rational)");
    cb->add_option("--c-grid", cb_grid, "comma-separated c values");
    cb->add_option("--trials", cb_trials, "trials per grid point");
    cb->add_option("--seed", cb_seed, "seed");
    cb->add_option("--budget", cb_budget, "exact solver budget per trial");
    cb->add_option("--out-empty", cb_out_empty, "empty-base sweep output path");
    cb->add_option("--out-dense", cb_out_dense, "dense-base sweep output path");
    cb->add_option("--format", cb_format, "csv|json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cls) {
            Graph g = read_graph(cls_input, cls_format);
            DensityProfile p = classify(g);
            json dv = json::array(), sv = json::array();
            for (const auto& r : p.d_star_v) dv.push_back(to_string(r));
            for (long long s : p.s_v) sv.push_back(s);
            json out = {{"d", to_string(p.d)},
                        {"d_star", to_string(p.d_star)},
                        {"d_star_v", dv},
                        {"s_v", sv},
                        {"s", p.s},
                        {"category", to_string(p.category)},
                        {"witness_subset", vertex_set_json(p.witness_subset)},
                        // s enters the vertex-balanced threshold conjecture only
                        {"s_conjecture_scope", p.category != BalanceCategory::NonVertexBalanced}};
            std::cout << out.dump(2) << "\n";
        } else if (*smp) {
            Pattern pattern = load_pattern(smp_pattern);
            PerturbedSpec spec{parse_base_spec(smp_base, pattern.size()), smp_p};
            auto sample = sample_perturbed(spec, smp_n, Seed{smp_seed}, &pattern);
            const Graph& g = smp_emit == "base" ? sample.base : sample.perturbed;
            std::string text = smp_format == "graph6" ? to_graph6(g) + "\n" : serialize_edge_list(g);
            write_output(smp_out, text);
        } else if (*til) {
            Graph host = read_graph(til_host, "auto");
            Pattern pattern = load_pattern(til_pattern);
            json out;
            if (til_mode == "perfect") {
                TilingResult r = perfect_tiling(host, pattern, til_budget);
                out = {{"status", to_string(r.status)},
                       {"size", r.status == TilingStatus::Found ? r.tiling.size() : 0},
                       {"nodes_explored", r.nodes_explored},
                       {"tiling", r.status == TilingStatus::Found ? tiling_json(r.tiling)
                                                                  : json::array()}};
            } else if (til_mode == "max") {
                auto r = max_tiling_exact(host, pattern, til_budget);
                out = {{"status", r.exact ? "exact" : "budget_exhausted"},
                       {"size", r.size},
                       {"nodes_explored", r.nodes_explored},
                       {"tiling", tiling_json(r.tiling)}};
            } else if (til_mode == "greedy") {
                Tiling t = max_tiling_greedy(host, pattern, Seed{til_seed}, til_passes);
                out = {{"status", "greedy"},
                       {"size", t.size()},
                       {"covered", t.covered.size()},
                       {"tiling", tiling_json(t)}};
            } else {
                throw std::invalid_argument("unknown tile mode: " + til_mode);
            }
            std::cout << out.dump(2) << "\n";
        } else if (*reg) {
            Graph host = read_graph(reg_host, "auto");
            VertexSet a = parse_vertex_list(reg_a), b = parse_vertex_list(reg_b);
            Rational eps = parse_rational(reg_eps);
            json out;
            if (!reg_d.empty()) {
                auto r = check_super_regular(host, a, b, eps, parse_rational(reg_d), reg_trials,
                                             Seed{reg_seed});
                out = {{"check", "super_regular"},
                       {"ok", r.ok},
                       {"mode", r.exact ? "exact" : "sampled"},
                       {"checked_pairs", r.checked_pairs}};
                if (r.failing_vertex) out["failing_vertex"] = *r.failing_vertex;
                if (r.witness)
                    out["witness"] = {{"x", vertex_set_json(r.witness->first)},
                                      {"y", vertex_set_json(r.witness->second)}};
            } else {
                RegularityReport r = reg_mode == "exact"
                                         ? check_eps_regular_exact(host, a, b, eps)
                                         : check_eps_regular_sampled(host, a, b, eps, reg_trials,
                                                                     Seed{reg_seed});
                std::string verdict = r.verdict == RegularityVerdict::Regular ? "regular"
                                      : r.verdict == RegularityVerdict::Irregular
                                          ? "irregular"
                                          : "sampled_plausible";
                out = {{"check", "eps_regular"},
                       {"verdict", verdict},
                       {"pair_density", to_string(r.pair_value)},
                       {"checked_pairs", r.checked_pairs}};
                if (r.verdict == RegularityVerdict::Irregular)
                    out["witness"] = {{"x", vertex_set_json(r.witness_x)},
                                      {"y", vertex_set_json(r.witness_y)},
                                      {"density", to_string(r.witness_value)}};
            }
            std::cout << out.dump(2) << "\n";
        } else if (*star) {
            Graph host = read_graph(star_host, "auto");
            StarTiling t = greedy_star_tiling(host, star_t, parse_rational(star_eps));
            json stars = json::array();
            for (const auto& s : t.stars) stars.push_back({{"centre", s.centre}, {"leaves", s.leaves}});
            json out = {{"t", t.t},
                        {"stars", stars},
                        {"covered", t.covered.size()},
                        {"uncovered", t.uncovered_count},
                        {"meets_target", t.meets_target}};
            std::cout << out.dump(2) << "\n";
        } else if (*cp) {
            Graph cross = read_graph(cp_cross, "auto");
            Graph random_layer = read_graph(cp_random, "auto");
            Pattern pattern = load_pattern(cp_pattern);
            CompletionParams params;
            params.eps5 = parse_rational(cp_eps5);
            params.phi = parse_rational(cp_phi);
            params.d1 = parse_rational(cp_d1);
            params.fallback_budget = cp_budget;
            auto r = complete_pair_tiling(cross, random_layer, parse_vertex_list(cp_s),
                                          parse_vertex_list(cp_t), pattern, params, Seed{cp_seed});
            json out = {{"status", to_string(r.status)},
                        {"route", r.route == CompletionRoute::Staged ? "staged" : "fallback"},
                        {"attempts", r.attempts},
                        // stage constants are engineering defaults, not derived
                        {"params", {{"eps5", to_string(params.eps5)},
                                    {"phi", to_string(params.phi)},
                                    {"d1", to_string(params.d1)}}},
                        {"tiling", r.status == TilingStatus::Found ? tiling_json(r.tiling)
                                                                   : json::array()}};
            std::cout << out.dump(2) << "\n";
        } else if (*sw) {
            std::ifstream f(sw_config);
            if (!f) throw std::runtime_error("cannot open config: " + sw_config);
            json j;
            f >> j;
            SweepConfig cfg = config_from_json(j);
            if (sw_seed_opt->count() > 0) cfg.seed = Seed{sw_seed};
            SweepResult result = run_threshold_sweep(cfg);
            if (sw_format == "json")
                write_output(sw_out, to_json(result).dump(2) + "\n");
            else
                write_output(sw_out, to_csv(result));
        } else if (*xd) {
            std::vector<Rational> grid = xd_grid.empty() ? default_c_grid()
                                                         : parse_rational_list(xd_grid);
            auto demo = run_extremal_demo(xd_pattern, xd_n, parse_rational(xd_a), grid, xd_trials,
                                          Seed{xd_seed}, xd_budget);
            if (xd_format == "json")
                write_output(xd_out, to_json(demo.sweep).dump(2) + "\n");
            else
                write_output(xd_out, to_csv(demo.sweep));
            json rows = json::array();
            for (const auto& r : demo.demo_rows)
                rows.push_back({{"c", to_string(r.c)},
                                {"mean_class_y_coverage", r.mean_class_y_coverage},
                                {"trials_meeting_eps", r.trials_meeting_eps}});
            json verdict = {{"a", to_string(demo.a)},
                            {"b", to_string(demo.b)},
                            {"epsilon", to_string(demo.epsilon)},
                            {"class_y_rows", rows}};
            std::cerr << verdict.dump(2) << "\n";
        } else if (*cb) {
            std::vector<Rational> grid = cb_grid.empty() ? default_c_grid()
                                                         : parse_rational_list(cb_grid);
            auto cmp = run_base_comparison(cb_pattern, cb_n, parse_rational(cb_alpha), grid,
                                           cb_trials, Seed{cb_seed}, cb_budget);
            EmitFormat fmt = cb_format == "json" ? EmitFormat::Json : EmitFormat::Csv;
            if (!cb_out_empty.empty()) emit(cmp.empty_base, fmt, cb_out_empty);
            if (!cb_out_dense.empty()) emit(cmp.dense_base, fmt, cb_out_dense);
            auto first_reaching = [&](const SweepResult& r, double threshold) -> json {
                for (const auto& row : r.rows)
                    if (static_cast<double>(row.found) / row.trials >= threshold)
                        return to_string(row.c);
                return nullptr;
            };
            json out = {{"coupling_violations", cmp.coupling_violations},
                        {"empty_base_first_c_at_0.8", first_reaching(cmp.empty_base, 0.8)},
                        {"dense_base_first_c_at_0.8", first_reaching(cmp.dense_base, 0.8)},
                        {"empty", to_json(cmp.empty_base)},
                        {"dense", to_json(cmp.dense_base)}};
            std::cout << out.dump(2) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
