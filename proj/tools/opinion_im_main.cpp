#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oim/harness.hpp"
#include "oim/parallel.hpp"

namespace {

using oim::ExperimentConfig;

void write_or_print(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text << std::endl;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open file for writing");
    out << text << std::endl;
    if (!out) throw std::runtime_error(path + ": write failed");
}

// Flags shared by every data-consuming subcommand.
void add_input_options(CLI::App* cmd, ExperimentConfig& cfg) {
    cmd->add_option("--graph", cfg.graph_path, "edge list TSV (src<TAB>dst<TAB>weight)");
    cmd->add_option("--ratings", cfg.ratings_path, "ratings CSV (user,item,rating)");
    cmd->add_flag("--normalize-ratings", cfg.normalize_ratings,
                  "min-max rescale ratings onto [0,5]");
    cmd->add_option("--jaccard", cfg.jaccard_threshold,
                    "build the graph from co-rating Jaccard similarity > threshold");
    cmd->add_option("--edge-weight", cfg.edge_weight_const,
                    "overwrite all edge weights with a constant");
    cmd->add_flag("--cosine-weights", cfg.cosine_weights,
                  "re-weight edges by cosine similarity of user embeddings");
    cmd->add_option("--cosine-map", cfg.cosine_map, "clamp | shift")
        ->check(CLI::IsMember({"clamp", "shift"}));
    cmd->add_option("--opinions", cfg.opinions_path, "precomputed opinion labels TSV");
    cmd->add_option("--pred-ratings", cfg.pred_ratings_path, "precomputed predicted ratings TSV");
    cmd->add_option("--user-emb", cfg.user_emb_path, "user embeddings TSV");
    cmd->add_option("--item-emb", cfg.item_emb_path, "item embeddings TSV");
    cmd->add_option("--item", cfg.item_id, "target item id for rating prediction");
    cmd->add_option("--tau", cfg.tau, "neutral band half-width")->check(CLI::PositiveNumber);
    cmd->add_option("--r0-mode", cfg.r0_mode, "mean | median")
        ->check(CLI::IsMember({"mean", "median"}));
    cmd->add_option("--r0", cfg.r0_override, "override the neutral rating");
    cmd->add_option("--scoring", cfg.scoring, "inner | cosine")
        ->check(CLI::IsMember({"inner", "cosine"}));
    cmd->add_option("--threads", cfg.threads, "worker cap (env OPINION_IM_THREADS)");
    cmd->add_option("--seed", cfg.master_seed, "master RNG seed");
}

void add_selection_options(CLI::App* cmd, ExperimentConfig& cfg) {
    cmd->add_option("--k", cfg.k, "seed set size");
    cmd->add_option("--eps", cfg.epsilon, "sampling accuracy epsilon");
    cmd->add_option("--delta-scale", cfg.delta_scale, "1/delta = scale * k * n");
    cmd->add_option("--algo", cfg.algo, "oim | rand | degdis | im")
        ->check(CLI::IsMember({"oim", "rand", "degdis", "im"}));
    cmd->add_option("--mode", cfg.mode, "rootsample | world")
        ->check(CLI::IsMember({"rootsample", "world"}));
    cmd->add_flag("--adaptive-bounds", cfg.adaptive_bounds,
                  "re-anchor the modular bounds at the growing prefix");
    cmd->add_flag("--best-prefix", cfg.best_prefix,
                  "return the best chain prefix instead of exactly k seeds");
    cmd->add_option("--sims", cfg.sims, "Monte Carlo evaluation runs");
    cmd->add_option("--pool-in", cfg.pool_in, "reuse a saved sample pool");
    cmd->add_option("--pool-out", cfg.pool_out, "save the sample pool");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"opinion-aware influence maximization"};
    app.require_subcommand(1);

    ExperimentConfig cfg;

    auto* select = app.add_subcommand("select", "choose a seed set and evaluate it");
    add_input_options(select, cfg);
    add_selection_options(select, cfg);
    select->add_option("--out", cfg.out_path, "write the run record JSON here");

    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep, one CSV row per cell");
    add_input_options(sweep, cfg);
    add_selection_options(sweep, cfg);
    std::string axis = "k";
    std::vector<double> values;
    std::vector<std::string> algos;
    int repeats = 1;
    sweep->add_option("--axis", axis, "k | epsilon")->check(CLI::IsMember({"k", "epsilon"}));
    sweep->add_option("--values", values, "axis values")->delimiter(',');
    sweep->add_option("--algos", algos, "algorithms to run (default all)")->delimiter(',');
    sweep->add_option("--repeat", repeats, "repeats per cell, averaged");
    sweep->add_option("--out", cfg.out_path, "write the CSV here");

    auto* evaluate = app.add_subcommand("evaluate", "Monte Carlo spread of a given seed set");
    add_input_options(evaluate, cfg);
    std::string seeds_path;
    evaluate->add_option("--seeds", seeds_path, "seeds file (whitespace-separated ids)")
        ->required();
    evaluate->add_option("--sims", cfg.sims, "Monte Carlo evaluation runs");
    evaluate->add_option("--out", cfg.out_path, "write the estimate JSON here");

    auto* oracle = app.add_subcommand("oracle", "exact objective by world enumeration");
    add_input_options(oracle, cfg);
    std::string oracle_seeds_path;
    oracle->add_option("--seeds", oracle_seeds_path, "seeds file; omit to brute-force optimum");
    oracle->add_option("--k", cfg.k, "optimum size for brute force");
    oracle->add_option("--out", cfg.out_path, "write the result JSON here");

    auto* partition = app.add_subcommand("partition", "classify nodes and write opinions TSV");
    add_input_options(partition, cfg);
    std::string partition_out;
    partition->add_option("--out", partition_out, "opinions TSV output path");

    auto* gen = app.add_subcommand("gen", "generate a synthetic instance");
    oim::SynthConfig syn;
    std::string gen_prefix;
    gen->add_option("--n", syn.n, "node count")->required();
    gen->add_option("--m", syn.m, "edge count")->required();
    gen->add_option("--zipf", syn.zipf_exponent, "out-degree Zipf exponent");
    gen->add_option("--w-min", syn.w_min, "minimum edge weight");
    gen->add_option("--w-max", syn.w_max, "maximum edge weight");
    gen->add_option("--pos-frac", syn.pos_frac, "fraction of positive nodes");
    gen->add_option("--neg-frac", syn.neg_frac, "fraction of negative nodes");
    gen->add_option("--seed", syn.seed, "generator seed");
    gen->add_option("--out-prefix", gen_prefix, "writes PREFIX.edges.tsv and PREFIX.opinions.tsv")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2; // usage problems are exit code 2
    }

    try {
        if (cfg.threads > 0) oim::set_thread_cap(cfg.threads);

        if (select->parsed()) {
            oim::RunRecord rec = oim::run_select(cfg);
            write_or_print(rec.to_json().dump(2), cfg.out_path);
        } else if (sweep->parsed()) {
            if (algos.empty()) algos = {"oim", "rand", "degdis", "im"};
            oim::SweepResult res = oim::run_sweep(cfg, axis, values, algos, repeats);
            write_or_print(res.csv, cfg.out_path);
        } else if (evaluate->parsed()) {
            std::vector<oim::NodeId> seeds = oim::parse_seeds_file(seeds_path);
            oim::SpreadEstimate est = oim::run_evaluate(cfg, seeds);
            nlohmann::json j{{"seeds", seeds},
                             {"mean_pos", est.mean_pos},
                             {"mean_neg", est.mean_neg},
                             {"mean_net", est.mean_net},
                             {"std_err_net", est.std_err_net},
                             {"sims", est.sims}};
            write_or_print(j.dump(2), cfg.out_path);
        } else if (oracle->parsed()) {
            std::optional<std::vector<oim::NodeId>> seeds;
            if (!oracle_seeds_path.empty()) seeds = oim::parse_seeds_file(oracle_seeds_path);
            write_or_print(oim::run_oracle(cfg, seeds).dump(2), cfg.out_path);
        } else if (partition->parsed()) {
            write_or_print(oim::run_partition(cfg, partition_out).dump(2), "");
        } else if (gen->parsed()) {
            oim::SynthInstance inst = oim::generate_synthetic(syn);
            oim::save_edge_list(inst.graph, gen_prefix + ".edges.tsv");
            oim::save_opinions_tsv(inst.opinions, gen_prefix + ".opinions.tsv");
            nlohmann::json j{{"n", inst.graph.node_count()},
                             {"m", inst.graph.edge_count()},
                             {"positive", inst.opinions.positive_set().size()},
                             {"neutral", inst.opinions.neutral_set().size()},
                             {"negative", inst.opinions.negative_set().size()},
                             {"edges", gen_prefix + ".edges.tsv"},
                             {"opinions", gen_prefix + ".opinions.tsv"}};
            std::cout << j.dump(2) << std::endl;
        }
    } catch (const oim::UsageError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
