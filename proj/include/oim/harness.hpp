#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "oim/baselines.hpp"
#include "oim/graph.hpp"
#include "oim/opinion.hpp"
#include "oim/oracle.hpp"
#include "oim/rr.hpp"
#include "oim/sandwich.hpp"
#include "oim/sim.hpp"
#include "oim/synth.hpp"

namespace oim {

// Bad arguments or inconsistent flags; the CLI maps this to exit code 2.
// Anything else thrown out of a run maps to exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    // Graph source: either an edge list, or a ratings CSV plus a Jaccard
    // threshold. Jaccard edges carry placeholder weights, so that path also
    // needs cosine_weights or edge_weight_const.
    std::string graph_path;
    std::optional<double> jaccard_threshold;
    std::optional<double> edge_weight_const;
    bool cosine_weights{false};
    std::string cosine_map{"clamp"}; // "clamp" | "shift"

    // Opinion source: precomputed labels, precomputed predicted ratings, or
    // prediction from user/item embeddings against one target item.
    std::string opinions_path;
    std::string pred_ratings_path;
    std::string ratings_path;
    bool normalize_ratings{false};
    std::string user_emb_path;
    std::string item_emb_path;
    std::string item_id;

    double tau{0.5};
    std::string r0_mode{"mean"}; // "mean" | "median"
    std::optional<double> r0_override;
    std::string scoring{"inner"}; // "inner" | "cosine"

    int k{10};
    double epsilon{0.15};
    double delta_scale{100.0}; // 1/delta = delta_scale * k * n
    std::string algo{"oim"};   // "oim" | "rand" | "degdis" | "im"
    std::string mode{"rootsample"};
    bool adaptive_bounds{false};
    bool best_prefix{false};

    std::int64_t sims{1000};
    std::uint64_t master_seed{1};
    int threads{0};

    std::string out_path;
    std::string pool_in;
    std::string pool_out;
};

nlohmann::json config_json(const ExperimentConfig& cfg);

struct PhaseTimings {
    double partition_ms{0.0};
    double sampling_ms{0.0};
    double selection_ms{0.0};
    double evaluation_ms{0.0};
    double total_ms{0.0};
};

struct RunRecord {
    nlohmann::json config;
    std::int64_t l{0}; // sample count used, 0 when no pool was built
    std::vector<NodeId> seeds;
    std::optional<SigmaValue> sigma_pool;
    std::optional<SandwichResult> chains;
    std::optional<RatioReport> ratios;
    SpreadEstimate evaluation;
    PhaseTimings timings;

    nlohmann::json to_json() const;
    static RunRecord from_json(const nlohmann::json& j);
};

struct LoadedInputs {
    Graph graph;
    OpinionPartition opinions;
    double partition_ms{0.0};
};

LoadedInputs load_inputs(const ExperimentConfig& cfg);

RunRecord run_select(const ExperimentConfig& cfg);

struct SweepRow {
    std::string axis;
    double value{0.0};
    std::string algo;
    int k{0};
    double epsilon{0.0};
    std::int64_t l{0};
    int repeats{1};
    std::optional<double> sigma_net; // pool estimate, oim only
    double mean_net{0.0}, mean_pos{0.0}, mean_neg{0.0}, std_err_net{0.0};
    PhaseTimings timings; // means over repeats
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::string csv;
};

SweepResult run_sweep(const ExperimentConfig& cfg, const std::string& axis,
                      const std::vector<double>& values, const std::vector<std::string>& algos,
                      int repeats);

SpreadEstimate run_evaluate(const ExperimentConfig& cfg, std::span<const NodeId> seeds);

// With seeds: exact objective of that set. Without: brute-force optimum at
// cfg.k. Either way the result is a small JSON object.
nlohmann::json run_oracle(const ExperimentConfig& cfg,
                          std::optional<std::vector<NodeId>> seeds);

// Writes the opinion partition as TSV and returns a summary.
nlohmann::json run_partition(const ExperimentConfig& cfg, const std::string& out_tsv);

// Whitespace-separated node ids, '#' comments allowed.
std::vector<NodeId> parse_seeds_file(const std::string& path);

} // namespace oim
