#include "oim/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "oim/rng.hpp"

namespace oim {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Seed sub-streams, so pool sampling, evaluation and baseline draws never
// share engine seeds.
constexpr std::uint64_t kPoolStream = 1;
constexpr std::uint64_t kEvalStream = 2;
constexpr std::uint64_t kBaselineStream = 3;

Scoring parse_scoring(const std::string& s) {
    if (s == "inner") return Scoring::InnerProduct;
    if (s == "cosine") return Scoring::Cosine;
    throw UsageError("scoring must be 'inner' or 'cosine'");
}

NeutralMode parse_r0_mode(const std::string& s) {
    if (s == "mean") return NeutralMode::Mean;
    if (s == "median") return NeutralMode::Median;
    throw UsageError("r0 mode must be 'mean' or 'median'");
}

SampleMode parse_mode(const std::string& s) {
    if (s == "rootsample") return SampleMode::RootSample;
    if (s == "world") return SampleMode::World;
    throw UsageError("mode must be 'rootsample' or 'world'");
}

CosineMap parse_cosine_map(const std::string& s) {
    if (s == "clamp") return CosineMap::Clamp;
    if (s == "shift") return CosineMap::Shift;
    throw UsageError("cosine map must be 'clamp' or 'shift'");
}

json sigma_json(const SigmaValue& s) {
    return json{{"pos", s.pos}, {"neg", s.neg}, {"net", s.net}};
}

SigmaValue sigma_from_json(const json& j) {
    return SigmaValue{j.at("pos").get<double>(), j.at("neg").get<double>(),
                      j.at("net").get<double>()};
}

} // namespace

json config_json(const ExperimentConfig& cfg) {
    json j;
    j["graph"] = cfg.graph_path;
    j["jaccard_threshold"] = cfg.jaccard_threshold ? json(*cfg.jaccard_threshold) : json();
    j["edge_weight"] = cfg.edge_weight_const ? json(*cfg.edge_weight_const) : json();
    j["cosine_weights"] = cfg.cosine_weights;
    j["cosine_map"] = cfg.cosine_map;
    j["opinions"] = cfg.opinions_path;
    j["pred_ratings"] = cfg.pred_ratings_path;
    j["ratings"] = cfg.ratings_path;
    j["normalize_ratings"] = cfg.normalize_ratings;
    j["user_emb"] = cfg.user_emb_path;
    j["item_emb"] = cfg.item_emb_path;
    j["item"] = cfg.item_id;
    j["tau"] = cfg.tau;
    j["r0_mode"] = cfg.r0_mode;
    j["r0_override"] = cfg.r0_override ? json(*cfg.r0_override) : json();
    j["scoring"] = cfg.scoring;
    j["k"] = cfg.k;
    j["epsilon"] = cfg.epsilon;
    j["delta_scale"] = cfg.delta_scale;
    j["algo"] = cfg.algo;
    j["mode"] = cfg.mode;
    j["adaptive_bounds"] = cfg.adaptive_bounds;
    j["best_prefix"] = cfg.best_prefix;
    j["sims"] = cfg.sims;
    j["seed"] = cfg.master_seed;
    j["threads"] = cfg.threads;
    return j;
}

json RunRecord::to_json() const {
    json j;
    j["config"] = config;
    j["l"] = l;
    j["seeds"] = seeds;
    j["sigma_pool"] = sigma_pool ? sigma_json(*sigma_pool) : json();
    if (chains) {
        json c;
        c["middle"] = chains->chain_mid;
        c["upper"] = chains->chain_upper;
        c["lower"] = chains->chain_lower;
        c["mid_step_gains"] = chains->mid_step_gains;
        c["sigma_middle"] = sigma_json(chains->sigma_mid);
        c["sigma_upper"] = sigma_json(chains->sigma_upper);
        c["sigma_lower"] = sigma_json(chains->sigma_lower);
        c["winner"] = chains->winner;
        j["chains"] = c;
    } else {
        j["chains"] = json();
    }
    if (ratios) {
        json r;
        r["upper"] = ratios->upper ? json(*ratios->upper) : json();
        r["lower"] = ratios->lower ? json(*ratios->lower) : json();
        j["ratios"] = r;
    } else {
        j["ratios"] = json();
    }
    j["evaluation"] = json{{"mean_pos", evaluation.mean_pos},
                           {"mean_neg", evaluation.mean_neg},
                           {"mean_net", evaluation.mean_net},
                           {"std_err_net", evaluation.std_err_net},
                           {"sims", evaluation.sims}};
    j["timings_ms"] = json{{"partition", timings.partition_ms},
                           {"sampling", timings.sampling_ms},
                           {"selection", timings.selection_ms},
                           {"evaluation", timings.evaluation_ms},
                           {"total", timings.total_ms}};
    return j;
}

RunRecord RunRecord::from_json(const json& j) {
    RunRecord r;
    r.config = j.at("config");
    r.l = j.at("l").get<std::int64_t>();
    r.seeds = j.at("seeds").get<std::vector<NodeId>>();
    if (!j.at("sigma_pool").is_null()) r.sigma_pool = sigma_from_json(j.at("sigma_pool"));
    if (!j.at("chains").is_null()) {
        const json& c = j.at("chains");
        SandwichResult s;
        s.chain_mid = c.at("middle").get<std::vector<NodeId>>();
        s.chain_upper = c.at("upper").get<std::vector<NodeId>>();
        s.chain_lower = c.at("lower").get<std::vector<NodeId>>();
        s.mid_step_gains = c.at("mid_step_gains").get<std::vector<double>>();
        s.sigma_mid = sigma_from_json(c.at("sigma_middle"));
        s.sigma_upper = sigma_from_json(c.at("sigma_upper"));
        s.sigma_lower = sigma_from_json(c.at("sigma_lower"));
        s.winner = c.at("winner").get<std::string>();
        s.returned = r.seeds;
        s.sigma_returned = r.sigma_pool ? r.sigma_pool->net : 0.0;
        r.chains = s;
    }
    if (!j.at("ratios").is_null()) {
        RatioReport rep;
        if (!j.at("ratios").at("upper").is_null())
            rep.upper = j.at("ratios").at("upper").get<double>();
        if (!j.at("ratios").at("lower").is_null())
            rep.lower = j.at("ratios").at("lower").get<double>();
        r.ratios = rep;
    }
    const json& e = j.at("evaluation");
    r.evaluation.mean_pos = e.at("mean_pos").get<double>();
    r.evaluation.mean_neg = e.at("mean_neg").get<double>();
    r.evaluation.mean_net = e.at("mean_net").get<double>();
    r.evaluation.std_err_net = e.at("std_err_net").get<double>();
    r.evaluation.sims = e.at("sims").get<std::int64_t>();
    const json& t = j.at("timings_ms");
    r.timings.partition_ms = t.at("partition").get<double>();
    r.timings.sampling_ms = t.at("sampling").get<double>();
    r.timings.selection_ms = t.at("selection").get<double>();
    r.timings.evaluation_ms = t.at("evaluation").get<double>();
    r.timings.total_ms = t.at("total").get<double>();
    return r;
}

LoadedInputs load_inputs(const ExperimentConfig& cfg) {
    auto start = Clock::now();
    LoadedInputs out;

    std::optional<LoadedRatings> ratings;
    auto ratings_table = [&]() -> const LoadedRatings& {
        if (!ratings) {
            if (cfg.ratings_path.empty()) throw UsageError("this configuration needs --ratings");
            ratings = load_ratings_csv(cfg.ratings_path, cfg.normalize_ratings);
        }
        return *ratings;
    };

    bool jaccard_built = false;
    if (!cfg.graph_path.empty()) {
        out.graph = load_edge_list(cfg.graph_path);
    } else if (cfg.jaccard_threshold) {
        out.graph = build_jaccard_graph(ratings_table().table, *cfg.jaccard_threshold);
        jaccard_built = true;
    } else {
        throw UsageError("no graph source: pass --graph, or --ratings with --jaccard");
    }

    if (jaccard_built && !cfg.cosine_weights && !cfg.edge_weight_const)
        throw UsageError("a Jaccard-built graph has placeholder weights; pass --edge-weight "
                         "or --cosine-weights to assign real ones");
    if (cfg.edge_weight_const && cfg.cosine_weights)
        throw UsageError("--edge-weight and --cosine-weights are mutually exclusive");

    if (cfg.edge_weight_const) {
        std::vector<Edge> edges = out.graph.edges();
        for (Edge& e : edges) e.weight = *cfg.edge_weight_const;
        out.graph = Graph(out.graph.node_count(), std::move(edges));
    }

    NodeId n = out.graph.node_count();

    EmbeddingSet user_emb;
    bool have_user_emb = false;
    auto users = [&]() -> const EmbeddingSet& {
        if (!have_user_emb) {
            if (cfg.user_emb_path.empty()) throw UsageError("this configuration needs --user-emb");
            IdMap* remap = ratings && ratings->remapped ? &ratings->users : nullptr;
            user_emb = load_embeddings_tsv(cfg.user_emb_path, remap);
            have_user_emb = true;
        }
        return user_emb;
    };

    if (cfg.cosine_weights)
        out.graph = weights_from_embeddings(out.graph, users(), parse_cosine_map(cfg.cosine_map));

    OpinionConfig ocfg;
    ocfg.tau = cfg.tau;
    ocfg.scoring = parse_scoring(cfg.scoring);
    auto neutral = [&] {
        if (cfg.r0_override) return *cfg.r0_override;
        return neutral_rating(ratings_table().table, parse_r0_mode(cfg.r0_mode));
    };

    if (!cfg.opinions_path.empty()) {
        out.opinions = load_opinions_tsv(cfg.opinions_path, n);
    } else if (!cfg.pred_ratings_path.empty()) {
        std::vector<double> r = load_predicted_ratings_tsv(cfg.pred_ratings_path, n);
        ocfg.r0 = neutral();
        out.opinions = classify_all(r, ocfg);
    } else if (!cfg.item_emb_path.empty() || !cfg.item_id.empty()) {
        if (cfg.item_emb_path.empty() || cfg.item_id.empty())
            throw UsageError("embedding-based opinions need both --item-emb and --item");
        IdMap* item_remap = ratings && ratings->remapped ? &ratings->items : nullptr;
        EmbeddingSet items = load_embeddings_tsv(cfg.item_emb_path, item_remap);
        std::uint32_t item = 0;
        if (item_remap) {
            auto found = item_remap->find(cfg.item_id);
            if (!found) throw std::runtime_error("unknown item id '" + cfg.item_id + "'");
            item = *found;
        } else {
            try {
                item = static_cast<std::uint32_t>(std::stoul(cfg.item_id));
            } catch (const std::exception&) {
                throw UsageError("item id must be numeric for this input");
            }
        }
        ocfg.r0 = neutral();
        out.opinions = partition_users(users(), items.at(item), ocfg, n);
    } else {
        throw UsageError("no opinion source: pass --opinions, --pred-ratings, or embeddings");
    }

    out.partition_ms = ms_since(start);
    return out;
}

namespace {

struct SelectOutcome {
    std::vector<NodeId> seeds;
    std::int64_t l{0};
    std::optional<SigmaValue> sigma_pool;
    std::optional<SandwichResult> chains;
    std::optional<RatioReport> ratios;
    double sampling_ms{0.0};
    double selection_ms{0.0};
};

SelectOutcome select_seeds(const ExperimentConfig& cfg, const LoadedInputs& in) {
    NodeId n = in.graph.node_count();
    if (cfg.k < 1) throw UsageError("k must be at least 1");
    if (static_cast<NodeId>(cfg.k) > n) throw UsageError("k exceeds node count");

    SelectOutcome out;
    if (cfg.algo == "rand" || cfg.algo == "degdis") {
        auto start = Clock::now();
        out.seeds = run_baseline(cfg.algo, in.graph, in.opinions, cfg.k,
                                 mix_seed(cfg.master_seed, kBaselineStream));
        out.selection_ms = ms_since(start);
        return out;
    }

    if (cfg.delta_scale <= 0.0) throw UsageError("delta scale must be positive");
    double delta = 1.0 / (cfg.delta_scale * static_cast<double>(cfg.k) * static_cast<double>(n));
    SamplingPlan plan = make_plan(n, cfg.k, cfg.epsilon, delta, parse_mode(cfg.mode));

    if (cfg.algo == "im") {
        auto s0 = Clock::now();
        plan.mode = SampleMode::RootSample; // the all-roots pool has no world variant
        SignedSamplePool pool = SignedSamplePool::build_unsigned(
            in.graph, plan, mix_seed(cfg.master_seed, kPoolStream), cfg.threads);
        out.sampling_ms = ms_since(s0);
        out.l = plan.l;
        auto s1 = Clock::now();
        out.seeds = greedy_im(pool, cfg.k);
        out.selection_ms = ms_since(s1);
        return out;
    }

    if (cfg.algo != "oim") throw UsageError("unknown algorithm '" + cfg.algo + "'");

    auto s0 = Clock::now();
    SignedSamplePool pool = [&] {
        if (!cfg.pool_in.empty()) {
            SignedSamplePool p = SignedSamplePool::load(cfg.pool_in);
            if (p.node_count() != n)
                throw std::runtime_error("pool file does not match graph node count");
            return p;
        }
        return SignedSamplePool::build(in.graph, in.opinions, plan,
                                       mix_seed(cfg.master_seed, kPoolStream), cfg.threads);
    }();
    if (!cfg.pool_out.empty()) pool.save(cfg.pool_out);
    out.sampling_ms = ms_since(s0);
    out.l = pool.plan_l() > 0 ? pool.plan_l() : plan.l;

    auto s1 = Clock::now();
    BoundTables tables = build_bound_tables(pool);
    SandwichOptions opts;
    opts.adaptive_bounds = cfg.adaptive_bounds;
    opts.best_prefix = cfg.best_prefix;
    SandwichResult result = sandwich_greedy(pool, cfg.k, tables, opts);
    out.selection_ms = ms_since(s1);

    out.seeds = result.returned;
    out.sigma_pool = pool.estimate_sigma(result.returned);
    out.ratios = ratio_report(pool, result, tables);
    out.chains = std::move(result);
    return out;
}

} // namespace

RunRecord run_select(const ExperimentConfig& cfg) {
    auto start = Clock::now();
    LoadedInputs in = load_inputs(cfg);

    SelectOutcome sel = select_seeds(cfg, in);

    auto e0 = Clock::now();
    SpreadEstimate eval = evaluate_spread(in.graph, in.opinions, sel.seeds, cfg.sims,
                                          mix_seed(cfg.master_seed, kEvalStream), cfg.threads);

    RunRecord rec;
    rec.config = config_json(cfg);
    rec.l = sel.l;
    rec.seeds = sel.seeds;
    rec.sigma_pool = sel.sigma_pool;
    rec.chains = sel.chains;
    rec.ratios = sel.ratios;
    rec.evaluation = eval;
    rec.timings.partition_ms = in.partition_ms;
    rec.timings.sampling_ms = sel.sampling_ms;
    rec.timings.selection_ms = sel.selection_ms;
    rec.timings.evaluation_ms = ms_since(e0);
    rec.timings.total_ms = ms_since(start);
    return rec;
}

SweepResult run_sweep(const ExperimentConfig& cfg, const std::string& axis,
                      const std::vector<double>& values, const std::vector<std::string>& algos,
                      int repeats) {
    if (axis != "k" && axis != "epsilon") throw UsageError("sweep axis must be 'k' or 'epsilon'");
    if (values.empty()) throw UsageError("sweep needs at least one axis value");
    if (algos.empty()) throw UsageError("sweep needs at least one algorithm");
    if (repeats < 1) throw UsageError("repeats must be at least 1");

    LoadedInputs in = load_inputs(cfg);

    SweepResult res;
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        for (std::size_t ai = 0; ai < algos.size(); ++ai) {
            ExperimentConfig cell = cfg;
            cell.algo = algos[ai];
            if (axis == "k") {
                double v = values[vi];
                if (v < 1.0 || v != std::floor(v)) throw UsageError("k values must be integers >= 1");
                cell.k = static_cast<int>(v);
            } else {
                cell.epsilon = values[vi];
            }

            SweepRow row;
            row.axis = axis;
            row.value = values[vi];
            row.algo = cell.algo;
            row.k = cell.k;
            row.epsilon = cell.epsilon;
            row.repeats = repeats;

            double sig_sum = 0.0;
            bool sig_all = true;
            for (int rep = 0; rep < repeats; ++rep) {
                cell.master_seed = mix_seed(cfg.master_seed,
                                            (vi * algos.size() + ai) * 1000003ULL +
                                                static_cast<std::uint64_t>(rep));
                SelectOutcome sel = select_seeds(cell, in);
                auto e0 = Clock::now();
                SpreadEstimate eval =
                    evaluate_spread(in.graph, in.opinions, sel.seeds, cell.sims,
                                    mix_seed(cell.master_seed, kEvalStream), cell.threads);
                row.timings.evaluation_ms += ms_since(e0);
                row.l = sel.l;
                if (sel.sigma_pool) sig_sum += sel.sigma_pool->net;
                else sig_all = false;
                row.mean_net += eval.mean_net;
                row.mean_pos += eval.mean_pos;
                row.mean_neg += eval.mean_neg;
                row.std_err_net += eval.std_err_net;
                row.timings.partition_ms = in.partition_ms;
                row.timings.sampling_ms += sel.sampling_ms;
                row.timings.selection_ms += sel.selection_ms;
            }
            double r = static_cast<double>(repeats);
            row.mean_net /= r;
            row.mean_pos /= r;
            row.mean_neg /= r;
            row.std_err_net /= r;
            row.timings.sampling_ms /= r;
            row.timings.selection_ms /= r;
            row.timings.evaluation_ms /= r;
            row.timings.total_ms = row.timings.partition_ms + row.timings.sampling_ms +
                                   row.timings.selection_ms + row.timings.evaluation_ms;
            if (sig_all) row.sigma_net = sig_sum / r;
            res.rows.push_back(std::move(row));
        }
    }

    std::ostringstream csv;
    csv << "axis,value,algo,k,epsilon,l,repeats,sigma_net,mean_net,mean_pos,mean_neg,"
           "std_err_net,time_partition_ms,time_sampling_ms,time_selection_ms,time_total_ms\n";
    csv.precision(12);
    for (const SweepRow& row : res.rows) {
        csv << row.axis << ',' << row.value << ',' << row.algo << ',' << row.k << ','
            << row.epsilon << ',' << row.l << ',' << row.repeats << ',';
        if (row.sigma_net) csv << *row.sigma_net;
        csv << ',' << row.mean_net << ',' << row.mean_pos << ',' << row.mean_neg << ','
            << row.std_err_net << ',' << row.timings.partition_ms << ','
            << row.timings.sampling_ms << ',' << row.timings.selection_ms << ','
            << row.timings.total_ms << '\n';
    }
    res.csv = csv.str();
    return res;
}

SpreadEstimate run_evaluate(const ExperimentConfig& cfg, std::span<const NodeId> seeds) {
    LoadedInputs in = load_inputs(cfg);
    for (NodeId s : seeds)
        if (s >= in.graph.node_count())
            throw std::runtime_error("seed node " + std::to_string(s) + " out of range");
    return evaluate_spread(in.graph, in.opinions, seeds, cfg.sims,
                           mix_seed(cfg.master_seed, kEvalStream), cfg.threads);
}

nlohmann::json run_oracle(const ExperimentConfig& cfg,
                          std::optional<std::vector<NodeId>> seeds) {
    LoadedInputs in = load_inputs(cfg);
    json j;
    if (seeds) {
        OracleResult r = exact_objective(in.graph, in.opinions, *seeds);
        j["seeds"] = *seeds;
        j["exact_pos"] = r.exact_pos;
        j["exact_neg"] = r.exact_neg;
        j["exact_net"] = r.exact_net;
        j["worlds_enumerated"] = r.worlds_enumerated;
    } else {
        auto [best, value] = brute_force_opt(in.graph, in.opinions, cfg.k);
        j["seeds"] = best;
        j["exact_net"] = value;
        j["k"] = cfg.k;
    }
    return j;
}

nlohmann::json run_partition(const ExperimentConfig& cfg, const std::string& out_tsv) {
    LoadedInputs in = load_inputs(cfg);
    if (!out_tsv.empty()) save_opinions_tsv(in.opinions, out_tsv);
    json j;
    j["n"] = in.opinions.size();
    j["positive"] = in.opinions.positive_set().size();
    j["neutral"] = in.opinions.neutral_set().size();
    j["negative"] = in.opinions.negative_set().size();
    j["out"] = out_tsv;
    return j;
}

std::vector<NodeId> parse_seeds_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open file");
    std::vector<NodeId> seeds;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        long v = 0;
        while (ss >> v) {
            if (v < 0) throw std::runtime_error(path + ": negative node id");
            seeds.push_back(static_cast<NodeId>(v));
        }
        if (!ss.eof()) throw std::runtime_error(path + ": malformed seeds file");
    }
    return seeds;
}

} // namespace oim
