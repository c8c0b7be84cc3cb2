#pragma once

#include <span>
#include <string>
#include <vector>

#include "oim/graph.hpp"

namespace oim {

using OpinionLabel = std::int8_t; // -1, 0, +1

enum class Scoring {
    InnerProduct,
    Cosine,
};

enum class NeutralMode {
    Mean,
    Median, // lower median for even-length samples
};

struct OpinionConfig {
    double r0{0.0};  // neutral rating
    double tau{0.5}; // half-width of the neutral band, must be > 0
    Scoring scoring{Scoring::InnerProduct};
};

// Fixed opinion labels for all n nodes plus the derived sign classes. The
// three classes partition 0..n-1.
class OpinionPartition {
public:
    OpinionPartition() = default;
    explicit OpinionPartition(std::vector<OpinionLabel> labels);

    NodeId size() const { return static_cast<NodeId>(labels_.size()); }
    OpinionLabel label(NodeId u) const { return labels_.at(u); }
    const std::vector<OpinionLabel>& labels() const { return labels_; }

    const std::vector<NodeId>& positive_set() const { return positive_; }
    const std::vector<NodeId>& neutral_set() const { return neutral_; }
    const std::vector<NodeId>& negative_set() const { return negative_; }

    // Positive and negative nodes merged, ascending. These are the nodes that
    // contribute to the objective and hence the only useful sample roots.
    const std::vector<NodeId>& signed_set() const { return signed_; }

private:
    std::vector<OpinionLabel> labels_;
    std::vector<NodeId> positive_, neutral_, negative_, signed_;
};

// Predicted preference of a user for an item from their embedding vectors.
// Cosine scoring rejects zero-norm vectors.
double predict_rating(std::span<const double> user_vec, std::span<const double> item_vec,
                      Scoring scoring);

// +1 when r_hat - r0 >= tau, -1 when r0 - r_hat >= tau, else 0. Both
// boundaries are inclusive for the signed classes; the neutral band is the
// open interval |r_hat - r0| < tau.
OpinionLabel classify_opinion(double r_hat, const OpinionConfig& cfg);

// Neutral point of a set of observed ratings.
double neutral_rating(const RatingsTable& ratings, NeutralMode mode);

// Predicts a rating for every node 0..n-1 and classifies it. Every node must
// have an embedding vector.
OpinionPartition partition_users(const EmbeddingSet& users, std::span<const double> item_vec,
                                 const OpinionConfig& cfg, NodeId n);

OpinionPartition classify_all(std::span<const double> r_hat, const OpinionConfig& cfg);

// Opinions file: "node<TAB>label" with label in {-1,0,1}. Nodes absent from
// the file default to neutral.
OpinionPartition load_opinions_tsv(const std::string& path, NodeId n);
void save_opinions_tsv(const OpinionPartition& part, const std::string& path);

// Predicted ratings file: "node<TAB>r_hat", one row per node, all n required.
std::vector<double> load_predicted_ratings_tsv(const std::string& path, NodeId n);
void save_predicted_ratings_tsv(std::span<const double> r_hat, const std::string& path);

} // namespace oim
