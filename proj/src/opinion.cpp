#include "oim/opinion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace oim {

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error(msg);
}

void check_cfg(const OpinionConfig& cfg) {
    if (!(cfg.tau > 0.0)) fail("tau must be positive");
    if (!std::isfinite(cfg.r0)) fail("r0 must be finite");
}

} // namespace

OpinionPartition::OpinionPartition(std::vector<OpinionLabel> labels)
    : labels_(std::move(labels)) {
    for (NodeId u = 0; u < labels_.size(); ++u) {
        switch (labels_[u]) {
        case 1: positive_.push_back(u); break;
        case 0: neutral_.push_back(u); break;
        case -1: negative_.push_back(u); break;
        default: fail("opinion label must be -1, 0 or 1");
        }
    }
    signed_.reserve(positive_.size() + negative_.size());
    std::merge(positive_.begin(), positive_.end(), negative_.begin(), negative_.end(),
               std::back_inserter(signed_));
}

double predict_rating(std::span<const double> user_vec, std::span<const double> item_vec,
                      Scoring scoring) {
    if (user_vec.size() != item_vec.size()) fail("embedding dimension mismatch");
    double dot = 0.0;
    for (std::size_t i = 0; i < user_vec.size(); ++i) dot += user_vec[i] * item_vec[i];
    if (scoring == Scoring::InnerProduct) return dot;

    double nu = 0.0, ni = 0.0;
    for (double x : user_vec) nu += x * x;
    for (double x : item_vec) ni += x * x;
    if (nu == 0.0 || ni == 0.0) fail("zero-norm vector in cosine scoring");
    return dot / (std::sqrt(nu) * std::sqrt(ni));
}

OpinionLabel classify_opinion(double r_hat, const OpinionConfig& cfg) {
    check_cfg(cfg);
    if (r_hat - cfg.r0 >= cfg.tau) return 1;
    if (cfg.r0 - r_hat >= cfg.tau) return -1;
    return 0;
}

double neutral_rating(const RatingsTable& ratings, NeutralMode mode) {
    if (ratings.entries.empty()) fail("cannot derive a neutral rating from an empty table");
    if (mode == NeutralMode::Mean) {
        double sum = 0.0;
        for (const auto& e : ratings.entries) sum += e.rating;
        return sum / static_cast<double>(ratings.entries.size());
    }
    std::vector<double> vals;
    vals.reserve(ratings.entries.size());
    for (const auto& e : ratings.entries) vals.push_back(e.rating);
    // Lower median: element at index (N-1)/2 of the sorted values.
    std::size_t idx = (vals.size() - 1) / 2;
    std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(idx), vals.end());
    return vals[idx];
}

OpinionPartition partition_users(const EmbeddingSet& users, std::span<const double> item_vec,
                                 const OpinionConfig& cfg, NodeId n) {
    check_cfg(cfg);
    std::vector<OpinionLabel> labels(n);
    for (NodeId u = 0; u < n; ++u) {
        double r = predict_rating(users.at(u), item_vec, cfg.scoring);
        labels[u] = classify_opinion(r, cfg);
    }
    return OpinionPartition(std::move(labels));
}

OpinionPartition classify_all(std::span<const double> r_hat, const OpinionConfig& cfg) {
    check_cfg(cfg);
    std::vector<OpinionLabel> labels(r_hat.size());
    for (std::size_t u = 0; u < r_hat.size(); ++u) labels[u] = classify_opinion(r_hat[u], cfg);
    return OpinionPartition(std::move(labels));
}

OpinionPartition load_opinions_tsv(const std::string& path, NodeId n) {
    std::ifstream in(path);
    if (!in) fail(path + ": cannot open file");
    std::vector<OpinionLabel> labels(n, 0);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty() || raw[0] == '#') continue;
        long node = -1;
        int label = 0;
        std::size_t pos = raw.find('\t');
        if (pos == std::string::npos) fail(path + ": malformed line, line " + std::to_string(lineno));
        try {
            node = std::stol(raw.substr(0, pos));
            label = std::stoi(raw.substr(pos + 1));
        } catch (const std::exception&) {
            fail(path + ": malformed line, line " + std::to_string(lineno));
        }
        if (node < 0 || static_cast<NodeId>(node) >= n)
            fail(path + ": node id out of range, line " + std::to_string(lineno));
        if (label < -1 || label > 1)
            fail(path + ": label must be -1, 0 or 1, line " + std::to_string(lineno));
        labels[static_cast<NodeId>(node)] = static_cast<OpinionLabel>(label);
    }
    return OpinionPartition(std::move(labels));
}

void save_opinions_tsv(const OpinionPartition& part, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(path + ": cannot open file for writing");
    for (NodeId u = 0; u < part.size(); ++u)
        out << u << '\t' << static_cast<int>(part.label(u)) << '\n';
    if (!out) fail(path + ": write failed");
}

std::vector<double> load_predicted_ratings_tsv(const std::string& path, NodeId n) {
    std::ifstream in(path);
    if (!in) fail(path + ": cannot open file");
    std::vector<double> r(n, std::nan(""));
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty() || raw[0] == '#') continue;
        std::size_t pos = raw.find('\t');
        if (pos == std::string::npos) fail(path + ": malformed line, line " + std::to_string(lineno));
        long node = -1;
        double val = 0.0;
        try {
            node = std::stol(raw.substr(0, pos));
            val = std::stod(raw.substr(pos + 1));
        } catch (const std::exception&) {
            fail(path + ": malformed line, line " + std::to_string(lineno));
        }
        if (node < 0 || static_cast<NodeId>(node) >= n)
            fail(path + ": node id out of range, line " + std::to_string(lineno));
        r[static_cast<NodeId>(node)] = val;
    }
    for (NodeId u = 0; u < n; ++u)
        if (std::isnan(r[u])) fail(path + ": missing prediction for node " + std::to_string(u));
    return r;
}

void save_predicted_ratings_tsv(std::span<const double> r_hat, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(path + ": cannot open file for writing");
    out.precision(17);
    for (std::size_t u = 0; u < r_hat.size(); ++u) out << u << '\t' << r_hat[u] << '\n';
    if (!out) fail(path + ": write failed");
}

} // namespace oim
