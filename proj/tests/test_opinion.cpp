#include <doctest.h>

#include <cmath>
#include <random>

#include "oim/opinion.hpp"
#include "support.hpp"

using namespace oim;
using testsupport::TempFile;

TEST_CASE("predicted rating: inner product and cosine") {
    std::vector<double> u{1.0, 2.0};
    std::vector<double> v{3.0, 4.0};
    CHECK(predict_rating(u, v, Scoring::InnerProduct) == doctest::Approx(11.0));
    CHECK(predict_rating(u, u, Scoring::Cosine) == doctest::Approx(1.0));
    CHECK(predict_rating(u, v, Scoring::Cosine) ==
          doctest::Approx(11.0 / (std::sqrt(5.0) * 5.0)));

    std::vector<double> zero{0.0, 0.0};
    CHECK_THROWS_WITH_AS(predict_rating(u, zero, Scoring::Cosine),
                         doctest::Contains("zero-norm vector"), std::runtime_error);
    std::vector<double> shorter{1.0};
    CHECK_THROWS_AS(predict_rating(u, shorter, Scoring::InnerProduct), std::runtime_error);
}

TEST_CASE("classification thresholds are inclusive") {
    OpinionConfig cfg;
    cfg.r0 = 3.0;
    cfg.tau = 0.5;
    CHECK(classify_opinion(4.2, cfg) == 1);
    CHECK(classify_opinion(3.5, cfg) == 1);  // exactly r0 + tau
    CHECK(classify_opinion(2.6, cfg) == 0);
    CHECK(classify_opinion(2.5, cfg) == -1); // exactly r0 - tau
    CHECK(classify_opinion(2.1, cfg) == -1);
    CHECK(classify_opinion(3.0, cfg) == 0);
}

TEST_CASE("classification: every rating lands in exactly one class") {
    OpinionConfig cfg;
    cfg.r0 = 2.75;
    cfg.tau = 0.4;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> r(0.0, 5.0);
    OpinionLabel prev = -1;
    double prev_rating = -1.0;
    for (int i = 0; i < 2000; ++i) {
        double x = r(rng);
        OpinionLabel lab = classify_opinion(x, cfg);
        CHECK((lab == -1 || lab == 0 || lab == 1));
        // monotone in the rating
        if (prev_rating >= 0.0 && x >= prev_rating) CHECK(lab >= prev);
        prev_rating = x;
        prev = lab;
        rng.discard(1);
    }
}

namespace {

RatingsTable table_of(std::vector<double> ratings) {
    RatingsTable t;
    t.user_count = 1;
    t.item_count = static_cast<std::uint32_t>(ratings.size());
    for (std::uint32_t i = 0; i < ratings.size(); ++i) t.entries.push_back({0, i, ratings[i]});
    return t;
}

} // namespace

TEST_CASE("neutral rating: mean and lower median") {
    CHECK(neutral_rating(table_of({1.0, 5.0}), NeutralMode::Mean) == doctest::Approx(3.0));
    // Lower median on an even count.
    CHECK(neutral_rating(table_of({1.0, 2.0, 3.0, 4.0}), NeutralMode::Median) == 2.0);
    CHECK(neutral_rating(table_of({4.0, 2.0, 3.0}), NeutralMode::Median) == 3.0);
    CHECK_THROWS_AS(neutral_rating(RatingsTable{}, NeutralMode::Mean), std::runtime_error);
}

TEST_CASE("partition_users groups by predicted rating") {
    // Item vector (1); user embeddings are scalar ratings directly.
    std::unordered_map<NodeId, std::vector<double>> users;
    users[0] = {4.0};
    users[1] = {3.2};
    users[2] = {1.0};
    users[3] = {3.5};
    EmbeddingSet set;
    set.dim = 1;
    set.vectors = users;
    OpinionConfig cfg;
    cfg.r0 = 3.0;
    cfg.tau = 0.5;
    cfg.scoring = Scoring::InnerProduct;
    std::vector<double> item{1.0};
    OpinionPartition part = partition_users(set, item, cfg, 4);
    CHECK(part.label(0) == 1);
    CHECK(part.label(1) == 0);
    CHECK(part.label(2) == -1);
    CHECK(part.label(3) == 1);
    CHECK(part.positive_set() == std::vector<NodeId>{0, 3});
    CHECK(part.negative_set() == std::vector<NodeId>{2});
    CHECK(part.neutral_set() == std::vector<NodeId>{1});
    CHECK(part.signed_set() == std::vector<NodeId>{0, 2, 3});
}

TEST_CASE("partition missing embedding throws") {
    EmbeddingSet set;
    set.dim = 1;
    set.vectors[0] = {4.0};
    OpinionConfig cfg;
    cfg.r0 = 3.0;
    std::vector<double> item{1.0};
    CHECK_THROWS_AS(partition_users(set, item, cfg, 2), std::runtime_error);
}

TEST_CASE("classify_all mirrors classify_opinion") {
    OpinionConfig cfg;
    cfg.r0 = 3.0;
    cfg.tau = 1.0;
    std::vector<double> r{5.0, 3.0, 1.0, 4.0};
    OpinionPartition part = classify_all(r, cfg);
    CHECK(part.label(0) == 1);
    CHECK(part.label(1) == 0);
    CHECK(part.label(2) == -1);
    CHECK(part.label(3) == 1);
    CHECK(part.positive_set().size() + part.neutral_set().size() + part.negative_set().size() ==
          4);
}

TEST_CASE("opinions tsv: round trip and defaults") {
    std::vector<OpinionLabel> labels{1, 0, -1, 1};
    OpinionPartition part(labels);
    TempFile f("opinions");
    save_opinions_tsv(part, f.path());
    OpinionPartition back = load_opinions_tsv(f.path(), 4);
    for (NodeId u = 0; u < 4; ++u) CHECK(back.label(u) == part.label(u));

    TempFile sparse("opinions");
    sparse.write("# node\tlabel\n2\t-1\n0\t1\n");
    OpinionPartition s = load_opinions_tsv(sparse.path(), 4);
    CHECK(s.label(0) == 1);
    CHECK(s.label(1) == 0); // unlisted nodes default neutral
    CHECK(s.label(2) == -1);
    CHECK(s.label(3) == 0);
}

TEST_CASE("opinions tsv: errors name the line") {
    TempFile bad("opinions");
    bad.write("0\t2\n");
    CHECK_THROWS_WITH_AS(load_opinions_tsv(bad.path(), 2), doctest::Contains("line 1"),
                         std::runtime_error);
    TempFile range("opinions");
    range.write("9\t1\n");
    CHECK_THROWS_AS(load_opinions_tsv(range.path(), 2), std::runtime_error);
}

TEST_CASE("predicted ratings tsv: requires every node") {
    TempFile f("pred");
    f.write("0\t4.5\n1\t2.0\n");
    std::vector<double> r = load_predicted_ratings_tsv(f.path(), 2);
    CHECK(r[0] == 4.5);
    CHECK(r[1] == 2.0);
    CHECK_THROWS_WITH_AS(load_predicted_ratings_tsv(f.path(), 3),
                         doctest::Contains("missing prediction for node 2"), std::runtime_error);

    TempFile g("pred");
    std::vector<double> vals{1.25, 3.5, 0.0};
    save_predicted_ratings_tsv(vals, g.path());
    CHECK(load_predicted_ratings_tsv(g.path(), 3) == vals);
}

TEST_CASE("tau must be positive") {
    OpinionConfig cfg;
    cfg.r0 = 3.0;
    cfg.tau = 0.0;
    CHECK_THROWS_AS(classify_opinion(3.0, cfg), std::runtime_error);
}
