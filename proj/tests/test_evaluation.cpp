#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace ivfs;

namespace {

/// C tight clusters on a line, `per` points each, spread 0.01, gap 10.
DataMatrix separated(std::size_t C, std::size_t per, std::size_t d = 2) {
    DataMatrix X;
    X.values = Matrix(C * per, d);
    X.labels = std::vector<int>(C * per);
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t p = 0; p < per; ++p) {
            const std::size_t i = c * per + p;
            (*X.labels)[i] = static_cast<int>(c);
            X.values(i, 0) = 10.0 * static_cast<double>(c) + 0.01 * static_cast<double>(p);
            for (std::size_t j = 1; j < d; ++j) X.values(i, j) = 0.01 * static_cast<double>((p * 7 + j) % 5);
        }
    return X;
}

}  // namespace

TEST(Knn, OneClassIsPerfect) {
    auto X = separated(1, 10);
    const std::vector<std::size_t> grid{1, 3, 5};
    EXPECT_EQ(knn_accuracy(X, FeatureSubset::all(2), grid, 5, 0.2, RngHandle{1, 0}), 1.0);
}

TEST(Knn, SeparatedClustersArePerfect) {
    auto X = separated(3, 10);
    const std::vector<std::size_t> grid{1};
    EXPECT_EQ(knn_accuracy(X, FeatureSubset::all(2), grid, 10, 0.2, RngHandle{2, 0}), 1.0);
}

TEST(Knn, DeterministicAndValidated) {
    const auto X = standardize(synthesize(40, 5, 1, 1.0, RngHandle{3, 0}));
    const std::vector<std::size_t> grid{1};
    const double a = knn_accuracy(X, FeatureSubset({2, 3}), grid, 10, 0.2, RngHandle{4, 0});
    EXPECT_EQ(a, knn_accuracy(X, FeatureSubset({2, 3}), grid, 10, 0.2, RngHandle{4, 0}));
    const std::vector<std::size_t> too_big{32};
    EXPECT_THROW(knn_accuracy(X, FeatureSubset({0}), too_big, 1, 0.2, RngHandle{}), InvalidArgument);
    DataMatrix unlabeled = X;
    unlabeled.labels.reset();
    EXPECT_THROW(knn_accuracy(unlabeled, FeatureSubset({0}), grid, 1, 0.2, RngHandle{}), InvalidArgument);
    EXPECT_THROW(knn_accuracy(X, FeatureSubset({5}), grid, 1, 0.2, RngHandle{}), InvalidArgument);
}

TEST(Kmeans, SeparatedClustersArePerfect) {
    for (std::size_t C : {2u, 3u, 5u}) {
        const auto X = separated(C, 8);
        EXPECT_EQ(kmeans_accuracy(X, FeatureSubset::all(2), 10, RngHandle{C, 0}), 1.0);
    }
}

TEST(Kmeans, OnePointPerClass) {
    const auto X = separated(6, 1);
    EXPECT_EQ(kmeans_accuracy(X, FeatureSubset::all(2), 3, RngHandle{}), 1.0);
}

TEST(Kmeans, LabelPermutationInvariance) {
    auto X = standardize(synthesize(60, 4, 1, 1.0, RngHandle{5, 0}));
    const double a = kmeans_accuracy(X, FeatureSubset({0, 1}), 5, RngHandle{6, 0});
    for (int& l : *X.labels) l = 1 - l;
    EXPECT_EQ(a, kmeans_accuracy(X, FeatureSubset({0, 1}), 5, RngHandle{6, 0}));
}

TEST(Kmeans, AccuracyAtLeastOneOverC) {
    std::mt19937_64 gen(8);
    for (int t = 0; t < 20; ++t) {
        auto X = standardize(synthesize(30, 3, 0, 1.0, RngHandle{static_cast<std::uint64_t>(t), 1}));
        const int C = 2 + t % 4;
        for (auto& l : *X.labels) l = static_cast<int>(gen() % static_cast<unsigned>(C));
        for (int c = 0; c < C; ++c) (*X.labels)[static_cast<std::size_t>(c)] = c;  // keep ids contiguous
        EXPECT_GE(kmeans_accuracy(X, FeatureSubset::all(3), 2, RngHandle{1, 1}), 1.0 / C - 1e-12);
    }
}

TEST(Kmeans, EmptyClusterIsReseeded) {
    // Three identical points and two more: any run with three clusters must
    // still produce three nonempty clusters.
    DataMatrix X;
    X.values = Matrix(5, 1);
    X.values(3, 0) = 1.0;
    X.values(4, 0) = 2.0;
    const auto c = kmeans(X, FeatureSubset::all(1), 3, 4, RngHandle{3, 3});
    std::set<int> used(c.assignment.begin(), c.assignment.end());
    EXPECT_EQ(used.size(), 3u);
    EXPECT_NEAR(c.inertia, 0.0, 1e-12);
}

TEST(ClusteringAccuracy, HungarianMatch) {
    const std::vector<int> assign{2, 2, 0, 0, 1, 1};
    const std::vector<int> labels{0, 0, 1, 1, 2, 0};
    EXPECT_NEAR(clustering_accuracy(assign, labels), 5.0 / 6.0, 1e-15);
}

TEST(Nmi, Examples) {
    const std::vector<int> u{0, 0, 1, 1}, v{0, 1, 0, 1}, c{0, 0, 0, 0};
    EXPECT_EQ(nmi(u, u), 1.0);
    EXPECT_EQ(nmi(c, u), 0.0);
    EXPECT_NEAR(nmi(u, v), 0.0, 1e-15);
    const std::vector<int> short_v{0, 1};
    EXPECT_THROW(nmi(u, short_v), InvalidArgument);
}

TEST(Nmi, SymmetricAndBounded) {
    std::mt19937_64 gen(9);
    for (int t = 0; t < 100; ++t) {
        std::vector<int> a(25), b(25);
        for (auto& x : a) x = static_cast<int>(gen() % 4);
        for (auto& x : b) x = static_cast<int>(gen() % 3);
        EXPECT_EQ(nmi(a, b), nmi(b, a));
        EXPECT_GE(nmi(a, b), 0.0);
        EXPECT_LE(nmi(a, b), 1.0);
        if (std::set<int>(a.begin(), a.end()).size() >= 2) { EXPECT_EQ(nmi(a, a), 1.0); }
    }
}

TEST(Nmi, HandComputedValue) {
    // Contingency [[2,0],[1,1]] over n = 4.
    const std::vector<int> u{0, 0, 1, 1}, v{0, 0, 0, 1};
    const double hu = std::log(2.0);
    const double hv = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
    const double mi = 0.5 * std::log(0.5 / (0.5 * 0.75)) + 0.25 * std::log(0.25 / (0.5 * 0.75)) +
                      0.25 * std::log(0.25 / (0.5 * 0.25));
    EXPECT_NEAR(nmi(u, v), mi / std::sqrt(hu * hv), 1e-12);
}

TEST(Evaluate, AllFeaturesGiveZeroDistances) {
    const auto X = standardize(synthesize(50, 6, 2, 1.0, RngHandle{10, 0}));
    EvaluationConfig cfg;
    cfg.max_points = 30;
    const auto r = evaluate_selection(X, FeatureSubset::all(6), cfg);
    EXPECT_EQ(r.w1, 0.0);
    EXPECT_EQ(r.w_inf, 0.0);
    EXPECT_EQ(r.l_inf, 0.0);
    EXPECT_EQ(r.l1_over_n2, 0.0);
    EXPECT_EQ(r.l2, 0.0);
}

TEST(Evaluate, LabeledDataPopulatesEveryField) {
    const auto X = standardize(synthesize(50, 8, 2, 1.0, RngHandle{11, 0}));
    EvaluationConfig cfg;
    cfg.max_points = 30;
    cfg.seed = 4;
    const auto r = evaluate_selection(X, FeatureSubset({0, 1, 5}), cfg);
    for (const auto& m : metric_names()) EXPECT_TRUE(std::isfinite(r.get(m))) << m;
    EXPECT_GT(r.l2, 0.0);
    EXPECT_GT(r.knn_accuracy, 0.8);
    const auto again = evaluate_selection(X, FeatureSubset({0, 1, 5}), cfg);
    for (const auto& m : metric_names()) EXPECT_EQ(r.get(m), again.get(m)) << m;
}

TEST(Evaluate, L1IsDividedByNSquared) {
    const auto X = standardize(synthesize(20, 5, 2, 1.0, RngHandle{12, 0}));
    EvaluationConfig cfg;
    cfg.metrics = {"l1_over_n2"};
    const FeatureSubset F({1, 2});
    const auto r = evaluate_selection(X, F, cfg);
    const double l1 = diff_norm(normalize_max(pairwise_distances(X)), normalize_max(pairwise_distances(X, F)), NormKind::L1);
    EXPECT_NEAR(r.l1_over_n2, l1 / 400.0, 1e-15);
    EXPECT_TRUE(std::isnan(r.l2));
}

TEST(Evaluate, UnlabeledSkipsSupervisedMetrics) {
    auto X = standardize(synthesize(20, 5, 2, 1.0, RngHandle{12, 0}));
    X.labels.reset();
    EvaluationConfig cfg;
    cfg.max_points = 20;
    const auto r = evaluate_selection(X, FeatureSubset({0}), cfg);
    EXPECT_TRUE(std::isnan(r.knn_accuracy));
    EXPECT_TRUE(std::isfinite(r.l2));
}

TEST(Evaluate, RejectsUnknownMetric) {
    const auto X = standardize(synthesize(20, 5, 2, 1.0, RngHandle{12, 0}));
    EvaluationConfig cfg;
    cfg.metrics = {"accuracy"};
    EXPECT_THROW(evaluate_selection(X, FeatureSubset({0}), cfg), InvalidArgument);
}

TEST(Report, JsonRoundTrip) {
    const auto X = standardize(synthesize(30, 5, 2, 1.0, RngHandle{13, 0}));
    EvaluationConfig cfg;
    cfg.metrics = {"l2", "nmi"};
    cfg.elapsed_seconds = 1.25;
    cfg.parameters["note"] = "x";
    const auto r = evaluate_selection(X, FeatureSubset({0, 3}), cfg);
    const auto j = to_json(r);
    EXPECT_TRUE(j["w1"].is_null());
    const auto back = report_from_json(nlohmann::ordered_json::parse(j.dump()));
    EXPECT_EQ(back.l2, r.l2);
    EXPECT_EQ(back.nmi, r.nmi);
    EXPECT_TRUE(std::isnan(back.w1));
    EXPECT_EQ(back.elapsed_seconds, 1.25);
    EXPECT_EQ(back.parameters.at("note"), "x");
}

TEST(Timed, SmokeAndDeterminism) {
    const auto X = standardize(synthesize(10, 5, 1, 1.0, RngHandle{}));
    IvfsConfig c;
    c.d_tilde = 2;
    c.n_tilde = 5;
    c.k = 10;
    const auto [res, s] = timed([&] { return run_ivfs(X, c); });
    EXPECT_LT(s, 1.0);
    EXPECT_EQ(res.final_scores, run_ivfs(X, c).final_scores);
    const double v = timed([] {});
    EXPECT_GE(v, 0.0);
}
