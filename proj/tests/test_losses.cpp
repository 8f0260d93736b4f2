#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hybridir/error.hpp"
#include "hybridir/losses.hpp"
#include "oracles.hpp"

using namespace hybridir;
using namespace hybridir::losses;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(rows, cols);
    for (auto& v : m.values) v = g(rng);
    return m;
}

ContrastiveBatch random_batch(std::size_t k, std::size_t dim, double tau, std::mt19937_64& rng) {
    ContrastiveBatch b;
    b.queries = random_matrix(k, dim, rng);
    b.positives = random_matrix(k, dim, rng);
    b.negatives = random_matrix(k, dim, rng);
    b.temperature = tau;
    return b;
}

std::vector<double> concat(const Matrix& a, const Matrix& b, const Matrix& c) {
    std::vector<double> out(a.values);
    out.insert(out.end(), b.values.begin(), b.values.end());
    out.insert(out.end(), c.values.begin(), c.values.end());
    return out;
}

}  // namespace

TEST(MarginMse, WorkedExample) {
    std::vector<ScoredTriple> batch{{0.9, 0.1, 0.5, 0.1}};
    auto r = margin_mse(batch);
    EXPECT_NEAR(r.loss, 0.16, 1e-12);
    EXPECT_NEAR(r.grad_shat_pos[0], -0.8, 1e-12);
    EXPECT_NEAR(r.grad_shat_neg[0], 0.8, 1e-12);
}

TEST(MarginMse, ZeroWhenMarginsMatchAndShiftInvariant) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        std::vector<ScoredTriple> batch;
        for (int i = 0; i < 4; ++i) batch.push_back({g(rng), g(rng), g(rng), g(rng)});
        auto base = margin_mse(batch);
        EXPECT_GE(base.loss, 0.0);
        double c = g(rng);
        auto shifted = batch;
        for (auto& s : shifted) {
            s.shat_pos += c;
            s.shat_neg += c;
        }
        EXPECT_NEAR(margin_mse(shifted).loss, base.loss, 1e-12);
        auto matched = batch;
        for (auto& s : matched) {
            s.shat_pos = s.s_pos + c;
            s.shat_neg = s.s_neg + c;
        }
        EXPECT_NEAR(margin_mse(matched).loss, 0.0, 1e-12);
    }
}

TEST(MarginMse, RejectsBadInput) {
    EXPECT_THROW(margin_mse({}), InvalidArgument);
    std::vector<ScoredTriple> batch{{NAN, 0, 0, 0}};
    EXPECT_THROW(margin_mse(batch), NumericError);
}

TEST(MarginMse, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int point = 0; point < 20; ++point) {
        std::vector<ScoredTriple> batch;
        for (int i = 0; i < 5; ++i) batch.push_back({g(rng), g(rng), g(rng), g(rng)});
        auto r = margin_mse(batch);
        std::vector<double> analytic(r.grad_shat_pos);
        analytic.insert(analytic.end(), r.grad_shat_neg.begin(), r.grad_shat_neg.end());
        std::vector<double> x;
        for (const auto& s : batch) x.push_back(s.shat_pos);
        for (const auto& s : batch) x.push_back(s.shat_neg);
        auto f = [&](const std::vector<double>& v) {
            auto copy = batch;
            for (std::size_t i = 0; i < copy.size(); ++i) {
                copy[i].shat_pos = v[i];
                copy[i].shat_neg = v[copy.size() + i];
            }
            return margin_mse(copy).loss;
        };
        EXPECT_LT(oracle::relative_error(analytic, oracle::numeric_gradient(f, x, 1e-5)), 1e-4);
    }
}

TEST(Mnr, OrthogonalConstructionGivesLn2) {
    // Every query is orthogonal to every positive and negative, so all
    // similarities are 0: loss = 0 + ln 1 + ln 2.
    ContrastiveBatch b;
    b.queries = Matrix(2, 4);
    b.positives = Matrix(2, 4);
    b.negatives = Matrix(2, 4);
    b.queries(0, 0) = 1;
    b.queries(1, 1) = 1;
    b.positives(0, 2) = 1;
    b.positives(1, 3) = 1;
    b.negatives(0, 2) = 1;
    b.negatives(1, 3) = 1;
    b.temperature = 1.0;
    EXPECT_NEAR(mnr_loss(b).loss, std::log(2.0), 1e-9);
    b.temperature = kDefaultTemperature;
    EXPECT_NEAR(mnr_loss(b).loss, std::log(2.0), 1e-9);

    // With q_i = p_i the positive term contributes -1 / tau.
    b.positives = b.queries;
    b.temperature = 1.0;
    EXPECT_NEAR(mnr_loss(b).loss, -1.0 + std::log(2.0), 1e-9);
}

TEST(Mnr, MatchesNaiveOracle) {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 30; ++t) {
        std::size_t k = 2 + t % 5, dim = 3 + t % 4;
        double tau = 0.5 + 0.1 * (t % 5);
        auto b = random_batch(k, dim, tau, rng);
        double naive = oracle::mnr_naive(b.queries.values, b.positives.values, b.negatives.values, k, dim, tau);
        EXPECT_NEAR(mnr_loss(b).loss, naive, 1e-9 * std::max(1.0, std::abs(naive)));
    }
}

TEST(Mnr, StableAtDefaultTemperature) {
    std::mt19937_64 rng(5);
    auto b = random_batch(8, 16, kDefaultTemperature, rng);
    auto r = mnr_loss(b);
    EXPECT_TRUE(std::isfinite(r.loss));
    for (double v : r.grad_queries.values) EXPECT_TRUE(std::isfinite(v));
}

TEST(Mnr, ScaleInvariantPerRow) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    for (int t = 0; t < 20; ++t) {
        auto b = random_batch(4, 5, 0.05, rng);
        auto scaled = b;
        for (Matrix* m : {&scaled.queries, &scaled.positives, &scaled.negatives}) {
            for (std::size_t i = 0; i < m->rows; ++i) {
                double c = scale(rng);
                for (auto& v : m->row(i)) v *= c;
            }
        }
        EXPECT_NEAR(mnr_loss(b).loss, mnr_loss(scaled).loss, 1e-9);
    }
}

TEST(Mnr, RespectsProvableLowerBound) {
    // Each cosine lies in [-1, 1], so the loss is at least
    // ln(K-1) + ln K - 3 / tau.
    std::mt19937_64 rng(13);
    for (int t = 0; t < 200; ++t) {
        std::size_t k = 2 + t % 6;
        double tau = 0.05 + 0.05 * (t % 20);
        auto b = random_batch(k, 3, tau, rng);
        double bound = std::log(static_cast<double>(k - 1)) + std::log(static_cast<double>(k)) - 3.0 / tau;
        EXPECT_GE(mnr_loss(b).loss, bound - 1e-9);
    }
}

TEST(Mnr, RejectsBadInput) {
    std::mt19937_64 rng(1);
    auto one = random_batch(1, 3, 1.0, rng);
    EXPECT_THROW(mnr_loss(one), InvalidArgument);
    auto b = random_batch(3, 3, 0.0, rng);
    EXPECT_THROW(mnr_loss(b), InvalidArgument);
    b.temperature = 1.0;
    auto wrong_rows = b;
    wrong_rows.negatives = random_matrix(2, 3, rng);
    EXPECT_THROW(mnr_loss(wrong_rows), DimensionError);
    auto wrong_cols = b;
    wrong_cols.positives = random_matrix(3, 4, rng);
    EXPECT_THROW(mnr_loss(wrong_cols), DimensionError);
    auto zero_row = b;
    for (auto& v : zero_row.negatives.row(1)) v = 0.0;
    EXPECT_THROW(mnr_loss(zero_row), NumericError);
}

TEST(Mnr, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(99);
    for (int point = 0; point < 20; ++point) {
        auto b = random_batch(4, 6, 0.5, rng);
        auto r = mnr_loss(b);
        auto analytic = concat(r.grad_queries, r.grad_positives, r.grad_negatives);
        std::size_t n = b.queries.values.size();
        auto f = [&](const std::vector<double>& x) {
            return oracle::mnr_naive({x.begin(), x.begin() + n}, {x.begin() + n, x.begin() + 2 * n},
                                     {x.begin() + 2 * n, x.end()}, 4, 6, 0.5);
        };
        auto numeric = oracle::numeric_gradient(f, concat(b.queries, b.positives, b.negatives), 1e-5);
        EXPECT_LT(oracle::relative_error(analytic, numeric), 1e-4);
    }
}

TEST(Distill, WorkedExampleAndGradient) {
    Matrix teacher(1, 2);
    teacher(0, 0) = 1.0;
    teacher(0, 1) = 2.0;
    Matrix student(1, 2);
    student(0, 0) = 2.0;
    student(0, 1) = 1.0;
    auto r = distill_mse(teacher, student);
    EXPECT_NEAR(r.loss, 1.0, 1e-12);
    EXPECT_NEAR(r.grad_student(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(r.grad_student(0, 1), -1.0, 1e-12);
    EXPECT_NEAR(distill_mse(teacher, teacher).loss, 0.0, 0.0);
    EXPECT_THROW(distill_mse(teacher, Matrix(2, 2)), DimensionError);
}

TEST(Distill, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(4);
    for (int point = 0; point < 20; ++point) {
        auto teacher = random_matrix(3, 5, rng);
        auto student = random_matrix(3, 5, rng);
        auto r = distill_mse(teacher, student);
        auto f = [&](const std::vector<double>& x) {
            Matrix s(3, 5);
            s.values = x;
            return distill_mse(teacher, s).loss;
        };
        auto numeric = oracle::numeric_gradient(f, student.values, 1e-5);
        EXPECT_LT(oracle::relative_error(r.grad_student.values, numeric), 1e-4);
    }
}

TEST(BilingualFilter, KeepsAtOrAboveThreshold) {
    std::vector<BilingualPair> pairs{{"a", "A", 0.69}, {"b", "B", 0.70}, {"c", "C", 0.71}};
    auto kept = filter_bilingual_pairs(pairs);
    ASSERT_EQ(kept.size(), 2u);
    EXPECT_EQ(kept[0].source_text, "b");
    EXPECT_EQ(kept[1].source_text, "c");
    EXPECT_EQ(filter_bilingual_pairs(pairs, 0.0).size(), 3u);
    EXPECT_TRUE(filter_bilingual_pairs(pairs, 0.9).empty());
}

TEST(GradientCheck, LibraryReportIsWithinTolerance) {
    auto report = gradient_check(1234, 20);
    EXPECT_EQ(report.points, 20u);
    EXPECT_LT(report.max_rel_error(), 1e-4);
}
