#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hybridir::losses {

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}

    std::span<double> row(std::size_t i) { return {values.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
    double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

/// Reference (cross-encoder) scores and model scores for one
/// (query, positive, negative) triple.
struct ScoredTriple {
    double s_pos = 0.0;
    double s_neg = 0.0;
    double shat_pos = 0.0;
    double shat_neg = 0.0;
};

struct MarginMseResult {
    double loss = 0.0;
    std::vector<double> grad_shat_pos;
    std::vector<double> grad_shat_neg;
};

/// mean_b ((s+ - s-) - (shat+ - shat-))^2 with gradients w.r.t. the model
/// scores.
MarginMseResult margin_mse(std::span<const ScoredTriple> batch);

inline constexpr double kDefaultTemperature = 0.01;

/// K queries with their positive and hard-negative documents (row i of each
/// matrix belongs to query i).
struct ContrastiveBatch {
    Matrix queries;
    Matrix positives;
    Matrix negatives;
    double temperature = kDefaultTemperature;
};

struct MnrResult {
    double loss = 0.0;
    Matrix grad_queries;
    Matrix grad_positives;
    Matrix grad_negatives;
};

/// Multiple-negatives ranking loss with s(u, v) = cos(u, v) / temperature,
/// averaged over queries:
///   -s(q_i, p_i) + log sum_{k != i} exp s(q_i, p_k) + log sum_k exp s(q_i, n_k)
/// The positive is left out of the first log-sum-exp. Needs K >= 2 and no
/// zero rows.
MnrResult mnr_loss(const ContrastiveBatch& batch);

struct DistillResult {
    double loss = 0.0;
    Matrix grad_student;
};

/// Mean over all elements of (student - teacher)^2.
DistillResult distill_mse(const Matrix& teacher, const Matrix& student);

struct BilingualPair {
    std::string source_text;
    std::string target_text;
    double similarity = 0.0;
};

inline constexpr double kBilingualThreshold = 0.7;

/// Keeps pairs with similarity >= threshold, preserving order.
std::vector<BilingualPair> filter_bilingual_pairs(std::span<const BilingualPair> pairs,
                                                  double threshold = kBilingualThreshold);

struct GradCheckReport {
    double margin_mse_max_rel_error = 0.0;
    double mnr_max_rel_error = 0.0;
    double distill_max_rel_error = 0.0;
    std::size_t points = 0;

    double max_rel_error() const;
};

/// Compares every analytic gradient with central finite differences at
/// `points` random inputs per loss. The error at one point is
/// ||g_analytic - g_numeric|| / max(||g_analytic||, ||g_numeric||).
GradCheckReport gradient_check(std::uint64_t seed = 1234, std::size_t points = 20, double step = 1e-5);

}  // namespace hybridir::losses
