#include "hybridir/losses.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "hybridir/error.hpp"

namespace hybridir::losses {

namespace {

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double log_sum_exp(std::span<const double> xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::max(m, x);
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

void check_finite(const Matrix& m, const char* what) {
    for (double v : m.values) {
        if (!std::isfinite(v)) throw NumericError(std::string(what) + " contains a non-finite value");
    }
}

// Adds coeff * d cos(u, v) / du to gu and coeff * d cos(u, v) / dv to gv.
void add_cosine_grad(std::span<const double> u, std::span<const double> v, double nu, double nv, double cos,
                     double coeff, std::span<double> gu, std::span<double> gv) {
    for (std::size_t j = 0; j < u.size(); ++j) {
        double uh = u[j] / nu;
        double vh = v[j] / nv;
        gu[j] += coeff * (vh - cos * uh) / nu;
        gv[j] += coeff * (uh - cos * vh) / nv;
    }
}

double relative_error(std::span<const double> a, std::span<const double> b) {
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) diff += (a[i] - b[i]) * (a[i] - b[i]);
    double scale = std::max(norm(a), norm(b));
    if (scale == 0.0) return 0.0;
    return std::sqrt(diff) / scale;
}

// Central differences of f around x, one coordinate at a time.
std::vector<double> numeric_gradient(std::vector<double> x, double h, const std::function<double(const std::vector<double>&)>& f) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double orig = x[i];
        x[i] = orig + h;
        double up = f(x);
        x[i] = orig - h;
        double down = f(x);
        x[i] = orig;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

}  // namespace

MarginMseResult margin_mse(std::span<const ScoredTriple> batch) {
    if (batch.empty()) throw InvalidArgument("margin_mse needs a non-empty batch");
    MarginMseResult out;
    out.grad_shat_pos.resize(batch.size());
    out.grad_shat_neg.resize(batch.size());
    const double n = static_cast<double>(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const auto& t = batch[b];
        if (!std::isfinite(t.s_pos) || !std::isfinite(t.s_neg) || !std::isfinite(t.shat_pos) ||
            !std::isfinite(t.shat_neg)) {
            throw NumericError("triple " + std::to_string(b) + " has a non-finite score");
        }
        double residual = (t.s_pos - t.s_neg) - (t.shat_pos - t.shat_neg);
        out.loss += residual * residual;
        out.grad_shat_pos[b] = -2.0 * residual / n;
        out.grad_shat_neg[b] = 2.0 * residual / n;
    }
    out.loss /= n;
    return out;
}

MnrResult mnr_loss(const ContrastiveBatch& batch) {
    const auto& q = batch.queries;
    const auto& p = batch.positives;
    const auto& ng = batch.negatives;
    const std::size_t k = q.rows;
    if (k < 2) throw InvalidArgument("mnr_loss needs at least 2 queries per batch");
    if (!(batch.temperature > 0.0)) throw InvalidArgument("temperature must be positive");
    if (p.rows != k || ng.rows != k) throw DimensionError("queries, positives and negatives need the same row count");
    if (p.cols != q.cols || ng.cols != q.cols || q.cols == 0) throw DimensionError("embedding dimensions differ");
    check_finite(q, "queries");
    check_finite(p, "positives");
    check_finite(ng, "negatives");

    const double tau = batch.temperature;
    std::vector<double> nq(k), np(k), nn(k);
    for (std::size_t i = 0; i < k; ++i) {
        nq[i] = norm(q.row(i));
        np[i] = norm(p.row(i));
        nn[i] = norm(ng.row(i));
        if (nq[i] == 0.0 || np[i] == 0.0 || nn[i] == 0.0) {
            throw NumericError("row " + std::to_string(i) + " has zero norm; cosine is undefined");
        }
    }
    Matrix cos_pos(k, k), cos_neg(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            cos_pos(i, j) = dot(q.row(i), p.row(j)) / (nq[i] * np[j]);
            cos_neg(i, j) = dot(q.row(i), ng.row(j)) / (nq[i] * nn[j]);
        }
    }

    MnrResult out;
    out.grad_queries = Matrix(k, q.cols);
    out.grad_positives = Matrix(k, q.cols);
    out.grad_negatives = Matrix(k, q.cols);
    const double inv_k = 1.0 / static_cast<double>(k);
    std::vector<double> others(k - 1), negs(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0, o = 0; j < k; ++j) {
            if (j != i) others[o++] = cos_pos(i, j) / tau;
            negs[j] = cos_neg(i, j) / tau;
        }
        double lse_pos = log_sum_exp(others);
        double lse_neg = log_sum_exp(negs);
        out.loss += -cos_pos(i, i) / tau + lse_pos + lse_neg;

        // dL/ds for each similarity, then chain through cos / tau.
        for (std::size_t j = 0; j < k; ++j) {
            double d_pos = j == i ? -1.0 : std::exp(cos_pos(i, j) / tau - lse_pos);
            double d_neg = std::exp(cos_neg(i, j) / tau - lse_neg);
            add_cosine_grad(q.row(i), p.row(j), nq[i], np[j], cos_pos(i, j), d_pos * inv_k / tau,
                            out.grad_queries.row(i), out.grad_positives.row(j));
            add_cosine_grad(q.row(i), ng.row(j), nq[i], nn[j], cos_neg(i, j), d_neg * inv_k / tau,
                            out.grad_queries.row(i), out.grad_negatives.row(j));
        }
    }
    out.loss *= inv_k;
    return out;
}

DistillResult distill_mse(const Matrix& teacher, const Matrix& student) {
    if (teacher.rows != student.rows || teacher.cols != student.cols) {
        throw DimensionError("teacher is " + std::to_string(teacher.rows) + "x" + std::to_string(teacher.cols) +
                             ", student is " + std::to_string(student.rows) + "x" + std::to_string(student.cols));
    }
    DistillResult out;
    out.grad_student = Matrix(student.rows, student.cols);
    const std::size_t n = student.values.size();
    if (n == 0) return out;
    for (std::size_t i = 0; i < n; ++i) {
        double diff = student.values[i] - teacher.values[i];
        out.loss += diff * diff;
        out.grad_student.values[i] = 2.0 * diff / static_cast<double>(n);
    }
    out.loss /= static_cast<double>(n);
    return out;
}

std::vector<BilingualPair> filter_bilingual_pairs(std::span<const BilingualPair> pairs, double threshold) {
    std::vector<BilingualPair> kept;
    for (const auto& pair : pairs) {
        if (pair.similarity >= threshold) kept.push_back(pair);
    }
    return kept;
}

double GradCheckReport::max_rel_error() const {
    return std::max({margin_mse_max_rel_error, mnr_max_rel_error, distill_max_rel_error});
}

GradCheckReport gradient_check(std::uint64_t seed, std::size_t points, double step) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> small(2, 6);
    GradCheckReport report;
    report.points = points;

    for (std::size_t point = 0; point < points; ++point) {
        // Margin-MSE: x = [shat_pos..., shat_neg...].
        std::vector<ScoredTriple> triples(small(rng));
        for (auto& t : triples) t = {gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
        auto res = margin_mse(triples);
        std::vector<double> x, analytic;
        for (std::size_t b = 0; b < triples.size(); ++b) {
            x.push_back(triples[b].shat_pos);
            analytic.push_back(res.grad_shat_pos[b]);
        }
        for (std::size_t b = 0; b < triples.size(); ++b) {
            x.push_back(triples[b].shat_neg);
            analytic.push_back(res.grad_shat_neg[b]);
        }
        auto numeric = numeric_gradient(x, step, [&](const std::vector<double>& v) {
            auto copy = triples;
            for (std::size_t b = 0; b < copy.size(); ++b) {
                copy[b].shat_pos = v[b];
                copy[b].shat_neg = v[copy.size() + b];
            }
            return margin_mse(copy).loss;
        });
        report.margin_mse_max_rel_error = std::max(report.margin_mse_max_rel_error, relative_error(analytic, numeric));

        // MNR: x = [queries, positives, negatives] flattened. Alternate the
        // default temperature with milder ones.
        ContrastiveBatch batch;
        std::size_t k = small(rng);
        std::size_t dim = small(rng) + 2;
        batch.queries = Matrix(k, dim);
        batch.positives = Matrix(k, dim);
        batch.negatives = Matrix(k, dim);
        for (auto* m : {&batch.queries, &batch.positives, &batch.negatives}) {
            for (auto& v : m->values) v = gauss(rng);
        }
        batch.temperature = point % 2 == 0 ? kDefaultTemperature : 0.05 + 0.95 * std::uniform_real_distribution<double>()(rng);
        auto mnr = mnr_loss(batch);
        std::vector<double> mx, mg;
        for (const auto* pair : {&batch.queries, &batch.positives, &batch.negatives}) {
            mx.insert(mx.end(), pair->values.begin(), pair->values.end());
        }
        for (const auto* g : {&mnr.grad_queries, &mnr.grad_positives, &mnr.grad_negatives}) {
            mg.insert(mg.end(), g->values.begin(), g->values.end());
        }
        auto mnum = numeric_gradient(mx, step, [&](const std::vector<double>& v) {
            auto copy = batch;
            const std::size_t block = k * dim;
            std::copy(v.begin(), v.begin() + block, copy.queries.values.begin());
            std::copy(v.begin() + block, v.begin() + 2 * block, copy.positives.values.begin());
            std::copy(v.begin() + 2 * block, v.end(), copy.negatives.values.begin());
            return mnr_loss(copy).loss;
        });
        report.mnr_max_rel_error = std::max(report.mnr_max_rel_error, relative_error(mg, mnum));

        // Distillation MSE: x = student.
        Matrix teacher(small(rng), small(rng));
        Matrix student(teacher.rows, teacher.cols);
        for (auto& v : teacher.values) v = gauss(rng);
        for (auto& v : student.values) v = gauss(rng);
        auto dist = distill_mse(teacher, student);
        auto dnum = numeric_gradient(student.values, step, [&](const std::vector<double>& v) {
            Matrix s = student;
            s.values = v;
            return distill_mse(teacher, s).loss;
        });
        report.distill_max_rel_error =
            std::max(report.distill_max_rel_error, relative_error(dist.grad_student.values, dnum));
    }
    return report;
}

}  // namespace hybridir::losses
