#include "pqtopk/codebook.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace pqtopk {

namespace {

struct SplitResult {
    std::vector<float> centroids; // b x w
    std::vector<Code> assignment; // n
    std::vector<double> sq_error; // n
    std::vector<double> mse_history;
    std::uint32_t iterations = 0;
};

double squared_distance(const float* a, const float* b, std::size_t w) {
    double acc = 0.0;
    for (std::size_t t = 0; t < w; ++t) {
        const double diff = static_cast<double>(a[t]) - static_cast<double>(b[t]);
        acc += diff * diff;
    }
    return acc;
}

class SplitQuantiser {
public:
    SplitQuantiser(std::vector<float> points, std::size_t n, std::size_t w, std::size_t b, std::uint64_t seed,
                   std::uint64_t split)
        : points_(std::move(points)), n_(n), w_(w), b_(b), centroids_(b * w), assignment_(n), sq_error_(n) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(split)};
        rng_.seed(seq);
    }

    SplitResult run(std::uint32_t max_iters) {
        seed_centroids();
        assign();
        SplitResult out;
        out.mse_history.push_back(mse());
        while (out.iterations < max_iters) {
            update();
            ++out.iterations;
            const auto changed = assign();
            out.mse_history.push_back(mse());
            if (changed == 0) break;
        }
        out.centroids = std::move(centroids_);
        out.assignment = std::move(assignment_);
        out.sq_error = std::move(sq_error_);
        return out;
    }

private:
    const float* point(std::size_t i) const { return points_.data() + i * w_; }
    float* centroid(std::size_t c) { return centroids_.data() + c * w_; }

    // Distance-weighted seeding; falls back to uniform picks once every point coincides with a centroid.
    void seed_centroids() {
        std::vector<double> nearest(n_, std::numeric_limits<double>::infinity());
        std::uniform_int_distribution<std::size_t> uniform(0, n_ - 1);
        std::size_t pick = uniform(rng_);
        for (std::size_t c = 0; c < b_; ++c) {
            if (c > 0) {
                double total = 0.0;
                for (double v : nearest) total += v;
                if (total > 0.0) {
                    std::uniform_real_distribution<double> draw(0.0, total);
                    const double target = draw(rng_);
                    double running = 0.0;
                    pick = n_;
                    for (std::size_t i = 0; i < n_; ++i) {
                        if (nearest[i] <= 0.0) continue;
                        running += nearest[i];
                        pick = i;
                        if (running > target) break;
                    }
                } else {
                    pick = uniform(rng_);
                }
            }
            std::copy_n(point(pick), w_, centroid(c));
            for (std::size_t i = 0; i < n_; ++i)
                nearest[i] = std::min(nearest[i], squared_distance(point(i), centroid(c), w_));
        }
    }

    // Nearest centroid per point, ties to the lowest index. Returns the number of changed codes.
    std::size_t assign() {
        std::size_t changed = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_c = 0;
            for (std::size_t c = 0; c < b_; ++c) {
                const double dist = squared_distance(point(i), centroid(c), w_);
                if (dist < best) {
                    best = dist;
                    best_c = c;
                }
            }
            if (assignment_[i] != best_c || !assigned_) ++changed;
            assignment_[i] = static_cast<Code>(best_c);
            sq_error_[i] = best;
        }
        assigned_ = true;
        return changed;
    }

    void update() {
        std::vector<double> sums(b_ * w_, 0.0);
        std::vector<std::size_t> counts(b_, 0);
        for (std::size_t i = 0; i < n_; ++i) {
            const auto c = assignment_[i];
            ++counts[c];
            const float* p = point(i);
            double* s = sums.data() + c * w_;
            for (std::size_t t = 0; t < w_; ++t) s[t] += p[t];
        }
        std::vector<char> used(n_, 0);
        for (std::size_t c = 0; c < b_; ++c) {
            if (counts[c] > 0) {
                for (std::size_t t = 0; t < w_; ++t)
                    centroid(c)[t] = static_cast<float>(sums[c * w_ + t] / static_cast<double>(counts[c]));
                continue;
            }
            // Empty cluster: move it onto the worst-served point not yet taken.
            std::size_t far = 0;
            double far_err = -1.0;
            for (std::size_t i = 0; i < n_; ++i) {
                if (!used[i] && sq_error_[i] > far_err) {
                    far_err = sq_error_[i];
                    far = i;
                }
            }
            used[far] = 1;
            std::copy_n(point(far), w_, centroid(c));
        }
    }

    double mse() const {
        double acc = 0.0;
        for (double e : sq_error_) acc += e;
        return acc / static_cast<double>(n_);
    }

    std::vector<float> points_;
    std::size_t n_;
    std::size_t w_;
    std::size_t b_;
    std::vector<float> centroids_;
    std::vector<Code> assignment_;
    std::vector<double> sq_error_;
    bool assigned_ = false;
    std::mt19937_64 rng_;
};

} // namespace

std::vector<double> QuantisationReport::total_mse_history() const {
    std::size_t steps = 0;
    for (const auto& h : split_mse_history) steps = std::max(steps, h.size());
    std::vector<double> total(steps, 0.0);
    for (const auto& h : split_mse_history) {
        for (std::size_t t = 0; t < steps; ++t) total[t] += h[std::min(t, h.size() - 1)];
    }
    return total;
}

CodebookBuild build_pq_codebook(const DenseEmbeddingMatrix& w, std::uint64_t num_splits, std::uint64_t num_sub_ids,
                                const KMeansOptions& options) {
    if (num_sub_ids > kMaxSubIds) {
        throw ValidationError("num_sub_ids " + std::to_string(num_sub_ids) + " exceeds 65536 (16-bit codes)");
    }
    const PQConfig config{w.rows(), num_splits, num_sub_ids, w.dim()};
    config.validate();

    QuantisationReport report;
    if (num_sub_ids > w.rows()) {
        report.warnings.push_back("num_sub_ids " + std::to_string(num_sub_ids) + " exceeds the " +
                                  std::to_string(w.rows()) + " items; some sub-ids will duplicate items");
    }

    const std::size_t n = w.rows();
    const std::size_t m = num_splits;
    const std::size_t b = num_sub_ids;
    const std::size_t sub = config.sub_dim();

    std::vector<SplitResult> splits(m);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(m); ++k) {
        std::vector<float> points(n * sub);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = w.row(i);
            std::copy_n(row.data() + static_cast<std::size_t>(k) * sub, sub, points.data() + i * sub);
        }
        SplitQuantiser q(std::move(points), n, sub, b, options.seed, static_cast<std::uint64_t>(k));
        splits[static_cast<std::size_t>(k)] = q.run(options.max_iters);
    }

    std::vector<Code> codes(n * m);
    std::vector<float> table(m * b * sub);
    report.item_sq_error.assign(n, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        auto& s = splits[k];
        for (std::size_t i = 0; i < n; ++i) {
            codes[i * m + k] = s.assignment[i];
            report.item_sq_error[i] += s.sq_error[i];
        }
        std::copy(s.centroids.begin(), s.centroids.end(), table.begin() + static_cast<std::ptrdiff_t>(k * b * sub));
        report.split_mse.push_back(s.mse_history.back());
        report.iterations.push_back(s.iterations);
        report.split_mse_history.push_back(std::move(s.mse_history));
    }
    for (double e : report.split_mse) report.total_mse += e;

    return {Codebook(config, std::move(codes)), SubItemEmbeddings(config, std::move(table)), std::move(report)};
}

std::vector<double> item_squared_errors(const DenseEmbeddingMatrix& w, const PQInstance& instance) {
    const auto& c = instance.config();
    if (c.num_items != w.rows() || c.embed_dim != w.dim()) {
        throw ValidationError("shape mismatch between dense matrix and instance");
    }
    std::vector<double> out(w.rows(), 0.0);
    const auto sub = c.sub_dim();
    for (std::uint64_t i = 0; i < w.rows(); ++i) {
        const auto row = w.row(i);
        const auto codes = instance.codebook.item_codes(static_cast<ItemId>(i));
        for (std::uint64_t k = 0; k < c.num_splits; ++k) {
            out[i] += squared_distance(row.data() + k * sub, instance.embeddings.sub_embedding(k, codes[k]).data(),
                                       sub);
        }
    }
    return out;
}

std::uint64_t dense_bytes(const PQConfig& config) { return config.num_items * config.embed_dim * sizeof(float); }

std::uint64_t pq_bytes(const PQConfig& config) { return config.code_bytes() + config.sub_embedding_bytes(); }

double compression_ratio(const PQConfig& config) {
    config.validate();
    return static_cast<double>(dense_bytes(config)) / static_cast<double>(pq_bytes(config));
}

} // namespace pqtopk
