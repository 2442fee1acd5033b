#pragma once

#include "pqtopk/core.hpp"
#include "pqtopk/scoring.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pqtopk {

/// Diagnostics from the k-means codebook builder.
struct QuantisationReport {
    /// Mean over items of the squared error within each split.
    std::vector<double> split_mse;
    /// Sum of split_mse, i.e. mean squared reconstruction error of a full row.
    double total_mse = 0.0;
    /// Centroid update steps run per split.
    std::vector<std::uint32_t> iterations;
    /// Squared reconstruction error of each item, summed over splits.
    std::vector<double> item_sq_error;
    /// split_mse after every assignment step, starting with the seeding assignment.
    std::vector<std::vector<double>> split_mse_history;
    std::vector<std::string> warnings;

    /// Total MSE after each assignment step; splits that stopped early hold their last value.
    std::vector<double> total_mse_history() const;
};

struct CodebookBuild {
    Codebook codebook;
    SubItemEmbeddings embeddings;
    QuantisationReport report;

    PQInstance instance() const { return {codebook, embeddings}; }
};

struct KMeansOptions {
    std::uint32_t max_iters = 25;
    std::uint64_t seed = 0;
};

/// Standard product quantisation of W: per split, k-means with b centroids
/// (distance-weighted seeding, Lloyd iterations until no assignment changes or
/// max_iters). Splits run in parallel; output depends only on the inputs.
CodebookBuild build_pq_codebook(const DenseEmbeddingMatrix& w, std::uint64_t num_splits, std::uint64_t num_sub_ids,
                                const KMeansOptions& options = {});

/// Squared error of every item under an arbitrary codebook over the same W.
std::vector<double> item_squared_errors(const DenseEmbeddingMatrix& w, const PQInstance& instance);

/// |I| * d * 4
std::uint64_t dense_bytes(const PQConfig& config);

/// |I| * m * 2 + m * b * (d/m) * 4
std::uint64_t pq_bytes(const PQConfig& config);

/// dense_bytes / pq_bytes
double compression_ratio(const PQConfig& config);

} // namespace pqtopk
