#pragma once

// Scoring kernels behind the public scoring API. Each parallel kernel has a
// serial counterpart used as a test reference and as the benchmark baseline.

#include "pqtopk/core.hpp"
#include "pqtopk/scoring.hpp"

#include <cstdint>
#include <span>

namespace pqtopk::kernels {

/// Item-major scores for positions [begin, end) of V into out[0, end - begin).
void pq_scores_serial(const Codebook& codebook, const SubIdScoreMatrix& scores, const ItemSubset& subset,
                      std::uint64_t begin, std::uint64_t end, std::span<float> out);

/// Item-major scores for all of V, positions split across workers.
void pq_scores_omp(const Codebook& codebook, const SubIdScoreMatrix& scores, const ItemSubset& subset,
                   std::span<float> out);

/// Parallel chunked scan with per-worker bounded selection and a final merge.
TopKResult pq_topk_omp(const Codebook& codebook, const SubIdScoreMatrix& scores, const ItemSubset& subset,
                       std::size_t k, std::size_t chunk_size);

/// Split-major accumulation: acc[pos] += S[k][code(pos, k)] for k = 0..m-1 in order.
void recjpq_accumulate(const Codebook& codebook, const SubIdScoreMatrix& scores, const ItemSubset& subset,
                       std::span<float> acc);

/// r[pos] = w_{V[pos]} . phi, strictly sequential summation.
void dense_scores_serial(const DenseEmbeddingMatrix& w, std::span<const float> phi, const ItemSubset& subset,
                         std::span<float> out);

/// r[pos] = w_{V[pos]} . phi with blocked (vectorisable) summation, rows split across workers.
void dense_scores_omp(const DenseEmbeddingMatrix& w, std::span<const float> phi, const ItemSubset& subset,
                      std::span<float> out);

/// Blocked dot product used by the dense kernel.
float dot_blocked(const float* a, const float* b, std::size_t n);

/// Sequential dot product, ascending component order.
float dot_sequential(const float* a, const float* b, std::size_t n);

} // namespace pqtopk::kernels
