#pragma once

#include "pqtopk/core.hpp"
#include "pqtopk/topk.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pqtopk {

/// The items to rank: the whole catalogue, or a strictly increasing list of ids.
class ItemSubset {
public:
    static ItemSubset all() { return ItemSubset(); }
    static ItemSubset of(std::vector<ItemId> ids);

    bool is_all() const { return !ids_.has_value(); }
    std::span<const ItemId> ids() const { return ids_ ? std::span<const ItemId>(*ids_) : std::span<const ItemId>(); }

    /// |V| for a catalogue of num_items.
    std::uint64_t size(std::uint64_t num_items) const { return ids_ ? ids_->size() : num_items; }

    /// Id at position pos of V.
    ItemId at(std::uint64_t pos) const { return ids_ ? (*ids_)[pos] : static_cast<ItemId>(pos); }

    /// Throws ValidationError if an id is outside [0, num_items).
    void check_against(std::uint64_t num_items) const;

private:
    ItemSubset() = default;
    explicit ItemSubset(std::vector<ItemId> ids) : ids_(std::move(ids)) {}

    std::optional<std::vector<ItemId>> ids_;
};

/// Explicit |I| x d item embedding matrix, row-major.
class DenseEmbeddingMatrix {
public:
    DenseEmbeddingMatrix(std::uint64_t rows, std::uint64_t dim, std::vector<float> values);

    std::uint64_t rows() const { return rows_; }
    std::uint64_t dim() const { return dim_; }
    std::span<const float> values() const { return values_; }
    std::span<const float> row(std::uint64_t i) const { return {values_.data() + i * dim_, dim_}; }
    std::uint64_t bytes() const { return values_.size() * sizeof(float); }

private:
    std::uint64_t rows_;
    std::uint64_t dim_;
    std::vector<float> values_;
};

/// s[k][j] = psi_{k,j} . phi_k, each dot product summed in ascending component order.
SubIdScoreMatrix compute_sub_id_scores(const SubItemEmbeddings& embeddings, const SequenceEmbedding& phi);

/// Sum of the item's m sub-id scores, accumulated in ascending split order from 0.0f.
float score_item(const SubIdScoreMatrix& scores, const Codebook& codebook, ItemId item);

/// Concatenation of the item's m sub-item embeddings.
std::vector<float> reconstruct_item_embedding(const SubItemEmbeddings& embeddings, const Codebook& codebook,
                                              ItemId item);

/// Materialises W by reconstructing every item. Throws BudgetError if |I|*d*4 exceeds the budget.
DenseEmbeddingMatrix reconstruct_dense(const PQInstance& instance, std::uint64_t memory_budget_bytes);

struct PqTopKOptions {
    /// Items per work unit in the parallel scan.
    std::size_t chunk_size = 8192;
};

/// Item-major PQ scoring with a parallel scan over V and chunk-local bounded selection.
/// Output is independent of the worker count.
TopKResult pq_topk(const Codebook& codebook, const SubIdScoreMatrix& scores, std::size_t k,
                   const ItemSubset& subset = ItemSubset::all(), const PqTopKOptions& options = {});

/// Serial reference for pq_topk: materialises every score in V, then selects.
TopKResult pq_topk_reference(const Codebook& codebook, const SubIdScoreMatrix& scores, std::size_t k,
                             const ItemSubset& subset = ItemSubset::all());

/// Split-major accumulator scoring: one full pass over V per split, splits visited
/// sequentially. Kept as the measured baseline; do not parallelise the split loop.
TopKResult recjpq_score(const Codebook& codebook, const SubIdScoreMatrix& scores, std::size_t k,
                        const ItemSubset& subset = ItemSubset::all());

struct MatmulOptions {
    /// Cap on the score vector allocation (|V| floats). 0 means unlimited.
    std::uint64_t memory_budget_bytes = 0;
};

/// r = W phi over V (rows scored in parallel), then exact top-k.
TopKResult matmul_topk(const DenseEmbeddingMatrix& w, const SequenceEmbedding& phi, std::size_t k,
                       const ItemSubset& subset = ItemSubset::all(), const MatmulOptions& options = {});

/// Serial reference for matmul_topk with strictly sequential dot products.
TopKResult matmul_topk_reference(const DenseEmbeddingMatrix& w, const SequenceEmbedding& phi, std::size_t k,
                                 const ItemSubset& subset = ItemSubset::all());

/// Full PQ score vector over V (position i holds the score of subset.at(i)).
std::vector<float> pq_scores(const Codebook& codebook, const SubIdScoreMatrix& scores,
                             const ItemSubset& subset = ItemSubset::all());

/// Full dense score vector over V.
std::vector<float> matmul_scores(const DenseEmbeddingMatrix& w, const SequenceEmbedding& phi,
                                 const ItemSubset& subset = ItemSubset::all());

} // namespace pqtopk
