#include "pqtopk/scoring.hpp"

#include "pqtopk/kernels.hpp"

#include <cmath>
#include <string>

namespace pqtopk {

ItemSubset ItemSubset::of(std::vector<ItemId> ids) {
    for (std::size_t i = 1; i < ids.size(); ++i) {
        if (ids[i] <= ids[i - 1]) {
            throw ValidationError("invalid subset: ids must be strictly increasing (position " + std::to_string(i) +
                                  " holds " + std::to_string(ids[i]) + " after " + std::to_string(ids[i - 1]) + ")");
        }
    }
    return ItemSubset(std::move(ids));
}

void ItemSubset::check_against(std::uint64_t num_items) const {
    if (ids_ && !ids_->empty() && ids_->back() >= num_items) {
        throw ValidationError("invalid subset: item id " + std::to_string(ids_->back()) +
                              " is outside a catalogue of " + std::to_string(num_items) + " items");
    }
}

DenseEmbeddingMatrix::DenseEmbeddingMatrix(std::uint64_t rows, std::uint64_t dim, std::vector<float> values)
    : rows_(rows), dim_(dim), values_(std::move(values)) {
    if (rows_ == 0 || dim_ == 0) throw ValidationError("dense matrix must be non-empty");
    if (rows_ > kMaxItems) throw ValidationError("dense matrix row count exceeds the 32-bit item id range");
    if (values_.size() != rows_ * dim_) {
        throw ValidationError("shape mismatch: dense matrix holds " + std::to_string(values_.size()) +
                              " values, expected " + std::to_string(rows_) + "x" + std::to_string(dim_));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw ValidationError("non-finite dense embedding value at row " + std::to_string(i / dim_) +
                                  " column " + std::to_string(i % dim_));
        }
    }
}

SubIdScoreMatrix compute_sub_id_scores(const SubItemEmbeddings& embeddings, const SequenceEmbedding& phi) {
    const auto& config = embeddings.config();
    if (phi.dim() != config.embed_dim) {
        throw ValidationError("dimension mismatch: phi has " + std::to_string(phi.dim()) +
                              " components, sub-item embeddings expect " + std::to_string(config.embed_dim));
    }
    const auto m = config.num_splits;
    const auto b = config.num_sub_ids;
    const auto parts = split_embedding(phi, m);
    std::vector<float> s(m * b);
    for (std::uint64_t k = 0; k < m; ++k) {
        const auto phi_k = parts[k];
        for (std::uint64_t j = 0; j < b; ++j) {
            s[k * b + j] = kernels::dot_sequential(embeddings.sub_embedding(k, j).data(), phi_k.data(), phi_k.size());
        }
    }
    return SubIdScoreMatrix(m, b, std::move(s));
}

namespace {

void check_item(const Codebook& codebook, ItemId item) {
    if (item >= codebook.num_items()) {
        throw ValidationError("item id " + std::to_string(item) + " out of range for a catalogue of " +
                              std::to_string(codebook.num_items()) + " items");
    }
}

void check_pq_inputs(const Codebook& codebook, const SubIdScoreMatrix& scores, const ItemSubset& subset) {
    if (codebook.num_splits() != scores.num_splits() || codebook.config().num_sub_ids != scores.num_sub_ids()) {
        throw ValidationError("dimension mismatch: codebook is " + std::to_string(codebook.num_splits()) + "x" +
                              std::to_string(codebook.config().num_sub_ids) + ", score matrix is " +
                              std::to_string(scores.num_splits()) + "x" + std::to_string(scores.num_sub_ids()));
    }
    subset.check_against(codebook.num_items());
}

TopKResult select_over_subset(std::span<const float> scores, const ItemSubset& subset, std::size_t k) {
    if (subset.is_all()) return top_k_select(scores, k);
    return top_k_select(scores, subset.ids(), k);
}

} // namespace

float score_item(const SubIdScoreMatrix& scores, const Codebook& codebook, ItemId item) {
    check_item(codebook, item);
    check_pq_inputs(codebook, scores, ItemSubset::all());
    float acc = 0.0F;
    const auto codes = codebook.item_codes(item);
    for (std::uint64_t k = 0; k < codes.size(); ++k) acc += scores.at(k, codes[k]);
    return acc;
}

std::vector<float> reconstruct_item_embedding(const SubItemEmbeddings& embeddings, const Codebook& codebook,
                                              ItemId item) {
    check_item(codebook, item);
    if (!(embeddings.config() == codebook.config())) {
        throw ValidationError("dimension mismatch: codebook and sub-item embeddings have different configs");
    }
    std::vector<float> out;
    out.reserve(codebook.config().embed_dim);
    const auto codes = codebook.item_codes(item);
    for (std::uint64_t k = 0; k < codes.size(); ++k) {
        const auto part = embeddings.sub_embedding(k, codes[k]);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

DenseEmbeddingMatrix reconstruct_dense(const PQInstance& instance, std::uint64_t memory_budget_bytes) {
    const auto& config = instance.config();
    if (auto r = validate_instance(instance.codebook, instance.embeddings); !r) throw ValidationError(r.message);
    const auto required = config.num_items * config.embed_dim * sizeof(float);
    if (required > memory_budget_bytes) {
        throw BudgetError("memory budget: dense matrix for " + std::to_string(config.num_items) + " items needs " +
                              std::to_string(required) + " bytes, budget is " + std::to_string(memory_budget_bytes),
                          required, memory_budget_bytes);
    }
    const auto d = config.embed_dim;
    const auto w = config.sub_dim();
    const auto m = config.num_splits;
    std::vector<float> values(config.num_items * d);
    const auto n = static_cast<std::int64_t>(config.num_items);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        float* row = values.data() + static_cast<std::size_t>(i) * d;
        const auto codes = instance.codebook.item_codes(static_cast<ItemId>(i));
        for (std::uint64_t k = 0; k < m; ++k) {
            const auto part = instance.embeddings.sub_embedding(k, codes[k]);
            std::copy(part.begin(), part.end(), row + k * w);
        }
    }
    return DenseEmbeddingMatrix(config.num_items, d, std::move(values));
}

TopKResult pq_topk(const Codebook& codebook, const SubIdScoreMatrix& scores, std::size_t k, const ItemSubset& subset,
                   const PqTopKOptions& options) {
    check_pq_inputs(codebook, scores, subset);
    return kernels::pq_topk_omp(codebook, scores, subset, k, options.chunk_size);
}

TopKResult pq_topk_reference(const Codebook& codebook, const SubIdScoreMatrix& scores, std::size_t k,
                             const ItemSubset& subset) {
    check_pq_inputs(codebook, scores, subset);
    std::vector<float> all(subset.size(codebook.num_items()));
    kernels::pq_scores_serial(codebook, scores, subset, 0, all.size(), all);
    return select_over_subset(all, subset, k);
}

TopKResult recjpq_score(const Codebook& codebook, const SubIdScoreMatrix& scores, std::size_t k,
                        const ItemSubset& subset) {
    check_pq_inputs(codebook, scores, subset);
    std::vector<float> acc(subset.size(codebook.num_items()));
    kernels::recjpq_accumulate(codebook, scores, subset, acc);
    return select_over_subset(acc, subset, k);
}

std::vector<float> pq_scores(const Codebook& codebook, const SubIdScoreMatrix& scores, const ItemSubset& subset) {
    check_pq_inputs(codebook, scores, subset);
    std::vector<float> out(subset.size(codebook.num_items()));
    kernels::pq_scores_omp(codebook, scores, subset, out);
    return out;
}

std::vector<float> matmul_scores(const DenseEmbeddingMatrix& w, const SequenceEmbedding& phi,
                                 const ItemSubset& subset) {
    subset.check_against(w.rows());
    std::vector<float> out(subset.size(w.rows()));
    kernels::dense_scores_omp(w, phi.values(), subset, out);
    return out;
}

TopKResult matmul_topk(const DenseEmbeddingMatrix& w, const SequenceEmbedding& phi, std::size_t k,
                       const ItemSubset& subset, const MatmulOptions& options) {
    subset.check_against(w.rows());
    const auto n = subset.size(w.rows());
    const auto required = n * sizeof(float);
    if (options.memory_budget_bytes != 0 && required > options.memory_budget_bytes) {
        throw BudgetError("memory budget: score vector needs " + std::to_string(required) + " bytes, budget is " +
                              std::to_string(options.memory_budget_bytes),
                          required, options.memory_budget_bytes);
    }
    std::vector<float> r(n);
    kernels::dense_scores_omp(w, phi.values(), subset, r);
    return select_over_subset(r, subset, k);
}

TopKResult matmul_topk_reference(const DenseEmbeddingMatrix& w, const SequenceEmbedding& phi, std::size_t k,
                                 const ItemSubset& subset) {
    subset.check_against(w.rows());
    std::vector<float> r(subset.size(w.rows()));
    kernels::dense_scores_serial(w, phi.values(), subset, r);
    return select_over_subset(r, subset, k);
}

} // namespace pqtopk
