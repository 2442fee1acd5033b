#pragma once

#include "pqtopk/core.hpp"

#include <cstdint>

namespace pqtopk {

struct SyntheticInstance {
    Codebook codebook;
    SubItemEmbeddings embeddings;
    SequenceEmbedding phi;

    PQInstance instance() const& { return {codebook, embeddings}; }
    PQInstance instance() && { return {std::move(codebook), std::move(embeddings)}; }
};

/// Random PQ instance standing in for a trained model: codes uniform over [0, b),
/// sub-item embeddings and phi i.i.d. standard normal. Output is a pure function of
/// (config, seed). Throws BudgetError if the code table alone exceeds the budget.
SyntheticInstance generate_synthetic(const PQConfig& config, std::uint64_t seed,
                                     std::uint64_t memory_budget_bytes);

SyntheticInstance generate_synthetic(const PQConfig& config, std::uint64_t seed);

/// i.i.d. standard normal query vector.
SequenceEmbedding random_sequence_embedding(std::uint64_t dim, std::uint64_t seed);

} // namespace pqtopk
