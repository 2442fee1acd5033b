#include "pqtopk/synthetic.hpp"

#include "pqtopk/parallel.hpp"

#include <random>
#include <string>

namespace pqtopk {

SyntheticInstance generate_synthetic(const PQConfig& config, std::uint64_t seed,
                                     std::uint64_t memory_budget_bytes) {
    config.validate();
    const auto required = config.code_bytes();
    if (required > memory_budget_bytes) {
        throw BudgetError("code table for " + to_string(config) + " needs " + std::to_string(required) +
                              " bytes, memory budget is " + std::to_string(memory_budget_bytes) + " bytes",
                          required, memory_budget_bytes);
    }

    std::mt19937_64 rng(seed);

    std::vector<Code> codes(config.code_count());
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(config.num_sub_ids - 1));
    for (auto& c : codes) c = static_cast<Code>(pick(rng));

    std::normal_distribution<float> normal(0.0F, 1.0F);
    std::vector<float> table(config.sub_embedding_count());
    for (auto& v : table) v = normal(rng);

    std::vector<float> phi(config.embed_dim);
    for (auto& v : phi) v = normal(rng);

    return {Codebook(config, std::move(codes)), SubItemEmbeddings(config, std::move(table)),
            SequenceEmbedding(std::move(phi))};
}

SyntheticInstance generate_synthetic(const PQConfig& config, std::uint64_t seed) {
    return generate_synthetic(config, seed, default_memory_budget());
}

SequenceEmbedding random_sequence_embedding(std::uint64_t dim, std::uint64_t seed) {
    if (dim == 0) throw ValidationError("embedding dimension must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> normal(0.0F, 1.0F);
    std::vector<float> v(dim);
    for (auto& x : v) x = normal(rng);
    return SequenceEmbedding(std::move(v));
}

} // namespace pqtopk
