#pragma once

// Independent oracles for the test suites. Nothing here calls the scoring kernels.

#include "pqtopk/core.hpp"
#include "pqtopk/scoring.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace pqtopk::testing {

/// The hand-checked instance: m=2, b=2, d=4, three items.
inline PQInstance tiny_instance() {
    const PQConfig c{3, 2, 2, 4};
    return {Codebook(c, {0, 0, 1, 1, 0, 1}), SubItemEmbeddings(c, {1, 0, 0, 1, 1, 1, 2, 0})};
}

inline SequenceEmbedding tiny_phi() { return SequenceEmbedding({1, 2, 3, 4}); }

/// Random instance built with its own generator (not generate_synthetic).
inline PQInstance random_instance(const PQConfig& c, std::uint64_t seed) {
    std::mt19937 rng(static_cast<std::uint32_t>(seed * 7919 + 13));
    std::uniform_int_distribution<std::uint32_t> code(0, static_cast<std::uint32_t>(c.num_sub_ids - 1));
    std::normal_distribution<float> normal;
    std::vector<Code> codes(c.code_count());
    for (auto& x : codes) x = static_cast<Code>(code(rng));
    std::vector<float> table(c.sub_embedding_count());
    for (auto& x : table) x = normal(rng);
    return {Codebook(c, std::move(codes)), SubItemEmbeddings(c, std::move(table))};
}

inline SequenceEmbedding random_phi(std::uint64_t d, std::uint64_t seed) {
    std::mt19937 rng(static_cast<std::uint32_t>(seed * 104729 + 7));
    std::normal_distribution<float> normal;
    std::vector<float> v(d);
    for (auto& x : v) x = normal(rng);
    return SequenceEmbedding(std::move(v));
}

/// Item embedding by direct table lookup, double precision score.
inline double oracle_item_score(const PQInstance& inst, const SequenceEmbedding& phi, std::uint64_t item) {
    const auto& c = inst.config();
    const auto w = c.sub_dim();
    double acc = 0.0;
    for (std::uint64_t k = 0; k < c.num_splits; ++k) {
        const auto code = inst.codebook.codes()[item * c.num_splits + k];
        const float* psi = inst.embeddings.table().data() + (k * c.num_sub_ids + code) * w;
        for (std::uint64_t t = 0; t < w; ++t) acc += static_cast<double>(psi[t]) * phi[k * w + t];
    }
    return acc;
}

inline std::vector<double> oracle_scores(const PQInstance& inst, const SequenceEmbedding& phi) {
    std::vector<double> out(inst.config().num_items);
    for (std::uint64_t i = 0; i < out.size(); ++i) out[i] = oracle_item_score(inst, phi, i);
    return out;
}

/// Full sort of (score, id) pairs, best first, ties by ascending id.
template <typename Score>
std::vector<std::pair<Score, ItemId>> sorted_ranking(const std::vector<Score>& scores) {
    std::vector<std::pair<Score, ItemId>> all;
    all.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) all.emplace_back(scores[i], static_cast<ItemId>(i));
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    return all;
}

/// Exact float32 scores in the contract's summation order, computed from the raw tables.
inline std::vector<float> oracle_float_scores(const PQInstance& inst, const SubIdScoreMatrix& s) {
    const auto& c = inst.config();
    std::vector<float> out(c.num_items);
    for (std::uint64_t i = 0; i < c.num_items; ++i) {
        float acc = 0.0F;
        for (std::uint64_t k = 0; k < c.num_splits; ++k)
            acc += s.scores()[k * c.num_sub_ids + inst.codebook.codes()[i * c.num_splits + k]];
        out[i] = acc;
    }
    return out;
}

inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace pqtopk::testing
