#include "pqtopk/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdint>
#include <type_traits>
#include <vector>

namespace pqtopk::kernels {

namespace {

// One item's score. Additions run in ascending split order starting from 0.0f;
// recjpq_accumulate performs the same sequence of additions, so both paths agree bitwise.
template <std::size_t M>
inline float sum_sub_scores(const Code* c, const float* s, std::size_t b, std::size_t m) {
    float acc = 0.0F;
    if constexpr (M != 0) {
        for (std::size_t k = 0; k < M; ++k) acc += s[k * b + c[k]];
    } else {
        for (std::size_t k = 0; k < m; ++k) acc += s[k * b + c[k]];
    }
    return acc;
}

template <std::size_t M>
void score_positions(const Code* codes, std::size_t m, const float* s, std::size_t b, const ItemSubset& subset,
                     std::uint64_t begin, std::uint64_t end, float* out) {
    if (subset.is_all()) {
        const Code* c = codes + begin * m;
        for (std::uint64_t p = begin; p < end; ++p, c += m) *out++ = sum_sub_scores<M>(c, s, b, m);
    } else {
        const ItemId* ids = subset.ids().data();
        for (std::uint64_t p = begin; p < end; ++p)
            *out++ = sum_sub_scores<M>(codes + std::size_t{ids[p]} * m, s, b, m);
    }
}

// Calls fn with a compile-time split count for the common m values, 0 otherwise.
template <typename Fn>
decltype(auto) dispatch_splits(std::size_t m, Fn&& fn) {
    switch (m) {
    case 1: return fn(std::integral_constant<std::size_t, 1>{});
    case 2: return fn(std::integral_constant<std::size_t, 2>{});
    case 4: return fn(std::integral_constant<std::size_t, 4>{});
    case 8: return fn(std::integral_constant<std::size_t, 8>{});
    case 16: return fn(std::integral_constant<std::size_t, 16>{});
    case 32: return fn(std::integral_constant<std::size_t, 32>{});
    case 64: return fn(std::integral_constant<std::size_t, 64>{});
    default: return fn(std::integral_constant<std::size_t, 0>{});
    }
}

void check_shapes(const Codebook& codebook, const SubIdScoreMatrix& scores) {
    if (codebook.num_splits() != scores.num_splits() || codebook.config().num_sub_ids != scores.num_sub_ids()) {
        throw ValidationError("dimension mismatch: codebook is " + std::to_string(codebook.num_splits()) + "x" +
                              std::to_string(codebook.config().num_sub_ids) + ", score matrix is " +
                              std::to_string(scores.num_splits()) + "x" + std::to_string(scores.num_sub_ids()));
    }
}

} // namespace

void pq_scores_serial(const Codebook& codebook, const SubIdScoreMatrix& scores, const ItemSubset& subset,
                      std::uint64_t begin, std::uint64_t end, std::span<float> out) {
    check_shapes(codebook, scores);
    if (out.size() < end - begin) throw ValidationError("output buffer too small");
    const auto m = codebook.num_splits();
    const auto b = scores.num_sub_ids();
    dispatch_splits(m, [&](auto splits) {
        score_positions<decltype(splits)::value>(codebook.codes().data(), m, scores.scores().data(), b, subset,
                                                 begin, end, out.data());
    });
}

void pq_scores_omp(const Codebook& codebook, const SubIdScoreMatrix& scores, const ItemSubset& subset,
                   std::span<float> out) {
    check_shapes(codebook, scores);
    const auto n = subset.size(codebook.num_items());
    if (out.size() < n) throw ValidationError("output buffer too small");
    const auto m = codebook.num_splits();
    const auto b = scores.num_sub_ids();
    dispatch_splits(m, [&](auto splits) {
        constexpr std::size_t M = decltype(splits)::value;
        const auto nthreads = static_cast<std::uint64_t>(omp_get_max_threads());
#pragma omp parallel for schedule(static)
        for (std::uint64_t t = 0; t < nthreads; ++t) {
            const auto begin = n * t / nthreads;
            const auto end = n * (t + 1) / nthreads;
            score_positions<M>(codebook.codes().data(), m, scores.scores().data(), b, subset, begin, end,
                               out.data() + begin);
        }
    });
}

TopKResult pq_topk_omp(const Codebook& codebook, const SubIdScoreMatrix& scores, const ItemSubset& subset,
                       std::size_t k, std::size_t chunk_size) {
    check_shapes(codebook, scores);
    if (chunk_size == 0) throw ValidationError("chunk_size must be >= 1");
    const auto n = subset.size(codebook.num_items());
    const auto keep = static_cast<std::size_t>(std::min<std::uint64_t>(k, n));
    if (keep == 0) return {};

    const auto m = codebook.num_splits();
    const auto b = scores.num_sub_ids();
    const auto num_chunks = static_cast<std::int64_t>((n + chunk_size - 1) / chunk_size);
    TopKCollector merged(keep);

    dispatch_splits(m, [&](auto splits) {
        constexpr std::size_t M = decltype(splits)::value;
#pragma omp parallel
        {
            TopKCollector local(keep);
            std::vector<float> buf(std::min<std::uint64_t>(chunk_size, n));
#pragma omp for schedule(static)
            for (std::int64_t c = 0; c < num_chunks; ++c) {
                const auto begin = static_cast<std::uint64_t>(c) * chunk_size;
                const auto end = std::min<std::uint64_t>(n, begin + chunk_size);
                score_positions<M>(codebook.codes().data(), m, scores.scores().data(), b, subset, begin, end,
                                   buf.data());
                for (std::uint64_t p = begin; p < end; ++p) local.offer(buf[p - begin], subset.at(p));
            }
#pragma omp critical(pqtopk_merge)
            merged.merge(local);
        }
    });
    return merged.take();
}

void recjpq_accumulate(const Codebook& codebook, const SubIdScoreMatrix& scores, const ItemSubset& subset,
                       std::span<float> acc) {
    check_shapes(codebook, scores);
    const auto n = subset.size(codebook.num_items());
    if (acc.size() < n) throw ValidationError("accumulator too small");
    const auto m = codebook.num_splits();
    const auto b = scores.num_sub_ids();
    const Code* codes = codebook.codes().data();
    float* out = acc.data();
    std::fill_n(out, n, 0.0F);

    // Split loop stays sequential: each pass reads and writes every accumulator.
    for (std::size_t k = 0; k < m; ++k) {
        const float* s = scores.scores().data() + k * b;
        if (subset.is_all()) {
            for (std::uint64_t p = 0; p < n; ++p) out[p] += s[codes[p * m + k]];
        } else {
            const ItemId* ids = subset.ids().data();
            for (std::uint64_t p = 0; p < n; ++p) out[p] += s[codes[std::size_t{ids[p]} * m + k]];
        }
    }
}

} // namespace pqtopk::kernels
