#include "pqtopk/kernels.hpp"

#include <array>
#include <cstdint>

namespace pqtopk::kernels {

namespace {
constexpr std::size_t kLanes = 32;

void check_shapes(const DenseEmbeddingMatrix& w, std::span<const float> phi, const ItemSubset& subset,
                  std::span<float> out) {
    if (phi.size() != w.dim()) {
        throw ValidationError("shape mismatch: W has " + std::to_string(w.dim()) + " columns, phi has " +
                              std::to_string(phi.size()) + " components");
    }
    if (out.size() < subset.size(w.rows())) throw ValidationError("output buffer too small");
}
} // namespace

float dot_sequential(const float* a, const float* b, std::size_t n) {
    float acc = 0.0F;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

float dot_blocked(const float* a, const float* b, std::size_t n) {
    std::array<float, kLanes> lanes{};
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        for (std::size_t j = 0; j < kLanes; ++j) lanes[j] += a[i + j] * b[i + j];
    }
    float acc = 0.0F;
    for (std::size_t j = 0; j < kLanes; ++j) acc += lanes[j];
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void dense_scores_serial(const DenseEmbeddingMatrix& w, std::span<const float> phi, const ItemSubset& subset,
                         std::span<float> out) {
    check_shapes(w, phi, subset, out);
    const auto n = subset.size(w.rows());
    const auto d = w.dim();
    for (std::uint64_t p = 0; p < n; ++p) out[p] = dot_sequential(w.row(subset.at(p)).data(), phi.data(), d);
}

void dense_scores_omp(const DenseEmbeddingMatrix& w, std::span<const float> phi, const ItemSubset& subset,
                      std::span<float> out) {
    check_shapes(w, phi, subset, out);
    const auto n = static_cast<std::int64_t>(subset.size(w.rows()));
    const auto d = w.dim();
    const float* base = w.values().data();
    const float* q = phi.data();
#pragma omp parallel for schedule(static)
    for (std::int64_t p = 0; p < n; ++p) {
        out[p] = dot_blocked(base + std::size_t{subset.at(static_cast<std::uint64_t>(p))} * d, q, d);
    }
}

} // namespace pqtopk::kernels
