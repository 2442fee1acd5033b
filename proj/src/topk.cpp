#include "pqtopk/topk.hpp"

#include <string>

namespace pqtopk {

TopKResult top_k_select(std::span<const float> scores, std::span<const ItemId> ids, std::size_t k) {
    if (scores.size() != ids.size()) {
        throw ValidationError("length mismatch: " + std::to_string(scores.size()) + " scores vs " +
                              std::to_string(ids.size()) + " ids");
    }
    TopKCollector top(std::min(k, scores.size()));
    for (std::size_t i = 0; i < scores.size(); ++i) top.offer(scores[i], ids[i]);
    return top.take();
}

TopKResult top_k_select(std::span<const float> scores, std::size_t k) {
    TopKCollector top(std::min(k, scores.size()));
    for (std::size_t i = 0; i < scores.size(); ++i) top.offer(scores[i], static_cast<ItemId>(i));
    return top.take();
}

} // namespace pqtopk
