#pragma once

#include "pqtopk/core.hpp"

#include <algorithm>
#include <span>
#include <vector>

namespace pqtopk {

/// Bounded selection of the k best (score, id) pairs under ranks_before.
/// The worst retained candidate sits at the heap root, so a rejected offer
/// costs one comparison.
class TopKCollector {
public:
    explicit TopKCollector(std::size_t k) : k_(k) { heap_.reserve(std::min<std::size_t>(k, 1 << 16)); }

    std::size_t capacity() const { return k_; }
    std::size_t size() const { return heap_.size(); }

    void offer(float score, ItemId id) {
        if (heap_.size() < k_) {
            heap_.push_back({id, score});
            std::push_heap(heap_.begin(), heap_.end(), ranks_before_item);
        } else if (k_ > 0 && ranks_before(score, id, heap_.front().score, heap_.front().item_id)) {
            std::pop_heap(heap_.begin(), heap_.end(), ranks_before_item);
            heap_.back() = {id, score};
            std::push_heap(heap_.begin(), heap_.end(), ranks_before_item);
        }
    }

    void merge(const TopKCollector& other) {
        for (const auto& e : other.heap_) offer(e.score, e.item_id);
    }

    /// Best-first entries; leaves the collector empty.
    TopKResult take() {
        std::sort_heap(heap_.begin(), heap_.end(), ranks_before_item);
        TopKResult out{std::move(heap_)};
        heap_.clear();
        return out;
    }

private:
    static bool ranks_before_item(const ScoredItem& a, const ScoredItem& b) { return ranks_before(a, b); }

    std::size_t k_;
    std::vector<ScoredItem> heap_;
};

/// Exact top-k of scores[i] labelled ids[i]; ties broken by ascending id.
TopKResult top_k_select(std::span<const float> scores, std::span<const ItemId> ids, std::size_t k);

/// As above with ids implicitly 0..scores.size()-1.
TopKResult top_k_select(std::span<const float> scores, std::size_t k);

} // namespace pqtopk
