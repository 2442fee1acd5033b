#include "pqtopk/topk.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

namespace pqtopk {
namespace {

TEST(TopKSelect, TieBrokenByAscendingId) {
    const std::vector<float> s{8, 8, 7};
    const auto top = top_k_select(s, 2);
    EXPECT_EQ(top.entries, (std::vector<ScoredItem>{{0, 8}, {1, 8}}));
}

TEST(TopKSelect, SaturatesToFullSortedList) {
    const std::vector<float> s{1, 3, 2};
    const auto top = top_k_select(s, 10);
    EXPECT_EQ(top.entries, (std::vector<ScoredItem>{{1, 3}, {2, 2}, {0, 1}}));
}

TEST(TopKSelect, AllEqualReturnsFirstIds) {
    const std::vector<float> s(50, 0.25F);
    const auto top = top_k_select(s, 4);
    EXPECT_EQ(top.ids(), (std::vector<ItemId>{0, 1, 2, 3}));
}

TEST(TopKSelect, ZeroKAndEmptyInput) {
    const std::vector<float> s{1, 2};
    EXPECT_TRUE(top_k_select(s, 0).empty());
    EXPECT_TRUE(top_k_select(std::span<const float>{}, 3).empty());
}

TEST(TopKSelect, ExplicitIdsAreUsedAsLabels) {
    const std::vector<float> s{1, 5, 5};
    const std::vector<ItemId> ids{10, 30, 20};
    const auto top = top_k_select(s, ids, 2);
    EXPECT_EQ(top.entries, (std::vector<ScoredItem>{{20, 5}, {30, 5}}));
}

TEST(TopKSelect, LengthMismatchIsError) {
    const std::vector<float> s{1, 2};
    const std::vector<ItemId> ids{0};
    EXPECT_THROW(top_k_select(s, ids, 1), ValidationError);
}

// Scores drawn from a small alphabet so ties are frequent.
TEST(TopKSelect, MatchesFullSortOracle) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 200;
        const std::size_t k = rng() % (n + 5);
        std::vector<float> s(n);
        for (auto& v : s) v = static_cast<float>(static_cast<int>(rng() % 7) - 3);
        const auto expected = testing::sorted_ranking(s);
        const auto top = top_k_select(s, k);
        ASSERT_EQ(top.size(), std::min(k, n));
        for (std::size_t r = 0; r < top.size(); ++r) {
            EXPECT_EQ(top.entries[r].item_id, expected[r].second);
            EXPECT_EQ(top.entries[r].score, expected[r].first);
        }
    }
}

TEST(TopKCollector, MergeEqualsSingleCollector) {
    std::mt19937 rng(9);
    std::vector<float> s(1000);
    for (auto& v : s) v = static_cast<float>(rng() % 50);
    TopKCollector whole(17);
    for (std::size_t i = 0; i < s.size(); ++i) whole.offer(s[i], static_cast<ItemId>(i));
    TopKCollector a(17);
    TopKCollector b(17);
    for (std::size_t i = 0; i < s.size(); ++i) (i % 3 ? a : b).offer(s[i], static_cast<ItemId>(i));
    b.merge(a);
    EXPECT_EQ(whole.take(), b.take());
}

} // namespace
} // namespace pqtopk
