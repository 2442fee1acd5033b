#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pqtopk {

/// Item identifiers are dense indices into the catalogue.
using ItemId = std::uint32_t;

/// Sub-id codes are stored in 16 bits, so a split holds at most 65,536 sub-ids.
using Code = std::uint16_t;

inline constexpr std::uint64_t kMaxSubIds = std::uint64_t{1} << 16;
inline constexpr std::uint64_t kMaxItems = std::numeric_limits<ItemId>::max();

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs that violate a type invariant or disagree in shape.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed or truncated files.
class FormatError : public Error {
public:
    using Error::Error;
};

/// An allocation that would exceed the configured memory budget.
class BudgetError : public Error {
public:
    BudgetError(const std::string& what, std::uint64_t required, std::uint64_t budget)
        : Error(what), required_bytes(required), budget_bytes(budget) {}

    std::uint64_t required_bytes;
    std::uint64_t budget_bytes;
};

/// Shape of a product-quantised catalogue.
struct PQConfig {
    std::uint64_t num_items = 1;   // |I|
    std::uint64_t num_splits = 1;  // m
    std::uint64_t num_sub_ids = 1; // b, per split
    std::uint64_t embed_dim = 1;   // d

    std::uint64_t sub_dim() const { return embed_dim / num_splits; }

    std::uint64_t code_count() const { return num_items * num_splits; }
    std::uint64_t code_bytes() const { return code_count() * sizeof(Code); }
    std::uint64_t sub_embedding_count() const { return num_splits * num_sub_ids * sub_dim(); }
    std::uint64_t sub_embedding_bytes() const { return sub_embedding_count() * sizeof(float); }

    /// Throws ValidationError describing the first violated constraint.
    void validate() const;

    friend bool operator==(const PQConfig&, const PQConfig&) = default;
};

std::string to_string(const PQConfig& config);

/// Outcome of a consistency check. Empty message means ok.
struct ValidationResult {
    bool ok = true;
    std::string message;

    explicit operator bool() const { return ok; }
    static ValidationResult success() { return {}; }
    static ValidationResult failure(std::string msg) { return {false, std::move(msg)}; }
};

/// Item id to m sub-ids, stored row-major (item i occupies codes [i*m, (i+1)*m)).
class Codebook {
public:
    Codebook(PQConfig config, std::vector<Code> codes);

    const PQConfig& config() const { return config_; }
    std::uint64_t num_items() const { return config_.num_items; }
    std::uint64_t num_splits() const { return config_.num_splits; }

    std::span<const Code> codes() const { return codes_; }
    std::span<const Code> item_codes(ItemId item) const {
        return {codes_.data() + std::size_t{item} * config_.num_splits, config_.num_splits};
    }
    Code code(ItemId item, std::uint64_t split) const {
        return codes_[std::size_t{item} * config_.num_splits + split];
    }

private:
    PQConfig config_;
    std::vector<Code> codes_;
};

/// The m x b x (d/m) table of sub-item embeddings, split-major.
class SubItemEmbeddings {
public:
    SubItemEmbeddings(PQConfig config, std::vector<float> table);

    const PQConfig& config() const { return config_; }
    std::span<const float> table() const { return table_; }

    std::span<const float> sub_embedding(std::uint64_t split, std::uint64_t sub_id) const {
        const auto w = config_.sub_dim();
        return {table_.data() + (split * config_.num_sub_ids + sub_id) * w, w};
    }

private:
    PQConfig config_;
    std::vector<float> table_;
};

/// A d-dimensional query vector produced by the sequence model.
class SequenceEmbedding {
public:
    explicit SequenceEmbedding(std::vector<float> values);

    std::size_t dim() const { return values_.size(); }
    std::span<const float> values() const { return values_; }
    float operator[](std::size_t i) const { return values_[i]; }

private:
    std::vector<float> values_;
};

/// Splits phi into m contiguous views of width d/m. The views borrow from phi.
std::vector<std::span<const float>> split_embedding(const SequenceEmbedding& phi, std::uint64_t num_splits);

/// m x b table of per-query sub-id scores, row k holds split k.
class SubIdScoreMatrix {
public:
    SubIdScoreMatrix(std::uint64_t num_splits, std::uint64_t num_sub_ids, std::vector<float> scores);

    std::uint64_t num_splits() const { return num_splits_; }
    std::uint64_t num_sub_ids() const { return num_sub_ids_; }
    std::span<const float> scores() const { return scores_; }
    std::span<const float> row(std::uint64_t split) const {
        return {scores_.data() + split * num_sub_ids_, num_sub_ids_};
    }
    float at(std::uint64_t split, std::uint64_t sub_id) const {
        return scores_[split * num_sub_ids_ + sub_id];
    }

private:
    std::uint64_t num_splits_;
    std::uint64_t num_sub_ids_;
    std::vector<float> scores_;
};

struct ScoredItem {
    ItemId item_id;
    float score;

    friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

/// Total order used by every ranking: higher score first, then lower id.
inline bool ranks_before(float score_a, ItemId id_a, float score_b, ItemId id_b) {
    return score_a > score_b || (score_a == score_b && id_a < id_b);
}

inline bool ranks_before(const ScoredItem& a, const ScoredItem& b) {
    return ranks_before(a.score, a.item_id, b.score, b.item_id);
}

struct TopKResult {
    std::vector<ScoredItem> entries;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
    std::vector<ItemId> ids() const;

    friend bool operator==(const TopKResult&, const TopKResult&) = default;
};

/// Checks raw instance data against a config without constructing the types.
ValidationResult validate_instance(const PQConfig& config, std::span<const Code> codes,
                                   std::span<const float> table);

/// Checks that both halves of an instance share one config.
ValidationResult validate_instance(const Codebook& codebook, const SubItemEmbeddings& embeddings);

/// A codebook together with its sub-item embeddings.
struct PQInstance {
    Codebook codebook;
    SubItemEmbeddings embeddings;

    const PQConfig& config() const { return codebook.config(); }
};

} // namespace pqtopk
