#include "pqtopk/core.hpp"

#include <cmath>
#include <sstream>

namespace pqtopk {

void PQConfig::validate() const {
    if (num_items < 1) throw ValidationError("num_items must be >= 1");
    if (num_items > kMaxItems)
        throw ValidationError("num_items " + std::to_string(num_items) + " exceeds the 32-bit item id range");
    if (num_splits < 1) throw ValidationError("num_splits must be >= 1");
    if (num_sub_ids < 1) throw ValidationError("num_sub_ids must be >= 1");
    if (num_sub_ids > kMaxSubIds)
        throw ValidationError("num_sub_ids " + std::to_string(num_sub_ids) + " exceeds 65536 (16-bit codes)");
    if (embed_dim < num_splits)
        throw ValidationError("embed_dim " + std::to_string(embed_dim) + " is smaller than num_splits " +
                              std::to_string(num_splits));
    if (embed_dim % num_splits != 0)
        throw ValidationError("d not divisible by m: embed_dim " + std::to_string(embed_dim) +
                              " is not a multiple of num_splits " + std::to_string(num_splits));
}

std::string to_string(const PQConfig& c) {
    std::ostringstream os;
    os << "items=" << c.num_items << " splits=" << c.num_splits << " sub_ids=" << c.num_sub_ids
       << " dim=" << c.embed_dim;
    return os.str();
}

namespace {

ValidationResult check_codes(const PQConfig& config, std::span<const Code> codes) {
    if (codes.size() != config.code_count()) {
        return ValidationResult::failure("dimension mismatch: codebook holds " + std::to_string(codes.size()) +
                                         " codes, expected " + std::to_string(config.code_count()));
    }
    const auto m = config.num_splits;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (codes[i] >= config.num_sub_ids) {
            return ValidationResult::failure("code out of range: item " + std::to_string(i / m) + " split " +
                                             std::to_string(i % m) + " has code " + std::to_string(codes[i]) +
                                             ", expected < " + std::to_string(config.num_sub_ids));
        }
    }
    return ValidationResult::success();
}

ValidationResult check_table(const PQConfig& config, std::span<const float> table) {
    if (table.size() != config.sub_embedding_count()) {
        return ValidationResult::failure("dimension mismatch: sub-item table holds " +
                                         std::to_string(table.size()) + " values, expected " +
                                         std::to_string(config.sub_embedding_count()));
    }
    const auto w = config.sub_dim();
    const auto b = config.num_sub_ids;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (!std::isfinite(table[i])) {
            const auto row = i / w;
            return ValidationResult::failure("non-finite sub-item embedding value at split " +
                                             std::to_string(row / b) + " sub-id " + std::to_string(row % b) +
                                             " component " + std::to_string(i % w));
        }
    }
    return ValidationResult::success();
}

void throw_if_failed(const ValidationResult& r) {
    if (!r) throw ValidationError(r.message);
}

} // namespace

ValidationResult validate_instance(const PQConfig& config, std::span<const Code> codes,
                                   std::span<const float> table) {
    try {
        config.validate();
    } catch (const ValidationError& e) {
        return ValidationResult::failure(e.what());
    }
    if (auto r = check_codes(config, codes); !r) return r;
    return check_table(config, table);
}

ValidationResult validate_instance(const Codebook& codebook, const SubItemEmbeddings& embeddings) {
    if (!(codebook.config() == embeddings.config())) {
        return ValidationResult::failure("dimension mismatch: codebook config (" + to_string(codebook.config()) +
                                         ") differs from sub-item embeddings config (" +
                                         to_string(embeddings.config()) + ")");
    }
    return validate_instance(codebook.config(), codebook.codes(), embeddings.table());
}

Codebook::Codebook(PQConfig config, std::vector<Code> codes) : config_(config), codes_(std::move(codes)) {
    config_.validate();
    throw_if_failed(check_codes(config_, codes_));
}

SubItemEmbeddings::SubItemEmbeddings(PQConfig config, std::vector<float> table)
    : config_(config), table_(std::move(table)) {
    config_.validate();
    throw_if_failed(check_table(config_, table_));
}

SequenceEmbedding::SequenceEmbedding(std::vector<float> values) : values_(std::move(values)) {
    if (values_.empty()) throw ValidationError("sequence embedding must be non-empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            throw ValidationError("non-finite sequence embedding value at component " + std::to_string(i));
    }
}

std::vector<std::span<const float>> split_embedding(const SequenceEmbedding& phi, std::uint64_t num_splits) {
    const auto d = phi.dim();
    if (num_splits == 0) throw ValidationError("num_splits must be >= 1");
    if (d % num_splits != 0) {
        throw ValidationError("d not divisible by m: cannot split " + std::to_string(d) + " components into " +
                              std::to_string(num_splits) + " equal parts");
    }
    const auto w = d / num_splits;
    std::vector<std::span<const float>> parts;
    parts.reserve(num_splits);
    for (std::uint64_t k = 0; k < num_splits; ++k) parts.push_back(phi.values().subspan(k * w, w));
    return parts;
}

SubIdScoreMatrix::SubIdScoreMatrix(std::uint64_t num_splits, std::uint64_t num_sub_ids, std::vector<float> scores)
    : num_splits_(num_splits), num_sub_ids_(num_sub_ids), scores_(std::move(scores)) {
    if (num_splits_ == 0 || num_sub_ids_ == 0) throw ValidationError("score matrix must be at least 1x1");
    if (scores_.size() != num_splits_ * num_sub_ids_) {
        throw ValidationError("dimension mismatch: score matrix holds " + std::to_string(scores_.size()) +
                              " values, expected " + std::to_string(num_splits_ * num_sub_ids_));
    }
}

std::vector<ItemId> TopKResult::ids() const {
    std::vector<ItemId> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.item_id);
    return out;
}

} // namespace pqtopk
