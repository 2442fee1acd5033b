#pragma once

// Little-endian binary formats.
//
// Instance file ("PQTK"):
//   offset  size            field
//   0       4               magic "PQTK"
//   4       4               u32 format version (1)
//   8       8               u64 num_items |I|
//   16      8               u64 num_splits m
//   24      8               u64 num_sub_ids b
//   32      8               u64 embed_dim d
//   40      2*|I|*m         u16 codes, item-major (item i, split k at index i*m + k)
//   ...     4*m*b*(d/m)     f32 sub-item embeddings, split-major then sub-id then component
//
// Dense matrix file ("DENS"):
//   0       4               magic "DENS"
//   4       4               u32 format version (1)
//   8       8               u64 rows
//   16      8               u64 dim
//   24      4*rows*dim      f32 values, row-major
//
// A sequence embedding is stored as a dense matrix with one row.

#include "pqtopk/core.hpp"
#include "pqtopk/scoring.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace pqtopk::io {

inline constexpr std::uint32_t kFormatVersion = 1;

void write_instance(std::ostream& out, const PQInstance& instance);
void write_instance(const std::filesystem::path& path, const PQInstance& instance);

/// Throws FormatError on bad magic, unsupported version or truncation, and
/// ValidationError if the decoded data breaks an instance invariant.
PQInstance read_instance(std::istream& in);
PQInstance read_instance(const std::filesystem::path& path);

void write_dense(std::ostream& out, const DenseEmbeddingMatrix& w);
void write_dense(const std::filesystem::path& path, const DenseEmbeddingMatrix& w);
DenseEmbeddingMatrix read_dense(std::istream& in);
DenseEmbeddingMatrix read_dense(const std::filesystem::path& path);

void write_sequence_embedding(const std::filesystem::path& path, const SequenceEmbedding& phi);
SequenceEmbedding read_sequence_embedding(const std::filesystem::path& path);

/// Whitespace-separated decimal item ids, strictly increasing.
ItemSubset read_subset(const std::filesystem::path& path);

/// Bytes an instance file occupies for this config.
std::uint64_t instance_file_bytes(const PQConfig& config);

} // namespace pqtopk::io
