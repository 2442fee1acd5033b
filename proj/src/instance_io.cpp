#include "pqtopk/instance_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace pqtopk::io {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

constexpr std::array<char, 4> kInstanceMagic{'P', 'Q', 'T', 'K'};
constexpr std::array<char, 4> kDenseMagic{'D', 'E', 'N', 'S'};

template <typename T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void put_array(std::ostream& out, std::span<const T> values) {
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
}

template <typename T>
T get(std::istream& in, const char* field) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(T)))
        throw FormatError(std::string("truncated file while reading ") + field);
    return value;
}

// Bytes left in a seekable stream, or -1.
std::streamoff remaining_bytes(std::istream& in) {
    const auto here = in.tellg();
    if (here < 0) return -1;
    in.seekg(0, std::ios::end);
    const auto end = in.tellg();
    in.seekg(here);
    return end < 0 ? -1 : static_cast<std::streamoff>(end - here);
}

template <typename T>
std::vector<T> get_array(std::istream& in, std::uint64_t count, const char* field) {
    const auto bytes = static_cast<std::streamsize>(count * sizeof(T));
    if (const auto left = remaining_bytes(in); left >= 0 && left < bytes) {
        throw FormatError(std::string("truncated file while reading ") + field + ": expected " +
                          std::to_string(bytes) + " bytes, " + std::to_string(left) + " remain");
    }
    std::vector<T> values(count);
    in.read(reinterpret_cast<char*>(values.data()), bytes);
    if (in.gcount() != bytes) {
        throw FormatError(std::string("truncated file while reading ") + field + ": expected " +
                          std::to_string(bytes) + " bytes, got " + std::to_string(in.gcount()));
    }
    return values;
}

void expect_header(std::istream& in, const std::array<char, 4>& magic) {
    std::array<char, 4> got{};
    in.read(got.data(), got.size());
    if (in.gcount() != 4 || got != magic) {
        throw FormatError("bad magic: expected \"" + std::string(magic.data(), 4) + "\"");
    }
    const auto version = get<std::uint32_t>(in, "format version");
    if (version != kFormatVersion) {
        throw FormatError("unsupported format version " + std::to_string(version) + " (expected " +
                          std::to_string(kFormatVersion) + ")");
    }
}

void expect_end(std::istream& in) {
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after end of data");
}

// Rejects headers whose payload would overflow before any allocation happens.
void check_payload(std::uint64_t count, std::uint64_t elem, const char* field) {
    constexpr std::uint64_t kMaxPayload = std::uint64_t{1} << 46;
    if (count != 0 && (count > kMaxPayload / elem)) {
        throw FormatError(std::string("implausible ") + field + " size in header");
    }
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ostream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw FormatError("write failed: " + path.string());
}

} // namespace

void write_instance(std::ostream& out, const PQInstance& instance) {
    const auto& c = instance.config();
    out.write(kInstanceMagic.data(), kInstanceMagic.size());
    put<std::uint32_t>(out, kFormatVersion);
    put<std::uint64_t>(out, c.num_items);
    put<std::uint64_t>(out, c.num_splits);
    put<std::uint64_t>(out, c.num_sub_ids);
    put<std::uint64_t>(out, c.embed_dim);
    put_array(out, instance.codebook.codes());
    put_array(out, instance.embeddings.table());
}

void write_instance(const std::filesystem::path& path, const PQInstance& instance) {
    auto out = open_out(path);
    write_instance(out, instance);
    finish(out, path);
}

PQInstance read_instance(std::istream& in) {
    expect_header(in, kInstanceMagic);
    PQConfig c;
    c.num_items = get<std::uint64_t>(in, "num_items");
    c.num_splits = get<std::uint64_t>(in, "num_splits");
    c.num_sub_ids = get<std::uint64_t>(in, "num_sub_ids");
    c.embed_dim = get<std::uint64_t>(in, "embed_dim");
    c.validate();
    check_payload(c.code_count(), sizeof(Code), "code table");
    check_payload(c.sub_embedding_count(), sizeof(float), "sub-item table");
    auto codes = get_array<Code>(in, c.code_count(), "codes");
    auto table = get_array<float>(in, c.sub_embedding_count(), "sub-item embeddings");
    expect_end(in);
    return {Codebook(c, std::move(codes)), SubItemEmbeddings(c, std::move(table))};
}

PQInstance read_instance(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_instance(in);
}

void write_dense(std::ostream& out, const DenseEmbeddingMatrix& w) {
    out.write(kDenseMagic.data(), kDenseMagic.size());
    put<std::uint32_t>(out, kFormatVersion);
    put<std::uint64_t>(out, w.rows());
    put<std::uint64_t>(out, w.dim());
    put_array(out, w.values());
}

void write_dense(const std::filesystem::path& path, const DenseEmbeddingMatrix& w) {
    auto out = open_out(path);
    write_dense(out, w);
    finish(out, path);
}

DenseEmbeddingMatrix read_dense(std::istream& in) {
    expect_header(in, kDenseMagic);
    const auto rows = get<std::uint64_t>(in, "rows");
    const auto dim = get<std::uint64_t>(in, "dim");
    if (rows == 0 || dim == 0) throw FormatError("dense matrix header declares an empty matrix");
    if (rows > kMaxItems) throw FormatError("implausible rows size in header");
    check_payload(dim, sizeof(float), "dim");
    check_payload(rows * dim, sizeof(float), "matrix");
    auto values = get_array<float>(in, rows * dim, "dense values");
    expect_end(in);
    return DenseEmbeddingMatrix(rows, dim, std::move(values));
}

DenseEmbeddingMatrix read_dense(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_dense(in);
}

void write_sequence_embedding(const std::filesystem::path& path, const SequenceEmbedding& phi) {
    write_dense(path, DenseEmbeddingMatrix(1, phi.dim(), {phi.values().begin(), phi.values().end()}));
}

SequenceEmbedding read_sequence_embedding(const std::filesystem::path& path) {
    const auto w = read_dense(path);
    if (w.rows() != 1) {
        throw FormatError("sequence embedding file must hold exactly one row, found " + std::to_string(w.rows()));
    }
    return SequenceEmbedding({w.values().begin(), w.values().end()});
}

ItemSubset read_subset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::vector<ItemId> ids;
    std::string token;
    while (in >> token) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size() || token.front() == '-' || v > kMaxItems) {
            throw FormatError("subset file " + path.string() + ": invalid item id '" + token + "'");
        }
        ids.push_back(static_cast<ItemId>(v));
    }
    return ItemSubset::of(std::move(ids));
}

std::uint64_t instance_file_bytes(const PQConfig& config) {
    return 4 + 4 + 4 * 8 + config.code_bytes() + config.sub_embedding_bytes();
}

} // namespace pqtopk::io
