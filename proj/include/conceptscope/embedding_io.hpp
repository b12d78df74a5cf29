#pragma once

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include "conceptscope/common.hpp"
#include "conceptscope/csv.hpp"
#include "conceptscope/embedding.hpp"

namespace conceptscope {

static_assert(std::endian::native == std::endian::little, "binary embedding format assumes a little-endian host");

enum class EmbeddingFormat { tsv, binary };

inline EmbeddingFormat embedding_format_from_string(const std::string& name) {
    if (name == "tsv") return EmbeddingFormat::tsv;
    if (name == "binary" || name == "bin") return EmbeddingFormat::binary;
    throw InvalidArgument("unknown embedding format '" + name + "' (expected tsv or binary)");
}

inline EmbeddingFormat guess_embedding_format(const std::filesystem::path& path) {
    return path.extension() == ".bin" ? EmbeddingFormat::binary : EmbeddingFormat::tsv;
}

struct LoadOptions {
    bool normalize = false;
    // Map binary files read-only instead of copying them into memory.
    bool memory_map = false;
};

// ---------------------------------------------------------------------------------------------
// TSV: term \t v1 \t ... \t vd, no header; d is taken from the first row.

inline void write_embeddings_tsv(std::ostream& out, const EmbeddingMatrix& m) {
    char buf[32];
    for (ConceptId id = 0; id < m.size(); ++id) {
        out << m.term(id);
        for (float v : m.row(id)) {
            std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(v));
            out << '\t' << buf;
        }
        out << '\n';
    }
}

inline EmbeddingMatrix read_embeddings_tsv(std::istream& in) {
    Vocabulary vocab;
    std::vector<float> values;
    std::size_t dimension = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto parts = csv::split_tabs(line);
        const std::size_t d = parts.size() - 1;
        if (d == 0) throw DataError("embedding line " + std::to_string(line_no) + ": no vector values");
        if (dimension == 0) dimension = d;
        if (d != dimension)
            throw DataError("embedding line " + std::to_string(line_no) + ": expected " + std::to_string(dimension) +
                            " values, found " + std::to_string(d));
        const std::string term(parts[0]);
        if (vocab.find(term))
            throw DataError("embedding line " + std::to_string(line_no) + ": duplicate term '" + term + "'");
        for (std::size_t k = 1; k < parts.size(); ++k) {
            float v = 0.0f;
            auto [ptr, ec] = std::from_chars(parts[k].data(), parts[k].data() + parts[k].size(), v);
            if (ec != std::errc() || ptr != parts[k].data() + parts[k].size())
                throw DataError("embedding line " + std::to_string(line_no) + ": bad number '" + std::string(parts[k]) + "'");
            values.push_back(v);
        }
        vocab.add(term, 0);
    }
    return EmbeddingMatrix(std::move(vocab), std::max<std::size_t>(dimension, 1), std::move(values));
}

// ---------------------------------------------------------------------------------------------
// Binary layout (all integers and floats little-endian):
//
//   offset 0   char[8]  magic "CSEMBVEC"
//          8   u32      version (1)
//         12   u32      flags (bit 0: rows unit-normalized)
//         16   u64      d
//         24   u64      |V|
//         32   u64      byte offset of the float block
//         40   term table: |V| x (u32 byte length, UTF-8 bytes)
//              zero padding up to the float block offset (multiple of 64)
//              |V| x d float32, row-major

namespace binfmt {
inline constexpr char magic[8] = {'C', 'S', 'E', 'M', 'B', 'V', 'E', 'C'};
inline constexpr std::uint32_t version = 1;
inline constexpr std::size_t header_size = 40;
inline constexpr std::size_t alignment = 64;
}  // namespace binfmt

inline void write_embeddings_binary(std::ostream& out, const EmbeddingMatrix& m) {
    auto put = [&](const auto& v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
    std::size_t table_bytes = 0;
    for (ConceptId id = 0; id < m.size(); ++id) table_bytes += 4 + m.term(id).size();
    const std::uint64_t data_offset =
        (binfmt::header_size + table_bytes + binfmt::alignment - 1) / binfmt::alignment * binfmt::alignment;

    out.write(binfmt::magic, sizeof binfmt::magic);
    put(binfmt::version);
    put(static_cast<std::uint32_t>(m.unit_normalized() ? 1 : 0));
    put(static_cast<std::uint64_t>(m.dimension()));
    put(static_cast<std::uint64_t>(m.size()));
    put(data_offset);
    for (ConceptId id = 0; id < m.size(); ++id) {
        const auto& t = m.term(id);
        put(static_cast<std::uint32_t>(t.size()));
        out.write(t.data(), static_cast<std::streamsize>(t.size()));
    }
    const std::string padding(data_offset - binfmt::header_size - table_bytes, '\0');
    out.write(padding.data(), static_cast<std::streamsize>(padding.size()));
    const auto values = m.values();
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
    if (!out) throw IoError("failed writing binary embeddings");
}

/// Read-only memory mapping of a whole file.
class MappedFile {
public:
    explicit MappedFile(const std::filesystem::path& path) {
        fd_ = ::open(path.c_str(), O_RDONLY);
        if (fd_ < 0) throw IoError("cannot open '" + path.string() + "'");
        struct stat st {};
        if (::fstat(fd_, &st) != 0) {
            ::close(fd_);
            throw IoError("cannot stat '" + path.string() + "'");
        }
        size_ = static_cast<std::size_t>(st.st_size);
        if (size_ > 0) {
            void* p = ::mmap(nullptr, size_, PROT_READ, MAP_PRIVATE, fd_, 0);
            if (p == MAP_FAILED) {
                ::close(fd_);
                throw IoError("cannot map '" + path.string() + "'");
            }
            data_ = static_cast<const std::byte*>(p);
        }
    }
    ~MappedFile() {
        if (data_) ::munmap(const_cast<std::byte*>(data_), size_);
        if (fd_ >= 0) ::close(fd_);
    }
    MappedFile(const MappedFile&) = delete;
    MappedFile& operator=(const MappedFile&) = delete;

    std::span<const std::byte> bytes() const { return {data_, size_}; }

private:
    int fd_ = -1;
    const std::byte* data_ = nullptr;
    std::size_t size_ = 0;
};

namespace detail {

struct BinaryHeader {
    std::uint64_t dimension = 0;
    std::uint64_t count = 0;
    std::uint64_t data_offset = 0;
    Vocabulary vocab;
};

template <typename T>
T read_le(std::span<const std::byte> bytes, std::size_t offset) {
    if (offset + sizeof(T) > bytes.size()) throw DataError("binary embeddings: truncated file");
    T v;
    std::memcpy(&v, bytes.data() + offset, sizeof v);
    return v;
}

inline BinaryHeader parse_binary_header(std::span<const std::byte> bytes) {
    if (bytes.size() < binfmt::header_size || std::memcmp(bytes.data(), binfmt::magic, sizeof binfmt::magic) != 0)
        throw DataError("binary embeddings: bad magic");
    if (read_le<std::uint32_t>(bytes, 8) != binfmt::version) throw DataError("binary embeddings: unsupported version");
    BinaryHeader h;
    h.dimension = read_le<std::uint64_t>(bytes, 16);
    h.count = read_le<std::uint64_t>(bytes, 24);
    h.data_offset = read_le<std::uint64_t>(bytes, 32);
    if (h.dimension == 0) throw DataError("binary embeddings: zero dimension");
    std::size_t pos = binfmt::header_size;
    for (std::uint64_t i = 0; i < h.count; ++i) {
        const auto len = read_le<std::uint32_t>(bytes, pos);
        pos += 4;
        if (pos + len > bytes.size()) throw DataError("binary embeddings: truncated term table");
        std::string term(reinterpret_cast<const char*>(bytes.data() + pos), len);
        pos += len;
        if (h.vocab.find(term)) throw DataError("binary embeddings: duplicate term '" + term + "'");
        h.vocab.add(std::move(term), 0);
    }
    if (h.data_offset < pos || h.data_offset % alignof(float) != 0 ||
        h.data_offset + h.count * h.dimension * sizeof(float) != bytes.size())
        throw DataError("binary embeddings: float block size mismatch");
    return h;
}

class MappedStorage final : public VectorStorage {
public:
    MappedStorage(std::unique_ptr<MappedFile> file, std::size_t offset, std::size_t count)
        : file_(std::move(file)),
          values_(reinterpret_cast<const float*>(file_->bytes().data() + offset), count) {}
    std::span<const float> data() const override { return values_; }

private:
    std::unique_ptr<MappedFile> file_;
    std::span<const float> values_;
};

}  // namespace detail

inline EmbeddingMatrix read_embeddings_binary(const std::filesystem::path& path, bool memory_map = false) {
    if (memory_map) {
        auto file = std::make_unique<MappedFile>(path);
        auto header = detail::parse_binary_header(file->bytes());
        const std::size_t n = header.count * header.dimension;
        auto storage = std::make_shared<detail::MappedStorage>(std::move(file), header.data_offset, n);
        return EmbeddingMatrix(std::move(header.vocab), header.dimension, std::move(storage));
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::span<const std::byte> bytes(reinterpret_cast<const std::byte*>(raw.data()), raw.size());
    auto header = detail::parse_binary_header(bytes);
    std::vector<float> values(header.count * header.dimension);
    std::memcpy(values.data(), raw.data() + header.data_offset, values.size() * sizeof(float));
    return EmbeddingMatrix(std::move(header.vocab), header.dimension, std::move(values));
}

inline EmbeddingMatrix load_embeddings(const std::filesystem::path& path, EmbeddingFormat format,
                                       const LoadOptions& options = {}) {
    EmbeddingMatrix m;
    if (format == EmbeddingFormat::tsv) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot read '" + path.string() + "'");
        m = read_embeddings_tsv(in);
    } else {
        m = read_embeddings_binary(path, options.memory_map && !options.normalize);
    }
    return options.normalize ? m.normalized() : m;
}

inline void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& m, EmbeddingFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    if (format == EmbeddingFormat::tsv)
        write_embeddings_tsv(out, m);
    else
        write_embeddings_binary(out, m);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace conceptscope
