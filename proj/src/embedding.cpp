#include "desmqa/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "desmqa/error.hpp"

namespace desmqa {

const char* space_name(Space s) { return s == Space::IN ? "in" : "out"; }

Vocab::Vocab(std::vector<VocabEntry> entries) : entries_(std::move(entries)) {
    index_.reserve(entries_.size());
    for (std::uint32_t id = 0; id < entries_.size(); ++id) {
        index_.emplace(entries_[id].term, id);
    }
}

std::int64_t Vocab::index_of(const std::string& term) const {
    auto it = index_.find(term);
    return it == index_.end() ? -1 : std::int64_t(it->second);
}

Vocab build_vocab(std::span<const TokenSequence> corpus,
                  std::uint64_t min_count) {
    std::map<std::string, std::uint64_t> counts;
    for (const TokenSequence& seq : corpus) {
        for (const std::string& token : seq) {
            ++counts[token];
        }
    }
    if (counts.empty()) {
        throw Error("cannot build vocabulary from an empty corpus");
    }
    std::vector<VocabEntry> entries;
    entries.reserve(counts.size());
    for (auto& [term, count] : counts) {
        if (count >= min_count) {
            entries.push_back(VocabEntry{term, count});
        }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const VocabEntry& a, const VocabEntry& b) {
                         if (a.count != b.count) return a.count > b.count;
                         return a.term < b.term;
                     });
    return Vocab(std::move(entries));
}

DualEmbedding::DualEmbedding(Vocab vocab, std::uint32_t dim)
    : dim_(dim),
      vocab_(std::move(vocab)),
      in_(vocab_.size() * std::size_t(dim), 0.0f),
      out_(vocab_.size() * std::size_t(dim), 0.0f) {}

bool bit_equal(const DualEmbedding& a, const DualEmbedding& b) {
    if (a.dim() != b.dim() || !(a.vocab() == b.vocab())) return false;
    const auto same = [](const std::vector<float>& x,
                         const std::vector<float>& y) {
        return x.size() == y.size() &&
               (x.empty() ||
                std::memcmp(x.data(), y.data(), x.size() * sizeof(float)) == 0);
    };
    return same(a.in_matrix(), b.in_matrix()) &&
           same(a.out_matrix(), b.out_matrix());
}

namespace {

constexpr char kMagic[4] = {'D', 'E', 'S', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "embedding file IO assumes a little-endian host");

void write_bytes(std::ofstream& out, const void* data, std::size_t n) {
    out.write(static_cast<const char*>(data), std::streamsize(n));
}

template <class T>
void write_pod(std::ofstream& out, T value) {
    write_bytes(out, &value, sizeof(T));
}

void read_bytes(std::ifstream& in, void* data, std::size_t n,
                const std::string& path) {
    in.read(static_cast<char*>(data), std::streamsize(n));
    if (std::size_t(in.gcount()) != n) {
        throw ParseError(path + ": truncated embedding file");
    }
}

template <class T>
T read_pod(std::ifstream& in, const std::string& path) {
    T value;
    read_bytes(in, &value, sizeof(T), path);
    return value;
}

}  // namespace

void save_embedding(const DualEmbedding& e, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    write_bytes(out, kMagic, sizeof(kMagic));
    write_pod(out, kFormatVersion);
    write_pod(out, e.dim());
    write_pod(out, std::uint64_t(e.vocab().size()));
    for (const VocabEntry& entry : e.vocab().entries()) {
        write_pod(out, std::uint32_t(entry.term.size()));
        write_bytes(out, entry.term.data(), entry.term.size());
        write_pod(out, entry.count);
    }
    write_bytes(out, e.in_matrix().data(), e.in_matrix().size() * sizeof(float));
    write_bytes(out, e.out_matrix().data(),
                e.out_matrix().size() * sizeof(float));
    out.flush();
    if (!out) {
        throw Error("write to " + path + " failed");
    }
}

DualEmbedding load_embedding(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path + " for reading");
    }
    char magic[4];
    read_bytes(in, magic, sizeof(magic), path);
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ParseError(path + ": unrecognized embedding file format");
    }
    const auto version = read_pod<std::uint32_t>(in, path);
    if (version != kFormatVersion) {
        throw ParseError(path + ": unsupported embedding format version " +
                         std::to_string(version));
    }
    const auto dim = read_pod<std::uint32_t>(in, path);
    const auto vocab_size = read_pod<std::uint64_t>(in, path);
    if (dim == 0 || vocab_size == 0) {
        throw ParseError(path + ": shape mismatch: dim=" + std::to_string(dim) +
                         " vocab_size=" + std::to_string(vocab_size));
    }
    std::vector<VocabEntry> entries;
    entries.reserve(vocab_size);
    for (std::uint64_t i = 0; i < vocab_size; ++i) {
        const auto term_len = read_pod<std::uint32_t>(in, path);
        std::string term(term_len, '\0');
        read_bytes(in, term.data(), term_len, path);
        const auto count = read_pod<std::uint64_t>(in, path);
        entries.push_back(VocabEntry{std::move(term), count});
    }
    DualEmbedding e(Vocab(std::move(entries)), dim);
    read_bytes(in, e.in_matrix().data(), e.in_matrix().size() * sizeof(float),
               path);
    read_bytes(in, e.out_matrix().data(), e.out_matrix().size() * sizeof(float),
               path);
    if (in.peek() != std::ifstream::traits_type::eof()) {
        throw ParseError(path +
                         ": shape mismatch: trailing data after matrices");
    }
    return e;
}

}  // namespace desmqa
