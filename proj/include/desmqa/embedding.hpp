#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "desmqa/corpus.hpp"

// The dual embedding: one vocabulary, two parallel weight matrices.
// Skip-gram training learns both; standard word2vec tooling keeps only the
// input matrix, but the DESM scorer needs the output matrix too, so both
// are first-class here and both persist.

namespace desmqa {

// Which of the two embedding spaces a vector is drawn from.
enum class Space { IN, OUT };

const char* space_name(Space s);

struct VocabEntry {
    std::string term;
    std::uint64_t count = 0;

    bool operator==(const VocabEntry&) const = default;
};

class Vocab {
public:
    Vocab() = default;
    // Entries must already be ordered by (count desc, term asc).
    explicit Vocab(std::vector<VocabEntry> entries);

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const VocabEntry& entry(std::uint32_t id) const { return entries_[id]; }
    const std::vector<VocabEntry>& entries() const { return entries_; }

    // Id of a term, or -1 if out of vocabulary.
    std::int64_t index_of(const std::string& term) const;

    bool operator==(const Vocab& other) const {
        return entries_ == other.entries_;
    }

private:
    std::vector<VocabEntry> entries_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

// Counts unigrams over the corpus, drops terms with count < min_count and
// orders the survivors by descending count, ties broken lexicographically.
// Throws Error when the corpus holds no tokens at all.
Vocab build_vocab(std::span<const TokenSequence> corpus,
                  std::uint64_t min_count);

class DualEmbedding {
public:
    DualEmbedding() = default;
    // Allocates zeroed |vocab| x dim matrices for both spaces.
    DualEmbedding(Vocab vocab, std::uint32_t dim);

    std::uint32_t dim() const { return dim_; }
    const Vocab& vocab() const { return vocab_; }

    float* in_row(std::uint32_t id) { return in_.data() + std::size_t(id) * dim_; }
    const float* in_row(std::uint32_t id) const {
        return in_.data() + std::size_t(id) * dim_;
    }
    float* out_row(std::uint32_t id) {
        return out_.data() + std::size_t(id) * dim_;
    }
    const float* out_row(std::uint32_t id) const {
        return out_.data() + std::size_t(id) * dim_;
    }
    const float* row(Space space, std::uint32_t id) const {
        return space == Space::IN ? in_row(id) : out_row(id);
    }

    std::vector<float>& in_matrix() { return in_; }
    const std::vector<float>& in_matrix() const { return in_; }
    std::vector<float>& out_matrix() { return out_; }
    const std::vector<float>& out_matrix() const { return out_; }

private:
    std::uint32_t dim_ = 0;
    Vocab vocab_;
    std::vector<float> in_;   // row-major |vocab| x dim
    std::vector<float> out_;  // row-major |vocab| x dim
};

// Bitwise comparison (matrices via memcmp), the equality the persistence
// round-trip guarantees.
bool bit_equal(const DualEmbedding& a, const DualEmbedding& b);

// Binary embedding file, little-endian:
//   magic "DESM" | version u32 | dim u32 | vocab_size u64
//   | per term: byte length u32, UTF-8 bytes, count u64
//   | in matrix row-major f32 | out matrix row-major f32
// load(save(e)) reproduces e bit-exactly. Distinct ParseErrors for bad
// magic, shape mismatch and truncation.
void save_embedding(const DualEmbedding& e, const std::string& path);
DualEmbedding load_embedding(const std::string& path);

}  // namespace desmqa
