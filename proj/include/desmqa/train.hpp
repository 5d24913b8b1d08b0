#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "desmqa/corpus.hpp"
#include "desmqa/embedding.hpp"

namespace desmqa {

struct TrainConfig {
    std::uint32_t dim = 100;
    std::uint32_t window = 5;
    std::uint32_t negatives = 5;
    std::uint32_t epochs = 5;
    double initial_lr = 0.025;
    std::uint64_t min_count = 1;
    std::uint64_t seed = 42;
    // Reproducible across runs and across requested thread counts: training
    // runs on one thread and every random draw comes from seeded generators.
    bool deterministic = true;
    // Lock-free parallel updates when deterministic is off; clamped to 1
    // otherwise.
    std::uint32_t threads = 1;

    // Throws ParseError on out-of-range values.
    void validate() const;
};

struct TrainStats {
    std::uint64_t vocab_size = 0;
    std::uint64_t corpus_tokens = 0;     // in-vocabulary token positions
    std::uint64_t pairs_per_epoch = 0;   // (center, context) pairs
    std::vector<double> epoch_avg_loss;  // mean per-pair loss, one per epoch
};

// Trains skip-gram with negative sampling over the token sequences and
// returns both matrices. Input rows start uniform in [-0.5/dim, 0.5/dim],
// output rows start at zero. Negatives are drawn from the unigram
// distribution raised to 3/4; the learning rate decays linearly from
// initial_lr to initial_lr/10000. Throws Error on an empty vocabulary or a
// non-finite loss (diverged), ParseError on bad config.
DualEmbedding train_embeddings(std::span<const TokenSequence> corpus,
                               const TrainConfig& cfg,
                               TrainStats* stats = nullptr);

}  // namespace desmqa
