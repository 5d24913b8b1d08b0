#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "desmqa/corpus.hpp"
#include "desmqa/desm.hpp"
#include "desmqa/embedding.hpp"

namespace desmqa {

struct ScorePair {
    std::string question_text;
    std::string spec_text;
};

// Pluggable relevance scorer: the built-in dual-embedding scorer or an
// external classifier bridged over a subprocess line protocol. A batch
// returns exactly one entry per input pair, in order; nullopt marks a pair
// the scorer cannot judge — never a fabricated score.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual std::string name() const = 0;
    virtual std::vector<std::optional<double>> score_batch(
        const std::vector<ScorePair>& pairs) = 0;
};

class DesmScorer : public Scorer {
public:
    DesmScorer(const DualEmbedding& e, DesmMode mode)
        : e_(e), mode_(mode) {}

    std::string name() const override {
        return "desm-" + desm_mode_name(mode_);
    }
    std::vector<std::optional<double>> score_batch(
        const std::vector<ScorePair>& pairs) override;

private:
    const DualEmbedding& e_;
    DesmMode mode_;
};

struct RankedEntry {
    std::size_t spec_index = 0;
    double score = 0.0;

    bool operator==(const RankedEntry&) const = default;
};

// Scores non-increasing; ties broken by ascending spec index; every
// scorable spec appears exactly once (entries + unscorable_specs == M).
struct RankedList {
    std::string question_id;
    std::vector<RankedEntry> entries;
    std::size_t unscorable_specs = 0;
};

// Ranks every specification of the product for the question. Unscorable
// specs are excluded and counted, never ranked last. Throws UnscorableError
// ("unrankable question") when no spec is scorable, ScorerError when the
// scorer breaks its batch contract (wrong count, non-finite score).
RankedList rank(const Question& question, const Product& product,
                Scorer& scorer);

}  // namespace desmqa
