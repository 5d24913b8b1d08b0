#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "desmqa/corpus.hpp"
#include "desmqa/embedding.hpp"

// Dual embedding relevance score between a question and a specification:
// the mean, over question-term occurrences, of the cosine between the
// question term's vector and the centroid of the specification's
// unit-normalized term vectors. Question terms and the centroid may each be
// drawn from either embedding space, giving four mode pairings.

namespace desmqa {

struct DesmMode {
    Space question_space = Space::OUT;
    Space spec_space = Space::OUT;

    bool operator==(const DesmMode&) const = default;
};

// "in-in", "in-out", "out-in", "out-out" (question space first).
std::string desm_mode_name(DesmMode mode);
DesmMode parse_desm_mode(const std::string& name);  // throws ParseError

struct DualScore {
    double value = 0.0;  // in [-1, 1]
    std::uint32_t n_question_terms_used = 0;
    std::uint32_t n_spec_terms_used = 0;
};

struct Centroid {
    std::vector<double> v;
    std::uint32_t terms_used = 0;
};

// Mean of the unit-normalized vectors of the in-vocabulary spec tokens,
// accumulated at 64-bit. Tokens that are out of vocabulary or have a
// zero-norm vector are skipped and the divisor counts only used
// occurrences. Throws UnscorableError when nothing usable remains.
Centroid spec_centroid(const TokenSequence& spec_tokens,
                       const DualEmbedding& e, Space space);

// DUAL(q, s). Duplicated question tokens contribute once per occurrence.
// Summation runs in sorted-vocabulary-index order, so token order never
// changes the result, not even in the last bit. Throws UnscorableError
// ("unscorable question" / "unscorable specification").
DualScore dual_score(const TokenSequence& question_tokens,
                     const TokenSequence& spec_tokens, const DualEmbedding& e,
                     DesmMode mode);

// Scores one question against every specification of one product. Entry i
// corresponds to product.specs[i]; unscorable specs yield nullopt, never a
// fabricated score. Throws UnscorableError when the question itself has no
// usable terms, Error when the product has no specs.
std::vector<std::optional<DualScore>> score_all(const Question& question,
                                                const Product& product,
                                                const DualEmbedding& e,
                                                DesmMode mode);

}  // namespace desmqa
