#include "desmqa/ranking.hpp"

#include <algorithm>
#include <cmath>

#include "desmqa/error.hpp"

namespace desmqa {

std::vector<std::optional<double>> DesmScorer::score_batch(
    const std::vector<ScorePair>& pairs) {
    std::vector<std::optional<double>> scores;
    scores.reserve(pairs.size());
    for (const ScorePair& pair : pairs) {
        try {
            scores.push_back(dual_score(normalize(pair.question_text),
                                        normalize(pair.spec_text), e_, mode_)
                                 .value);
        } catch (const UnscorableError&) {
            scores.push_back(std::nullopt);
        }
    }
    return scores;
}

RankedList rank(const Question& question, const Product& product,
                Scorer& scorer) {
    std::vector<ScorePair> batch;
    batch.reserve(product.specs.size());
    for (const Specification& spec : product.specs) {
        batch.push_back({question.text, spec.text()});
    }
    const auto scores = scorer.score_batch(batch);
    if (scores.size() != batch.size()) {
        throw ScorerError("scorer \"" + scorer.name() + "\" returned " +
                          std::to_string(scores.size()) + " scores for " +
                          std::to_string(batch.size()) + " pairs");
    }

    RankedList ranked;
    ranked.question_id = question.question_id;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!scores[i]) {
            ++ranked.unscorable_specs;
            continue;
        }
        if (!std::isfinite(*scores[i])) {
            throw ScorerError("scorer \"" + scorer.name() +
                              "\" returned a non-finite score");
        }
        ranked.entries.push_back({i, *scores[i]});
    }
    if (ranked.entries.empty()) {
        throw UnscorableError("unrankable question \"" + question.question_id +
                              "\": no scorable specification");
    }
    std::sort(ranked.entries.begin(), ranked.entries.end(),
              [](const RankedEntry& a, const RankedEntry& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.spec_index < b.spec_index;
              });
    return ranked;
}

}  // namespace desmqa
