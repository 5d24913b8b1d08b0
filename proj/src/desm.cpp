#include "desmqa/desm.hpp"

#include <algorithm>
#include <cmath>

#include "desmqa/error.hpp"
#include "desmqa/kernels.hpp"

namespace desmqa {

std::string desm_mode_name(DesmMode mode) {
    return std::string(space_name(mode.question_space)) + "-" +
           space_name(mode.spec_space);
}

DesmMode parse_desm_mode(const std::string& name) {
    for (Space q : {Space::IN, Space::OUT}) {
        for (Space s : {Space::IN, Space::OUT}) {
            DesmMode mode{q, s};
            if (desm_mode_name(mode) == name) return mode;
        }
    }
    throw ParseError("unknown mode \"" + name +
                     "\" (expected in-in, in-out, out-in or out-out)");
}

namespace {

// In-vocabulary ids, one per token occurrence, ascending. The fixed order
// makes every downstream reduction independent of input token order.
std::vector<std::uint32_t> sorted_ids(const TokenSequence& tokens,
                                      const Vocab& vocab) {
    std::vector<std::uint32_t> ids;
    ids.reserve(tokens.size());
    for (const std::string& token : tokens) {
        const std::int64_t id = vocab.index_of(token);
        if (id >= 0) ids.push_back(std::uint32_t(id));
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

double row_norm(const float* row, std::uint32_t dim) {
    return std::sqrt(kernels::dot_f32(row, row, dim));
}

}  // namespace

Centroid spec_centroid(const TokenSequence& spec_tokens,
                       const DualEmbedding& e, Space space) {
    Centroid c;
    c.v.assign(e.dim(), 0.0);
    for (std::uint32_t id : sorted_ids(spec_tokens, e.vocab())) {
        const float* row = e.row(space, id);
        const double norm = row_norm(row, e.dim());
        if (norm == 0.0) continue;
        kernels::add_div_f32_f64(norm, row, c.v.data(), e.dim());
        ++c.terms_used;
    }
    if (c.terms_used == 0) {
        throw UnscorableError(
            "unscorable specification: no usable terms in vocabulary");
    }
    for (double& x : c.v) x /= double(c.terms_used);
    return c;
}

DualScore dual_score(const TokenSequence& question_tokens,
                     const TokenSequence& spec_tokens, const DualEmbedding& e,
                     DesmMode mode) {
    const std::vector<std::uint32_t> q_ids =
        sorted_ids(question_tokens, e.vocab());
    const Centroid centroid = spec_centroid(spec_tokens, e, mode.spec_space);
    const double centroid_norm =
        std::sqrt(kernels::dot_f64(centroid.v.data(), centroid.v.data(),
                                   centroid.v.size()));
    if (centroid_norm == 0.0) {
        throw UnscorableError(
            "unscorable specification: term vectors cancel to a zero "
            "centroid");
    }

    DualScore score;
    score.n_spec_terms_used = centroid.terms_used;
    double sum = 0.0;
    for (std::uint32_t id : q_ids) {
        const float* row = e.row(mode.question_space, id);
        const double norm = row_norm(row, e.dim());
        if (norm == 0.0) continue;
        sum += kernels::dot_f32_f64(row, centroid.v.data(), e.dim()) /
               (norm * centroid_norm);
        ++score.n_question_terms_used;
    }
    if (score.n_question_terms_used == 0) {
        throw UnscorableError(
            "unscorable question: no usable terms in vocabulary");
    }
    score.value = sum / double(score.n_question_terms_used);
    score.value = std::clamp(score.value, -1.0, 1.0);
    return score;
}

std::vector<std::optional<DualScore>> score_all(const Question& question,
                                                const Product& product,
                                                const DualEmbedding& e,
                                                DesmMode mode) {
    if (product.specs.empty()) {
        throw Error("product \"" + product.product_id +
                    "\" has no specifications");
    }
    // Fail on an unscorable question before looking at any spec, so the
    // caller gets one error, not M markers.
    std::size_t usable_question_terms = 0;
    for (std::uint32_t id : sorted_ids(question.tokens, e.vocab())) {
        if (row_norm(e.row(mode.question_space, id), e.dim()) != 0.0) {
            ++usable_question_terms;
        }
    }
    if (usable_question_terms == 0) {
        throw UnscorableError("unscorable question \"" + question.question_id +
                              "\": no usable terms in vocabulary");
    }
    std::vector<std::optional<DualScore>> scores;
    scores.reserve(product.specs.size());
    for (const Specification& spec : product.specs) {
        try {
            scores.push_back(
                dual_score(question.tokens, normalize(spec.text()), e, mode));
        } catch (const UnscorableError&) {
            scores.push_back(std::nullopt);
        }
    }
    return scores;
}

}  // namespace desmqa
