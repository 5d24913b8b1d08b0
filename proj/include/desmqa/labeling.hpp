#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "desmqa/corpus.hpp"
#include "desmqa/desm.hpp"
#include "desmqa/embedding.hpp"

// Semi-supervised training-set creation: pick the score threshold theta on a
// small human-labeled validation set, label every question x own-product
// spec pair by its dual score, and balance the classes.

namespace desmqa {

struct ValidationPair {
    TokenSequence question_tokens;
    TokenSequence spec_tokens;
    bool relevant = false;

    bool operator==(const ValidationPair&) const = default;
};

struct ValidationLoadResult {
    std::vector<ValidationPair> pairs;  // scorable under the given embedding
    std::size_t rejected_unscorable = 0;
};

// TSV: question_text \t spec_text \t label{1,0}; '#' lines are comments.
// Pairs that cannot be scored under (e, mode) are rejected and counted.
ValidationLoadResult load_validation_tsv(const std::string& path,
                                         const DualEmbedding& e,
                                         DesmMode mode);

struct SweepGrid {
    double lo = -1.0;
    double hi = 1.0;
    double step = 0.01;
};

struct ThresholdReport {
    double theta_star = 0.0;
    double accuracy_at_theta_star = 0.0;
    // (theta, accuracy) for every candidate, ascending theta.
    std::vector<std::pair<double, double>> sweep_table;
};

// Accuracy of the rule "predict relevant iff score >= theta" at every grid
// point theta_i = lo + i*step (hi included when it falls on the grid);
// returns the smallest theta attaining the maximum. Throws Error on an
// empty validation set, ParseError on a degenerate grid.
ThresholdReport sweep_threshold(const std::vector<ValidationPair>& pairs,
                                const DualEmbedding& e, DesmMode mode,
                                const SweepGrid& grid);

// Same selection rule, but candidates are derived from the observed scores:
// one below the minimum, the midpoint of each adjacent distinct pair, one
// above the maximum. Finds the true optimum of the step function.
ThresholdReport sweep_threshold_midpoints(
    const std::vector<ValidationPair>& pairs, const DualEmbedding& e,
    DesmMode mode);

struct LabeledPair {
    std::string product_id;
    std::string question_id;
    std::size_t spec_index = 0;
    std::string spec_text;
    std::string question_text;
    double score = 0.0;
    bool positive = false;  // score >= theta at labeling time

    bool operator==(const LabeledPair&) const = default;
};

struct LabelingSummary {
    std::size_t emitted = 0;
    std::size_t skipped_unscorable = 0;
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

// Scores every (question, own-product spec) pair and labels it against
// theta (positive iff score >= theta). Unscorable pairs are skipped and
// counted. Products fan out across `threads` workers; the output order is
// (product_id, question_id, spec_index) ascending regardless of thread
// count. Throws ParseError when theta is not finite.
std::vector<LabeledPair> label_corpus(const ProductCatalog& catalog,
                                      const DualEmbedding& e, DesmMode mode,
                                      double theta, std::size_t threads = 1,
                                      LabelingSummary* summary = nullptr);

// Every positive plus exactly |positives| negatives drawn uniformly without
// replacement under seed; output in (product_id, question_id, spec_index)
// order. Throws Error when there are no positives or fewer negatives than
// positives.
std::vector<LabeledPair> balance(const std::vector<LabeledPair>& pairs,
                                 std::uint64_t seed);

// TSV: product_id \t question_id \t spec_index \t spec_text \t
// question_text \t score(9 decimals) \t label{1,0}. Tabs or newlines
// embedded in the texts are flattened to spaces on write (normalize()
// treats all whitespace alike, so stored scores still re-verify). Lines
// passed in header_comments are emitted as leading "# " lines.
void write_labeled_tsv(const std::vector<LabeledPair>& pairs,
                       const std::string& path,
                       const std::vector<std::string>& header_comments = {});
std::vector<LabeledPair> read_labeled_tsv(const std::string& path);

// Threshold report TSV: "# theta_star/accuracy" header comments followed by
// one "theta \t accuracy" row per sweep candidate.
void write_threshold_report_tsv(
    const ThresholdReport& report, const std::string& path,
    const std::vector<std::string>& header_comments = {});
ThresholdReport read_threshold_report_tsv(const std::string& path);

}  // namespace desmqa
