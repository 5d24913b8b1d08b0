#pragma once

#include <map>
#include <string>
#include <vector>

#include "desmqa/corpus.hpp"
#include "desmqa/ranking.hpp"

// HIT@k evaluation over gold-annotated questions, broken down by answer
// type, plus report rendering (TSV and markdown).

namespace desmqa {

struct EvalBucket {
    std::size_t n_questions = 0;
    std::size_t unrankable = 0;            // counted as misses at every k
    std::map<int, std::size_t> hits;       // k -> questions with gold in top k
    std::map<int, double> hit_at;          // k -> hits[k] / n_questions

    bool operator==(const EvalBucket&) const = default;
};

struct EvalReport {
    std::string dataset;
    std::string scorer;
    std::vector<int> ks;  // ascending
    EvalBucket overall;
    std::map<AnswerType, EvalBucket> by_answer_type;

    bool operator==(const EvalReport&) const = default;
};

// Ranks every question of the catalog against its own product's specs and
// counts gold-in-top-k. Unrankable questions are misses at every k and
// tallied. Throws Error naming the question_id when a question lacks a
// gold annotation, ParseError on empty/invalid ks.
EvalReport evaluate(const ProductCatalog& catalog, Scorer& scorer,
                    const std::vector<int>& ks = {1, 2, 3},
                    const std::string& dataset_name = "catalog");

// One row per bucket: dataset \t scorer \t n \t hit<k>... \t unrankable.
// Answer-type buckets render as "<dataset>:<answer type>" rows after the
// overall row. With no ks, only the header line is emitted.
std::string render_report_tsv(const std::vector<EvalReport>& reports);

// Markdown table of the same rows; consecutive rows of one dataset are
// grouped (the dataset cell is left blank after its first row).
std::string render_report_markdown(const std::vector<EvalReport>& reports);

struct ReportRow {
    std::string dataset;
    std::string scorer;
    std::size_t n_questions = 0;
    std::vector<std::pair<int, double>> hit_at;  // (k, value) per column
    std::size_t unrankable = 0;

    bool operator==(const ReportRow&) const = default;
};

// Parses what render_report_tsv emits; render(parse(text)) == text.
std::vector<ReportRow> parse_report_tsv(const std::string& text);
std::string render_report_tsv(const std::vector<ReportRow>& rows);
std::string render_report_markdown(const std::vector<ReportRow>& rows);

}  // namespace desmqa
