#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

// Product catalogs, text normalization and the rule-based answer-type
// classifier.

namespace desmqa {

// Lowercase tokens over [a-z0-9] plus token-internal periods ("15.4").
using TokenSequence = std::vector<std::string>;

// Lowercases, replaces punctuation with spaces (keeping periods that sit
// between two digits), splits on whitespace and drops empty tokens.
// Deterministic; empty input yields an empty sequence.
TokenSequence normalize(const std::string& text);

// Inverse-ish of normalize for display: tokens joined by single spaces.
std::string join_tokens(const TokenSequence& tokens);

enum class AnswerType { Numerical, YesNo, Other };

const char* answer_type_name(AnswerType t);

// Rules for classify_answer_type. The defaults mirror the stock question
// phrasing seen in product Q&A; both lists are configurable because the
// buckets are dataset metadata, not a learned artifact.
struct ClassifierConfig {
    // A question is YesNo when its first token is one of these.
    std::vector<std::string> yesno_leads = {"is",  "does", "do",   "can", "will",
                                            "are", "has",  "have", "should"};
    // "what is the <term>" counts as Numerical when <term> is one of these.
    std::vector<std::string> unit_lexicon = {"size",  "weight",   "height",
                                             "width", "depth",    "capacity",
                                             "length"};
};

// First matching rule wins, checked in order YesNo -> Numerical -> Other.
// Numerical also fires on the bigrams "how many" / "how much".
// Throws Error("unclassifiable") on an empty token sequence.
AnswerType classify_answer_type(const TokenSequence& tokens,
                                const ClassifierConfig& cfg = {});

struct Specification {
    std::string key;
    std::string value;
    std::size_t index = 0;  // 0-based position within the product

    // The flattened "key value" text every scorer sees.
    std::string text() const { return key + " " + value; }
    bool operator==(const Specification&) const = default;
};

struct Question {
    std::string question_id;
    std::string text;
    TokenSequence tokens;  // always normalize(text)
    std::optional<std::size_t> gold_spec_index;
    AnswerType answer_type = AnswerType::Other;

    bool operator==(const Question&) const = default;
};

struct Product {
    std::string product_id;
    std::string vertical;
    std::vector<Specification> specs;
    std::vector<Question> questions;

    bool operator==(const Product&) const = default;
};

struct ProductCatalog {
    std::vector<Product> products;

    const Product* find(const std::string& product_id) const;
    std::size_t question_count() const;
    bool operator==(const ProductCatalog&) const = default;
};

enum class CatalogFormat { jsonl, tsv };

// Reads a catalog. jsonl: one product object per line (full catalog).
// tsv: question records only (product_id \t question_id \t text \t
// gold_spec_index, empty last column = unannotated); the resulting
// products carry no specs and are meant to be merged into a spec-bearing
// catalog with merge_questions().
// Throws ParseError with the offending line number on malformed input,
// duplicate product ids or out-of-range gold indices.
ProductCatalog ingest_catalog(const std::string& path, CatalogFormat format,
                              const ClassifierConfig& cfg = {});

// Moves the questions of `extra` onto the matching products of `base`.
// Unknown product ids and out-of-range gold indices raise ParseError.
void merge_questions(ProductCatalog& base, const ProductCatalog& extra);

// Writes the catalog in the same JSONL schema ingest_catalog reads;
// ingest(write(c)) == c.
void write_catalog_jsonl(const ProductCatalog& catalog,
                         const std::string& path);

// Flattens a catalog into embedding-training sentences: per product, each
// spec's normalized "key value" text, then each question's token sequence.
// Order is deterministic (catalog order).
std::vector<TokenSequence> catalog_sentences(const ProductCatalog& catalog);

}  // namespace desmqa
