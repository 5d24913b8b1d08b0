#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "desmqa/corpus.hpp"

// Synthetic product-catalog generator for tests and demos: products draw
// their specifications from a fixed template vocabulary (distinct keys per
// product, key-specific value sets) and every question is a templated
// paraphrase of one known specification, so the gold label is recorded at
// generation time. A configurable fraction of question tokens is replaced
// by distractor tokens that never occur in any template.

namespace desmqa {

struct SynthConfig {
    std::size_t n_products = 50;
    std::size_t specs_per_product = 10;
    std::size_t questions_per_spec = 2;
    double noise = 0.0;  // per-token probability of a distractor swap
    std::uint64_t seed = 42;
    std::string vertical = "mobile";
    // Per spec, floor(holdout_fraction * questions_per_spec) questions are
    // moved to the held-out catalog (the last ones generated); the rest
    // stay in the training catalog.
    double holdout_fraction = 0.0;

    // Throws ParseError on zero counts, noise or holdout_fraction outside
    // [0,1], or specs_per_product beyond the distinct key pool.
    void validate() const;
};

// Number of distinct specification keys the generator can draw from; the
// upper bound for specs_per_product.
std::size_t synth_key_pool_size();

struct SynthResult {
    ProductCatalog train;
    ProductCatalog heldout;  // no products when holdout_fraction == 0
};

// Deterministic under cfg.seed: one generator stream drives key choice,
// values, question templates and noise, so identical configs yield
// identical catalogs byte for byte once written.
SynthResult synthesize(const SynthConfig& cfg);

// Renders a balanced validation TSV (question text \t spec text \t 0/1)
// by sampling annotated questions of `catalog`: even rows pair a question
// with its gold specification (label 1), odd rows with a random non-gold
// specification of the same product (label 0). Deterministic under seed.
// Throws Error when the catalog has no annotated questions, or when a
// negative row is required but no product has a second specification.
std::string render_validation_tsv(const ProductCatalog& catalog,
                                  std::size_t n_pairs, std::uint64_t seed);

}  // namespace desmqa
