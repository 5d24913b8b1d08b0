#include "desmqa/synth.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "desmqa/error.hpp"
#include "desmqa/rng.hpp"

namespace desmqa {

namespace {

struct KeyTemplate {
    const char* key;
    std::array<const char*, 4> values;
};

// All template text is already in normalized form (lowercase, alphanumeric
// tokens, digit-internal periods), so normalize(text) never changes a
// token and round-trips through the JSONL catalog schema are exact.
constexpr std::array<KeyTemplate, 16> kKeys = {{
    {"battery capacity", {"3000 mah", "4000 mah", "5000 mah", "6000 mah"}},
    {"display size", {"5.5 inch", "6.1 inch", "6.7 inch", "7.2 inch"}},
    {"storage capacity", {"64 gb", "128 gb", "256 gb", "512 gb"}},
    {"charging time", {"1 hour", "2 hours", "3 hours", "90 minutes"}},
    {"item weight", {"150 grams", "180 grams", "200 grams", "250 grams"}},
    {"warranty period", {"1 year", "2 years", "6 months", "3 years"}},
    {"strap material",
     {"leather strap", "steel strap", "nylon strap", "rubber strap"}},
    {"water resistance",
     {"30 meters", "50 meters", "100 meters", "splash proof"}},
    {"cooling capacity", {"1 ton", "1.5 ton", "2 ton", "0.8 ton"}},
    {"noise level", {"32 db", "40 db", "45 db", "50 db"}},
    {"processor speed", {"2.4 ghz", "3.1 ghz", "1.8 ghz", "2.8 ghz"}},
    {"screen resolution",
     {"1080p panel", "1440p panel", "720p panel", "2160p panel"}},
    {"laptop compatibility",
     {"15.6 inch laptop", "14 inch laptop", "17 inch laptop",
      "13 inch laptop"}},
    {"outer material",
     {"polyester fabric", "genuine leather", "canvas fabric",
      "nylon fabric"}},
    {"sole material",
     {"rubber sole", "foam sole", "leather sole", "gel sole"}},
    {"color option",
     {"midnight black", "ocean blue", "forest green", "silver grey"}},
}};

// Distractor tokens are disjoint from every key, value and template word
// above, so tests can count injected noise exactly.
constexpr std::array<const char*, 16> kDistractors = {
    "zebra",  "umbrella", "quartz", "marble", "violin", "comet",
    "harbor", "tunnel",   "meadow", "lantern", "pepper", "falcon",
    "anchor", "butter",   "canyon", "drizzle"};

// {k} = spec key, {v} = spec value, {p} = vertical name.
constexpr std::array<const char*, 5> kQuestionTemplates = {
    "what is the {k} of this {p}",
    "how much {k} does it have",
    "is the {k} {v}",
    "does this {p} have {v} {k}",
    "can you tell the {k} of it",
};

std::string expand_template(const char* tpl, const std::string& key,
                            const std::string& value,
                            const std::string& vertical) {
    std::string out;
    for (const char* c = tpl; *c; ++c) {
        if (*c == '{' && c[1] && c[2] == '}') {
            switch (c[1]) {
                case 'k': out += key; break;
                case 'v': out += value; break;
                case 'p': out += vertical; break;
                default: out += {*c, c[1], c[2]};
            }
            c += 2;
        } else {
            out += *c;
        }
    }
    return out;
}

std::string apply_noise(const std::string& text, double noise, Rng& rng) {
    if (noise <= 0.0) return text;
    TokenSequence tokens = normalize(text);
    for (std::string& token : tokens) {
        if (rng.uniform() < noise) {
            token = kDistractors[rng.bounded(kDistractors.size())];
        }
    }
    return join_tokens(tokens);
}

std::string padded(std::size_t n, int width) {
    std::string digits = std::to_string(n);
    while (int(digits.size()) < width) digits.insert(digits.begin(), '0');
    return digits;
}

}  // namespace

std::size_t synth_key_pool_size() { return kKeys.size(); }

void SynthConfig::validate() const {
    if (n_products < 1 || specs_per_product < 1 || questions_per_spec < 1) {
        throw ParseError("synthetic catalog counts must all be >= 1");
    }
    if (specs_per_product > kKeys.size()) {
        throw ParseError(
            "specs_per_product exceeds the distinct key pool (" +
            std::to_string(kKeys.size()) + ")");
    }
    if (!(noise >= 0.0 && noise <= 1.0)) {
        throw ParseError("noise must lie in [0, 1]");
    }
    if (!(holdout_fraction >= 0.0 && holdout_fraction <= 1.0)) {
        throw ParseError("holdout_fraction must lie in [0, 1]");
    }
    if (vertical.empty() || normalize(vertical).size() != 1) {
        throw ParseError("vertical must normalize to a single token");
    }
}

SynthResult synthesize(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const std::size_t held_per_spec = std::size_t(
        std::floor(cfg.holdout_fraction * double(cfg.questions_per_spec) +
                   1e-9));
    const std::string vertical_token = normalize(cfg.vertical).front();

    SynthResult result;
    for (std::size_t pi = 0; pi < cfg.n_products; ++pi) {
        Product product;
        product.product_id = vertical_token + "-" + padded(pi, 4);
        product.vertical = cfg.vertical;

        // Distinct keys per product via a partial shuffle of the pool.
        std::array<std::size_t, kKeys.size()> order{};
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (std::size_t i = 0; i < cfg.specs_per_product; ++i) {
            std::swap(order[i], order[i + rng.bounded(order.size() - i)]);
        }

        for (std::size_t si = 0; si < cfg.specs_per_product; ++si) {
            const KeyTemplate& kt = kKeys[order[si]];
            Specification spec;
            spec.key = kt.key;
            spec.value = kt.values[rng.bounded(kt.values.size())];
            spec.index = si;
            product.specs.push_back(std::move(spec));
        }

        Product held = product;  // same id, vertical and specs
        std::size_t question_no = 0;
        for (std::size_t si = 0; si < cfg.specs_per_product; ++si) {
            const Specification& spec = product.specs[si];
            for (std::size_t qi = 0; qi < cfg.questions_per_spec; ++qi) {
                const char* tpl =
                    kQuestionTemplates[rng.bounded(kQuestionTemplates.size())];
                Question q;
                q.question_id =
                    product.product_id + "-q" + padded(question_no++, 3);
                q.text = apply_noise(
                    expand_template(tpl, spec.key, spec.value,
                                    vertical_token),
                    cfg.noise, rng);
                q.tokens = normalize(q.text);
                q.gold_spec_index = si;
                q.answer_type = classify_answer_type(q.tokens);
                const bool held_out =
                    qi >= cfg.questions_per_spec - held_per_spec;
                (held_out ? held : product).questions.push_back(std::move(q));
            }
        }
        result.train.products.push_back(std::move(product));
        if (held_per_spec > 0) {
            result.heldout.products.push_back(std::move(held));
        }
    }
    return result;
}

std::string render_validation_tsv(const ProductCatalog& catalog,
                                  std::size_t n_pairs, std::uint64_t seed) {
    struct Slot {
        const Product* product;
        const Question* question;
    };
    std::vector<Slot> annotated;
    std::vector<Slot> negatable;  // product also has a non-gold spec
    for (const Product& p : catalog.products) {
        for (const Question& q : p.questions) {
            if (!q.gold_spec_index) continue;
            annotated.push_back({&p, &q});
            if (p.specs.size() >= 2) negatable.push_back({&p, &q});
        }
    }
    if (n_pairs > 0 && annotated.empty()) {
        throw Error(
            "cannot build validation pairs: catalog has no annotated "
            "questions");
    }

    Rng rng(seed);
    std::ostringstream out;
    for (std::size_t i = 0; i < n_pairs; ++i) {
        const bool positive = i % 2 == 0;
        if (positive) {
            const Slot slot = annotated[rng.bounded(annotated.size())];
            const std::size_t gold = *slot.question->gold_spec_index;
            out << slot.question->text << '\t'
                << slot.product->specs[gold].text() << "\t1\n";
        } else {
            if (negatable.empty()) {
                throw Error(
                    "cannot build negative validation pairs: every product "
                    "has a single specification");
            }
            const Slot slot = negatable[rng.bounded(negatable.size())];
            const std::size_t gold = *slot.question->gold_spec_index;
            std::size_t other =
                rng.bounded(slot.product->specs.size() - 1);
            if (other >= gold) ++other;
            out << slot.question->text << '\t'
                << slot.product->specs[other].text() << "\t0\n";
        }
    }
    return out.str();
}

}  // namespace desmqa
