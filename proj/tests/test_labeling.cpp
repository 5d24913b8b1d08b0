#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>
#include <string>
#include <vector>

#include "desmqa/corpus.hpp"
#include "desmqa/desm.hpp"
#include "desmqa/embedding.hpp"
#include "desmqa/error.hpp"
#include "desmqa/labeling.hpp"
#include "desmqa/rng.hpp"

using namespace desmqa;

namespace {

constexpr DesmMode kOutOut{Space::OUT, Space::OUT};

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name)
        : path("/tmp/desmqa_labeling_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    REQUIRE(bool(out));
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(bool(in));
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

// Embedding whose terms are a probe "q" at (1,0) plus "s0", "s1", ... at
// chosen cosines to it, identically in both spaces. The out-out dual score
// of ({"q"}, {"si"}) is cosines[i] up to f32 storage rounding (~1e-7).
DualEmbedding cosine_embedding(const std::vector<double>& cosines) {
    std::vector<VocabEntry> entries{{"q", 1}};
    for (std::size_t i = 0; i < cosines.size(); ++i) {
        entries.push_back({"s" + std::to_string(i), 1});
    }
    DualEmbedding e(Vocab(entries), 2);
    const auto set_row = [&e](std::uint32_t id, float x, float y) {
        e.in_row(id)[0] = x;
        e.in_row(id)[1] = y;
        e.out_row(id)[0] = x;
        e.out_row(id)[1] = y;
    };
    set_row(0, 1.0f, 0.0f);
    for (std::size_t i = 0; i < cosines.size(); ++i) {
        const double c = cosines[i];
        set_row(std::uint32_t(i + 1), float(c),
                float(std::sqrt(std::max(0.0, 1.0 - c * c))));
    }
    return e;
}

std::vector<ValidationPair> single_token_pairs(
    const std::vector<bool>& relevant) {
    std::vector<ValidationPair> pairs;
    for (std::size_t i = 0; i < relevant.size(); ++i) {
        pairs.push_back({{"q"}, {"s" + std::to_string(i)}, relevant[i]});
    }
    return pairs;
}

// Independent maximizer over the same grid definition: computes every
// accuracy by direct counting and scans for the smallest argmax. Shares
// only the candidate formula theta_i = lo + i*step with production.
std::pair<double, double> oracle_grid_max(const std::vector<double>& scores,
                                          const std::vector<bool>& labels,
                                          const SweepGrid& grid) {
    const std::size_t n_points =
        std::size_t(std::floor((grid.hi - grid.lo) / grid.step + 1e-9)) + 1;
    double best_theta = 0.0;
    double best_acc = -1.0;
    for (std::size_t i = 0; i < n_points; ++i) {
        const double theta = grid.lo + double(i) * grid.step;
        std::size_t correct = 0;
        for (std::size_t p = 0; p < scores.size(); ++p) {
            const bool predicted = scores[p] >= theta;
            if (predicted == labels[p]) ++correct;
        }
        const double acc = double(correct) / double(scores.size());
        if (acc > best_acc) {
            best_acc = acc;
            best_theta = theta;
        }
    }
    return {best_theta, best_acc};
}

// A product whose three specs sit at distinct angles from the two question
// probe terms, all in-vocabulary.
ProductCatalog tiny_catalog(const DualEmbedding& /*e*/) {
    ProductCatalog catalog;
    Product p;
    p.product_id = "p1";
    p.vertical = "demo";
    p.specs = {{"s0", "s1", 0}, {"s2", "s3", 1}, {"s4", "s4", 2}};
    Question q1;
    q1.question_id = "q1";
    q1.text = "q";
    q1.tokens = {"q"};
    Question q2;
    q2.question_id = "q2";
    q2.text = "q q";
    q2.tokens = {"q", "q"};
    p.questions = {q1, q2};
    catalog.products.push_back(p);
    return catalog;
}

LabeledPair make_pair(const std::string& pid, const std::string& qid,
                      std::size_t idx, double score, bool positive) {
    LabeledPair p;
    p.product_id = pid;
    p.question_id = qid;
    p.spec_index = idx;
    p.spec_text = "key value " + std::to_string(idx);
    p.question_text = "question " + qid;
    p.score = score;
    p.positive = positive;
    return p;
}

}  // namespace

TEST_CASE("validation TSV loading") {
    const DualEmbedding e = cosine_embedding({0.8, 0.1});

    SUBCASE("comments, blank lines and CR are tolerated") {
        TempFile f("validation_ok.tsv");
        write_file(f.path,
                   "# header comment\n"
                   "\n"
                   "Q	s0	1\r\n"
                   "q	s1	0\n");
        const ValidationLoadResult loaded =
            load_validation_tsv(f.path, e, kOutOut);
        REQUIRE(loaded.pairs.size() == 2);
        CHECK(loaded.rejected_unscorable == 0);
        CHECK(loaded.pairs[0].question_tokens == TokenSequence{"q"});
        CHECK(loaded.pairs[0].spec_tokens == TokenSequence{"s0"});
        CHECK(loaded.pairs[0].relevant);
        CHECK_FALSE(loaded.pairs[1].relevant);
    }

    SUBCASE("unscorable pairs are rejected and counted") {
        TempFile f("validation_unscorable.tsv");
        write_file(f.path,
                   "q	s0	1\n"
                   "q	missing-term	1\n"   // spec side out of vocabulary
                   "missing-term	s0	0\n"  // question side oov
                   "!!!	s0	0\n");            // normalizes to nothing
        const ValidationLoadResult loaded =
            load_validation_tsv(f.path, e, kOutOut);
        CHECK(loaded.pairs.size() == 1);
        CHECK(loaded.rejected_unscorable == 3);
    }

    SUBCASE("column count errors cite the line") {
        TempFile f("validation_cols.tsv");
        write_file(f.path, "q	s0	1\nq	s0\n");
        CHECK_THROWS_WITH_AS(load_validation_tsv(f.path, e, kOutOut),
                             doctest::Contains("line 2"), ParseError);
    }

    SUBCASE("labels must be 1 or 0") {
        TempFile f("validation_label.tsv");
        write_file(f.path, "q	s0	yes\n");
        CHECK_THROWS_WITH_AS(load_validation_tsv(f.path, e, kOutOut),
                             doctest::Contains("label must be 1 or 0"),
                             ParseError);
    }

    SUBCASE("missing file") {
        CHECK_THROWS_AS(
            load_validation_tsv("/tmp/desmqa_no_such_file.tsv", e, kOutOut),
            Error);
    }
}

TEST_CASE("threshold sweep: separable scores put theta at the first grid "
          "point above the negatives") {
    // Relevant pairs score >= 0.6, irrelevant <= 0.2. Accuracy hits 1.0 on
    // every grid point in (0.2, 0.6] and the smallest one wins: with a 0.01
    // step from 0 that is the 21st point, 0.21.
    const DualEmbedding e =
        cosine_embedding({0.6, 0.75, 0.9, 0.2, 0.1, 0.05});
    const std::vector<ValidationPair> pairs =
        single_token_pairs({true, true, true, false, false, false});
    const ThresholdReport report =
        sweep_threshold(pairs, e, kOutOut, {0.0, 1.0, 0.01});

    CHECK(report.accuracy_at_theta_star == 1.0);
    CHECK(report.theta_star == 0.0 + 21 * 0.01);
    CHECK(report.theta_star == doctest::Approx(0.21).epsilon(1e-12));
    CHECK(report.sweep_table.size() == 101);

    // The sweep table is ascending in theta and the reported accuracy is
    // its maximum.
    double max_acc = 0.0;
    for (std::size_t i = 0; i < report.sweep_table.size(); ++i) {
        if (i > 0) {
            CHECK(report.sweep_table[i].first >
                  report.sweep_table[i - 1].first);
        }
        max_acc = std::max(max_acc, report.sweep_table[i].second);
    }
    CHECK(report.accuracy_at_theta_star == max_acc);
}

TEST_CASE("threshold sweep: ties break to the smallest theta") {
    // One relevant pair scoring ~0.5: every theta <= 0.5 classifies it
    // correctly, so accuracy 1.0 is attained from the very first grid point.
    const DualEmbedding e = cosine_embedding({0.5});
    const std::vector<ValidationPair> pairs = single_token_pairs({true});
    const ThresholdReport report =
        sweep_threshold(pairs, e, kOutOut, {0.0, 1.0, 0.25});
    CHECK(report.theta_star == 0.0);
    CHECK(report.accuracy_at_theta_star == 1.0);
    CHECK(report.sweep_table.size() == 5);
}

TEST_CASE("threshold sweep: errors") {
    const DualEmbedding e = cosine_embedding({0.5});
    const std::vector<ValidationPair> pairs = single_token_pairs({true});
    CHECK_THROWS_WITH_AS(sweep_threshold({}, e, kOutOut, {0.0, 1.0, 0.1}),
                         doctest::Contains("empty validation set"), Error);
    CHECK_THROWS_WITH_AS(sweep_threshold(pairs, e, kOutOut, {1.0, 0.0, 0.1}),
                         doctest::Contains("degenerate sweep grid"),
                         ParseError);
    CHECK_THROWS_WITH_AS(sweep_threshold(pairs, e, kOutOut, {0.0, 1.0, 0.0}),
                         doctest::Contains("degenerate sweep grid"),
                         ParseError);
    CHECK_THROWS_AS(sweep_threshold_midpoints({}, e, kOutOut), Error);
}

TEST_CASE("threshold sweep equals an independent grid maximizer on random "
          "validation sets") {
    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 3 + rng.bounded(12);
        std::vector<double> cosines(n);
        std::vector<bool> relevant(n);
        for (std::size_t i = 0; i < n; ++i) {
            cosines[i] = rng.uniform(-1.0, 1.0);
            relevant[i] = rng.bounded(2) == 1;
        }
        const DualEmbedding e = cosine_embedding(cosines);
        const std::vector<ValidationPair> pairs =
            single_token_pairs(relevant);

        SweepGrid grid;
        grid.lo = rng.uniform(-1.0, -0.2);
        grid.hi = rng.uniform(0.2, 1.0);
        grid.step = rng.uniform(0.005, 0.3);

        // Scores as production computes them; selection re-derived by hand.
        std::vector<double> scores;
        std::vector<bool> labels;
        for (const ValidationPair& p : pairs) {
            scores.push_back(
                dual_score(p.question_tokens, p.spec_tokens, e, kOutOut)
                    .value);
            labels.push_back(p.relevant);
        }
        const auto [oracle_theta, oracle_acc] =
            oracle_grid_max(scores, labels, grid);

        const ThresholdReport report =
            sweep_threshold(pairs, e, kOutOut, grid);
        CHECK(report.theta_star == oracle_theta);
        CHECK(report.accuracy_at_theta_star == oracle_acc);
    }
}

TEST_CASE("sweep accuracy is a step function: constant between grid points "
          "that no score crosses") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 4 + rng.bounded(8);
        std::vector<double> cosines(n);
        std::vector<bool> relevant(n);
        for (std::size_t i = 0; i < n; ++i) {
            cosines[i] = rng.uniform(-0.9, 0.9);
            relevant[i] = rng.bounded(2) == 1;
        }
        const DualEmbedding e = cosine_embedding(cosines);
        const std::vector<ValidationPair> pairs =
            single_token_pairs(relevant);
        std::vector<double> scores;
        for (const ValidationPair& p : pairs) {
            scores.push_back(
                dual_score(p.question_tokens, p.spec_tokens, e, kOutOut)
                    .value);
        }

        const ThresholdReport report =
            sweep_threshold(pairs, e, kOutOut, {-1.0, 1.0, 0.05});
        for (std::size_t i = 1; i < report.sweep_table.size(); ++i) {
            const double prev = report.sweep_table[i - 1].first;
            const double next = report.sweep_table[i].first;
            // predictions flip for scores s with prev <= s < next
            const bool crossed = std::any_of(
                scores.begin(), scores.end(),
                [&](double s) { return s >= prev && s < next; });
            if (!crossed) {
                CHECK(report.sweep_table[i].second ==
                      report.sweep_table[i - 1].second);
            }
        }
    }
}

TEST_CASE("midpoint sweep finds the true optimum of the step function") {
    Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 3 + rng.bounded(10);
        std::vector<double> cosines(n);
        std::vector<bool> relevant(n);
        for (std::size_t i = 0; i < n; ++i) {
            cosines[i] = rng.uniform(-1.0, 1.0);
            relevant[i] = rng.bounded(2) == 1;
        }
        const DualEmbedding e = cosine_embedding(cosines);
        const std::vector<ValidationPair> pairs =
            single_token_pairs(relevant);
        const ThresholdReport midpoint =
            sweep_threshold_midpoints(pairs, e, kOutOut);

        // No threshold of any kind can beat it: check against every
        // classification the data admits, via thresholds between scores.
        std::vector<double> scores;
        std::vector<bool> labels;
        for (const ValidationPair& p : pairs) {
            scores.push_back(
                dual_score(p.question_tokens, p.spec_tokens, e, kOutOut)
                    .value);
            labels.push_back(p.relevant);
        }
        std::vector<double> sorted = scores;
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> candidates{sorted.front() - 0.5};
        for (double s : sorted) candidates.push_back(s);  // boundary == hit
        candidates.push_back(sorted.back() + 0.5);
        for (double theta : candidates) {
            std::size_t correct = 0;
            for (std::size_t i = 0; i < scores.size(); ++i) {
                if ((scores[i] >= theta) == labels[i]) ++correct;
            }
            CHECK(midpoint.accuracy_at_theta_star >=
                  double(correct) / double(scores.size()));
        }
    }

    SUBCASE("separable set reaches accuracy 1 between the classes") {
        const DualEmbedding e = cosine_embedding({0.6, 0.9, 0.2, 0.1});
        const std::vector<ValidationPair> pairs =
            single_token_pairs({true, true, false, false});
        const ThresholdReport report =
            sweep_threshold_midpoints(pairs, e, kOutOut);
        CHECK(report.accuracy_at_theta_star == 1.0);
        CHECK(report.theta_star > 0.2);
        CHECK(report.theta_star <= 0.6);
    }
}

TEST_CASE("label_corpus crosses questions with own-product specs") {
    const DualEmbedding e = cosine_embedding({0.9, 0.5, 0.1, 0.3, 0.2});
    const ProductCatalog catalog = tiny_catalog(e);

    LabelingSummary summary;
    const std::vector<LabeledPair> pairs =
        label_corpus(catalog, e, kOutOut, 0.4, 1, &summary);

    // 2 questions x 3 specs
    REQUIRE(pairs.size() == 6);
    CHECK(summary.emitted == 6);
    CHECK(summary.skipped_unscorable == 0);
    CHECK(summary.positives + summary.negatives == 6);

    // Canonical order: (product_id, question_id, spec_index).
    for (std::size_t i = 1; i < pairs.size(); ++i) {
        CHECK(std::tie(pairs[i - 1].product_id, pairs[i - 1].question_id,
                       pairs[i - 1].spec_index) <
              std::tie(pairs[i].product_id, pairs[i].question_id,
                       pairs[i].spec_index));
    }

    // Stored text matches the catalog so the score can be re-verified.
    CHECK(pairs[0].spec_text == "s0 s1");
    CHECK(pairs[0].question_text == "q");

    // Identical question tokens ("q" vs "q q") produce identical scores.
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(pairs[j].score == pairs[3 + j].score);
    }
}

TEST_CASE("labeling boundary is score >= theta") {
    const DualEmbedding e = cosine_embedding({0.34});
    const ProductCatalog catalog = [] {
        ProductCatalog c;
        Product p;
        p.product_id = "p";
        p.specs = {{"s0", "s0", 0}};
        Question q;
        q.question_id = "q";
        q.text = "q";
        q.tokens = {"q"};
        p.questions = {q};
        c.products.push_back(p);
        return c;
    }();

    const double score =
        dual_score({"q"}, {"s0", "s0"}, e, kOutOut).value;

    SUBCASE("theta exactly at the score labels positive") {
        const auto pairs = label_corpus(catalog, e, kOutOut, score);
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0].positive);
    }
    SUBCASE("theta one ulp above the score labels negative") {
        const double above =
            std::nextafter(score, std::numeric_limits<double>::infinity());
        const auto pairs = label_corpus(catalog, e, kOutOut, above);
        REQUIRE(pairs.size() == 1);
        CHECK_FALSE(pairs[0].positive);
    }
    SUBCASE("non-finite theta is rejected") {
        CHECK_THROWS_WITH_AS(
            label_corpus(catalog, e, kOutOut,
                         std::numeric_limits<double>::quiet_NaN()),
            doctest::Contains("theta must be finite"), ParseError);
    }
}

TEST_CASE("label_corpus skips unscorable pairs with a count") {
    const DualEmbedding e = cosine_embedding({0.9});
    ProductCatalog catalog;
    Product p;
    p.product_id = "p";
    p.specs = {{"s0", "s0", 0}, {"ghost", "ghost", 1}};  // spec 1 is oov
    Question ok;
    ok.question_id = "a-ok";
    ok.text = "q";
    ok.tokens = {"q"};
    Question oov;
    oov.question_id = "b-oov";
    oov.text = "ghost";
    oov.tokens = {"ghost"};  // unscorable question: skips both specs
    p.questions = {ok, oov};
    catalog.products.push_back(p);

    LabelingSummary summary;
    const auto pairs = label_corpus(catalog, e, kOutOut, 0.0, 1, &summary);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].question_id == "a-ok");
    CHECK(pairs[0].spec_index == 0);
    CHECK(summary.emitted == 1);
    CHECK(summary.skipped_unscorable == 3);
}

TEST_CASE("label_corpus emission order does not depend on thread count") {
    Rng rng(11);
    std::vector<double> cosines(8);
    for (double& c : cosines) c = rng.uniform(-1.0, 1.0);
    const DualEmbedding e = cosine_embedding(cosines);

    ProductCatalog catalog;
    for (int pi = 9; pi >= 0; --pi) {  // ids arrive unsorted
        Product p;
        p.product_id = "prod-" + std::to_string(pi);
        for (std::size_t si = 0; si < 4; ++si) {
            p.specs.push_back({"s" + std::to_string((pi + int(si)) % 8), "s0",
                               si});
        }
        for (int qi = 0; qi < 3; ++qi) {
            Question q;
            q.question_id = "q" + std::to_string(qi);
            q.text = "q";
            q.tokens = {"q"};
            p.questions.push_back(q);
        }
        catalog.products.push_back(p);
    }

    LabelingSummary s1, s8;
    const auto one = label_corpus(catalog, e, kOutOut, 0.1, 1, &s1);
    const auto eight = label_corpus(catalog, e, kOutOut, 0.1, 8, &s8);
    CHECK(one == eight);
    CHECK(s1.emitted == s8.emitted);
    CHECK(s1.positives == s8.positives);
    CHECK(s1.skipped_unscorable == s8.skipped_unscorable);
}

TEST_CASE("balance: equal classes, uniform sample without replacement") {
    std::vector<LabeledPair> pairs;
    for (int i = 0; i < 10; ++i) {
        pairs.push_back(
            make_pair("p", "pos", std::size_t(i), 0.9, true));
    }
    for (int i = 0; i < 100; ++i) {
        pairs.push_back(
            make_pair("p", "neg", std::size_t(i), 0.1, false));
    }

    const std::vector<LabeledPair> balanced = balance(pairs, 42);
    REQUIRE(balanced.size() == 20);
    const std::size_t positives = std::size_t(std::count_if(
        balanced.begin(), balanced.end(),
        [](const LabeledPair& p) { return p.positive; }));
    CHECK(positives == 10);

    // Every positive survives; sampled negatives are distinct members of
    // the original negative pool.
    std::set<std::size_t> neg_indices;
    for (const LabeledPair& p : balanced) {
        if (p.positive) {
            CHECK(p.question_id == "pos");
        } else {
            CHECK(p.question_id == "neg");
            CHECK(p.spec_index < 100);
            CHECK(neg_indices.insert(p.spec_index).second);
        }
    }

    SUBCASE("deterministic under seed") {
        CHECK(balance(pairs, 42) == balanced);
        const auto other = balance(pairs, 43);
        CHECK(other.size() == balanced.size());
        CHECK(other != balanced);  // 10-of-100 collision is ~1e-13 likely
    }

    SUBCASE("output is canonically ordered") {
        for (std::size_t i = 1; i < balanced.size(); ++i) {
            CHECK(std::tie(balanced[i - 1].product_id,
                           balanced[i - 1].question_id,
                           balanced[i - 1].spec_index) <
                  std::tie(balanced[i].product_id, balanced[i].question_id,
                           balanced[i].spec_index));
        }
    }
}

TEST_CASE("balance: error cases") {
    std::vector<LabeledPair> pairs;
    for (int i = 0; i < 10; ++i) {
        pairs.push_back(make_pair("p", "pos", std::size_t(i), 0.9, true));
    }
    for (int i = 0; i < 5; ++i) {
        pairs.push_back(make_pair("p", "neg", std::size_t(i), 0.1, false));
    }
    CHECK_THROWS_WITH_AS(balance(pairs, 1),
                         doctest::Contains("5 negatives < 10 positives"),
                         Error);

    std::vector<LabeledPair> no_positives;
    no_positives.push_back(make_pair("p", "neg", 0, 0.1, false));
    CHECK_THROWS_WITH_AS(balance(no_positives, 1),
                         doctest::Contains("no positive pairs"), Error);
}

TEST_CASE("labeled TSV round-trips") {
    const DualEmbedding e = cosine_embedding({0.9, 0.5, 0.1, 0.3, 0.2});
    const ProductCatalog catalog = tiny_catalog(e);
    const double theta = 0.4;
    const std::vector<LabeledPair> pairs =
        label_corpus(catalog, e, kOutOut, theta);

    TempFile f("labeled.tsv");

    SUBCASE("read(write(pairs)) preserves everything but score precision") {
        write_labeled_tsv(pairs, f.path, {"config deadbeef", "theta 0.4"});
        const std::vector<LabeledPair> loaded = read_labeled_tsv(f.path);
        REQUIRE(loaded.size() == pairs.size());
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            CHECK(loaded[i].product_id == pairs[i].product_id);
            CHECK(loaded[i].question_id == pairs[i].question_id);
            CHECK(loaded[i].spec_index == pairs[i].spec_index);
            CHECK(loaded[i].spec_text == pairs[i].spec_text);
            CHECK(loaded[i].question_text == pairs[i].question_text);
            CHECK(loaded[i].positive == pairs[i].positive);
            CHECK(std::abs(loaded[i].score - pairs[i].score) <= 5e-10);
        }
    }

    SUBCASE("re-emission is byte-identical") {
        write_labeled_tsv(pairs, f.path);
        const std::string first = read_file(f.path);
        TempFile g("labeled_again.tsv");
        write_labeled_tsv(read_labeled_tsv(f.path), g.path);
        CHECK(read_file(g.path) == first);
    }

    SUBCASE("stored scores re-verify against re-computation within 1e-9") {
        write_labeled_tsv(pairs, f.path);
        const Product& product = catalog.products.front();
        for (const LabeledPair& p : read_labeled_tsv(f.path)) {
            const double recomputed =
                dual_score(normalize(p.question_text),
                           normalize(p.spec_text), e, kOutOut)
                    .value;
            CHECK(std::abs(recomputed - p.score) <= 1e-9);
            CHECK(p.positive == (p.score >= theta));
            CHECK(p.spec_text == product.specs[p.spec_index].text());
        }
    }

    SUBCASE("tabs and newlines in text flatten to spaces") {
        std::vector<LabeledPair> dirty{
            make_pair("p", "q", 0, 0.5, true)};
        dirty[0].question_text = "what\tsize\nis it";
        write_labeled_tsv(dirty, f.path);
        const auto loaded = read_labeled_tsv(f.path);
        REQUIRE(loaded.size() == 1);
        CHECK(loaded[0].question_text == "what size is it");
        CHECK(normalize(loaded[0].question_text) ==
              normalize(dirty[0].question_text));
    }

    SUBCASE("malformed rows are rejected with a line number") {
        write_file(f.path, "p\tq\t0\tspec\tquestion\t0.5\n");  // 6 columns
        CHECK_THROWS_WITH_AS(read_labeled_tsv(f.path),
                             doctest::Contains("expected 7"), ParseError);
        write_file(f.path, "p\tq\t1.5\tspec\tquestion\t0.5\t1\n");
        CHECK_THROWS_WITH_AS(read_labeled_tsv(f.path),
                             doctest::Contains("malformed index"),
                             ParseError);
        write_file(f.path, "p\tq\t0\tspec\tquestion\tbanana\t1\n");
        CHECK_THROWS_WITH_AS(read_labeled_tsv(f.path),
                             doctest::Contains("malformed number"),
                             ParseError);
    }
}

TEST_CASE("threshold report TSV round-trips") {
    const DualEmbedding e = cosine_embedding({0.6, 0.75, 0.9, 0.2, 0.1});
    const std::vector<ValidationPair> pairs =
        single_token_pairs({true, true, true, false, false});
    const ThresholdReport report =
        sweep_threshold(pairs, e, kOutOut, {-0.5, 0.95, 0.05});

    TempFile f("threshold.tsv");
    write_threshold_report_tsv(report, f.path, {"mode out-out"});
    const ThresholdReport loaded = read_threshold_report_tsv(f.path);

    CHECK(std::abs(loaded.theta_star - report.theta_star) <= 5e-10);
    CHECK(std::abs(loaded.accuracy_at_theta_star -
                   report.accuracy_at_theta_star) <= 5e-10);
    REQUIRE(loaded.sweep_table.size() == report.sweep_table.size());
    for (std::size_t i = 0; i < loaded.sweep_table.size(); ++i) {
        CHECK(std::abs(loaded.sweep_table[i].first -
                       report.sweep_table[i].first) <= 5e-10);
        CHECK(std::abs(loaded.sweep_table[i].second -
                       report.sweep_table[i].second) <= 5e-10);
    }

    SUBCASE("missing headers are rejected") {
        write_file(f.path, "0.1\t0.5\n");
        CHECK_THROWS_WITH_AS(read_threshold_report_tsv(f.path),
                             doctest::Contains("missing theta_star"),
                             ParseError);
    }
}
