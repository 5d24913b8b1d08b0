#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "desmqa/corpus.hpp"
#include "desmqa/desm.hpp"
#include "desmqa/embedding.hpp"
#include "desmqa/error.hpp"
#include "desmqa/rng.hpp"

using namespace desmqa;

namespace {

// Embedding with hand-set rows. Terms are t0, t1, ... in both spaces.
DualEmbedding make_embedding(std::uint32_t dim,
                             const std::vector<std::vector<float>>& in_rows,
                             const std::vector<std::vector<float>>& out_rows) {
    std::vector<VocabEntry> entries;
    for (std::size_t i = 0; i < in_rows.size(); ++i) {
        entries.push_back({"t" + std::to_string(i), 1});
    }
    DualEmbedding e(Vocab(entries), dim);
    for (std::size_t i = 0; i < in_rows.size(); ++i) {
        std::copy(in_rows[i].begin(), in_rows[i].end(),
                  e.in_row(std::uint32_t(i)));
        std::copy(out_rows[i].begin(), out_rows[i].end(),
                  e.out_row(std::uint32_t(i)));
    }
    return e;
}

// Straight-line re-derivation of the dual score, written independently of
// the production path: original token order, naive loops, no kernels.
// Returns nullopt where production throws UnscorableError.
std::optional<double> oracle_dual(const TokenSequence& q,
                                  const TokenSequence& s,
                                  const DualEmbedding& e, DesmMode mode) {
    const std::size_t dim = e.dim();
    std::vector<double> centroid(dim, 0.0);
    std::size_t spec_used = 0;
    for (const std::string& tok : s) {
        const std::int64_t id = e.vocab().index_of(tok);
        if (id < 0) continue;
        const float* row = e.row(mode.spec_space, std::uint32_t(id));
        double norm2 = 0.0;
        for (std::size_t i = 0; i < dim; ++i)
            norm2 += double(row[i]) * double(row[i]);
        if (norm2 == 0.0) continue;
        const double norm = std::sqrt(norm2);
        for (std::size_t i = 0; i < dim; ++i) centroid[i] += double(row[i]) / norm;
        ++spec_used;
    }
    if (spec_used == 0) return std::nullopt;
    double cnorm2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        centroid[i] /= double(spec_used);
        cnorm2 += centroid[i] * centroid[i];
    }
    if (cnorm2 == 0.0) return std::nullopt;
    const double cnorm = std::sqrt(cnorm2);

    double sum = 0.0;
    std::size_t q_used = 0;
    for (const std::string& tok : q) {
        const std::int64_t id = e.vocab().index_of(tok);
        if (id < 0) continue;
        const float* row = e.row(mode.question_space, std::uint32_t(id));
        double norm2 = 0.0, num = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            norm2 += double(row[i]) * double(row[i]);
            num += double(row[i]) * centroid[i];
        }
        if (norm2 == 0.0) continue;
        sum += num / (std::sqrt(norm2) * cnorm);
        ++q_used;
    }
    if (q_used == 0) return std::nullopt;
    return sum / double(q_used);
}

const DesmMode kAllModes[] = {{Space::IN, Space::IN},
                              {Space::IN, Space::OUT},
                              {Space::OUT, Space::IN},
                              {Space::OUT, Space::OUT}};

}  // namespace

TEST_CASE("mode naming") {
    CHECK(DesmMode{} == DesmMode{Space::OUT, Space::OUT});
    CHECK(desm_mode_name(DesmMode{}) == "out-out");
    CHECK(desm_mode_name({Space::IN, Space::OUT}) == "in-out");
    for (DesmMode m : kAllModes) {
        CHECK(parse_desm_mode(desm_mode_name(m)) == m);
    }
    CHECK_THROWS_AS(parse_desm_mode("inout"), ParseError);
}

TEST_CASE("spec_centroid") {
    DualEmbedding e = make_embedding(
        2, {{3.0f, 4.0f}, {0.0f, 1.0f}, {1.0f, 0.0f}, {0.0f, 0.0f}},
        {{3.0f, 4.0f}, {0.0f, 1.0f}, {1.0f, 0.0f}, {0.0f, 0.0f}});

    SUBCASE("single token: its unit vector") {
        Centroid c = spec_centroid({"t0"}, e, Space::IN);
        CHECK(c.terms_used == 1);
        REQUIRE(c.v.size() == 2);
        CHECK(c.v[0] == doctest::Approx(0.6).epsilon(1e-15));
        CHECK(c.v[1] == doctest::Approx(0.8).epsilon(1e-15));
    }
    SUBCASE("mean of unit vectors") {
        Centroid c = spec_centroid({"t1", "t2"}, e, Space::IN);
        CHECK(c.terms_used == 2);
        CHECK(c.v == std::vector<double>{0.5, 0.5});
    }
    SUBCASE("OOV and zero-norm tokens are skipped") {
        Centroid c = spec_centroid({"zz", "t3", "t2"}, e, Space::IN);
        CHECK(c.terms_used == 1);
        CHECK(c.v == std::vector<double>{1.0, 0.0});
    }
    SUBCASE("nothing usable") {
        CHECK_THROWS_WITH_AS(spec_centroid({"zz", "t3"}, e, Space::IN),
                             doctest::Contains("unscorable specification"),
                             UnscorableError);
    }
}

TEST_CASE("dual_score hand anchors") {
    // Power-of-two coordinates keep every cosine exact in IEEE arithmetic.
    DualEmbedding e =
        make_embedding(2, {{2.0f, 0.0f}, {0.0f, 1.0f}, {1.0f, 0.0f}},
                       {{2.0f, 0.0f}, {0.0f, 1.0f}, {1.0f, 0.0f}});

    SUBCASE("self-similarity is exactly 1") {
        for (DesmMode m : kAllModes) {
            if (m.question_space != m.spec_space) continue;
            DualScore s = dual_score({"t0"}, {"t0"}, e, m);
            CHECK(s.value == 1.0);
            CHECK(s.n_question_terms_used == 1);
            CHECK(s.n_spec_terms_used == 1);
        }
    }
    SUBCASE("45-degree anchor") {
        // question vector (2,0) vs centroid of (0,1),(1,0) = (0.5,0.5)
        DualScore s = dual_score({"t0"}, {"t1", "t2"}, e,
                                 {Space::IN, Space::IN});
        CHECK(s.value == doctest::Approx(0.70710678).epsilon(1e-6));
        CHECK(s.n_spec_terms_used == 2);
    }
    SUBCASE("duplicated question tokens count per occurrence") {
        DualScore s = dual_score({"t0", "t0", "t1"}, {"t2"}, e,
                                 {Space::IN, Space::IN});
        CHECK(s.n_question_terms_used == 3);
        // (cos(t0,c) + cos(t0,c) + cos(t1,c)) / 3 with c=(1,0): (1+1+0)/3
        CHECK(s.value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("unscorable sides") {
        CHECK_THROWS_WITH_AS(dual_score({"zz"}, {"t0"}, e, DesmMode{}),
                             doctest::Contains("unscorable question"),
                             UnscorableError);
        CHECK_THROWS_WITH_AS(dual_score({"t0"}, {"zz"}, e, DesmMode{}),
                             doctest::Contains("unscorable specification"),
                             UnscorableError);
    }
}

TEST_CASE("production scorer equals the brute-force oracle") {
    Rng rng(2024);
    const std::vector<std::string> terms = {"t0", "t1", "t2", "t3", "t4",
                                            "oov"};
    int compared = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::uint32_t dim = 3;
        std::vector<std::vector<float>> in_rows(5), out_rows(5);
        for (auto& r : in_rows) {
            r.resize(dim);
            for (float& v : r) v = float(rng.uniform(-1.0, 1.0));
        }
        for (auto& r : out_rows) {
            r.resize(dim);
            for (float& v : r) v = float(rng.uniform(-1.0, 1.0));
        }
        DualEmbedding e = make_embedding(dim, in_rows, out_rows);

        const auto random_tokens = [&] {
            TokenSequence t;
            const std::size_t len = 1 + rng.bounded(3);
            for (std::size_t i = 0; i < len; ++i) {
                t.push_back(terms[rng.bounded(terms.size())]);
            }
            return t;
        };
        const TokenSequence q = random_tokens();
        const TokenSequence s = random_tokens();
        const DesmMode mode = kAllModes[rng.bounded(4)];

        const std::optional<double> expected = oracle_dual(q, s, e, mode);
        if (!expected) {
            CHECK_THROWS_AS(dual_score(q, s, e, mode), UnscorableError);
            continue;
        }
        DualScore got = dual_score(q, s, e, mode);
        CHECK(std::abs(got.value - *expected) <= 1e-9);
        ++compared;
    }
    CHECK(compared > 100);  // most random draws must be scorable
}

TEST_CASE("score range and invariances on random instances") {
    Rng rng(5150);
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint32_t dim = 4;
        std::vector<std::vector<float>> in_rows(6), out_rows(6);
        for (auto& r : in_rows) {
            r.resize(dim);
            for (float& v : r) v = float(rng.uniform(-1.0, 1.0));
        }
        for (auto& r : out_rows) {
            r.resize(dim);
            for (float& v : r) v = float(rng.uniform(-1.0, 1.0));
        }
        DualEmbedding e = make_embedding(dim, in_rows, out_rows);

        TokenSequence q, s;
        for (std::size_t i = 0, n = 1 + rng.bounded(4); i < n; ++i)
            q.push_back("t" + std::to_string(rng.bounded(6)));
        for (std::size_t i = 0, n = 1 + rng.bounded(4); i < n; ++i)
            s.push_back("t" + std::to_string(rng.bounded(6)));
        const DesmMode mode = kAllModes[rng.bounded(4)];

        DualScore base = dual_score(q, s, e, mode);
        CHECK(base.value >= -1.0);
        CHECK(base.value <= 1.0);

        // Permutation invariance, bit-exact.
        TokenSequence q2 = q, s2 = s;
        std::reverse(q2.begin(), q2.end());
        std::reverse(s2.begin(), s2.end());
        for (std::size_t i = 1; i < q2.size(); ++i) {
            std::swap(q2[i - 1], q2[rng.bounded(i + 1)]);
        }
        DualScore shuffled = dual_score(q2, s2, e, mode);
        CHECK(std::memcmp(&base.value, &shuffled.value, sizeof(double)) == 0);

        // Scale invariance. Powers of two rescale f32 rows exactly, so the
        // cosines reproduce bit-for-bit; an inexact scale stays within the
        // rounding of the rescaled rows.
        for (float c : {0.5f, 4.0f}) {
            std::vector<std::vector<float>> in2 = in_rows, out2 = out_rows;
            for (auto& r : in2)
                for (float& v : r) v *= c;
            for (auto& r : out2)
                for (float& v : r) v *= c;
            DualScore scaled =
                dual_score(q, s, make_embedding(dim, in2, out2), mode);
            CHECK(std::abs(scaled.value - base.value) <= 1e-9);
        }
        {
            std::vector<std::vector<float>> in2 = in_rows, out2 = out_rows;
            for (auto& r : in2)
                for (float& v : r) v *= 3.0f;
            for (auto& r : out2)
                for (float& v : r) v *= 3.0f;
            DualScore scaled =
                dual_score(q, s, make_embedding(dim, in2, out2), mode);
            CHECK(std::abs(scaled.value - base.value) <= 1e-6);
        }
    }
}

TEST_CASE("score_all") {
    DualEmbedding e =
        make_embedding(2, {{1.0f, 0.0f}, {0.0f, 1.0f}, {1.0f, 1.0f}},
                       {{1.0f, 0.0f}, {0.0f, 1.0f}, {1.0f, 1.0f}});
    Product product;
    product.product_id = "p1";
    product.specs = {{"t0", "t1", 0}, {"t2", "t2", 1}, {"mystery", "brand", 2}};
    Question question;
    question.question_id = "q1";
    question.tokens = {"t0", "t1"};

    SUBCASE("one entry per spec, in index order") {
        auto scores = score_all(question, product, e, DesmMode{});
        REQUIRE(scores.size() == 3);
        CHECK(scores[0].has_value());
        CHECK(scores[1].has_value());
        CHECK_FALSE(scores[2].has_value());  // entirely OOV spec
    }
    SUBCASE("unscorable question is one error for the whole call") {
        question.tokens = {"mystery"};
        CHECK_THROWS_WITH_AS(score_all(question, product, e, DesmMode{}),
                             doctest::Contains("q1"), UnscorableError);
    }
    SUBCASE("no specs is a caller bug") {
        product.specs.clear();
        CHECK_THROWS_AS(score_all(question, product, e, DesmMode{}), Error);
    }
}
