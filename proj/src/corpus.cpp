#include "desmqa/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "desmqa/error.hpp"

namespace desmqa {

namespace {

bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

bool is_ascii_alnum(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           is_ascii_digit(c);
}

char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string line_ref(const std::string& path, std::size_t line_no) {
    return path + ": line " + std::to_string(line_no);
}

}  // namespace

TokenSequence normalize(const std::string& text) {
    TokenSequence tokens;
    std::string cur;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (is_ascii_alnum(c)) {
            cur.push_back(ascii_lower(c));
        } else if (c == '.' && i > 0 && i + 1 < text.size() &&
                   is_ascii_digit(text[i - 1]) && is_ascii_digit(text[i + 1])) {
            // keep decimal points inside numbers ("15.4")
            cur.push_back('.');
        } else {
            if (!cur.empty()) tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::string join_tokens(const TokenSequence& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

const char* answer_type_name(AnswerType t) {
    switch (t) {
        case AnswerType::Numerical:
            return "Numerical";
        case AnswerType::YesNo:
            return "YesNo";
        case AnswerType::Other:
            return "Other";
    }
    return "?";
}

AnswerType classify_answer_type(const TokenSequence& tokens,
                                const ClassifierConfig& cfg) {
    if (tokens.empty())
        throw Error("unclassifiable: empty token sequence");

    const auto contains = [](const std::vector<std::string>& v,
                             const std::string& t) {
        return std::find(v.begin(), v.end(), t) != v.end();
    };

    if (contains(cfg.yesno_leads, tokens.front())) return AnswerType::YesNo;

    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (tokens[i] == "how" &&
            (tokens[i + 1] == "many" || tokens[i + 1] == "much"))
            return AnswerType::Numerical;
    }
    for (std::size_t i = 0; i + 3 < tokens.size(); ++i) {
        if (tokens[i] == "what" && tokens[i + 1] == "is" &&
            tokens[i + 2] == "the" && contains(cfg.unit_lexicon, tokens[i + 3]))
            return AnswerType::Numerical;
    }
    return AnswerType::Other;
}

const Product* ProductCatalog::find(const std::string& product_id) const {
    for (const Product& p : products)
        if (p.product_id == product_id) return &p;
    return nullptr;
}

std::size_t ProductCatalog::question_count() const {
    std::size_t n = 0;
    for (const Product& p : products) n += p.questions.size();
    return n;
}

namespace {

Question make_question(std::string id, std::string text,
                       std::optional<std::size_t> gold,
                       const ClassifierConfig& cfg) {
    Question q;
    q.question_id = std::move(id);
    q.text = std::move(text);
    q.tokens = normalize(q.text);
    q.gold_spec_index = gold;
    q.answer_type = q.tokens.empty() ? AnswerType::Other
                                     : classify_answer_type(q.tokens, cfg);
    return q;
}

Product parse_product_json(const nlohmann::json& j, const std::string& where,
                           const ClassifierConfig& cfg) {
    if (!j.is_object())
        throw ParseError(where + ": malformed record: not a JSON object");

    Product p;
    try {
        p.product_id = j.at("product_id").get<std::string>();
        p.vertical = j.value("vertical", std::string());
        if (j.contains("specs")) {
            for (const auto& js : j.at("specs")) {
                Specification s;
                s.key = js.at("key").get<std::string>();
                s.value = js.at("value").get<std::string>();
                s.index = p.specs.size();
                if (normalize(s.key).empty())
                    throw ParseError(where + ": empty specification key at index " +
                                     std::to_string(s.index));
                p.specs.push_back(std::move(s));
            }
        }
        if (j.contains("questions")) {
            for (const auto& jq : j.at("questions")) {
                std::optional<std::size_t> gold;
                if (jq.contains("gold_spec_index") &&
                    !jq.at("gold_spec_index").is_null()) {
                    long long raw = jq.at("gold_spec_index").get<long long>();
                    if (raw < 0 ||
                        static_cast<std::size_t>(raw) >= p.specs.size())
                        throw ParseError(
                            where + ": gold index out of range: question \"" +
                            jq.value("question_id", std::string("?")) +
                            "\" gold_spec_index=" + std::to_string(raw) +
                            " but product has " +
                            std::to_string(p.specs.size()) + " specs");
                    gold = static_cast<std::size_t>(raw);
                }
                p.questions.push_back(
                    make_question(jq.at("question_id").get<std::string>(),
                                  jq.at("text").get<std::string>(), gold, cfg));
            }
        }
    } catch (const ParseError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(where + ": malformed record: " + e.what());
    }
    return p;
}

ProductCatalog ingest_jsonl(const std::string& path,
                            const ClassifierConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open catalog file: " + path);

    ProductCatalog catalog;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_ref(path, line_no) +
                             ": malformed record: " + e.what());
        }
        Product p = parse_product_json(j, line_ref(path, line_no), cfg);
        if (!seen_ids.insert(p.product_id).second)
            throw ParseError(line_ref(path, line_no) +
                             ": duplicate product_id \"" + p.product_id + "\"");
        catalog.products.push_back(std::move(p));
    }
    return catalog;
}

ProductCatalog ingest_questions_tsv(const std::string& path,
                                    const ClassifierConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open question file: " + path);

    ProductCatalog catalog;
    std::unordered_map<std::string, std::size_t> product_slot;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cols;
        std::size_t start = 0;
        while (true) {
            std::size_t tab = line.find('\t', start);
            cols.push_back(line.substr(
                start, tab == std::string::npos ? tab : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (cols.size() != 4)
            throw ParseError(line_ref(path, line_no) +
                             ": malformed record: expected 4 tab-separated "
                             "columns, got " +
                             std::to_string(cols.size()));
        std::optional<std::size_t> gold;
        if (!cols[3].empty()) {
            try {
                long long raw = std::stoll(cols[3]);
                if (raw < 0) throw std::out_of_range("negative");
                gold = static_cast<std::size_t>(raw);
            } catch (const std::exception&) {
                throw ParseError(line_ref(path, line_no) +
                                 ": malformed record: bad gold_spec_index \"" +
                                 cols[3] + "\"");
            }
        }
        auto [it, inserted] =
            product_slot.try_emplace(cols[0], catalog.products.size());
        if (inserted) {
            Product p;
            p.product_id = cols[0];
            catalog.products.push_back(std::move(p));
        }
        catalog.products[it->second].questions.push_back(
            make_question(cols[1], cols[2], gold, cfg));
    }
    return catalog;
}

}  // namespace

ProductCatalog ingest_catalog(const std::string& path, CatalogFormat format,
                              const ClassifierConfig& cfg) {
    switch (format) {
        case CatalogFormat::jsonl:
            return ingest_jsonl(path, cfg);
        case CatalogFormat::tsv:
            return ingest_questions_tsv(path, cfg);
    }
    throw ParseError("unknown catalog format");
}

void merge_questions(ProductCatalog& base, const ProductCatalog& extra) {
    std::unordered_map<std::string, Product*> by_id;
    for (Product& p : base.products) by_id[p.product_id] = &p;

    for (const Product& src : extra.products) {
        auto it = by_id.find(src.product_id);
        if (it == by_id.end())
            throw ParseError("unknown product_id \"" + src.product_id +
                             "\" in question set");
        Product& dst = *it->second;
        for (const Question& q : src.questions) {
            if (q.gold_spec_index && *q.gold_spec_index >= dst.specs.size())
                throw ParseError(
                    "gold index out of range: question \"" + q.question_id +
                    "\" gold_spec_index=" + std::to_string(*q.gold_spec_index) +
                    " but product \"" + dst.product_id + "\" has " +
                    std::to_string(dst.specs.size()) + " specs");
            dst.questions.push_back(q);
        }
    }
}

void write_catalog_jsonl(const ProductCatalog& catalog,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write catalog file: " + path);
    for (const Product& p : catalog.products) {
        nlohmann::json j;
        j["product_id"] = p.product_id;
        j["vertical"] = p.vertical;
        auto& specs = j["specs"] = nlohmann::json::array();
        for (const Specification& s : p.specs)
            specs.push_back({{"key", s.key}, {"value", s.value}});
        auto& questions = j["questions"] = nlohmann::json::array();
        for (const Question& q : p.questions) {
            nlohmann::json jq;
            jq["question_id"] = q.question_id;
            jq["text"] = q.text;
            if (q.gold_spec_index)
                jq["gold_spec_index"] = *q.gold_spec_index;
            else
                jq["gold_spec_index"] = nullptr;
            questions.push_back(std::move(jq));
        }
        out << j.dump() << '\n';
    }
    if (!out) throw Error("write failed: " + path);
}

std::vector<TokenSequence> catalog_sentences(const ProductCatalog& catalog) {
    std::vector<TokenSequence> sentences;
    for (const Product& p : catalog.products) {
        for (const Specification& s : p.specs)
            sentences.push_back(normalize(s.text()));
        for (const Question& q : p.questions) sentences.push_back(q.tokens);
    }
    return sentences;
}

}  // namespace desmqa
