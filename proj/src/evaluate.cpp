#include "desmqa/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "desmqa/error.hpp"

namespace desmqa {

namespace {

constexpr std::size_t kMissed = std::size_t(-1);  // gold absent from ranking

void add_question(EvalBucket& bucket, const std::vector<int>& ks,
                  bool unrankable, std::size_t gold_rank) {
    ++bucket.n_questions;
    if (unrankable) {
        ++bucket.unrankable;
        return;  // a miss at every k
    }
    if (gold_rank == kMissed) return;  // rankable, but gold never appears
    for (int k : ks) {
        if (gold_rank < std::size_t(k)) ++bucket.hits[k];
    }
}

void finalize(EvalBucket& bucket, const std::vector<int>& ks) {
    for (int k : ks) {
        const std::size_t hits = bucket.hits.count(k) ? bucket.hits[k] : 0;
        bucket.hits[k] = hits;
        bucket.hit_at[k] =
            bucket.n_questions ? double(hits) / double(bucket.n_questions)
                               : 0.0;
    }
}

std::string format_fraction(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace

EvalReport evaluate(const ProductCatalog& catalog, Scorer& scorer,
                    const std::vector<int>& ks,
                    const std::string& dataset_name) {
    if (ks.empty()) throw ParseError("ks must be non-empty");
    for (int k : ks) {
        if (k < 1) throw ParseError("every k must be >= 1");
    }
    std::vector<int> sorted_ks = ks;
    std::sort(sorted_ks.begin(), sorted_ks.end());
    sorted_ks.erase(std::unique(sorted_ks.begin(), sorted_ks.end()),
                    sorted_ks.end());

    EvalReport report;
    report.dataset = dataset_name;
    report.scorer = scorer.name();
    report.ks = sorted_ks;

    for (const Product& product : catalog.products) {
        for (const Question& question : product.questions) {
            if (!question.gold_spec_index) {
                throw Error("question \"" + question.question_id +
                            "\" has no gold specification annotation");
            }
            const std::size_t gold = *question.gold_spec_index;

            bool unrankable = false;
            std::size_t gold_rank = kMissed;
            try {
                const RankedList ranked = rank(question, product, scorer);
                for (std::size_t r = 0; r < ranked.entries.size(); ++r) {
                    if (ranked.entries[r].spec_index == gold) {
                        gold_rank = r;
                        break;
                    }
                }
                // If the gold specification itself was unscorable the
                // ranking exists but can never contain it: a plain miss.
            } catch (const UnscorableError&) {
                unrankable = true;
            }
            add_question(report.overall, sorted_ks, unrankable, gold_rank);
            add_question(report.by_answer_type[question.answer_type],
                         sorted_ks, unrankable, gold_rank);
        }
    }
    finalize(report.overall, sorted_ks);
    for (auto& [type, bucket] : report.by_answer_type) {
        (void)type;
        finalize(bucket, sorted_ks);
    }
    return report;
}

std::string render_report_tsv(const std::vector<EvalReport>& reports) {
    std::vector<ReportRow> rows;
    std::vector<int> ks;
    for (const EvalReport& r : reports) {
        for (int k : r.ks) {
            if (std::find(ks.begin(), ks.end(), k) == ks.end()) {
                ks.push_back(k);
            }
        }
    }
    std::sort(ks.begin(), ks.end());

    for (const EvalReport& r : reports) {
        ReportRow overall;
        overall.dataset = r.dataset;
        overall.scorer = r.scorer;
        overall.n_questions = r.overall.n_questions;
        overall.unrankable = r.overall.unrankable;
        for (int k : r.ks) {
            overall.hit_at.emplace_back(k, r.overall.hit_at.at(k));
        }
        rows.push_back(std::move(overall));
        for (const auto& [type, bucket] : r.by_answer_type) {
            ReportRow row;
            row.dataset = r.dataset + ":" + answer_type_name(type);
            row.scorer = r.scorer;
            row.n_questions = bucket.n_questions;
            row.unrankable = bucket.unrankable;
            for (int k : r.ks) {
                row.hit_at.emplace_back(k, bucket.hit_at.at(k));
            }
            rows.push_back(std::move(row));
        }
    }
    return render_report_tsv(rows);
}

std::string render_report_tsv(const std::vector<ReportRow>& rows) {
    std::vector<int> ks;
    for (const ReportRow& row : rows) {
        for (const auto& [k, v] : row.hit_at) {
            (void)v;
            if (std::find(ks.begin(), ks.end(), k) == ks.end()) {
                ks.push_back(k);
            }
        }
    }
    std::sort(ks.begin(), ks.end());

    std::ostringstream out;
    out << "dataset\tscorer\tn";
    for (int k : ks) out << "\thit" << k;
    out << "\tunrankable\n";
    for (const ReportRow& row : rows) {
        out << row.dataset << '\t' << row.scorer << '\t' << row.n_questions;
        for (int k : ks) {
            const auto it =
                std::find_if(row.hit_at.begin(), row.hit_at.end(),
                             [k](const auto& p) { return p.first == k; });
            out << '\t'
                << (it != row.hit_at.end() ? format_fraction(it->second)
                                           : std::string("-"));
        }
        out << '\t' << row.unrankable << '\n';
    }
    return out.str();
}

std::string render_report_markdown(const std::vector<EvalReport>& reports) {
    return render_report_markdown(
        parse_report_tsv(render_report_tsv(reports)));
}

std::string render_report_markdown(const std::vector<ReportRow>& rows) {
    std::vector<int> ks;
    for (const ReportRow& row : rows) {
        for (const auto& [k, v] : row.hit_at) {
            (void)v;
            if (std::find(ks.begin(), ks.end(), k) == ks.end()) {
                ks.push_back(k);
            }
        }
    }
    std::sort(ks.begin(), ks.end());

    std::ostringstream out;
    out << "| Dataset | Scorer | n |";
    for (int k : ks) out << " HIT@" << k << " |";
    out << " Unrankable |\n";
    out << "|---|---|---|";
    for (std::size_t i = 0; i < ks.size(); ++i) out << "---|";
    out << "---|\n";
    std::string last_dataset;
    for (const ReportRow& row : rows) {
        const bool repeat = row.dataset == last_dataset;
        last_dataset = row.dataset;
        out << "| " << (repeat ? std::string() : row.dataset) << " | "
            << row.scorer << " | " << row.n_questions << " |";
        for (int k : ks) {
            const auto it =
                std::find_if(row.hit_at.begin(), row.hit_at.end(),
                             [k](const auto& p) { return p.first == k; });
            out << ' '
                << (it != row.hit_at.end() ? format_fraction(it->second)
                                           : std::string("-"))
                << " |";
        }
        out << ' ' << row.unrankable << " |\n";
    }
    return out.str();
}

std::vector<ReportRow> parse_report_tsv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("report TSV is empty");
    }
    // Header: dataset, scorer, n, hit<k>..., unrankable.
    std::vector<std::string> columns;
    {
        std::size_t start = 0;
        while (true) {
            const std::size_t tab = line.find('\t', start);
            columns.push_back(line.substr(start, tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
    }
    if (columns.size() < 4 || columns.front() != "dataset" ||
        columns.back() != "unrankable") {
        throw ParseError("report TSV: unrecognized header");
    }
    std::vector<int> ks;
    for (std::size_t i = 3; i + 1 < columns.size(); ++i) {
        if (columns[i].rfind("hit", 0) != 0) {
            throw ParseError("report TSV: unrecognized column \"" +
                             columns[i] + "\"");
        }
        ks.push_back(std::atoi(columns[i].c_str() + 3));
    }

    std::vector<ReportRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() != columns.size()) {
            throw ParseError("report TSV: line " + std::to_string(line_no) +
                             ": expected " + std::to_string(columns.size()) +
                             " columns, got " +
                             std::to_string(fields.size()));
        }
        ReportRow row;
        row.dataset = fields[0];
        row.scorer = fields[1];
        row.n_questions = std::size_t(std::strtoull(fields[2].c_str(),
                                                    nullptr, 10));
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const std::string& cell = fields[3 + i];
            if (cell == "-") continue;
            row.hit_at.emplace_back(ks[i], std::strtod(cell.c_str(),
                                                       nullptr));
        }
        row.unrankable =
            std::size_t(std::strtoull(fields.back().c_str(), nullptr, 10));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace desmqa
