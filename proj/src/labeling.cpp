#include "desmqa/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "desmqa/error.hpp"
#include "desmqa/rng.hpp"

namespace desmqa {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

bool parse_binary_label(const std::string& field, const std::string& path,
                        std::size_t line_no) {
    if (field == "1") return true;
    if (field == "0") return false;
    throw ParseError(path + ": line " + std::to_string(line_no) +
                     ": label must be 1 or 0, got \"" + field + "\"");
}

double parse_real(const std::string& field, const std::string& path,
                  std::size_t line_no) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end != begin + field.size() || field.empty()) {
        throw ParseError(path + ": line " + std::to_string(line_no) +
                         ": malformed number \"" + field + "\"");
    }
    return value;
}

std::size_t parse_index(const std::string& field, const std::string& path,
                        std::size_t line_no) {
    if (field.empty() ||
        field.find_first_not_of("0123456789") != std::string::npos) {
        throw ParseError(path + ": line " + std::to_string(line_no) +
                         ": malformed index \"" + field + "\"");
    }
    return std::size_t(std::strtoull(field.c_str(), nullptr, 10));
}

std::string format_score(double score) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", score);
    return buf;
}

// Keep the TSV line-based: embedded tabs and newlines become spaces, which
// normalize() already treats identically.
std::string sanitize_text(std::string text) {
    for (char& c : text) {
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return text;
}

ThresholdReport select_threshold(const std::vector<double>& candidates,
                                 const std::vector<double>& scores,
                                 const std::vector<bool>& labels) {
    ThresholdReport report;
    report.sweep_table.reserve(candidates.size());
    double best_acc = -1.0;
    double best_theta = candidates.front();
    for (const double theta : candidates) {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if ((scores[i] >= theta) == labels[i]) ++correct;
        }
        const double acc = double(correct) / double(scores.size());
        report.sweep_table.emplace_back(theta, acc);
        if (acc > best_acc) {  // strict: first (smallest) theta wins ties
            best_acc = acc;
            best_theta = theta;
        }
    }
    report.theta_star = best_theta;
    report.accuracy_at_theta_star = best_acc;
    return report;
}

void score_validation(const std::vector<ValidationPair>& pairs,
                      const DualEmbedding& e, DesmMode mode,
                      std::vector<double>& scores, std::vector<bool>& labels) {
    if (pairs.empty()) throw Error("empty validation set");
    scores.reserve(pairs.size());
    labels.reserve(pairs.size());
    for (const ValidationPair& p : pairs) {
        scores.push_back(
            dual_score(p.question_tokens, p.spec_tokens, e, mode).value);
        labels.push_back(p.relevant);
    }
}

}  // namespace

ValidationLoadResult load_validation_tsv(const std::string& path,
                                         const DualEmbedding& e,
                                         DesmMode mode) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path + " for reading");
    ValidationLoadResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 3) {
            throw ParseError(path + ": line " + std::to_string(line_no) +
                             ": expected 3 tab-separated columns, got " +
                             std::to_string(fields.size()));
        }
        ValidationPair pair;
        pair.question_tokens = normalize(fields[0]);
        pair.spec_tokens = normalize(fields[1]);
        pair.relevant = parse_binary_label(fields[2], path, line_no);
        try {
            dual_score(pair.question_tokens, pair.spec_tokens, e, mode);
        } catch (const UnscorableError&) {
            ++result.rejected_unscorable;
            continue;
        }
        result.pairs.push_back(std::move(pair));
    }
    return result;
}

ThresholdReport sweep_threshold(const std::vector<ValidationPair>& pairs,
                                const DualEmbedding& e, DesmMode mode,
                                const SweepGrid& grid) {
    if (!(grid.lo < grid.hi) || !(grid.step > 0.0)) {
        throw ParseError("degenerate sweep grid: lo=" +
                         std::to_string(grid.lo) + " hi=" +
                         std::to_string(grid.hi) + " step=" +
                         std::to_string(grid.step));
    }
    std::vector<double> scores;
    std::vector<bool> labels;
    score_validation(pairs, e, mode, scores, labels);

    // theta_i = lo + i*step, endpoint included when it lands on the grid.
    const std::size_t n_points =
        std::size_t(std::floor((grid.hi - grid.lo) / grid.step + 1e-9)) + 1;
    std::vector<double> candidates(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        candidates[i] = grid.lo + double(i) * grid.step;
    }
    return select_threshold(candidates, scores, labels);
}

ThresholdReport sweep_threshold_midpoints(
    const std::vector<ValidationPair>& pairs, const DualEmbedding& e,
    DesmMode mode) {
    std::vector<double> scores;
    std::vector<bool> labels;
    score_validation(pairs, e, mode, scores, labels);

    const std::set<double> distinct(scores.begin(), scores.end());
    std::vector<double> candidates;
    candidates.reserve(distinct.size() + 1);
    candidates.push_back(*distinct.begin() - 1.0);  // predict all relevant
    for (auto it = distinct.begin(); std::next(it) != distinct.end(); ++it) {
        candidates.push_back((*it + *std::next(it)) / 2.0);
    }
    candidates.push_back(*distinct.rbegin() + 1.0);  // predict none relevant
    return select_threshold(candidates, scores, labels);
}

namespace {

void label_product(const Product& product, const DualEmbedding& e,
                   DesmMode mode, double theta,
                   std::vector<LabeledPair>& out, std::size_t& skipped) {
    if (product.specs.empty()) return;
    for (const Question& question : product.questions) {
        std::vector<std::optional<DualScore>> scores;
        try {
            scores = score_all(question, product, e, mode);
        } catch (const UnscorableError&) {
            skipped += product.specs.size();
            continue;
        }
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (!scores[j]) {
                ++skipped;
                continue;
            }
            LabeledPair pair;
            pair.product_id = product.product_id;
            pair.question_id = question.question_id;
            pair.spec_index = j;
            pair.spec_text = product.specs[j].text();
            pair.question_text = question.text;
            pair.score = scores[j]->value;
            pair.positive = scores[j]->value >= theta;
            out.push_back(std::move(pair));
        }
    }
}

void sort_canonical(std::vector<LabeledPair>& pairs) {
    std::sort(pairs.begin(), pairs.end(),
              [](const LabeledPair& a, const LabeledPair& b) {
                  return std::tie(a.product_id, a.question_id, a.spec_index) <
                         std::tie(b.product_id, b.question_id, b.spec_index);
              });
}

}  // namespace

std::vector<LabeledPair> label_corpus(const ProductCatalog& catalog,
                                      const DualEmbedding& e, DesmMode mode,
                                      double theta, std::size_t threads,
                                      LabelingSummary* summary) {
    if (!std::isfinite(theta)) {
        throw ParseError("theta must be finite");
    }
    const std::size_t n_products = catalog.products.size();
    const std::size_t n_workers =
        std::max<std::size_t>(1, std::min(threads, n_products));

    std::vector<std::vector<LabeledPair>> per_worker(n_workers);
    std::vector<std::size_t> skipped(n_workers, 0);
    if (n_workers == 1) {
        for (const Product& p : catalog.products) {
            label_product(p, e, mode, theta, per_worker[0], skipped[0]);
        }
    } else {
        std::vector<std::thread> workers;
        workers.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) {
            workers.emplace_back([&, w] {
                const std::size_t first = n_products * w / n_workers;
                const std::size_t last = n_products * (w + 1) / n_workers;
                for (std::size_t i = first; i < last; ++i) {
                    label_product(catalog.products[i], e, mode, theta,
                                  per_worker[w], skipped[w]);
                }
            });
        }
        for (std::thread& t : workers) t.join();
    }

    std::vector<LabeledPair> pairs;
    std::size_t total = 0;
    for (const auto& chunk : per_worker) total += chunk.size();
    pairs.reserve(total);
    for (auto& chunk : per_worker) {
        pairs.insert(pairs.end(), std::make_move_iterator(chunk.begin()),
                     std::make_move_iterator(chunk.end()));
    }
    sort_canonical(pairs);

    if (summary) {
        summary->emitted = pairs.size();
        summary->skipped_unscorable = 0;
        for (std::size_t s : skipped) summary->skipped_unscorable += s;
        summary->positives = std::size_t(
            std::count_if(pairs.begin(), pairs.end(),
                          [](const LabeledPair& p) { return p.positive; }));
        summary->negatives = pairs.size() - summary->positives;
    }
    return pairs;
}

std::vector<LabeledPair> balance(const std::vector<LabeledPair>& pairs,
                                 std::uint64_t seed) {
    std::vector<LabeledPair> positives;
    std::vector<LabeledPair> negatives;
    for (const LabeledPair& p : pairs) {
        (p.positive ? positives : negatives).push_back(p);
    }
    if (positives.empty()) {
        throw Error("cannot balance: no positive pairs (theta too high?)");
    }
    if (negatives.size() < positives.size()) {
        throw Error("cannot balance: " + std::to_string(negatives.size()) +
                    " negatives < " + std::to_string(positives.size()) +
                    " positives (theta too low?)");
    }

    // Partial Fisher-Yates over negative indices: a uniform sample without
    // replacement, deterministic under seed.
    Rng rng(seed);
    std::vector<std::size_t> index(negatives.size());
    for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
    for (std::size_t i = 0; i < positives.size(); ++i) {
        const std::size_t j = i + rng.bounded(index.size() - i);
        std::swap(index[i], index[j]);
    }

    const std::size_t n_positives = positives.size();
    std::vector<LabeledPair> out = std::move(positives);
    out.reserve(2 * n_positives);
    for (std::size_t i = 0; i < n_positives; ++i) {
        out.push_back(negatives[index[i]]);
    }
    sort_canonical(out);
    return out;
}

void write_labeled_tsv(const std::vector<LabeledPair>& pairs,
                       const std::string& path,
                       const std::vector<std::string>& header_comments) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open " + path + " for writing");
    for (const std::string& comment : header_comments) {
        out << "# " << comment << "\n";
    }
    for (const LabeledPair& p : pairs) {
        out << sanitize_text(p.product_id) << '\t'
            << sanitize_text(p.question_id) << '\t' << p.spec_index << '\t'
            << sanitize_text(p.spec_text) << '\t'
            << sanitize_text(p.question_text) << '\t'
            << format_score(p.score) << '\t' << (p.positive ? '1' : '0')
            << '\n';
    }
    if (!out.flush()) throw Error("write to " + path + " failed");
}

std::vector<LabeledPair> read_labeled_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path + " for reading");
    std::vector<LabeledPair> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 7) {
            throw ParseError(path + ": line " + std::to_string(line_no) +
                             ": expected 7 tab-separated columns, got " +
                             std::to_string(fields.size()));
        }
        LabeledPair p;
        p.product_id = fields[0];
        p.question_id = fields[1];
        p.spec_index = parse_index(fields[2], path, line_no);
        p.spec_text = fields[3];
        p.question_text = fields[4];
        p.score = parse_real(fields[5], path, line_no);
        p.positive = parse_binary_label(fields[6], path, line_no);
        pairs.push_back(std::move(p));
    }
    return pairs;
}

void write_threshold_report_tsv(
    const ThresholdReport& report, const std::string& path,
    const std::vector<std::string>& header_comments) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open " + path + " for writing");
    for (const std::string& comment : header_comments) {
        out << "# " << comment << "\n";
    }
    out << "# theta_star\t" << format_score(report.theta_star) << "\n";
    out << "# accuracy\t" << format_score(report.accuracy_at_theta_star)
        << "\n";
    for (const auto& [theta, acc] : report.sweep_table) {
        out << format_score(theta) << '\t' << format_score(acc) << '\n';
    }
    if (!out.flush()) throw Error("write to " + path + " failed");
}

ThresholdReport read_threshold_report_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path + " for reading");
    ThresholdReport report;
    bool saw_theta = false;
    bool saw_accuracy = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto fields = split_tabs(line);
            if (fields.size() == 2 && fields[0] == "# theta_star") {
                report.theta_star = parse_real(fields[1], path, line_no);
                saw_theta = true;
            } else if (fields.size() == 2 && fields[0] == "# accuracy") {
                report.accuracy_at_theta_star =
                    parse_real(fields[1], path, line_no);
                saw_accuracy = true;
            }
            continue;
        }
        const auto fields = split_tabs(line);
        if (fields.size() != 2) {
            throw ParseError(path + ": line " + std::to_string(line_no) +
                             ": expected 2 tab-separated columns, got " +
                             std::to_string(fields.size()));
        }
        report.sweep_table.emplace_back(parse_real(fields[0], path, line_no),
                                        parse_real(fields[1], path, line_no));
    }
    if (!saw_theta || !saw_accuracy) {
        throw ParseError(path + ": missing theta_star/accuracy header");
    }
    return report;
}

}  // namespace desmqa
