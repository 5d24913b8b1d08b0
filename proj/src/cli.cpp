// Command-line front door: ingest -> train-embeddings -> sweep-threshold ->
// label -> rank -> evaluate, a synthetic-catalog generator, and a pipeline
// command composing the training-data stages under one config.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or parse error.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "desmqa/corpus.hpp"
#include "desmqa/desm.hpp"
#include "desmqa/embedding.hpp"
#include "desmqa/error.hpp"
#include "desmqa/evaluate.hpp"
#include "desmqa/external_scorer.hpp"
#include "desmqa/kernels.hpp"
#include "desmqa/labeling.hpp"
#include "desmqa/ranking.hpp"
#include "desmqa/synth.hpp"
#include "desmqa/train.hpp"

namespace {

using desmqa::Error;
using desmqa::ParseError;

using KeyValues = std::vector<std::pair<std::string, std::string>>;

void apply_kernels(const std::string& name) {
    if (!desmqa::kernels::select_backend_by_name(name)) {
        throw ParseError("unknown or unsupported kernel backend: " + name);
    }
}

std::string format_double(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

// Stable 16-hex-digit fingerprint of a key=value configuration, stamped
// into every artifact a command emits so outputs can be traced to the
// exact settings that produced them.
std::string config_fingerprint(const KeyValues& kv) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    const auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    for (const auto& [k, v] : kv) {
        mix(k);
        mix("=");
        mix(v);
        mix("\n");
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
    if (!out) throw Error("write failed: " + path);
}

desmqa::CatalogFormat parse_catalog_format(const std::string& name) {
    if (name == "jsonl") return desmqa::CatalogFormat::jsonl;
    if (name == "tsv") return desmqa::CatalogFormat::tsv;
    throw ParseError("unknown catalog format: " + name);
}

// Shared flags of every command that trains embeddings.
struct TrainFlags {
    desmqa::TrainConfig cfg;

    void attach(CLI::App* cmd) {
        cmd->add_option("--dim", cfg.dim, "Embedding dimensionality")
            ->capture_default_str();
        cmd->add_option("--window", cfg.window, "Context window half-width")
            ->capture_default_str();
        cmd->add_option("--negatives", cfg.negatives,
                        "Negative samples per context pair")
            ->capture_default_str();
        cmd->add_option("--epochs", cfg.epochs, "Training epochs")
            ->capture_default_str();
        cmd->add_option("--lr", cfg.initial_lr, "Initial learning rate")
            ->capture_default_str();
        cmd->add_option("--min-count", cfg.min_count,
                        "Drop terms rarer than this")
            ->capture_default_str();
        cmd->add_option("--threads", cfg.threads,
                        "Worker threads (effective with --no-deterministic)")
            ->capture_default_str();
        cmd->add_flag("--deterministic,!--no-deterministic",
                      cfg.deterministic,
                      "Single-threaded reproducible training")
            ->capture_default_str();
    }

    KeyValues provenance(std::uint64_t seed) const {
        return {
            {"dim", std::to_string(cfg.dim)},
            {"window", std::to_string(cfg.window)},
            {"negatives", std::to_string(cfg.negatives)},
            {"epochs", std::to_string(cfg.epochs)},
            {"lr", format_double(cfg.initial_lr, 9)},
            {"min_count", std::to_string(cfg.min_count)},
            {"seed", std::to_string(seed)},
            {"deterministic", cfg.deterministic ? "true" : "false"},
        };
    }
};

void write_embedding_meta(const std::string& embedding_path,
                          const KeyValues& kv, const std::string& fingerprint,
                          const desmqa::TrainStats& stats) {
    nlohmann::json j;
    for (const auto& [k, v] : kv) j["config"][k] = v;
    j["fingerprint"] = fingerprint;
    j["stats"]["vocab_size"] = stats.vocab_size;
    j["stats"]["corpus_tokens"] = stats.corpus_tokens;
    j["stats"]["pairs_per_epoch"] = stats.pairs_per_epoch;
    j["stats"]["epoch_avg_loss"] = stats.epoch_avg_loss;
    write_text(embedding_path + ".meta", j.dump(2) + "\n");
}

desmqa::DualEmbedding train_on_catalog(const desmqa::ProductCatalog& catalog,
                                       const desmqa::TrainConfig& cfg,
                                       desmqa::TrainStats& stats) {
    const std::vector<desmqa::TokenSequence> sentences =
        desmqa::catalog_sentences(catalog);
    return desmqa::train_embeddings(sentences, cfg, &stats);
}

// Scorer selection shared by rank and evaluate: exactly one of a built-in
// dual-embedding scorer (embeddings file + mode) or an external command.
struct ScorerFlags {
    std::string embeddings_path;
    std::string mode_name = "out-out";
    std::string command;
    double timeout_seconds = 60.0;

    void attach(CLI::App* cmd) {
        auto* emb = cmd->add_option("--embeddings", embeddings_path,
                                    "Embedding file for the built-in scorer");
        cmd->add_option("--mode", mode_name,
                        "Embedding spaces as <question>-<spec>: in-in, "
                        "in-out, out-in, out-out")
            ->capture_default_str();
        auto* ext = cmd->add_option(
            "--scorer-command", command,
            "External scorer command (line protocol over stdin/stdout)");
        cmd->add_option("--timeout", timeout_seconds,
                        "External scorer timeout per exchange, seconds")
            ->capture_default_str();
        ext->excludes(emb);
    }

    // The embedding must outlive the scorer; the caller keeps both alive.
    std::unique_ptr<desmqa::Scorer> make(
        std::optional<desmqa::DualEmbedding>& storage) const {
        if (!command.empty()) {
            return std::make_unique<desmqa::ExternalScorer>(
                desmqa::ExternalScorerConfig{command, timeout_seconds});
        }
        if (embeddings_path.empty()) {
            throw ParseError(
                "either --embeddings or --scorer-command is required");
        }
        storage.emplace(desmqa::load_embedding(embeddings_path));
        return std::make_unique<desmqa::DesmScorer>(
            *storage, desmqa::parse_desm_mode(mode_name));
    }
};

// ---------------------------------------------------------------- ingest

struct IngestArgs {
    std::string input;
    std::string format = "jsonl";
    std::string merge_path;  // question-record TSV merged into the catalog
    std::string output;
};

void run_ingest(const IngestArgs& a) {
    desmqa::ProductCatalog catalog =
        desmqa::ingest_catalog(a.input, parse_catalog_format(a.format));
    if (!a.merge_path.empty()) {
        const desmqa::ProductCatalog extra =
            desmqa::ingest_catalog(a.merge_path, desmqa::CatalogFormat::tsv);
        desmqa::merge_questions(catalog, extra);
    }
    if (!a.output.empty()) desmqa::write_catalog_jsonl(catalog, a.output);
    std::cout << "products=" << catalog.products.size()
              << " questions=" << catalog.question_count() << "\n";
}

// ----------------------------------------------------------------- synth

struct SynthArgs {
    desmqa::SynthConfig cfg;
    std::string output;
    std::string heldout_output;
    std::string validation_output;
    std::size_t validation_pairs = 0;
};

void run_synth(const SynthArgs& a) {
    if (a.cfg.holdout_fraction > 0.0 && a.heldout_output.empty()) {
        throw ParseError("--holdout requires --heldout-output");
    }
    if (a.validation_pairs > 0 && a.validation_output.empty()) {
        throw ParseError("--validation-pairs requires --validation-output");
    }
    const desmqa::SynthResult result = desmqa::synthesize(a.cfg);
    desmqa::write_catalog_jsonl(result.train, a.output);
    if (!a.heldout_output.empty()) {
        desmqa::write_catalog_jsonl(result.heldout, a.heldout_output);
    }
    if (a.validation_pairs > 0) {
        write_text(a.validation_output,
                   desmqa::render_validation_tsv(
                       result.train, a.validation_pairs, a.cfg.seed));
    }
    const KeyValues kv = {
        {"products", std::to_string(a.cfg.n_products)},
        {"specs_per_product", std::to_string(a.cfg.specs_per_product)},
        {"questions_per_spec", std::to_string(a.cfg.questions_per_spec)},
        {"noise", format_double(a.cfg.noise, 6)},
        {"seed", std::to_string(a.cfg.seed)},
        {"vertical", a.cfg.vertical},
        {"holdout", format_double(a.cfg.holdout_fraction, 6)},
    };
    std::cout << "# synth seed=" << a.cfg.seed
              << " config=" << config_fingerprint(kv) << "\n"
              << "products=" << result.train.products.size()
              << " questions=" << result.train.question_count()
              << " heldout_questions=" << result.heldout.question_count()
              << " validation_pairs=" << a.validation_pairs << "\n";
}

// ------------------------------------------------------- train-embeddings

struct TrainArgs {
    std::string input;
    std::string format = "jsonl";
    std::string output;
    TrainFlags flags;
    std::uint64_t seed = 42;
};

void run_train(const TrainArgs& a) {
    desmqa::TrainConfig cfg = a.flags.cfg;
    cfg.seed = a.seed;
    const desmqa::ProductCatalog catalog =
        desmqa::ingest_catalog(a.input, parse_catalog_format(a.format));
    desmqa::TrainStats stats;
    const desmqa::DualEmbedding embedding =
        train_on_catalog(catalog, cfg, stats);
    desmqa::save_embedding(embedding, a.output);
    const KeyValues kv = a.flags.provenance(a.seed);
    const std::string fp = config_fingerprint(kv);
    write_embedding_meta(a.output, kv, fp, stats);
    std::cout << "# train-embeddings seed=" << a.seed << " config=" << fp
              << "\n"
              << "vocab=" << stats.vocab_size
              << " tokens=" << stats.corpus_tokens
              << " pairs_per_epoch=" << stats.pairs_per_epoch << " loss="
              << format_double(stats.epoch_avg_loss.empty()
                                   ? 0.0
                                   : stats.epoch_avg_loss.back(),
                               6)
              << "\n"
              << "wrote " << a.output << "\n";
}

// -------------------------------------------------------- sweep-threshold

struct SweepArgs {
    std::string embeddings_path;
    std::string validation_path;
    std::string mode_name = "out-out";
    desmqa::SweepGrid grid;
    bool midpoints = false;
    std::string output;
};

desmqa::ThresholdReport run_sweep_stage(const desmqa::DualEmbedding& e,
                                        const SweepArgs& a,
                                        std::size_t* rejected) {
    const desmqa::DesmMode mode = desmqa::parse_desm_mode(a.mode_name);
    const desmqa::ValidationLoadResult loaded =
        desmqa::load_validation_tsv(a.validation_path, e, mode);
    if (rejected) *rejected = loaded.rejected_unscorable;
    return a.midpoints
               ? desmqa::sweep_threshold_midpoints(loaded.pairs, e, mode)
               : desmqa::sweep_threshold(loaded.pairs, e, mode, a.grid);
}

void run_sweep(const SweepArgs& a) {
    const desmqa::DualEmbedding e =
        desmqa::load_embedding(a.embeddings_path);
    std::size_t rejected = 0;
    const desmqa::ThresholdReport report = run_sweep_stage(e, a, &rejected);
    if (!a.output.empty()) {
        desmqa::write_threshold_report_tsv(report, a.output,
                                           {"mode " + a.mode_name});
    }
    std::cout << "# sweep-threshold mode=" << a.mode_name << "\n"
              << "theta_star=" << format_double(report.theta_star, 9)
              << " accuracy=" << format_double(
                     report.accuracy_at_theta_star, 6)
              << " candidates=" << report.sweep_table.size()
              << " rejected_unscorable=" << rejected << "\n";
    if (!a.output.empty()) std::cout << "wrote " << a.output << "\n";
}

// ----------------------------------------------------------------- label

struct LabelArgs {
    std::string input;
    std::string format = "jsonl";
    std::string embeddings_path;
    std::string mode_name = "out-out";
    double theta = std::numeric_limits<double>::quiet_NaN();
    std::string threshold_report_path;
    bool balanced = false;
    std::uint64_t seed = 42;
    std::size_t threads = 1;
    std::string output;
};

void run_label(const LabelArgs& a) {
    const bool theta_given = std::isfinite(a.theta);
    if (theta_given == !a.threshold_report_path.empty()) {
        throw ParseError(
            "exactly one of --theta or --threshold-report is required");
    }
    const double theta =
        theta_given
            ? a.theta
            : desmqa::read_threshold_report_tsv(a.threshold_report_path)
                  .theta_star;
    const desmqa::ProductCatalog catalog =
        desmqa::ingest_catalog(a.input, parse_catalog_format(a.format));
    const desmqa::DualEmbedding e =
        desmqa::load_embedding(a.embeddings_path);
    const desmqa::DesmMode mode = desmqa::parse_desm_mode(a.mode_name);

    desmqa::LabelingSummary summary;
    std::vector<desmqa::LabeledPair> pairs =
        desmqa::label_corpus(catalog, e, mode, theta, a.threads, &summary);
    std::size_t balanced_count = 0;
    if (a.balanced) {
        pairs = desmqa::balance(pairs, a.seed);
        balanced_count = pairs.size();
    }
    const KeyValues kv = {
        {"mode", a.mode_name},
        {"theta", format_double(theta, 9)},
        {"balanced", a.balanced ? "true" : "false"},
        {"seed", std::to_string(a.seed)},
    };
    desmqa::write_labeled_tsv(
        pairs, a.output,
        {"config " + config_fingerprint(kv), "seed " + std::to_string(a.seed),
         "mode " + a.mode_name, "theta " + format_double(theta, 9)});
    std::cout << "# label seed=" << a.seed << " mode=" << a.mode_name
              << " theta=" << format_double(theta, 9) << "\n"
              << "emitted=" << summary.emitted
              << " positives=" << summary.positives
              << " negatives=" << summary.negatives
              << " skipped_unscorable=" << summary.skipped_unscorable;
    if (a.balanced) std::cout << " balanced=" << balanced_count;
    std::cout << "\nwrote " << a.output << "\n";
}

// ------------------------------------------------------------------ rank

struct RankArgs {
    std::string input;
    std::string format = "jsonl";
    std::string product_id;
    std::string question_text;
    ScorerFlags scorer;
    std::size_t top_k = 3;
};

void run_rank(const RankArgs& a) {
    const desmqa::ProductCatalog catalog =
        desmqa::ingest_catalog(a.input, parse_catalog_format(a.format));
    const desmqa::Product* product = catalog.find(a.product_id);
    if (!product) throw Error("unknown product: " + a.product_id);

    desmqa::Question question;
    question.question_id = "interactive";
    question.text = a.question_text;
    question.tokens = desmqa::normalize(a.question_text);
    if (question.tokens.empty()) {
        throw ParseError("question has no tokens after normalization");
    }

    std::optional<desmqa::DualEmbedding> storage;
    const std::unique_ptr<desmqa::Scorer> scorer = a.scorer.make(storage);
    const desmqa::RankedList ranked = rank(question, *product, *scorer);

    std::cout << "# rank scorer=" << scorer->name() << " product="
              << a.product_id << "\n"
              << "rank\tscore\tspec_index\tspecification\n";
    const std::size_t shown = std::min(a.top_k, ranked.entries.size());
    for (std::size_t i = 0; i < shown; ++i) {
        const desmqa::RankedEntry& entry = ranked.entries[i];
        std::cout << (i + 1) << '\t' << format_double(entry.score, 6) << '\t'
                  << entry.spec_index << '\t'
                  << product->specs[entry.spec_index].text() << "\n";
    }
    std::cout << "unscorable_specs=" << ranked.unscorable_specs << "\n";
}

// -------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string input;
    std::string format = "jsonl";
    ScorerFlags scorer;
    std::vector<int> ks = {1, 2, 3};
    std::string dataset = "catalog";
    std::string output;
    bool markdown = false;
};

void run_evaluate(const EvaluateArgs& a) {
    const desmqa::ProductCatalog catalog =
        desmqa::ingest_catalog(a.input, parse_catalog_format(a.format));
    std::optional<desmqa::DualEmbedding> storage;
    const std::unique_ptr<desmqa::Scorer> scorer = a.scorer.make(storage);
    const desmqa::EvalReport report =
        desmqa::evaluate(catalog, *scorer, a.ks, a.dataset);
    const std::string rendered = a.markdown
                                     ? desmqa::render_report_markdown({report})
                                     : desmqa::render_report_tsv({report});
    if (a.output.empty()) {
        std::cout << rendered;
    } else {
        write_text(a.output, rendered);
        std::cout << "wrote " << a.output << "\n";
    }
}

// ---------------------------------------------------------------- report

struct ReportArgs {
    std::string input;
    std::string format = "markdown";
    std::string output;
};

void run_report(const ReportArgs& a) {
    const std::vector<desmqa::ReportRow> rows =
        desmqa::parse_report_tsv(read_text(a.input));
    std::string rendered;
    if (a.format == "markdown") {
        rendered = desmqa::render_report_markdown(rows);
    } else if (a.format == "tsv") {
        rendered = desmqa::render_report_tsv(rows);
    } else {
        throw ParseError("unknown report format: " + a.format);
    }
    if (a.output.empty()) {
        std::cout << rendered;
    } else {
        write_text(a.output, rendered);
        std::cout << "wrote " << a.output << "\n";
    }
}

// -------------------------------------------------------------- pipeline

struct PipelineArgs {
    std::string input;
    std::string format = "jsonl";
    std::string validation_path;
    std::string output_dir;
    std::string mode_name = "out-out";
    TrainFlags train;
    std::uint64_t seed = 42;
    desmqa::SweepGrid grid;
    bool midpoints = false;
    std::size_t label_threads = 1;
};

template <typename Fn>
auto pipeline_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        throw ParseError(std::string("pipeline stage ") + stage +
                         " failed: " + e.what());
    } catch (const Error& e) {
        throw Error(std::string("pipeline stage ") + stage +
                    " failed: " + e.what());
    }
}

void run_pipeline(const PipelineArgs& a) {
    namespace fs = std::filesystem;
    fs::create_directories(a.output_dir);
    const std::string emb_path =
        (fs::path(a.output_dir) / "embeddings.bin").string();
    const std::string threshold_path =
        (fs::path(a.output_dir) / "threshold.tsv").string();
    const std::string labeled_path =
        (fs::path(a.output_dir) / "labeled.tsv").string();

    desmqa::TrainConfig train_cfg = a.train.cfg;
    train_cfg.seed = a.seed;
    KeyValues kv = a.train.provenance(a.seed);
    kv.emplace_back("mode", a.mode_name);
    kv.emplace_back("grid",
                    a.midpoints
                        ? std::string("midpoints")
                        : format_double(a.grid.lo, 6) + ":" +
                              format_double(a.grid.hi, 6) + ":" +
                              format_double(a.grid.step, 6));
    const std::string fp = config_fingerprint(kv);
    std::cout << "# pipeline seed=" << a.seed << " mode=" << a.mode_name
              << " config=" << fp << "\n";

    const desmqa::ProductCatalog catalog = pipeline_stage("ingest", [&] {
        return desmqa::ingest_catalog(a.input,
                                      parse_catalog_format(a.format));
    });

    desmqa::TrainStats stats;
    const desmqa::DualEmbedding embedding =
        pipeline_stage("train-embeddings", [&] {
            desmqa::DualEmbedding e =
                train_on_catalog(catalog, train_cfg, stats);
            desmqa::save_embedding(e, emb_path);
            write_embedding_meta(emb_path, kv, fp, stats);
            return e;
        });
    std::cout << "stage train-embeddings: vocab=" << stats.vocab_size
              << " tokens=" << stats.corpus_tokens << " loss="
              << format_double(stats.epoch_avg_loss.empty()
                                   ? 0.0
                                   : stats.epoch_avg_loss.back(),
                               6)
              << "\n";

    const desmqa::DesmMode mode = desmqa::parse_desm_mode(a.mode_name);
    std::size_t rejected = 0;
    const desmqa::ThresholdReport report =
        pipeline_stage("sweep-threshold", [&] {
            const desmqa::ValidationLoadResult loaded =
                desmqa::load_validation_tsv(a.validation_path, embedding,
                                            mode);
            rejected = loaded.rejected_unscorable;
            desmqa::ThresholdReport r =
                a.midpoints ? desmqa::sweep_threshold_midpoints(
                                  loaded.pairs, embedding, mode)
                            : desmqa::sweep_threshold(loaded.pairs, embedding,
                                                      mode, a.grid);
            desmqa::write_threshold_report_tsv(
                r, threshold_path,
                {"config " + fp, "seed " + std::to_string(a.seed),
                 "mode " + a.mode_name});
            return r;
        });
    std::cout << "stage sweep-threshold: theta_star="
              << format_double(report.theta_star, 9) << " accuracy="
              << format_double(report.accuracy_at_theta_star, 6)
              << " rejected_unscorable=" << rejected << "\n";

    desmqa::LabelingSummary summary;
    std::vector<desmqa::LabeledPair> pairs = pipeline_stage("label", [&] {
        return desmqa::label_corpus(catalog, embedding, mode,
                                    report.theta_star, a.label_threads,
                                    &summary);
    });
    std::cout << "stage label: emitted=" << summary.emitted
              << " positives=" << summary.positives
              << " negatives=" << summary.negatives
              << " skipped_unscorable=" << summary.skipped_unscorable << "\n";

    pairs = pipeline_stage("balance",
                           [&] { return desmqa::balance(pairs, a.seed); });
    pipeline_stage("balance", [&] {
        desmqa::write_labeled_tsv(
            pairs, labeled_path,
            {"config " + fp, "seed " + std::to_string(a.seed),
             "mode " + a.mode_name,
             "theta " + format_double(report.theta_star, 9)});
        return 0;
    });
    std::cout << "stage balance: pairs=" << pairs.size() << "\n"
              << "wrote " << emb_path << "\n"
              << "wrote " << threshold_path << "\n"
              << "wrote " << labeled_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Ranks a product's specifications by relevance to a question using "
        "dual word-embedding spaces, and builds weakly supervised training "
        "data from the scores."};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "Key=value option file; command-line flags win");
    std::string kernels = "auto";
    app.add_option("--kernels", kernels,
                   "Vector kernel backend: auto, scalar, avx2, neon")
        ->capture_default_str();

    IngestArgs ingest_args;
    {
        CLI::App* cmd = app.add_subcommand(
            "ingest", "Read a catalog, report its size, optionally "
                      "normalize it to JSONL");
        cmd->add_option("--input", ingest_args.input, "Catalog file")
            ->required();
        cmd->add_option("--catalog-format", ingest_args.format,
                        "Input format: jsonl or tsv")
            ->capture_default_str();
        cmd->add_option("--merge-questions", ingest_args.merge_path,
                        "Question-record TSV to merge into the catalog");
        cmd->add_option("--output", ingest_args.output,
                        "Write the normalized catalog here (JSONL)");
        cmd->callback([&] {
            apply_kernels(kernels);
            run_ingest(ingest_args);
        });
    }

    SynthArgs synth_args;
    {
        CLI::App* cmd = app.add_subcommand(
            "synth", "Generate a synthetic gold-annotated catalog");
        cmd->add_option("--products", synth_args.cfg.n_products,
                        "Number of products")
            ->capture_default_str();
        cmd->add_option("--specs", synth_args.cfg.specs_per_product,
                        "Specifications per product")
            ->capture_default_str();
        cmd->add_option("--questions", synth_args.cfg.questions_per_spec,
                        "Questions per specification")
            ->capture_default_str();
        cmd->add_option("--noise", synth_args.cfg.noise,
                        "Per-token distractor probability in [0,1]")
            ->capture_default_str();
        cmd->add_option("--seed", synth_args.cfg.seed, "Generator seed")
            ->capture_default_str();
        cmd->add_option("--vertical", synth_args.cfg.vertical,
                        "Product vertical name (single token)")
            ->capture_default_str();
        cmd->add_option("--holdout", synth_args.cfg.holdout_fraction,
                        "Fraction of each spec's questions held out")
            ->capture_default_str();
        cmd->add_option("--output", synth_args.output,
                        "Training catalog path (JSONL)")
            ->required();
        cmd->add_option("--heldout-output", synth_args.heldout_output,
                        "Held-out catalog path (JSONL)");
        cmd->add_option("--validation-output", synth_args.validation_output,
                        "Balanced validation TSV path");
        cmd->add_option("--validation-pairs", synth_args.validation_pairs,
                        "Validation rows to sample")
            ->capture_default_str();
        cmd->callback([&] {
            apply_kernels(kernels);
            run_synth(synth_args);
        });
    }

    TrainArgs train_args;
    {
        CLI::App* cmd = app.add_subcommand(
            "train-embeddings",
            "Train dual-space word embeddings on a catalog's text");
        cmd->add_option("--input", train_args.input, "Catalog file")
            ->required();
        cmd->add_option("--catalog-format", train_args.format,
                        "Input format: jsonl or tsv")
            ->capture_default_str();
        cmd->add_option("--output", train_args.output, "Embedding file")
            ->required();
        cmd->add_option("--seed", train_args.seed, "Training seed")
            ->capture_default_str();
        train_args.flags.attach(cmd);
        cmd->callback([&] {
            apply_kernels(kernels);
            run_train(train_args);
        });
    }

    SweepArgs sweep_args;
    {
        CLI::App* cmd = app.add_subcommand(
            "sweep-threshold",
            "Pick the labeling threshold on a validation set");
        cmd->add_option("--embeddings", sweep_args.embeddings_path,
                        "Embedding file")
            ->required();
        cmd->add_option("--validation", sweep_args.validation_path,
                        "Validation TSV (question \\t spec \\t 0/1)")
            ->required();
        cmd->add_option("--mode", sweep_args.mode_name, "Embedding spaces")
            ->capture_default_str();
        cmd->add_option("--grid-lo", sweep_args.grid.lo, "Grid start")
            ->capture_default_str();
        cmd->add_option("--grid-hi", sweep_args.grid.hi, "Grid end")
            ->capture_default_str();
        cmd->add_option("--grid-step", sweep_args.grid.step, "Grid step")
            ->capture_default_str();
        cmd->add_flag("--midpoints", sweep_args.midpoints,
                      "Sweep observed-score midpoints instead of a grid");
        cmd->add_option("--output", sweep_args.output,
                        "Threshold report TSV path");
        cmd->callback([&] {
            apply_kernels(kernels);
            run_sweep(sweep_args);
        });
    }

    LabelArgs label_args;
    {
        CLI::App* cmd = app.add_subcommand(
            "label",
            "Score and label every question/own-product-spec pair");
        cmd->add_option("--input", label_args.input, "Catalog file")
            ->required();
        cmd->add_option("--catalog-format", label_args.format,
                        "Input format: jsonl or tsv")
            ->capture_default_str();
        cmd->add_option("--embeddings", label_args.embeddings_path,
                        "Embedding file")
            ->required();
        cmd->add_option("--mode", label_args.mode_name, "Embedding spaces")
            ->capture_default_str();
        cmd->add_option("--theta", label_args.theta,
                        "Relevance threshold (score >= theta is positive)");
        cmd->add_option("--threshold-report", label_args.threshold_report_path,
                        "Read theta from this sweep report instead");
        cmd->add_flag("--balance", label_args.balanced,
                      "Emit every positive plus an equal negative sample");
        cmd->add_option("--seed", label_args.seed,
                        "Negative-sampling seed for --balance")
            ->capture_default_str();
        cmd->add_option("--threads", label_args.threads, "Worker threads")
            ->capture_default_str();
        cmd->add_option("--output", label_args.output, "Labeled TSV path")
            ->required();
        cmd->callback([&] {
            apply_kernels(kernels);
            run_label(label_args);
        });
    }

    RankArgs rank_args;
    {
        CLI::App* cmd = app.add_subcommand(
            "rank", "Rank one product's specifications for a question");
        cmd->add_option("--input", rank_args.input, "Catalog file")
            ->required();
        cmd->add_option("--catalog-format", rank_args.format,
                        "Input format: jsonl or tsv")
            ->capture_default_str();
        cmd->add_option("--product", rank_args.product_id, "Product id")
            ->required();
        cmd->add_option("--question", rank_args.question_text,
                        "Question text")
            ->required();
        cmd->add_option("--top", rank_args.top_k, "Rows to print")
            ->capture_default_str();
        rank_args.scorer.attach(cmd);
        cmd->callback([&] {
            apply_kernels(kernels);
            run_rank(rank_args);
        });
    }

    EvaluateArgs evaluate_args;
    {
        CLI::App* cmd = app.add_subcommand(
            "evaluate", "Compute gold-in-top-k rates over a catalog");
        cmd->add_option("--input", evaluate_args.input, "Catalog file")
            ->required();
        cmd->add_option("--catalog-format", evaluate_args.format,
                        "Input format: jsonl or tsv")
            ->capture_default_str();
        cmd->add_option("--ks", evaluate_args.ks, "Cutoffs, e.g. 1,2,3")
            ->delimiter(',')
            ->capture_default_str();
        cmd->add_option("--dataset", evaluate_args.dataset,
                        "Dataset name in the report")
            ->capture_default_str();
        cmd->add_option("--output", evaluate_args.output,
                        "Report path (default: stdout)");
        cmd->add_flag("--markdown", evaluate_args.markdown,
                      "Render markdown instead of TSV");
        evaluate_args.scorer.attach(cmd);
        cmd->callback([&] {
            apply_kernels(kernels);
            run_evaluate(evaluate_args);
        });
    }

    ReportArgs report_args;
    {
        CLI::App* cmd = app.add_subcommand(
            "report", "Re-render an evaluation report TSV");
        cmd->add_option("--input", report_args.input, "Report TSV path")
            ->required();
        cmd->add_option("--render-format", report_args.format,
                        "Output format: tsv or markdown")
            ->capture_default_str();
        cmd->add_option("--output", report_args.output,
                        "Output path (default: stdout)");
        cmd->callback([&] {
            apply_kernels(kernels);
            run_report(report_args);
        });
    }

    PipelineArgs pipeline_args;
    {
        CLI::App* cmd = app.add_subcommand(
            "pipeline",
            "Train embeddings, pick a threshold, label and balance — one "
            "config, provenance-stamped artifacts");
        cmd->add_option("--input", pipeline_args.input, "Catalog file")
            ->required();
        cmd->add_option("--catalog-format", pipeline_args.format,
                        "Input format: jsonl or tsv")
            ->capture_default_str();
        cmd->add_option("--validation", pipeline_args.validation_path,
                        "Validation TSV for the threshold sweep")
            ->required();
        cmd->add_option("--output-dir", pipeline_args.output_dir,
                        "Directory for embeddings.bin, threshold.tsv, "
                        "labeled.tsv")
            ->required();
        cmd->add_option("--mode", pipeline_args.mode_name,
                        "Embedding spaces")
            ->capture_default_str();
        cmd->add_option("--seed", pipeline_args.seed,
                        "Seed for training and negative sampling")
            ->capture_default_str();
        cmd->add_option("--grid-lo", pipeline_args.grid.lo, "Grid start")
            ->capture_default_str();
        cmd->add_option("--grid-hi", pipeline_args.grid.hi, "Grid end")
            ->capture_default_str();
        cmd->add_option("--grid-step", pipeline_args.grid.step, "Grid step")
            ->capture_default_str();
        cmd->add_flag("--midpoints", pipeline_args.midpoints,
                      "Sweep observed-score midpoints instead of a grid");
        cmd->add_option("--label-threads", pipeline_args.label_threads,
                        "Worker threads for the labeling stage")
            ->capture_default_str();
        pipeline_args.train.attach(cmd);
        cmd->callback([&] {
            apply_kernels(kernels);
            run_pipeline(pipeline_args);
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
