#include "desmqa/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <string>
#include <thread>
#include <utility>

#include "desmqa/error.hpp"
#include "desmqa/kernels.hpp"
#include "desmqa/rng.hpp"
#include "desmqa/sgns.hpp"

namespace desmqa {

void TrainConfig::validate() const {
    if (dim == 0) throw ParseError("dim must be >= 1");
    if (window == 0) throw ParseError("window must be >= 1");
    if (negatives == 0) throw ParseError("negatives must be >= 1");
    if (epochs == 0) throw ParseError("epochs must be >= 1");
    if (!(initial_lr > 0.0)) throw ParseError("initial-lr must be > 0");
}

namespace {

// Cumulative unigram^(3/4) mass; sampling is a binary search over it.
struct NegativeTable {
    std::vector<double> cum;

    std::uint32_t sample(Rng& rng) const {
        const double r = rng.uniform() * cum.back();
        auto it = std::upper_bound(cum.begin(), cum.end(), r);
        auto idx = std::size_t(it - cum.begin());
        if (idx >= cum.size()) idx = cum.size() - 1;
        return std::uint32_t(idx);
    }
};

NegativeTable build_negative_table(const Vocab& vocab) {
    NegativeTable table;
    table.cum.reserve(vocab.size());
    double total = 0.0;
    for (const VocabEntry& e : vocab.entries()) {
        total += std::pow(double(e.count), 0.75);
        table.cum.push_back(total);
    }
    return table;
}

struct Shared {
    DualEmbedding& emb;
    const std::vector<std::vector<std::uint32_t>>& sentences;
    const NegativeTable& table;
    const TrainConfig& cfg;
    std::uint64_t total_steps;  // epochs * in-vocabulary token positions
    std::atomic<std::uint64_t> processed{0};
};

// Trains over sentences [first, last); returns the summed pair loss.
double train_range(Shared& sh, std::size_t first, std::size_t last, Rng rng) {
    const std::uint32_t dim = sh.emb.dim();
    const std::uint32_t k = sh.cfg.negatives;
    const double lr_floor = sh.cfg.initial_lr / 10000.0;

    std::vector<float> d_center(dim);
    std::vector<float> d_pos(dim);
    std::vector<float> d_negs(std::size_t(k) * dim);
    std::vector<float*> d_neg_ptrs(k);
    std::vector<const float*> neg_ptrs(k);
    std::vector<std::uint32_t> neg_ids(k);

    double loss_sum = 0.0;
    for (std::size_t si = first; si < last; ++si) {
        const std::vector<std::uint32_t>& sent = sh.sentences[si];
        for (std::size_t t = 0; t < sent.size(); ++t) {
            const std::uint64_t done =
                sh.processed.fetch_add(1, std::memory_order_relaxed);
            double alpha = sh.cfg.initial_lr *
                           (1.0 - double(done) / double(sh.total_steps));
            if (alpha < lr_floor) alpha = lr_floor;

            const std::uint32_t center = sent[t];
            const std::size_t w = sh.cfg.window;
            const std::size_t lo = t > w ? t - w : 0;
            const std::size_t hi = std::min(sent.size() - 1, t + w);
            for (std::size_t j = lo; j <= hi; ++j) {
                if (j == t) continue;
                const std::uint32_t context = sent[j];

                // Draws that hit the observed context are dropped, never
                // retried, so a pair can see fewer than k negatives.
                std::size_t n_used = 0;
                for (std::uint32_t d = 0; d < k; ++d) {
                    const std::uint32_t neg = sh.table.sample(rng);
                    if (neg == context) continue;
                    neg_ids[n_used] = neg;
                    neg_ptrs[n_used] = sh.emb.out_row(neg);
                    d_neg_ptrs[n_used] = d_negs.data() + n_used * dim;
                    ++n_used;
                }

                float* in_center = sh.emb.in_row(center);
                float* out_pos = sh.emb.out_row(context);
                loss_sum += sgns::pair_loss_and_grads(
                    in_center, out_pos, neg_ptrs.data(), n_used, dim,
                    d_center.data(), d_pos.data(), d_neg_ptrs.data());

                const float step = float(-alpha);
                kernels::axpy_f32(step, d_center.data(), in_center, dim);
                kernels::axpy_f32(step, d_pos.data(), out_pos, dim);
                for (std::size_t i = 0; i < n_used; ++i) {
                    kernels::axpy_f32(step, d_neg_ptrs[i],
                                      sh.emb.out_row(neg_ids[i]), dim);
                }
            }
        }
    }
    return loss_sum;
}

}  // namespace

DualEmbedding train_embeddings(std::span<const TokenSequence> corpus,
                               const TrainConfig& cfg, TrainStats* stats) {
    cfg.validate();
    Vocab vocab = build_vocab(corpus, cfg.min_count);
    if (vocab.empty()) {
        throw Error("empty vocabulary: no term reaches min-count " +
                    std::to_string(cfg.min_count));
    }

    std::vector<std::vector<std::uint32_t>> sentences;
    std::uint64_t corpus_tokens = 0;
    std::uint64_t pairs_per_epoch = 0;
    for (const TokenSequence& seq : corpus) {
        std::vector<std::uint32_t> ids;
        ids.reserve(seq.size());
        for (const std::string& token : seq) {
            const std::int64_t id = vocab.index_of(token);
            if (id >= 0) ids.push_back(std::uint32_t(id));
        }
        if (ids.empty()) continue;
        corpus_tokens += ids.size();
        for (std::size_t t = 0; t < ids.size(); ++t) {
            const std::size_t lo = t > cfg.window ? t - cfg.window : 0;
            const std::size_t hi = std::min(ids.size() - 1, t + cfg.window);
            pairs_per_epoch += hi - lo;  // window minus the center itself
        }
        sentences.push_back(std::move(ids));
    }

    DualEmbedding emb(std::move(vocab), cfg.dim);
    Rng init_rng(cfg.seed);
    const double half_width = 0.5 / double(cfg.dim);
    for (float& v : emb.in_matrix()) {
        v = float(init_rng.uniform(-half_width, half_width));
    }
    // The output matrix starts at zero.

    const NegativeTable table = build_negative_table(emb.vocab());
    Shared sh{emb, sentences, table, cfg,
              std::uint64_t(cfg.epochs) * corpus_tokens};
    const std::uint32_t n_threads =
        cfg.deterministic ? 1 : std::max(1u, cfg.threads);

    if (stats) {
        stats->vocab_size = emb.vocab().size();
        stats->corpus_tokens = corpus_tokens;
        stats->pairs_per_epoch = pairs_per_epoch;
        stats->epoch_avg_loss.clear();
    }

    for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        double epoch_loss = 0.0;
        if (n_threads == 1) {
            epoch_loss = train_range(sh, 0, sentences.size(),
                                     Rng(cfg.seed + 1 + epoch));
        } else {
            // Lock-free shared updates; colliding writes are rare and the
            // objective tolerates them, so no synchronization on the rows.
            std::vector<double> partial(n_threads, 0.0);
            std::vector<std::thread> workers;
            workers.reserve(n_threads);
            for (std::uint32_t tid = 0; tid < n_threads; ++tid) {
                const std::size_t first =
                    sentences.size() * tid / n_threads;
                const std::size_t last =
                    sentences.size() * (tid + 1) / n_threads;
                workers.emplace_back([&sh, &partial, &cfg, epoch, tid, first,
                                      last, n_threads] {
                    Rng rng(cfg.seed + 1 +
                            std::uint64_t(epoch) * n_threads + tid);
                    partial[tid] = train_range(sh, first, last, std::move(rng));
                });
            }
            for (std::thread& worker : workers) worker.join();
            for (double p : partial) epoch_loss += p;
        }
        const double avg =
            pairs_per_epoch ? epoch_loss / double(pairs_per_epoch) : 0.0;
        if (!std::isfinite(avg)) {
            throw Error("training diverged: non-finite loss at epoch " +
                        std::to_string(epoch + 1));
        }
        if (stats) stats->epoch_avg_loss.push_back(avg);
    }

    const auto all_finite = [](const std::vector<float>& m) {
        return std::all_of(m.begin(), m.end(),
                           [](float v) { return std::isfinite(v); });
    };
    if (!all_finite(emb.in_matrix()) || !all_finite(emb.out_matrix())) {
        throw Error("training diverged: non-finite weights");
    }
    return emb;
}

}  // namespace desmqa
