#pragma once

#include <string>
#include <utility>
#include <vector>

#include "desmqa/ranking.hpp"

namespace desmqa {

struct ExternalScorerConfig {
    std::string command;            // run through /bin/sh -c
    double timeout_seconds = 60.0;  // per protocol exchange (HELLO or batch)
};

// Bridges an external classifier process speaking a line protocol over its
// standard streams (UTF-8):
//   startup:  child emits "HELLO <range_lo> <range_hi>\n" once
//   request:  "SCORE <n>\n" then n lines "question_text\tspec_text"
//   response: n lines, each one decimal score within the declared range
//   shutdown: "QUIT\n"
// Protocol violations surface as ScorerError (start failure, malformed
// line, count mismatch, out-of-range score, timeout) — never as silent
// zeros. One instance talks to one child and is not thread-safe.
class ExternalScorer : public Scorer {
public:
    explicit ExternalScorer(ExternalScorerConfig cfg);
    ~ExternalScorer() override;

    ExternalScorer(const ExternalScorer&) = delete;
    ExternalScorer& operator=(const ExternalScorer&) = delete;

    std::string name() const override { return "external:" + cfg_.command; }
    std::pair<double, double> score_range() const {
        return {range_lo_, range_hi_};
    }
    std::vector<std::optional<double>> score_batch(
        const std::vector<ScorePair>& pairs) override;

private:
    void send(const std::string& data);
    // One protocol line within the current deadline; `what` names the
    // expected content for error messages.
    std::string read_line(const std::string& what);
    void arm_deadline();
    void shutdown() noexcept;

    ExternalScorerConfig cfg_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    long long deadline_ms_ = 0;  // steady-clock epoch milliseconds
    double range_lo_ = 0.0;
    double range_hi_ = 1.0;
};

}  // namespace desmqa
