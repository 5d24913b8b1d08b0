#include "desmqa/external_scorer.hpp"

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <sstream>

#include "desmqa/error.hpp"

namespace desmqa {

namespace {

long long now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Tabs and newlines delimit the protocol; flatten them inside payload text.
std::string sanitize_text(std::string text) {
    for (char& c : text) {
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return text;
}

bool parse_strict_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtod(begin, &end);
    return end == begin + s.size() && errno != ERANGE && std::isfinite(out);
}

void ignore_sigpipe_once() {
    // A child that dies mid-write must surface as ScorerError, not kill us.
    static std::once_flag flag;
    std::call_once(flag, [] { std::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace

ExternalScorer::ExternalScorer(ExternalScorerConfig cfg)
    : cfg_(std::move(cfg)) {
    ignore_sigpipe_once();
    if (cfg_.command.empty()) {
        throw ScorerError("external scorer command is empty");
    }
    if (!(cfg_.timeout_seconds > 0.0)) {
        throw ScorerError("external scorer timeout must be positive");
    }

    int to_child[2];    // parent writes 1, child reads 0
    int from_child[2];  // child writes 1, parent reads 0
    if (pipe(to_child) != 0) {
        throw ScorerError("failed to start external scorer: pipe: " +
                          std::string(std::strerror(errno)));
    }
    if (pipe(from_child) != 0) {
        close(to_child[0]);
        close(to_child[1]);
        throw ScorerError("failed to start external scorer: pipe: " +
                          std::string(std::strerror(errno)));
    }

    const int pid = fork();
    if (pid < 0) {
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        throw ScorerError("failed to start external scorer: fork: " +
                          std::string(std::strerror(errno)));
    }
    if (pid == 0) {
        // Child: wire the pipes to stdin/stdout and hand off to the shell;
        // stderr stays inherited so diagnostics reach the user.
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        execl("/bin/sh", "sh", "-c", cfg_.command.c_str(),
              static_cast<char*>(nullptr));
        _exit(127);
    }

    pid_ = pid;
    to_child_ = to_child[1];
    from_child_ = from_child[0];
    close(to_child[0]);
    close(from_child[1]);

    // Handshake: the scorer declares its score range up front.
    arm_deadline();
    const std::string hello = read_line("HELLO handshake");
    std::istringstream parts(hello);
    std::string word, lo_text, hi_text, excess;
    parts >> word >> lo_text >> hi_text;
    double lo = 0.0, hi = 0.0;
    if (word != "HELLO" || !parse_strict_double(lo_text, lo) ||
        !parse_strict_double(hi_text, hi) || !(lo < hi) || (parts >> excess)) {
        shutdown();
        throw ScorerError(
            "external scorer protocol violation: expected \"HELLO "
            "<range_lo> <range_hi>\", got \"" +
            hello + "\"");
    }
    range_lo_ = lo;
    range_hi_ = hi;
}

ExternalScorer::~ExternalScorer() { shutdown(); }

void ExternalScorer::arm_deadline() {
    deadline_ms_ = now_ms() + (long long)(cfg_.timeout_seconds * 1000.0);
}

void ExternalScorer::send(const std::string& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n =
            write(to_child_, data.data() + sent, data.size() - sent);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ScorerError("external scorer closed its input: " +
                              std::string(std::strerror(errno)));
        }
        sent += std::size_t(n);
    }
}

std::string ExternalScorer::read_line(const std::string& what) {
    while (true) {
        const std::size_t newline = buffer_.find('\n');
        if (newline != std::string::npos) {
            std::string line = buffer_.substr(0, newline);
            buffer_.erase(0, newline + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }

        const long long remaining = deadline_ms_ - now_ms();
        if (remaining <= 0) {
            throw ScorerError("external scorer timed out after " +
                              std::to_string(cfg_.timeout_seconds) +
                              " s waiting for " + what);
        }
        pollfd pfd{from_child_, POLLIN, 0};
        const int ready = poll(&pfd, 1, int(remaining));
        if (ready < 0) {
            if (errno == EINTR) continue;
            throw ScorerError("external scorer poll failed: " +
                              std::string(std::strerror(errno)));
        }
        if (ready == 0) {
            throw ScorerError("external scorer timed out after " +
                              std::to_string(cfg_.timeout_seconds) +
                              " s waiting for " + what);
        }
        char chunk[4096];
        const ssize_t n = read(from_child_, chunk, sizeof(chunk));
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ScorerError("external scorer read failed: " +
                              std::string(std::strerror(errno)));
        }
        if (n == 0) {
            // EOF. Distinguish "never started" from "stopped mid-protocol".
            // The pipe can close a beat before the child becomes reapable,
            // so give waitpid a short grace window.
            int status = 0;
            int reaped = 0;
            for (int attempt = 0; attempt < 50; ++attempt) {
                reaped = waitpid(pid_, &status, WNOHANG);
                if (reaped != 0) break;
                usleep(2000);
            }
            if (reaped == pid_ && WIFEXITED(status) &&
                WEXITSTATUS(status) == 127) {
                pid_ = -1;
                throw ScorerError(
                    "failed to start external scorer: command not found or "
                    "not executable: " +
                    cfg_.command);
            }
            if (reaped == pid_) pid_ = -1;
            throw ScorerError("external scorer exited before sending " +
                              what);
        }
        buffer_.append(chunk, std::size_t(n));
    }
}

std::vector<std::optional<double>> ExternalScorer::score_batch(
    const std::vector<ScorePair>& pairs) {
    std::string request = "SCORE " + std::to_string(pairs.size()) + "\n";
    for (const ScorePair& pair : pairs) {
        request += sanitize_text(pair.question_text);
        request += '\t';
        request += sanitize_text(pair.spec_text);
        request += '\n';
    }
    arm_deadline();
    send(request);

    std::vector<std::optional<double>> scores;
    scores.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        std::string line;
        try {
            line = read_line("score " + std::to_string(i + 1) + " of " +
                             std::to_string(pairs.size()));
        } catch (const ScorerError& err) {
            // EOF short of n lines is the classic count-mismatch failure.
            if (std::string(err.what()).find("exited before") !=
                std::string::npos) {
                throw ScorerError(
                    "external scorer count mismatch: got " +
                    std::to_string(i) + " scores for " +
                    std::to_string(pairs.size()) + " pairs");
            }
            throw;
        }
        double value = 0.0;
        if (!parse_strict_double(line, value)) {
            throw ScorerError("external scorer sent a malformed score line: "
                              "\"" +
                              line + "\"");
        }
        if (value < range_lo_ || value > range_hi_) {
            throw ScorerError("external scorer sent " + line +
                              ", outside its declared range [" +
                              std::to_string(range_lo_) + ", " +
                              std::to_string(range_hi_) + "]");
        }
        scores.push_back(value);
    }
    return scores;
}

void ExternalScorer::shutdown() noexcept {
    if (to_child_ >= 0) {
        // Best-effort orderly shutdown; the pipe may already be closed.
        const char quit[] = "QUIT\n";
        ssize_t ignored = write(to_child_, quit, sizeof(quit) - 1);
        (void)ignored;
        close(to_child_);
        to_child_ = -1;
    }
    if (from_child_ >= 0) {
        close(from_child_);
        from_child_ = -1;
    }
    if (pid_ > 0) {
        // Give it a grace period, then make sure it is gone.
        const long long deadline = now_ms() + 5000;
        int status = 0;
        while (now_ms() < deadline) {
            const int reaped = waitpid(pid_, &status, WNOHANG);
            if (reaped == pid_ || reaped < 0) {
                pid_ = -1;
                return;
            }
            usleep(10 * 1000);
        }
        kill(pid_, SIGKILL);
        waitpid(pid_, &status, 0);
        pid_ = -1;
    }
}

}  // namespace desmqa
