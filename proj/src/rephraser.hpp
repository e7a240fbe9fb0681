#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace qoqa {

/// Produces rephrased queries for a prompt. rephrase() returns exactly
/// `count` trimmed, non-empty strings with no duplicates among them, padding
/// by retry where the backend allows it.
class Rephraser {
public:
    virtual ~Rephraser() = default;

    virtual std::vector<std::string> rephrase(const std::string& prompt, std::size_t count,
                                              double temperature) = 0;
};

/// Deterministic offline rephraser: echoes the prompt's original query with a
/// running " (vN)" suffix, N increasing across calls.
class MockEchoRephraser : public Rephraser {
public:
    std::vector<std::string> rephrase(const std::string& prompt, std::size_t count,
                                      double temperature) override;

private:
    std::size_t next_variant_ = 1;
};

/// Replays a JSONL script: line j is a JSON array of strings returned by call
/// j. A call short of `count` strings consumes following lines (up to 3 lines
/// per call) before failing; an exhausted script is a failure.
class MockScriptedRephraser : public Rephraser {
public:
    explicit MockScriptedRephraser(const std::string& script_path);
    explicit MockScriptedRephraser(std::vector<std::vector<std::string>> script);

    std::vector<std::string> rephrase(const std::string& prompt, std::size_t count,
                                      double temperature) override;

private:
    std::vector<std::vector<std::string>> script_;
    std::size_t next_line_ = 0;
};

struct LlmRephraserConfig {
    std::string base_url;  // chat-completions root, e.g. http://host:port/v1
    std::string model = "gpt-3.5-turbo";
    std::string api_key;
    int max_attempts = 3;
    int timeout_seconds = 60;
    int max_concurrent = 4;  // global in-flight bound shared by all instances
};

/// Chat-completions-style HTTP rephraser. One request per call asking for
/// `count` rephrasings as lines; usable lines are accumulated across retries.
class LlmHttpRephraser : public Rephraser {
public:
    explicit LlmHttpRephraser(LlmRephraserConfig config);

    std::vector<std::string> rephrase(const std::string& prompt, std::size_t count,
                                      double temperature) override;

private:
    LlmRephraserConfig config_;
};

/// Wraps another rephraser and records call counts, requested totals and
/// prompt fingerprints. Used by traces and tests.
class RecordingRephraser : public Rephraser {
public:
    explicit RecordingRephraser(Rephraser& inner) : inner_(inner) {}

    std::vector<std::string> rephrase(const std::string& prompt, std::size_t count,
                                      double temperature) override;

    std::size_t calls() const { return prompts_.size(); }
    std::size_t total_requested() const { return total_requested_; }
    const std::vector<std::string>& prompts() const { return prompts_; }
    std::vector<std::string> prompt_hashes() const;

private:
    Rephraser& inner_;
    std::vector<std::string> prompts_;
    std::size_t total_requested_ = 0;
};

}  // namespace qoqa
