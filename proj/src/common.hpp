#pragma once

#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qoqa {

enum class ErrorCode {
    Internal = 1,
    InvalidArgument,
    Io,
    MalformedLine,
    DuplicateId,
    DimensionMismatch,
    EmptyCorpus,
    EmptyStore,
    EmptyQrels,
    UnknownDocument,
    ProviderUnavailable,
    RephraserFailure,
};

const char* error_code_name(ErrorCode code);

/// Single exception type for the whole library; carries a stable code so the
/// C API can translate it without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const { return code_; }

    static Error malformed_line(const std::string& path, std::size_t line_no,
                                const std::string& detail);
    static Error duplicate_id(const std::string& path, std::size_t line_no,
                              const std::string& id);

private:
    ErrorCode code_;
};

// -- hashing ------------------------------------------------------------

uint64_t fnv1a64(std::string_view data);

/// splitmix64 step; the usual seed-expansion generator.
uint64_t splitmix64(uint64_t& state);

/// Hex digest of fnv1a64, used for prompt fingerprints in traces.
std::string hash_hex(std::string_view data);

// -- string helpers -----------------------------------------------------

std::string trim(std::string_view s);
std::vector<std::string> split_lines(std::string_view text);

/// Shortest representation that round-trips a double exactly.
std::string format_double(double value);
bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, long long& out);

// -- file helpers -------------------------------------------------------

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);
bool file_exists(const std::string& path);

/// Calls fn(line_number, line) for every line; line numbers start at 1.
/// Handles both \n and \r\n endings; the trailing \r is stripped.
template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line;
        if (nl == std::string_view::npos) {
            if (pos == text.size()) break;
            line = std::string_view(text).substr(pos);
            pos = text.size() + 1;
        } else {
            line = std::string_view(text).substr(pos, nl - pos);
            pos = nl + 1;
        }
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        fn(++line_no, line);
    }
}

// -- little-endian binary encoding (index/store artifacts) ---------------

void put_u32(std::string& out, uint32_t v);
void put_u64(std::string& out, uint64_t v);
void put_f64(std::string& out, double v);
void put_str(std::string& out, std::string_view s);

class BinaryReader {
public:
    explicit BinaryReader(std::string_view data) : data_(data) {}

    uint32_t u32();
    uint64_t u64();
    double f64();
    std::string str();
    bool at_end() const { return pos_ == data_.size(); }

private:
    void need(std::size_t n);

    std::string_view data_;
    std::size_t pos_ = 0;
};

// -- concurrency ----------------------------------------------------------

/// Counting in-flight bound for outbound requests. configure() may raise or
/// lower the limit at any time; acquire() blocks while the limit is reached.
class RequestBudget {
public:
    void configure(int limit);
    void acquire();
    void release();

private:
    std::mutex mu_;
    std::condition_variable cv_;
    int limit_ = 4;
    int in_flight_ = 0;
};

/// RAII slot in a RequestBudget.
class BudgetGuard {
public:
    explicit BudgetGuard(RequestBudget& budget) : budget_(budget) { budget_.acquire(); }
    ~BudgetGuard() { budget_.release(); }
    BudgetGuard(const BudgetGuard&) = delete;
    BudgetGuard& operator=(const BudgetGuard&) = delete;

private:
    RequestBudget& budget_;
};

}  // namespace qoqa
