// Run trace: append-only, newline-delimited records. Every record feeds a
// running FNV-1a hash so two runs can be compared without retaining the
// full text.
#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace crsn {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = kFnvOffset) {
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= kFnvPrime;
    }
    return h;
}

inline std::uint64_t fnv1a_bytes(const void* data, std::size_t len,
                                 std::uint64_t h = kFnvOffset) {
    return fnv1a(std::string_view(static_cast<const char*>(data), len), h);
}

class TraceSink {
public:
    // keep=true retains lines in memory for post-run analysis; out, when
    // set, receives each line as it is produced.
    explicit TraceSink(bool keep = true, std::ostream* out = nullptr)
        : keep_(keep), out_(out) {}

    void line(std::string_view record) {
        hash_ = fnv1a(record, hash_);
        hash_ = fnv1a("\n", hash_);
        ++count_;
        if (out_ != nullptr) {
            out_->write(record.data(), static_cast<std::streamsize>(record.size()));
            out_->put('\n');
        }
        if (keep_) {
            lines_.emplace_back(record);
        }
    }

    std::uint64_t hash() const { return hash_; }
    std::size_t count() const { return count_; }
    const std::vector<std::string>& lines() const { return lines_; }

private:
    bool keep_;
    std::ostream* out_;
    std::uint64_t hash_ = kFnvOffset;
    std::size_t count_ = 0;
    std::vector<std::string> lines_;
};

// Formats a double so the exact value round-trips through the trace.
std::string fmt_exact(double v);

// Fixed-point nanosecond timestamp column.
std::string fmt_time(double t);

}  // namespace crsn
