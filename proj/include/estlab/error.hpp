#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace estlab {

enum class ErrorKind {
    Parse,
    InvalidPopulation,
    DegeneratePopulation,
    InvalidMoments,
    InvalidSampleSize,
    MissingPopulationSize,
    SampleTooSmall,
    InvalidForm,
    UndefinedEstimate,
    DegenerateSample,
    UndefinedConstant,
    UndefinedPre,
    TooManySamples,
    InvalidSpec,
};

std::string_view to_string(ErrorKind kind);

// Base of every error the library throws. The kind is stable and is what
// callers (and the cli exit-code mapping) should switch on.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

enum class ParseIssue { BadHeader, MalformedRow, NonBinaryAttribute, TooFewUnits };

class ParseError : public Error {
public:
    ParseError(ParseIssue issue, std::size_t line, const std::string& detail);

    [[nodiscard]] ParseIssue issue() const noexcept { return issue_; }
    /// 1-based line in the source stream (the header is line 1).
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    ParseIssue issue_;
    std::size_t line_;
};

class DegenerateSampleError : public Error {
public:
    DegenerateSampleError(const std::string& what, std::optional<std::uint64_t> replicate)
        : Error(ErrorKind::DegenerateSample, what), replicate_(replicate) {}

    /// Replicate (or enumeration) index of the offending sample, when known.
    [[nodiscard]] std::optional<std::uint64_t> replicate() const noexcept { return replicate_; }

private:
    std::optional<std::uint64_t> replicate_;
};

class TooManySamplesError : public Error {
public:
    TooManySamplesError(std::uint64_t count, bool saturated, std::uint64_t guard);

    [[nodiscard]] std::uint64_t count() const noexcept { return count_; }
    /// True when C(N,n) exceeded 2^64-1 and count() is a lower bound.
    [[nodiscard]] bool saturated() const noexcept { return saturated_; }

private:
    std::uint64_t count_;
    bool saturated_;
};

}  // namespace estlab
