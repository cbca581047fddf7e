#include "estlab/error.hpp"

namespace estlab {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::InvalidPopulation: return "InvalidPopulation";
    case ErrorKind::DegeneratePopulation: return "DegeneratePopulation";
    case ErrorKind::InvalidMoments: return "InvalidMoments";
    case ErrorKind::InvalidSampleSize: return "InvalidSampleSize";
    case ErrorKind::MissingPopulationSize: return "MissingPopulationSize";
    case ErrorKind::SampleTooSmall: return "SampleTooSmall";
    case ErrorKind::InvalidForm: return "InvalidForm";
    case ErrorKind::UndefinedEstimate: return "UndefinedEstimate";
    case ErrorKind::DegenerateSample: return "DegenerateSample";
    case ErrorKind::UndefinedConstant: return "UndefinedConstant";
    case ErrorKind::UndefinedPre: return "UndefinedPre";
    case ErrorKind::TooManySamples: return "TooManySamples";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    }
    return "Unknown";
}

namespace {

std::string_view issue_text(ParseIssue issue)
{
    switch (issue) {
    case ParseIssue::BadHeader: return "bad header";
    case ParseIssue::MalformedRow: return "malformed row";
    case ParseIssue::NonBinaryAttribute: return "non-binary attribute";
    case ParseIssue::TooFewUnits: return "N < 2";
    }
    return "parse error";
}

}  // namespace

ParseError::ParseError(ParseIssue issue, std::size_t line, const std::string& detail)
    : Error(ErrorKind::Parse,
            std::string(issue_text(issue)) + " at line " + std::to_string(line) +
                (detail.empty() ? std::string() : ": " + detail)),
      issue_(issue),
      line_(line)
{
}

TooManySamplesError::TooManySamplesError(std::uint64_t count, bool saturated, std::uint64_t guard)
    : Error(ErrorKind::TooManySamples,
            "C(N,n) = " + std::string(saturated ? ">" : "") + std::to_string(count) +
                " samples exceeds the enumeration guard of " + std::to_string(guard)),
      count_(count),
      saturated_(saturated)
{
}

}  // namespace estlab
