#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fgvc {

enum class ErrorKind {
    MissingFile,
    MalformedLine,
    DanglingReference,
    DuplicateId,
    BadRatios,
    InvertedBox,
    ScoreOutOfRange,
    DegeneratePointSet,
    NonPositiveSide,
    InvalidBox,
    EmptyCandidates,
    DimensionMismatch,
    DuplicateKey,
    UnknownImage,
    SingleClass,
    EmptyTrainingSet,
    EmptyTestSet,
    InvalidArgument,
    IoError,
    ConfigError,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the toolkit. `kind()` is the stable, testable part;
/// `what()` carries a human-readable message (file, line, offending id).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

[[noreturn]] void raise_malformed(const std::string& file, std::size_t line_no, const std::string& why);

} // namespace fgvc
