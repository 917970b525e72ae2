#include "fgvc/error.hpp"

namespace fgvc {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::DanglingReference: return "DanglingReference";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::BadRatios: return "BadRatios";
    case ErrorKind::InvertedBox: return "InvertedBox";
    case ErrorKind::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorKind::DegeneratePointSet: return "DegeneratePointSet";
    case ErrorKind::NonPositiveSide: return "NonPositiveSide";
    case ErrorKind::InvalidBox: return "InvalidBox";
    case ErrorKind::EmptyCandidates: return "EmptyCandidates";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DuplicateKey: return "DuplicateKey";
    case ErrorKind::UnknownImage: return "UnknownImage";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorKind::EmptyTestSet: return "EmptyTestSet";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind)
{
}

void raise(ErrorKind kind, const std::string& message)
{
    throw Error(kind, message);
}

void raise_malformed(const std::string& file, std::size_t line_no, const std::string& why)
{
    throw Error(ErrorKind::MalformedLine, file + ":" + std::to_string(line_no) + ": " + why);
}

} // namespace fgvc
