#pragma once
// Error type shared by every module. One exception class carrying a code and
// the offending subject (EPC, fixture id, line number, ...).

#include <stdexcept>
#include <string>
#include <string_view>

namespace shelfmap {

enum class ErrorCode {
    // ingest
    MalformedRow,
    EmptyStocktake,
    ConflictingBinding,
    NoReferenceTags,
    InvalidRegistry,
    UnknownId,
    BadHeader,
    FileNotFound,
    // preprocess / cluster / warp
    DegenerateTime,
    EmptyInput,
    NoCluster,
    InfeasibleWindow,
    InvalidConfig,
    // assign / eval
    NoFiniteDistance,
    MissingTruth,
    MissingCell,
    UnmappedFixture,
};

inline std::string_view to_string(ErrorCode c) {
    switch (c) {
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::EmptyStocktake: return "EmptyStocktake";
        case ErrorCode::ConflictingBinding: return "ConflictingBinding";
        case ErrorCode::NoReferenceTags: return "NoReferenceTags";
        case ErrorCode::InvalidRegistry: return "InvalidRegistry";
        case ErrorCode::UnknownId: return "UnknownId";
        case ErrorCode::BadHeader: return "BadHeader";
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::DegenerateTime: return "DegenerateTime";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::NoCluster: return "NoCluster";
        case ErrorCode::InfeasibleWindow: return "InfeasibleWindow";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::NoFiniteDistance: return "NoFiniteDistance";
        case ErrorCode::MissingTruth: return "MissingTruth";
        case ErrorCode::MissingCell: return "MissingCell";
        case ErrorCode::UnmappedFixture: return "UnmappedFixture";
    }
    return "Unknown";
}

// Input errors come from files and arguments; everything else is raised by the
// pipeline itself. The CLI maps the two groups to distinct exit codes.
inline bool is_input_error(ErrorCode c) {
    switch (c) {
        case ErrorCode::MalformedRow:
        case ErrorCode::EmptyStocktake:
        case ErrorCode::ConflictingBinding:
        case ErrorCode::NoReferenceTags:
        case ErrorCode::InvalidRegistry:
        case ErrorCode::UnknownId:
        case ErrorCode::BadHeader:
        case ErrorCode::FileNotFound:
        case ErrorCode::InvalidConfig:
        case ErrorCode::MissingTruth:
        case ErrorCode::MissingCell:
        case ErrorCode::UnmappedFixture:
            return true;
        default:
            return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string subject, const std::string& detail = {})
        : std::runtime_error(format(code, subject, detail)),
          code_(code),
          subject_(std::move(subject)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& subject() const noexcept { return subject_; }

private:
    static std::string format(ErrorCode code, const std::string& subject,
                              const std::string& detail) {
        std::string msg(to_string(code));
        if (!subject.empty()) msg += "(" + subject + ")";
        if (!detail.empty()) msg += ": " + detail;
        return msg;
    }

    ErrorCode code_;
    std::string subject_;
};

}  // namespace shelfmap
