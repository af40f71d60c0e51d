#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace asmplan {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define ASMPLAN_DEFINE_ERROR(Name)              \
    class Name : public Error {                 \
    public:                                     \
        using Error::Error;                     \
    };

// geometry
ASMPLAN_DEFINE_ERROR(EmptyShape)
ASMPLAN_DEFINE_ERROR(Disconnected)
ASMPLAN_DEFINE_ERROR(InvalidMesh)
ASMPLAN_DEFINE_ERROR(Interpenetration)
ASMPLAN_DEFINE_ERROR(DegenerateHull)

// analyzers
ASMPLAN_DEFINE_ERROR(NoContacts)
ASMPLAN_DEFINE_ERROR(UnknownBody)
ASMPLAN_DEFINE_ERROR(NoAssistGrasp)

// planner
ASMPLAN_DEFINE_ERROR(TooManyPieces)
ASMPLAN_DEFINE_ERROR(InvalidOrder)
ASMPLAN_DEFINE_ERROR(NoFeasibleOrder)

// io
ASMPLAN_DEFINE_ERROR(ParseError)
ASMPLAN_DEFINE_ERROR(IoError)

#undef ASMPLAN_DEFINE_ERROR

/// Carries every violated invariant found while validating a scene.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> problems)
        : Error(join(problems)), problems_(std::move(problems)) {}

    const std::vector<std::string>& problems() const { return problems_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out = "scene validation failed:";
        for (const auto& item : items) {
            out += "\n  - ";
            out += item;
        }
        return out;
    }

    std::vector<std::string> problems_;
};

}  // namespace asmplan
