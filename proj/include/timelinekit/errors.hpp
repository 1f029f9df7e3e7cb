#pragma once

#include <stdexcept>
#include <string>

namespace timelinekit {

// Base for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingMask : Error {
    using Error::Error;
};

struct MalformedRle : Error {
    using Error::Error;
};

// A parsed file violated the schema. `field` is a dotted/indexed path such as
// "detections[3].score" so callers can point at the offending value.
struct SchemaError : Error {
    std::string field;
    SchemaError(std::string field_, const std::string& what_)
        : Error(field_.empty() ? what_ : field_ + ": " + what_), field(std::move(field_)) {}
};

struct InfeasibleConstraint : Error {
    using Error::Error;
};

struct LayoutOverflow : Error {
    using Error::Error;
};

struct TooFewMarks : Error {
    using Error::Error;
};

struct NoElements : Error {
    using Error::Error;
};

struct EmptyForeground : Error {
    using Error::Error;
};

struct DegenerateInput : Error {
    using Error::Error;
};

struct NotTextLike : Error {
    using Error::Error;
};

struct NoEvents : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct TemplateIncomplete : Error {
    using Error::Error;
};

struct InsufficientSlots : Error {
    using Error::Error;
};

struct NoGroundTruth : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace timelinekit
