#pragma once

#include <stdexcept>
#include <string>

namespace spacefield {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Missing mandatory column or malformed header.
struct SchemaError : Error { using Error::Error; };
// Cell-level parse failure; message carries the row index.
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct AlignmentError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
// A required entity (ball, holder, player) is absent from the input frame.
struct InputError : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };
struct ParameterError : Error { using Error::Error; };
struct GeometryError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace spacefield
