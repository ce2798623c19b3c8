#pragma once

#include <stdexcept>
#include <string>

namespace panpose {

// Base class for all toolkit errors. Subclasses map onto CLI exit codes:
// domain/validation failures exit 1, I/O and usage failures exit 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input that could not be decoded at all (bad JSON, bad CSV, bad binary header).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t byte_offset = 0)
        : Error(what), byte_offset(byte_offset) {}
    std::size_t byte_offset;
};

// Structurally decodable input that violates the dataset schema (duplicate ids,
// keypoint-count mismatch, multiple categories, ...).
class SchemaError : public Error {
    using Error::Error;
};

// Conversion-table / merge failures (unknown source keypoint, injectivity
// collision, vocabulary mismatch between datasets).
class MergeError : public Error {
    using Error::Error;
};

// Invalid argument to a numeric operation (non-positive sigma, shape mismatch,
// empty dataset, non-finite gradient).
class ParamError : public Error {
    using Error::Error;
};

// Evaluation failures (vocabulary mismatch, unknown image id, no valid ground truth).
class EvalError : public Error {
    using Error::Error;
};

// Filesystem-level failures (missing file, unwritable output).
class IoError : public Error {
    using Error::Error;
};

}  // namespace panpose
