#pragma once

#include <stdexcept>
#include <string>

namespace stackline {

/// Base of every error raised by the toolkit. The concrete type names the
/// failure category; the message names the offending row, column, stage, or
/// learner where one exists.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (ragged CSV row, unparseable cell).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Column layout problems: duplicate headers, unknown columns, non-binary target.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Invalid user configuration. The CLI maps this to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

class BalanceError : public Error {
public:
    using Error::Error;
};

class PipelineError : public Error {
public:
    using Error::Error;
};

/// Statistical computation impossible on the given data (empty or degenerate input).
class StatError : public Error {
public:
    using Error::Error;
};

/// Argument outside a function's mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite objective.
class DivergenceError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    using Error::Error;
};

class SelectionError : public Error {
public:
    using Error::Error;
};

class StratificationError : public Error {
public:
    using Error::Error;
};

}  // namespace stackline
