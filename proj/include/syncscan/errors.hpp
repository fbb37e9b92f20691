#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace syncscan {

// Root of all library errors. CLI maps these to exit code 1 unless a more
// specific code applies.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File I/O or container-level failures (missing file, short read, bad RIFF).
class IoError : public Error {
public:
    using Error::Error;
};

// Structurally valid container with unsupported or malformed contents.
class FormatError : public Error {
public:
    using Error::Error;
};

// Precondition violations on operation arguments.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A payload symbol fell below the power floor during extraction.
class MissingSymbolError : public Error {
public:
    MissingSymbolError(int index, const std::string& what)
        : Error(what), symbol_index(index) {}
    int symbol_index;
};

class ReassembleError : public Error {
public:
    using Error::Error;
};

class MissingIndexError : public ReassembleError {
public:
    MissingIndexError(std::vector<int> idx, int total_, const std::string& what)
        : ReassembleError(what), missing(std::move(idx)), total(total_) {}
    std::vector<int> missing;
    int total;
};

class ConflictingTotalError : public ReassembleError {
public:
    using ReassembleError::ReassembleError;
};

class DuplicateConflictError : public ReassembleError {
public:
    DuplicateConflictError(int index, const std::string& what)
        : ReassembleError(what), seq_index(index) {}
    int seq_index;
};

} // namespace syncscan
