#pragma once

#include <stdexcept>
#include <string>

namespace awgif {

// Base for every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// File-level failures carry the offending path.
class FileError : public Error {
public:
    FileError(const std::string& what, std::string path)
        : Error(what + ": " + path), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class MissingFile : public FileError {
public:
    using FileError::FileError;
};

class UnsupportedFormat : public FileError {
public:
    using FileError::FileError;
};

class UnsupportedBitDepth : public FileError {
public:
    using FileError::FileError;
};

class WriteError : public FileError {
public:
    using FileError::FileError;
};

} // namespace awgif
