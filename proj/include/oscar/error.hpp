#pragma once

#include <stdexcept>
#include <string>

namespace oscar {

/// Base class for every failure reported by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or incompatible on-disk data (DB files, manifests, meta.tsv).
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace oscar
