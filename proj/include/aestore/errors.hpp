#pragma once

#include <stdexcept>
#include <string>

namespace aestore {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Configuration violates a lattice/codec invariant (alpha != 3, p != s, ...).
struct InvalidConfigError : Error {
  using Error::Error;
};

// Node index 0 or otherwise outside the lattice.
struct InvalidIndexError : Error {
  using Error::Error;
};

struct EmptyFileError : Error {
  using Error::Error;
};

// encode/reassemble called with data blocks missing.
struct IncompleteInputError : Error {
  using Error::Error;
};

struct ChunkTooLargeError : Error {
  using Error::Error;
};

// Backend I/O failure (disk write error, gateway unreachable on put).
struct StoreUnavailableError : Error {
  using Error::Error;
};

// Payload does not hash to the address it was stored or repaired under.
struct CorruptionError : Error {
  using Error::Error;
};

// Gateway rejected the request with a non-retryable client error.
struct PermanentRejectionError : Error {
  using Error::Error;
};

}  // namespace aestore
