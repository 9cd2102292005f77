#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace destine {

// Base class for every failure the framework reports deliberately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Randomness source or other unrecoverable crypto-layer failure.
class CryptoError : public Error {
 public:
  using Error::Error;
};

// A public key that is not a valid point on the curve.
class InvalidKeyError : public Error {
 public:
  using Error::Error;
};

// AEAD tag mismatch: wrong key or tampered container. No plaintext escapes.
class AuthenticationError : public Error {
 public:
  using Error::Error;
};

// A container or wire blob whose framing is wrong (magic, version, length).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Decryption succeeded but the payload does not parse.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

// Content or chain state that fails its integrity checks.
class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& what,
                          std::optional<std::size_t> index = std::nullopt)
      : Error(what), block_index(index) {}
  std::optional<std::size_t> block_index;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Remote store endpoint unreachable or misbehaving at the transport level.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Local disk I/O failure.
class StorageError : public Error {
 public:
  using Error::Error;
};

// Candidate built over a tip that is no longer current.
class StaleTipError : public Error {
 public:
  using Error::Error;
};

// A co-signature that does not verify; carries which role failed.
class SignatureRejectedError : public Error {
 public:
  SignatureRejectedError(const std::string& what, std::string which_role)
      : Error(what), role(std::move(which_role)) {}
  std::string role;
};

// Uploader key not in the authorized set.
class AuthorizationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace destine
