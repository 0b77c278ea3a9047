#pragma once

#include <stdexcept>
#include <string>

namespace evagg {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration that cannot be loaded or violates a model invariant.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An event references a sensor that has no profile in the configuration.
class ConfigMissingSensor : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A scenario references a sensor that has no profile.
class UnknownSensor : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// OLF CSV header does not match the profile's column layout.
class HeaderMismatch : public IoError {
 public:
  using IoError::IoError;
};

class TypeMismatch : public Error {
 public:
  using Error::Error;
};

class MalformedTimestamp : public Error {
 public:
  using Error::Error;
};

class ConceptTreeError : public Error {
 public:
  using Error::Error;
};

class UnknownConcept : public Error {
 public:
  using Error::Error;
};

class NoMatchingLeaf : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class NoLargeCluster : public Error {
 public:
  using Error::Error;
};

class ZeroInformation : public Error {
 public:
  using Error::Error;
};

}  // namespace evagg
