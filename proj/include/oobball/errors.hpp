#pragma once

#include <stdexcept>
#include <string>

namespace oobball {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A coordinate buffer violates the invariants of its space.
class InvalidPoint : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public InvalidPoint {
 public:
  using InvalidPoint::InvalidPoint;
};

class DescriptorMismatch : public Error {
 public:
  using Error::Error;
};

// The geodesic between two points is not unique (e.g. antipodal sphere points).
class NonUniqueGeodesic : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// Observation i is in-bag for every tree, so no out-of-bag prediction exists.
class NoOobTrees : public Error {
 public:
  NoOobTrees(std::size_t index)
      : Error("observation " + std::to_string(index) + " has no out-of-bag trees"), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace oobball
