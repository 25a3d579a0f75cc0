#pragma once

#include <stdexcept>
#include <string>

namespace tripillai {

// Base for every failure the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An inequality or value could not be decided within the precision cap.
class CertificationError : public Error {
 public:
  using Error::Error;
};

// Caller violated a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Lattice reduction could not produce a bound (typically M too small).
class ReductionError : public Error {
 public:
  using Error::Error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

}  // namespace tripillai
