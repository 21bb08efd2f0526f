#pragma once

#include <stdexcept>
#include <string>

namespace bargmann {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A finite-difference stencil or a query point left the sampled domain.
class StencilOutOfDomain : public Error {
 public:
  using Error::Error;
};

class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A point or path is outside the region covered by the backend's gauge charts.
class AtlasCoverage : public Error {
 public:
  using Error::Error;
};

class IntegrationFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace bargmann
