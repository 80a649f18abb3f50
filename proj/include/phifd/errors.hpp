#pragma once

#include <stdexcept>
#include <string>

namespace phifd {

/// Invalid user input: bad grid, unknown case, inconsistent parameters.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The level set does not describe a usable domain on the grid.
class GeometryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class EmptyDomainError : public GeometryError {
public:
  using GeometryError::GeometryError;
};

class DomainNotEmbeddedError : public GeometryError {
public:
  using GeometryError::GeometryError;
};

class AssemblyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public SolverError {
public:
  using SolverError::SolverError;
};

class BreakdownError : public SolverError {
public:
  using SolverError::SolverError;
};

} // namespace phifd
