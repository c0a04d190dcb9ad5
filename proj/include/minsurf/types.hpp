#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace minsurf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Index = std::int32_t;

/// Base class for all failures raised by the solver pipeline.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad CLI flags or config-file contents.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// No element is cut by the zero isosurface: the surface left the domain
/// or collapsed entirely.
class EmptyCutError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent mesh/band/dof state that signals a bug upstream.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Iterative solve did not reach the requested tolerance. Carries the
/// residual norm history for diagnosis (missing stabilization shows up
/// as a stagnating tail).
class SolveError : public Error {
 public:
  SolveError(const std::string& what, std::vector<double> history)
      : Error(what), residual_history(std::move(history)) {}

  std::vector<double> residual_history;
};

}  // namespace minsurf
