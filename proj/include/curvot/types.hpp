// Shared scalar/tensor types and error taxonomy.

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace curvot {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Dense rank-3 array, indices in [0,n).
struct Tensor3 {
  int n = 0;
  std::vector<double> a;

  Tensor3() = default;
  explicit Tensor3(int dim) : n(dim), a(static_cast<size_t>(dim) * dim * dim, 0.0) {}

  double& operator()(int i, int j, int k) { return a[(static_cast<size_t>(i) * n + j) * n + k]; }
  double operator()(int i, int j, int k) const {
    return a[(static_cast<size_t>(i) * n + j) * n + k];
  }
};

// Dense rank-4 array.
struct Tensor4 {
  int n = 0;
  std::vector<double> a;

  Tensor4() = default;
  explicit Tensor4(int dim)
      : n(dim), a(static_cast<size_t>(dim) * dim * dim * dim, 0.0) {}

  double& operator()(int i, int j, int k, int l) {
    return a[((static_cast<size_t>(i) * n + j) * n + k) * n + l];
  }
  double operator()(int i, int j, int k, int l) const {
    return a[((static_cast<size_t>(i) * n + j) * n + k) * n + l];
  }
};

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DegenerateMetricError : public Error {
public:
  using Error::Error;
};

class DegeneratePlaneError : public Error {
public:
  using Error::Error;
};

class InvalidFrameError : public Error {
public:
  using Error::Error;
};

class NumericPrecisionError : public Error {
public:
  using Error::Error;
};

// Trajectory left the chart; carries the escape time in [0,1].
class DomainEscapeError : public Error {
public:
  DomainEscapeError(const std::string& what, double t) : Error(what), exit_time(t) {}
  double exit_time;
};

// Jacobi frame lost full rank; carries the first failing time.
class DegenerateFrameError : public Error {
public:
  DegenerateFrameError(const std::string& what, double t) : Error(what), fail_time(t) {}
  double fail_time;
};

class ImmersionError : public Error {
public:
  using Error::Error;
};

class UnsupportedInstanceError : public Error {
public:
  using Error::Error;
};

class PreconditionError : public Error {
public:
  using Error::Error;
};

class ScenarioInvalidError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  ConfigError(const std::string& what, int line_no = -1) : Error(what), line(line_no) {}
  int line;
};

}  // namespace curvot
