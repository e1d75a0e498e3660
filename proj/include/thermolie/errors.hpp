#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace thermolie {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: parameters, configuration, matrices that fail a precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure while advancing a trajectory.
class SolverError : public Error {
 public:
  using Error::Error;
};

class NotSkew : public ValidationError {
 public:
  explicit NotSkew(double defect)
      : ValidationError("matrix is not skew-symmetric (||M + M^T||_inf = " +
                        std::to_string(defect) + ")"),
        defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_;
};

class NotARotation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SingularLinearSolve : public SolverError {
 public:
  using SolverError::SolverError;
};

class InvalidParameter : public ValidationError {
 public:
  InvalidParameter(std::string field, std::string why)
      : ValidationError(field + ": " + why), field_(std::move(field)), why_(std::move(why)) {}
  const std::string& field() const { return field_; }
  const std::string& why() const { return why_; }

 private:
  std::string field_;
  std::string why_;
};

class DegenerateLever : public ValidationError {
 public:
  DegenerateLever()
      : ValidationError("center of mass coincides with the fixed point; set the axis explicitly") {}
};

class SingularInertia : public ValidationError {
 public:
  SingularInertia() : ValidationError("inertia tensor is singular") {}
};

class NoConvergence : public SolverError {
 public:
  NoConvergence(int iterations, double last_residual)
      : SolverError("Newton did not converge after " + std::to_string(iterations) +
                    " iterations (residual " + std::to_string(last_residual) + ")"),
        iterations_(iterations),
        last_residual_(last_residual) {}
  int iterations() const { return iterations_; }
  double last_residual() const { return last_residual_; }

 private:
  int iterations_;
  double last_residual_;
};

class SingularJacobian : public SolverError {
 public:
  explicit SingularJacobian(double condition_estimate)
      : SolverError("singular Newton Jacobian (condition estimate " +
                    std::to_string(condition_estimate) + ")"),
        condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

class NonFiniteState : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Wraps a solver failure with the index of the step that produced it.
class StepFailure : public SolverError {
 public:
  StepFailure(std::size_t step, const std::string& what)
      : SolverError("step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

class InsufficientData : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ReferenceTooCoarse : public ValidationError {
 public:
  ReferenceTooCoarse(double h_ref, double bound)
      : ValidationError("reference step " + std::to_string(h_ref) + " exceeds bound " +
                        std::to_string(bound)) {}
};

}  // namespace thermolie
