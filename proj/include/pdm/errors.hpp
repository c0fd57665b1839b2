#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pdm {

using InvalidArgument = std::invalid_argument;

class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised while building a discrete system from a mesh (degenerate or inverted elements).
class AssemblyError : public std::runtime_error {
 public:
  AssemblyError(const std::string& what, int element) : std::runtime_error(what), element_(element) {}
  int element() const { return element_; }

 private:
  int element_;
};

/// Linear or nonlinear solver failure. Carries the iteration count and residual history.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int iterations, std::vector<double> history)
      : std::runtime_error(what), iterations_(iterations), history_(std::move(history)) {}
  int iterations() const { return iterations_; }
  const std::vector<double>& history() const { return history_; }
  double final_residual() const { return history_.empty() ? 0.0 : history_.back(); }

 private:
  int iterations_;
  std::vector<double> history_;
};

/// A mesh-update step that could not be completed; the caller's state is untouched.
class StepRejected : public std::runtime_error {
 public:
  StepRejected(const std::string& what, std::vector<int> offending)
      : std::runtime_error(what), offending_(std::move(offending)) {}
  const std::vector<int>& offending() const { return offending_; }

 private:
  std::vector<int> offending_;
};

/// A time loop stopped at `slab`; what() carries the cause.
class SimulationHalted : public std::runtime_error {
 public:
  SimulationHalted(const std::string& what, int slab) : std::runtime_error(what), slab_(slab) {}
  int slab() const { return slab_; }

 private:
  int slab_;
};

}  // namespace pdm
