#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "pdm/sparse.hpp"

namespace pdm {

enum class SolverMethod { direct_lu, gmres_ilu0, cg_jacobi };

std::string_view to_string(SolverMethod m);
SolverMethod solver_method_from_string(std::string_view name);

struct SolverConfig {
  SolverMethod method = SolverMethod::direct_lu;
  double rtol = 1e-10;
  double atol = 1e-14;
  int max_iterations = 2000;
  int restart = 50;  // GMRES Krylov dimension

  void check() const;
};

struct SolveReport {
  std::vector<double> x;
  int iterations = 0;
  std::vector<double> residual_history;  // unpreconditioned 2-norms for the iterative methods
};

/// Sparse LU factorization. Throws SolverError naming the row of a zero pivot.
class LuFactorization {
 public:
  explicit LuFactorization(const CsrMatrix& a);
  ~LuFactorization();
  LuFactorization(LuFactorization&&) noexcept;
  LuFactorization& operator=(LuFactorization&&) noexcept;
  LuFactorization(const LuFactorization&) = delete;
  LuFactorization& operator=(const LuFactorization&) = delete;

  std::vector<double> solve(std::span<const double> b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Zero fill-in incomplete LU on the pattern of `a`.
class Ilu0 {
 public:
  explicit Ilu0(const CsrMatrix& a);
  void apply(std::span<const double> r, std::span<double> z) const;

 private:
  CsrMatrix lu_;
  std::vector<int> diag_;
};

SolveReport gmres_ilu0(const CsrMatrix& a, std::span<const double> b, const SolverConfig& cfg);
SolveReport cg_jacobi(const CsrMatrix& a, std::span<const double> b, const SolverConfig& cfg);

/// Solves the system, applying its constraints first if that has not happened yet.
/// Constrained components of the result equal the prescribed values exactly.
SolveReport solve(const SparseSystem& system, const SolverConfig& cfg = {});

}  // namespace pdm
