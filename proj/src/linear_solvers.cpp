#include "pdm/linear_solvers.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <string>

#include "pdm/errors.hpp"

namespace pdm {

std::string_view to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::direct_lu: return "direct_lu";
    case SolverMethod::gmres_ilu0: return "gmres_ilu0";
    case SolverMethod::cg_jacobi: return "cg_jacobi";
  }
  return "direct_lu";
}

SolverMethod solver_method_from_string(std::string_view name) {
  if (name == "direct_lu") return SolverMethod::direct_lu;
  if (name == "gmres_ilu0") return SolverMethod::gmres_ilu0;
  if (name == "cg_jacobi") return SolverMethod::cg_jacobi;
  throw InvalidArgument("unknown linear solver '" + std::string(name) + "'");
}

void SolverConfig::check() const {
  if (!(rtol > 0.0) || !(atol >= 0.0)) throw InvalidArgument("solver tolerances must be positive");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be at least 1");
  if (restart < 1) throw InvalidArgument("restart must be at least 1");
}

// ---------------------------------------------------------------------------
// Sparse LU (Eigen, column ordering by COLAMD).

struct LuFactorization::Impl {
  int n = 0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

namespace {

// Names the offending row of a singular matrix: an empty row if there is one, otherwise
// the row that Eigen's pivot failure maps back to.
int singular_row(const CsrMatrix& a, const std::string& message, const Eigen::PermutationMatrix<Eigen::Dynamic>& cols) {
  const auto ptr = a.row_ptr();
  const auto val = a.values();
  for (int r = 0; r < a.rows(); ++r) {
    bool empty = true;
    for (int k = ptr[r]; k < ptr[r + 1]; ++k) empty = empty && val[k] == 0.0;
    if (empty) return r;
  }
  const auto pos = message.find_last_of(' ');
  if (pos == std::string::npos) return -1;
  try {
    const int j = std::stoi(message.substr(pos + 1)) - 1;
    if (j >= 0 && j < cols.size()) return cols.indices()[j];
  } catch (const std::exception&) {
  }
  return -1;
}

}  // namespace

LuFactorization::LuFactorization(const CsrMatrix& a) : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw InvalidArgument("LU needs a square matrix");
  auto& m = *impl_;
  m.n = a.rows();
  if (m.n == 0) return;
  const Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor>> rows(
      a.rows(), a.cols(), static_cast<int>(a.nnz()), a.row_ptr().data(), a.col_idx().data(), a.values().data());
  const Eigen::SparseMatrix<double> cols = rows;
  m.lu.analyzePattern(cols);
  m.lu.factorize(cols);
  if (m.lu.info() != Eigen::Success) {
    const std::string msg = m.lu.lastErrorMessage();
    const int row = singular_row(a, msg, m.lu.colsPermutation());
    throw SolverError("singular matrix: zero pivot at row " + std::to_string(row), 0, {});
  }
}

LuFactorization::~LuFactorization() = default;
LuFactorization::LuFactorization(LuFactorization&&) noexcept = default;
LuFactorization& LuFactorization::operator=(LuFactorization&&) noexcept = default;

std::vector<double> LuFactorization::solve(std::span<const double> b) const {
  const auto& m = *impl_;
  if (static_cast<int>(b.size()) != m.n) throw InvalidArgument("rhs size does not match factorization");
  std::vector<double> x(m.n, 0.0);
  if (m.n == 0) return x;
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), m.n);
  Eigen::Map<Eigen::VectorXd>(x.data(), m.n) = m.lu.solve(rhs);
  if (m.lu.info() != Eigen::Success) throw SolverError("LU solve failed", 0, {});
  return x;
}

// ---------------------------------------------------------------------------
// ILU(0)

Ilu0::Ilu0(const CsrMatrix& a) : lu_(a), diag_(a.rows(), -1) {
  const int n = a.rows();
  const auto ptr = lu_.row_ptr();
  const auto col = lu_.col_idx();
  auto val = lu_.values();
  for (int i = 0; i < n; ++i) {
    diag_[i] = lu_.find(i, i);
    if (diag_[i] < 0) throw SolverError("ILU(0): missing diagonal in row " + std::to_string(i), 0, {});
  }
  for (int i = 0; i < n; ++i) {
    for (int k = ptr[i]; k < ptr[i + 1] && col[k] < i; ++k) {
      const int j = col[k];
      const double pivot = val[diag_[j]];
      if (pivot == 0.0) throw SolverError("ILU(0): zero pivot at row " + std::to_string(j), 0, {});
      val[k] /= pivot;
      // Row i -= l_ij * (upper part of row j), restricted to the pattern of row i.
      int p = k + 1;
      for (int q = diag_[j] + 1; q < ptr[j + 1]; ++q) {
        while (p < ptr[i + 1] && col[p] < col[q]) ++p;
        if (p == ptr[i + 1]) break;
        if (col[p] == col[q]) val[p] -= val[k] * val[q];
      }
    }
    if (val[diag_[i]] == 0.0) throw SolverError("ILU(0): zero pivot at row " + std::to_string(i), 0, {});
  }
}

void Ilu0::apply(std::span<const double> r, std::span<double> z) const {
  const int n = lu_.rows();
  const auto ptr = lu_.row_ptr();
  const auto col = lu_.col_idx();
  const auto val = lu_.values();
  for (int i = 0; i < n; ++i) {
    double s = r[i];
    for (int k = ptr[i]; k < diag_[i]; ++k) s -= val[k] * z[col[k]];
    z[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = z[i];
    for (int k = diag_[i] + 1; k < ptr[i + 1]; ++k) s -= val[k] * z[col[k]];
    z[i] = s / val[diag_[i]];
  }
}

// ---------------------------------------------------------------------------
// Restarted GMRES, right preconditioned so the monitored residual is the true one.

SolveReport gmres_ilu0(const CsrMatrix& a, std::span<const double> b, const SolverConfig& cfg) {
  cfg.check();
  const int n = a.rows();
  SolveReport rep;
  rep.x.assign(n, 0.0);
  const double target = std::max(cfg.atol, cfg.rtol * norm2(b));
  const Ilu0 m(a);

  const int restart = std::min(cfg.restart, std::max(n, 1));
  std::vector<std::vector<double>> v(restart + 1, std::vector<double>(n));
  std::vector<std::vector<double>> h(restart + 1, std::vector<double>(restart, 0.0));
  std::vector<double> cs(restart), sn(restart), g(restart + 1), z(n), w(n), r(n);

  auto residual = [&] {
    a.multiply(rep.x, r);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    return norm2(r);
  };

  double beta = residual();
  rep.residual_history.push_back(beta);
  while (beta > target) {
    if (rep.iterations >= cfg.max_iterations) {
      throw SolverError("GMRES did not converge in " + std::to_string(rep.iterations) + " iterations",
                        rep.iterations, rep.residual_history);
    }
    for (int i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int j = 0;
    for (; j < restart && rep.iterations < cfg.max_iterations; ++j) {
      ++rep.iterations;
      m.apply(v[j], z);
      a.multiply(z, w);
      for (int i = 0; i <= j; ++i) {  // modified Gram-Schmidt
        double d = 0.0;
        for (int k = 0; k < n; ++k) d += w[k] * v[i][k];
        h[i][j] = d;
        for (int k = 0; k < n; ++k) w[k] -= d * v[i][k];
      }
      h[j + 1][j] = norm2(w);
      if (h[j + 1][j] > 0.0) {
        for (int k = 0; k < n; ++k) v[j + 1][k] = w[k] / h[j + 1][j];
      }
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
        h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
        h[i][j] = t;
      }
      const double rho = std::hypot(h[j][j], h[j + 1][j]);
      if (rho == 0.0) {
        throw SolverError("GMRES breakdown", rep.iterations, rep.residual_history);
      }
      cs[j] = h[j][j] / rho;
      sn[j] = h[j + 1][j] / rho;
      h[j][j] = rho;
      h[j + 1][j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      rep.residual_history.push_back(std::abs(g[j + 1]));
      if (std::abs(g[j + 1]) <= target) {
        ++j;
        break;
      }
    }
    // Back substitution and update x += M^-1 V y.
    std::vector<double> y(j);
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int k = i + 1; k < j; ++k) s -= h[i][k] * y[k];
      y[i] = s / h[i][i];
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int i = 0; i < j; ++i) {
      for (int k = 0; k < n; ++k) w[k] += y[i] * v[i][k];
    }
    m.apply(w, z);
    for (int k = 0; k < n; ++k) rep.x[k] += z[k];
    const double previous = beta;
    beta = residual();
    rep.residual_history.back() = beta;
    if (beta > target && beta >= previous * (1.0 - 1e-12)) {
      throw SolverError("GMRES stagnated", rep.iterations, rep.residual_history);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Jacobi-preconditioned conjugate gradients for symmetric positive definite systems.

SolveReport cg_jacobi(const CsrMatrix& a, std::span<const double> b, const SolverConfig& cfg) {
  cfg.check();
  const int n = a.rows();
  SolveReport rep;
  rep.x.assign(n, 0.0);
  std::vector<double> inv_diag(n);
  for (int i = 0; i < n; ++i) {
    const double d = a.coeff(i, i);
    if (!(d > 0.0)) throw SolverError("CG: non-positive diagonal at row " + std::to_string(i), 0, {});
    inv_diag[i] = 1.0 / d;
  }
  const double target = std::max(cfg.atol, cfg.rtol * norm2(b));
  std::vector<double> r(b.begin(), b.end()), z(n), p(n), q(n);
  for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = 0.0;
  for (int i = 0; i < n; ++i) rz += r[i] * z[i];
  double rnorm = norm2(r);
  rep.residual_history.push_back(rnorm);
  while (rnorm > target) {
    if (rep.iterations >= cfg.max_iterations) {
      throw SolverError("CG did not converge in " + std::to_string(rep.iterations) + " iterations",
                        rep.iterations, rep.residual_history);
    }
    ++rep.iterations;
    a.multiply(p, q);
    double pq = 0.0;
    for (int i = 0; i < n; ++i) pq += p[i] * q[i];
    if (!(pq > 0.0)) throw SolverError("CG: matrix is not positive definite", rep.iterations, rep.residual_history);
    const double alpha = rz / pq;
    for (int i = 0; i < n; ++i) {
      rep.x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
      z[i] = inv_diag[i] * r[i];
    }
    double rz_new = 0.0;
    for (int i = 0; i < n; ++i) rz_new += r[i] * z[i];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rnorm = norm2(r);
    rep.residual_history.push_back(rnorm);
  }
  return rep;
}

SolveReport solve(const SparseSystem& system, const SolverConfig& cfg) {
  cfg.check();
  if (system.matrix.rows() != system.matrix.cols()) throw InvalidArgument("system matrix is not square");
  if (static_cast<int>(system.rhs.size()) != system.matrix.rows()) {
    throw InvalidArgument("rhs size does not match matrix");
  }
  const SparseSystem constrained =
      system.constrained || system.constraints.empty() ? system : apply_constraints(system);
  const auto& a = constrained.matrix;
  const auto& b = constrained.rhs;

  SolveReport rep;
  switch (cfg.method) {
    case SolverMethod::direct_lu: {
      if (static_cast<int>(constrained.constraints.size()) == a.rows()) {
        rep.x = b;
        break;
      }
      rep.x = LuFactorization(a).solve(b);
      rep.iterations = 1;
      std::vector<double> r = a.multiply(rep.x);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
      rep.residual_history = {norm2(b), norm2(r)};
      break;
    }
    case SolverMethod::gmres_ilu0: rep = gmres_ilu0(a, b, cfg); break;
    case SolverMethod::cg_jacobi: rep = cg_jacobi(a, b, cfg); break;
  }
  for (const auto& [row, g] : constrained.constraints) rep.x[row] = g;
  return rep;
}

}  // namespace pdm
