#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pdm/errors.hpp"
#include "pdm/linear_solvers.hpp"
#include "pdm/sparse.hpp"

using namespace pdm;

namespace {

using Dense = std::vector<std::vector<double>>;

Dense to_dense(const CsrMatrix& a) {
  Dense d(a.rows(), std::vector<double>(a.cols(), 0.0));
  for (int r = 0; r < a.rows(); ++r) {
    for (int k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) d[r][a.col_idx()[k]] = a.values()[k];
  }
  return d;
}

// Gaussian elimination with partial pivoting, the oracle for the sparse solvers.
std::vector<double> dense_solve(Dense a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    }
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    for (int i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (int j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

CsrMatrix poisson_1d(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0});
    if (i > 0) t.push_back({i, i - 1, -1.0});
    if (i + 1 < n) t.push_back({i, i + 1, -1.0});
  }
  return CsrMatrix::from_triplets(n, n, t);
}

// Upwinded convection-diffusion on an m x m grid: nonsymmetric, diagonally dominant.
CsrMatrix convection_diffusion(int m, double peclet) {
  std::vector<Triplet> t;
  const auto id = [m](int i, int j) { return i * m + j; };
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const int r = id(i, j);
      t.push_back({r, r, 4.0 + peclet});
      if (i > 0) t.push_back({r, id(i - 1, j), -1.0 - peclet});
      if (i + 1 < m) t.push_back({r, id(i + 1, j), -1.0});
      if (j > 0) t.push_back({r, id(i, j - 1), -1.0});
      if (j + 1 < m) t.push_back({r, id(i, j + 1), -1.0});
    }
  }
  return CsrMatrix::from_triplets(m * m, m * m, t);
}

double residual_norm(const CsrMatrix& a, const std::vector<double>& x, const std::vector<double>& b) {
  auto r = a.multiply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return norm2(r);
}

double relative_difference(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return norm2(d) / norm2(b);
}

}  // namespace

TEST_CASE("triplet assembly sums duplicates and sorts columns") {
  const std::vector<Triplet> t{{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 3.0}, {1, 1, 5.0}};
  const auto a = CsrMatrix::from_triplets(2, 3, t);
  CHECK(a.structure_ok());
  CHECK(a.nnz() == 3);
  CHECK(a.coeff(0, 2) == 4.0);
  CHECK(a.coeff(0, 1) == 0.0);
  CHECK(a.find(0, 1) == -1);
  CHECK(a.col_idx()[0] == 0);
  CHECK(a.col_idx()[1] == 2);
}

TEST_CASE("pattern matrices accept additions inside the pattern only") {
  auto a = CsrMatrix::from_pattern(2, 2, {{1, 0}, {1}});
  CHECK(a.structure_ok());
  a.add(0, 1, 2.5);
  CHECK(a.coeff(0, 1) == 2.5);
  CHECK_THROWS(a.add(1, 0, 1.0));
  a.set_zero();
  CHECK(a.norm_inf() == 0.0);
}

TEST_CASE("matrix-vector product and norms") {
  const auto a = poisson_1d(4);
  const auto y = a.multiply(std::vector<double>{1, 1, 1, 1});
  CHECK(y == std::vector<double>{1, 0, 0, 1});
  CHECK(a.norm_inf() == 4.0);
  CHECK(a.asymmetry() == 0.0);
  CHECK(convection_diffusion(3, 1.0).asymmetry() == 1.0);
}

TEST_CASE("constraining the identity reproduces the prescribed value") {
  SparseSystem s;
  s.matrix = CsrMatrix::from_triplets(3, 3, std::vector<Triplet>{{0, 0, 1}, {1, 1, 1}, {2, 2, 1}});
  s.rhs = {0, 1, 2};
  s.constraints[0] = 5.0;
  const auto x = solve(s).x;
  CHECK(x[0] == 5.0);
  CHECK(x[1] == doctest::Approx(1.0));
  CHECK(x[2] == doctest::Approx(2.0));
}

TEST_CASE("symmetric elimination on a 2x2 system") {
  SparseSystem s;
  s.matrix = CsrMatrix::from_triplets(2, 2, std::vector<Triplet>{{0, 0, 2}, {0, 1, -1}, {1, 0, -1}, {1, 1, 2}});
  s.rhs = {0, 0};
  s.symmetric = true;
  s.constraints[0] = 1.0;
  const auto c = apply_constraints(s);
  CHECK(c.constrained);
  CHECK(c.matrix.coeff(0, 1) == 0.0);
  CHECK(c.matrix.coeff(1, 0) == 0.0);
  CHECK(c.matrix.asymmetry() == 0.0);
  for (auto method : {SolverMethod::direct_lu, SolverMethod::gmres_ilu0, SolverMethod::cg_jacobi}) {
    SolverConfig cfg;
    cfg.method = method;
    const auto x = solve(s, cfg).x;
    CHECK(x[0] == 1.0);
    CHECK(x[1] == doctest::Approx(0.5).epsilon(1e-10));
  }
}

TEST_CASE("nonsymmetric systems use row replacement") {
  SparseSystem s;
  s.matrix = convection_diffusion(3, 2.0);
  s.rhs.assign(9, 1.0);
  s.constraints[4] = -2.0;
  const auto c = apply_constraints(s);
  CHECK(c.matrix.coeff(4, 4) == 1.0);
  CHECK(c.matrix.coeff(4, 1) == 0.0);
  CHECK(solve(s).x[4] == -2.0);
}

TEST_CASE("fully constrained systems return the prescribed vector") {
  SparseSystem s;
  s.matrix = poisson_1d(5);
  s.rhs.assign(5, 1.0);
  s.symmetric = true;
  for (int i = 0; i < 5; ++i) s.constraints[i] = 0.5 * i - 1.0;
  for (auto method : {SolverMethod::direct_lu, SolverMethod::gmres_ilu0, SolverMethod::cg_jacobi}) {
    SolverConfig cfg;
    cfg.method = method;
    const auto x = solve(s, cfg).x;
    for (int i = 0; i < 5; ++i) CHECK(x[i] == 0.5 * i - 1.0);
  }
}

TEST_CASE("constraints on missing rows are rejected") {
  SparseSystem s;
  s.matrix = poisson_1d(3);
  s.rhs.assign(3, 0.0);
  s.constraints[7] = 1.0;
  CHECK_THROWS_AS(apply_constraints(s), InvalidArgument);
}

TEST_CASE("diagonal systems solve to ones") {
  const int n = 20;
  std::vector<Triplet> t;
  std::vector<double> b;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, i + 1.0});
    b.push_back(i + 1.0);
  }
  SparseSystem s;
  s.matrix = CsrMatrix::from_triplets(n, n, t);
  s.rhs = b;
  s.symmetric = true;
  for (auto method : {SolverMethod::direct_lu, SolverMethod::gmres_ilu0, SolverMethod::cg_jacobi}) {
    SolverConfig cfg;
    cfg.method = method;
    for (double v : solve(s, cfg).x) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("1D Poisson matches the dense oracle") {
  const int n = 100;
  SparseSystem s;
  s.matrix = poisson_1d(n);
  s.rhs.assign(n, 1.0);
  s.symmetric = true;
  const auto oracle = dense_solve(to_dense(s.matrix), s.rhs);
  for (auto method : {SolverMethod::direct_lu, SolverMethod::gmres_ilu0, SolverMethod::cg_jacobi}) {
    SolverConfig cfg;
    cfg.method = method;
    cfg.rtol = 1e-12;  // the residual floor of this system is near 1e-13 relative
    const auto x = solve(s, cfg).x;
    for (int i = 0; i < n; ++i) CHECK(std::abs(x[i] - oracle[i]) <= 1e-10 * std::abs(oracle[i]) + 1e-10);
  }
}

TEST_CASE("GMRES with ILU0 meets its tolerance and agrees with LU") {
  const auto a = convection_diffusion(20, 3.0);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> b(a.rows());
  for (auto& v : b) v = u(rng);
  SolverConfig cfg;
  cfg.method = SolverMethod::gmres_ilu0;
  cfg.rtol = 1e-12;
  const auto rep = gmres_ilu0(a, b, cfg);
  CHECK(residual_norm(a, rep.x, b) <= std::max(cfg.atol, cfg.rtol * norm2(b)) * 1.0001);
  CHECK(rep.iterations > 0);
  CHECK(rep.residual_history.size() >= 2);
  const auto direct = LuFactorization(a).solve(b);
  CHECK(relative_difference(rep.x, direct) <= 1e-9);
}

TEST_CASE("CG with Jacobi agrees with LU on an SPD system") {
  const auto a = poisson_1d(60);
  std::vector<double> b(60);
  for (int i = 0; i < 60; ++i) b[i] = std::sin(0.1 * i);
  SolverConfig cfg;
  cfg.method = SolverMethod::cg_jacobi;
  cfg.rtol = 1e-13;
  const auto rep = cg_jacobi(a, b, cfg);
  CHECK(relative_difference(rep.x, LuFactorization(a).solve(b)) <= 1e-8);
}

TEST_CASE("iterative solvers report non-convergence with history") {
  const auto a = convection_diffusion(15, 3.0);
  std::vector<double> b(a.rows(), 1.0);
  SolverConfig cfg;
  cfg.method = SolverMethod::gmres_ilu0;
  cfg.max_iterations = 1;
  cfg.restart = 1;
  cfg.rtol = 1e-14;
  try {
    gmres_ilu0(a, b, cfg);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(e.iterations() >= 1);
    CHECK(!e.history().empty());
  }
}

TEST_CASE("direct solve names the zero pivot row of a singular matrix") {
  const auto a = CsrMatrix::from_triplets(3, 3, std::vector<Triplet>{{0, 0, 1.0}, {2, 2, 1.0}, {1, 2, 0.0}});
  try {
    LuFactorization lu(a);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
}

TEST_CASE("direct solves are bit-reproducible") {
  const auto a = convection_diffusion(12, 1.5);
  std::vector<double> b(a.rows());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::cos(0.37 * i);
  CHECK(LuFactorization(a).solve(b) == LuFactorization(a).solve(b));
}

TEST_CASE("solver configuration is validated") {
  SolverConfig cfg;
  cfg.rtol = 0.0;
  CHECK_THROWS_AS(cfg.check(), InvalidArgument);
  cfg = {};
  cfg.restart = 0;
  CHECK_THROWS_AS(cfg.check(), InvalidArgument);
  CHECK(solver_method_from_string("gmres_ilu0") == SolverMethod::gmres_ilu0);
  CHECK_THROWS_AS(solver_method_from_string("amg"), InvalidArgument);
}

TEST_CASE("matrix market export") {
  std::stringstream ss;
  write_matrix_market(poisson_1d(3), ss);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "%%MatrixMarket matrix coordinate real general");
  int r = 0, c = 0, nnz = 0;
  ss >> r >> c >> nnz;
  CHECK(r == 3);
  CHECK(c == 3);
  CHECK(nnz == 7);
}
