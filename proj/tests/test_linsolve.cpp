#include "wg/linsolve.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "wg/errors.hpp"

using namespace wg;

namespace {

// Deterministic SPD test matrix: diagonally dominant with random couplings.
CsrMatrix random_spd(int n, unsigned seed, std::vector<Triplet>* out = nullptr) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> coupling(-1.0, 1.0);
  std::vector<Triplet> trips;
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = i + 1; j < n; ++j) {
      if ((i + j) % 3 != 0) continue;  // sparse pattern
      const double v = coupling(gen);
      trips.push_back({i, j, v});
      trips.push_back({j, i, v});
      row_sum += std::abs(v);
    }
    trips.push_back({i, i, 4.0 + row_sum});
  }
  if (out) *out = trips;
  return CsrMatrix::from_triplets(n, trips);
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = dist(gen);
  return b;
}

// Counts eigenvalues of (M - t B) below zero via LDLT inertia; bisection on
// t brackets each pencil eigenvalue independently of the solver under test.
double pencil_eig_by_bisection(const Eigen::MatrixXd& m,
                               const Eigen::MatrixXd& b, int index, double lo,
                               double hi) {
  auto count_below = [&](double t) {
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(m - t * b);
    int count = 0;
    const auto d = ldlt.vectorD();
    for (int i = 0; i < d.size(); ++i) count += d[i] < 0.0;
    return count;
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(mid) <= index)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("CSR assembly sorts, accumulates and multiplies") {
  // Duplicates on (0,1) and unordered insertion.
  std::vector<Triplet> trips{{1, 2, 5.0}, {0, 1, 2.0}, {0, 0, 1.0},
                             {2, 2, 3.0}, {0, 1, -0.5}, {2, 0, 4.0}};
  const CsrMatrix a = CsrMatrix::from_triplets(3, trips);
  CHECK(a.n == 3);
  CHECK(a.nnz() == 5);
  CHECK(a.row_ptr == std::vector<int>{0, 2, 3, 5});
  CHECK(a.col == std::vector<int>{0, 1, 2, 0, 2});
  CHECK(a.val == std::vector<double>{1.0, 1.5, 5.0, 4.0, 3.0});

  Eigen::VectorXd x(3);
  x << 1.0, 2.0, 3.0;
  const Eigen::VectorXd y = a * x;
  CHECK(y[0] == doctest::Approx(1.0 + 3.0));
  CHECK(y[1] == doctest::Approx(15.0));
  CHECK(y[2] == doctest::Approx(4.0 + 9.0));

  const Eigen::MatrixXd d = a.dense();
  CHECK(d(0, 1) == 1.5);
  CHECK(d(1, 0) == 0.0);

  CHECK_THROWS_AS(CsrMatrix::from_triplets(2, {{0, 2, 1.0}}), ConfigError);
  CHECK_THROWS_AS(CsrMatrix::from_triplets(2, {{-1, 0, 1.0}}), ConfigError);
}

TEST_CASE("identical triplet streams give bit-identical matrices") {
  std::vector<Triplet> trips;
  random_spd(40, 77, &trips);
  const CsrMatrix a = CsrMatrix::from_triplets(40, trips);
  const CsrMatrix b = CsrMatrix::from_triplets(40, trips);
  CHECK(a.val == b.val);
  CHECK(a.col == b.col);
  CHECK(a.row_ptr == b.row_ptr);
}

TEST_CASE("conjugate gradients matches a dense Cholesky solve") {
  const int n = 60;
  const CsrMatrix a = random_spd(n, 3);
  const Eigen::VectorXd b = random_vector(n, 4);
  const auto [x, report] = conjugate_gradient(a, b, 1e-13);
  CHECK(report.ok());
  CHECK(report.iterations > 0);
  CHECK(report.rel_residual <= 1e-13);

  const Eigen::VectorXd want = Eigen::LLT<Eigen::MatrixXd>(a.dense()).solve(b);
  CHECK((x - want).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("zero right-hand side returns zero immediately") {
  const CsrMatrix a = random_spd(10, 5);
  const auto [x, report] = conjugate_gradient(a, Eigen::VectorXd::Zero(10));
  CHECK(report.ok());
  CHECK(x.isZero());
}

TEST_CASE("indefinite matrices are certified by breakdown") {
  std::vector<Triplet> trips{{0, 0, 1.0}, {1, 1, -1.0}};
  const CsrMatrix a = CsrMatrix::from_triplets(2, trips);
  Eigen::VectorXd b(2);
  b << 0.0, 1.0;  // touches the negative direction
  const auto [x, report] = conjugate_gradient(a, b);
  CHECK(!report.ok());
  CHECK(report.status == SolveStatus::breakdown);
}

TEST_CASE("block Jacobi preconditioning cuts iterations and reports pivots") {
  const int n = 60;
  const CsrMatrix a = random_spd(n, 9);
  const Eigen::VectorXd b = random_vector(n, 10);
  std::vector<std::pair<int, int>> blocks;
  for (int off = 0; off < n; off += 6) blocks.push_back({off, 6});

  const BlockJacobi precond(a, blocks);
  CHECK(precond.min_pivot() > 0.0);

  const auto [xp, with] = conjugate_gradient(a, b, 1e-13, 0, &precond);
  const auto [xn, without] = conjugate_gradient(a, b, 1e-13);
  CHECK(with.ok());
  CHECK(with.iterations <= without.iterations);
  CHECK((xp - xn).cwiseAbs().maxCoeff() < 1e-9);

  // apply() solves the block systems: A_block z = r on each block.
  Eigen::VectorXd r = random_vector(n, 11), z(n);
  precond.apply(r, z);
  const Eigen::MatrixXd d = a.dense();
  for (const auto& [off, size] : blocks) {
    const Eigen::VectorXd zb =
        d.block(off, off, size, size).llt().solve(r.segment(off, size));
    CHECK((z.segment(off, size) - zb).cwiseAbs().maxCoeff() < 1e-12);
  }

  // A non-SPD block is rejected.
  std::vector<Triplet> bad{{0, 0, 1.0}, {1, 1, -2.0}};
  const CsrMatrix abad = CsrMatrix::from_triplets(2, bad);
  CHECK_THROWS_AS(BlockJacobi(abad, {{0, 2}}), SolverError);
}

TEST_CASE("static condensation reproduces the full solve") {
  // Arrow-structured SPD system: 4 interior blocks of size 2 coupled only to
  // the trailing 4 DOFs, mimicking the element-interior / edge splitting.
  const int ni = 8, ne = 4, n = ni + ne;
  std::vector<Triplet> trips;
  std::mt19937 gen(21);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  std::vector<std::pair<int, int>> iblocks;
  for (int blk = 0; blk < 4; ++blk) {
    const int off = 2 * blk;
    iblocks.push_back({off, 2});
    const double c = dist(gen);
    trips.push_back({off, off, 3.0});
    trips.push_back({off + 1, off + 1, 3.0});
    trips.push_back({off, off + 1, c});
    trips.push_back({off + 1, off, c});
    for (int e = 0; e < ne; ++e) {
      if ((blk + e) % 2 != 0) continue;
      const double v = dist(gen);
      trips.push_back({off, ni + e, v});
      trips.push_back({ni + e, off, v});
    }
  }
  for (int e = 0; e < ne; ++e) trips.push_back({ni + e, ni + e, 5.0});
  trips.push_back({ni, ni + 1, 0.25});
  trips.push_back({ni + 1, ni, 0.25});

  const CsrMatrix a = CsrMatrix::from_triplets(n, trips);
  const Eigen::VectorXd b = random_vector(n, 22);

  const CondensedSystem cond(a, b, iblocks, ni);
  CHECK(cond.min_interior_pivot() > 0.0);
  CHECK(cond.schur().n == ne);

  const Eigen::VectorXd xe =
      Eigen::LLT<Eigen::MatrixXd>(cond.schur().dense()).solve(cond.rhs());
  const Eigen::VectorXd x = cond.recover(xe);
  const Eigen::VectorXd want = Eigen::LLT<Eigen::MatrixXd>(a.dense()).solve(b);
  REQUIRE(x.size() == n);
  CHECK((x - want).cwiseAbs().maxCoeff() < 1e-11);

  // Interior-interior cross coupling violates the structure contract.
  auto cross_trips = trips;
  cross_trips.push_back({0, 2, 0.1});
  cross_trips.push_back({2, 0, 0.1});
  const CsrMatrix across = CsrMatrix::from_triplets(n, cross_trips);
  CHECK_THROWS_AS(CondensedSystem(across, b, iblocks, ni), ConfigError);
}

TEST_CASE("dense symmetric eigensolve matches inertia bisection") {
  const int n = 20;
  std::mt19937 gen(33);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd r(n, n), s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      r(i, j) = dist(gen);
      s(i, j) = dist(gen);
    }
  const Eigen::MatrixXd m = 0.5 * (r + r.transpose());
  const Eigen::MatrixXd b =
      s * s.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);

  const auto [vals, vecs] = dense_sym_eig(m, &b);
  REQUIRE(vals.size() == n);
  for (int i = 1; i < n; ++i) CHECK(vals[i] >= vals[i - 1]);

  // B-orthonormality of eigenvectors.
  const Eigen::MatrixXd gram = vecs.transpose() * b * vecs;
  CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-9);

  // Smallest, median and largest eigenvalues against the bisection oracle.
  const double bound = 1e4;
  for (int index : {0, n / 2, n - 1}) {
    const double want = pencil_eig_by_bisection(m, b, index, -bound, bound);
    CHECK(vals[index] == doctest::Approx(want).epsilon(1e-7));
  }

  // Plain symmetric problem (B = I).
  const auto [svals, svecs] = dense_sym_eig(m, nullptr);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  for (int index : {0, n - 1}) {
    const double want = pencil_eig_by_bisection(m, eye, index, -bound, bound);
    CHECK(svals[index] == doctest::Approx(want).epsilon(1e-7));
  }

  // Indefinite B is rejected.
  Eigen::MatrixXd bneg = -b;
  CHECK_THROWS_AS(dense_sym_eig(m, &bneg), SolverError);
}
