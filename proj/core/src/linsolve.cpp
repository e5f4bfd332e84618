#include "wg/linsolve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "wg/errors.hpp"

namespace wg {

void CsrMatrix::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int idx = row_ptr[i]; idx < row_ptr[i + 1]; ++idx)
      s += val[idx] * x[col[idx]];
    y[i] = s;
  }
}

Eigen::VectorXd CsrMatrix::operator*(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y;
  multiply(x, y);
  return y;
}

Eigen::MatrixXd CsrMatrix::dense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int idx = row_ptr[i]; idx < row_ptr[i + 1]; ++idx)
      out(i, col[idx]) = val[idx];
  return out;
}

CsrMatrix CsrMatrix::from_triplets(int n, std::vector<Triplet> triplets) {
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
      throw ConfigError("triplet index out of range");
  }
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });
  CsrMatrix m;
  m.n = n;
  m.row_ptr.assign(n + 1, 0);
  for (size_t i = 0; i < triplets.size();) {
    const int r = triplets[i].row, c = triplets[i].col;
    double s = 0.0;
    for (; i < triplets.size() && triplets[i].row == r && triplets[i].col == c;
         ++i)
      s += triplets[i].val;
    m.col.push_back(c);
    m.val.push_back(s);
    ++m.row_ptr[r + 1];
  }
  for (int i = 0; i < n; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  return m;
}

BlockJacobi::BlockJacobi(const CsrMatrix& a,
                         const std::vector<std::pair<int, int>>& blocks)
    : blocks_(blocks) {
  factors_.reserve(blocks_.size());
  min_pivot_ = std::numeric_limits<double>::infinity();
  for (const auto& [off, sz] : blocks_) {
    Eigen::MatrixXd blk = Eigen::MatrixXd::Zero(sz, sz);
    for (int i = 0; i < sz; ++i) {
      const int row = off + i;
      for (int idx = a.row_ptr[row]; idx < a.row_ptr[row + 1]; ++idx) {
        const int c = a.col[idx];
        if (c >= off && c < off + sz) blk(i, c - off) = a.val[idx];
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(blk);
    if (llt.info() != Eigen::Success) {
      throw SolverError("block Cholesky failed at offset " +
                        std::to_string(off) + " (block not SPD)");
    }
    min_pivot_ =
        std::min(min_pivot_, llt.matrixLLT().diagonal().minCoeff());
    factors_.push_back(std::move(llt));
  }
  if (blocks_.empty()) min_pivot_ = 0.0;
}

void BlockJacobi::apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const {
  z = r;
  for (size_t b = 0; b < blocks_.size(); ++b) {
    const auto& [off, sz] = blocks_[b];
    z.segment(off, sz) = factors_[b].solve(r.segment(off, sz));
  }
}

std::pair<Eigen::VectorXd, SolveReport> conjugate_gradient(
    const CsrMatrix& a, const Eigen::VectorXd& b, double tol, int maxit,
    const BlockJacobi* precond) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };
  const int n = a.n;
  if (maxit <= 0) maxit = 100 + 50 * static_cast<int>(std::sqrt(double(n)));

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  SolveReport report;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    report.seconds = elapsed();
    return {x, report};
  }

  Eigen::VectorXd r = b;
  Eigen::VectorXd z(n);
  if (precond)
    precond->apply(r, z);
  else
    z = r;
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  Eigen::VectorXd ap(n);

  for (int it = 1; it <= maxit; ++it) {
    if (!(rz > 0.0)) {  // also catches NaN
      report.status = SolveStatus::breakdown;
      break;
    }
    a.multiply(p, ap);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) {
      // p'Ap <= 0 for p != 0 certifies the operator is not positive definite.
      report.status = SolveStatus::breakdown;
      break;
    }
    const double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    report.iterations = it;
    report.rel_residual = r.norm() / bnorm;
    if (report.rel_residual <= tol) {
      report.status = SolveStatus::converged;
      report.seconds = elapsed();
      return {x, report};
    }
    if (precond)
      precond->apply(r, z);
    else
      z = r;
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  if (report.status != SolveStatus::breakdown)
    report.status = SolveStatus::max_iterations;
  report.rel_residual = (b - a * x).norm() / bnorm;
  report.seconds = elapsed();
  return {x, report};
}

CondensedSystem::CondensedSystem(
    const CsrMatrix& a, const Eigen::VectorXd& b,
    const std::vector<std::pair<int, int>>& interior_blocks, int n_interior)
    : n_interior_(n_interior), n_edge_(a.n - n_interior) {
  min_pivot_ = std::numeric_limits<double>::infinity();
  std::vector<Triplet> triplets;

  // Edge-edge part of the original matrix.
  for (int row = n_interior_; row < a.n; ++row) {
    for (int idx = a.row_ptr[row]; idx < a.row_ptr[row + 1]; ++idx) {
      if (a.col[idx] >= n_interior_)
        triplets.push_back(
            {row - n_interior_, a.col[idx] - n_interior_, a.val[idx]});
    }
  }

  rhs_ = b.tail(n_edge_);
  blocks_.reserve(interior_blocks.size());
  for (const auto& [off, sz] : interior_blocks) {
    if (off + sz > n_interior_)
      throw ConfigError("interior block extends past the interior range");
    Block blk;
    blk.offset = off;
    Eigen::MatrixXd aii = Eigen::MatrixXd::Zero(sz, sz);
    std::vector<int> cols;
    for (int i = 0; i < sz; ++i) {
      const int row = off + i;
      for (int idx = a.row_ptr[row]; idx < a.row_ptr[row + 1]; ++idx) {
        const int c = a.col[idx];
        if (c >= off && c < off + sz) {
          aii(i, c - off) = a.val[idx];
        } else if (c >= n_interior_) {
          cols.push_back(c - n_interior_);
        } else {
          throw ConfigError("interior block couples to another interior DOF");
        }
      }
    }
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    blk.cols = std::move(cols);
    const int nc = static_cast<int>(blk.cols.size());
    blk.coupling = Eigen::MatrixXd::Zero(sz, nc);
    auto col_slot = [&blk](int c) {
      return static_cast<int>(std::lower_bound(blk.cols.begin(),
                                               blk.cols.end(), c) -
                              blk.cols.begin());
    };
    for (int i = 0; i < sz; ++i) {
      const int row = off + i;
      for (int idx = a.row_ptr[row]; idx < a.row_ptr[row + 1]; ++idx) {
        if (a.col[idx] >= n_interior_)
          blk.coupling(i, col_slot(a.col[idx] - n_interior_)) = a.val[idx];
      }
    }
    blk.llt.compute(aii);
    if (blk.llt.info() != Eigen::Success)
      throw SolverError("interior block Cholesky failed at offset " +
                        std::to_string(off));
    min_pivot_ =
        std::min(min_pivot_, blk.llt.matrixLLT().diagonal().minCoeff());
    blk.load = b.segment(off, sz);

    const Eigen::MatrixXd x = blk.llt.solve(blk.coupling);
    const Eigen::MatrixXd s_local = blk.coupling.transpose() * x;
    const Eigen::VectorXd y = blk.llt.solve(blk.load);
    for (int i = 0; i < nc; ++i) {
      for (int j = 0; j < nc; ++j)
        triplets.push_back({blk.cols[i], blk.cols[j], -s_local(i, j)});
      rhs_[blk.cols[i]] -= blk.coupling.col(i).dot(y);
    }
    blocks_.push_back(std::move(blk));
  }
  if (blocks_.empty()) min_pivot_ = 0.0;
  schur_ = CsrMatrix::from_triplets(n_edge_, std::move(triplets));
}

Eigen::VectorXd CondensedSystem::recover(const Eigen::VectorXd& x_edge) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_interior_ + n_edge_);
  x.tail(n_edge_) = x_edge;
  for (const Block& blk : blocks_) {
    const int nc = static_cast<int>(blk.cols.size());
    Eigen::VectorXd xe(nc);
    for (int i = 0; i < nc; ++i) xe[i] = x_edge[blk.cols[i]];
    x.segment(blk.offset, blk.load.size()) =
        blk.llt.solve(blk.load - blk.coupling * xe);
  }
  return x;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> dense_sym_eig(
    const Eigen::MatrixXd& m, const Eigen::MatrixXd* b) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  Eigen::VectorXd lambda;
  Eigen::MatrixXd vectors;
  if (b) {
    Eigen::LLT<Eigen::MatrixXd> llt(*b);
    if (llt.info() != Eigen::Success)
      throw SolverError("pencil right-hand matrix is not positive definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        m, *b, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success)
      throw SolverError("generalized symmetric eigensolve failed");
    lambda = es.eigenvalues();
    vectors = es.eigenvectors();
    const double bscale = b->cwiseAbs().maxCoeff();
    for (int i = 0; i < lambda.size(); ++i) {
      const double res =
          (m * vectors.col(i) - lambda[i] * (*b) * vectors.col(i))
              .cwiseAbs()
              .maxCoeff();
      if (res > 1e-9 * std::max(scale, std::abs(lambda[i]) * bscale))
        throw SolverError("pencil eigenpair residual out of tolerance");
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success)
      throw SolverError("symmetric eigensolve failed");
    lambda = es.eigenvalues();
    vectors = es.eigenvectors();
    for (int i = 0; i < lambda.size(); ++i) {
      const double res =
          (m * vectors.col(i) - lambda[i] * vectors.col(i)).cwiseAbs().maxCoeff();
      if (res > 1e-9 * std::max(scale, std::abs(lambda[i])))
        throw SolverError("eigenpair residual out of tolerance");
    }
  }
  return {lambda, vectors};
}

}  // namespace wg
