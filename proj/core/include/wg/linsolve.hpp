#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace wg {

struct Triplet {
  int row = 0;
  int col = 0;
  double val = 0.0;
};

// Compressed sparse row matrix with sorted, unique column indices per row.
struct CsrMatrix {
  int n = 0;
  std::vector<int> row_ptr;  // size n+1
  std::vector<int> col;
  std::vector<double> val;

  int nnz() const { return static_cast<int>(val.size()); }
  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd dense() const;

  // Accumulates duplicate entries. The sort is stable, so duplicates are
  // summed in insertion order and identical triplet streams give
  // bit-identical matrices.
  static CsrMatrix from_triplets(int n, std::vector<Triplet> triplets);
};

enum class SolveStatus { converged, max_iterations, breakdown };

struct SolveReport {
  int iterations = 0;
  double rel_residual = 0.0;
  SolveStatus status = SolveStatus::converged;
  double seconds = 0.0;
  bool ok() const { return status == SolveStatus::converged; }
};

// Block-diagonal preconditioner over the given contiguous (offset, size)
// blocks, factored once with dense Cholesky. min_pivot() is the smallest
// diagonal entry of any block factor: positive iff every block is SPD, a
// cheap witness of the operator's definiteness on the block diagonal.
class BlockJacobi {
 public:
  BlockJacobi(const CsrMatrix& a, const std::vector<std::pair<int, int>>& blocks);
  void apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const;
  double min_pivot() const { return min_pivot_; }

 private:
  std::vector<std::pair<int, int>> blocks_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
  double min_pivot_ = 0.0;
};

// Preconditioned conjugate gradients for SPD systems. Stops when
// ||b - A x|| <= tol * ||b||. Iteration is aborted with status breakdown if
// a search direction gives p' A p <= 0, which certifies the matrix is not
// positive definite. maxit <= 0 picks a size-based default.
std::pair<Eigen::VectorXd, SolveReport> conjugate_gradient(
    const CsrMatrix& a, const Eigen::VectorXd& b, double tol = 1e-12,
    int maxit = 0, const BlockJacobi* precond = nullptr);

// Schur complement elimination of the interior blocks. The matrix must be
// ordered with the n_interior interior DOFs first, structured so each
// interior block couples only to itself and to trailing DOFs (true for the
// element-interior / edge splitting of the discrete system).
class CondensedSystem {
 public:
  CondensedSystem(const CsrMatrix& a, const Eigen::VectorXd& b,
                  const std::vector<std::pair<int, int>>& interior_blocks,
                  int n_interior);

  const CsrMatrix& schur() const { return schur_; }
  const Eigen::VectorXd& rhs() const { return rhs_; }
  double min_interior_pivot() const { return min_pivot_; }
  // Back-substitutes the interior DOFs; returns the full solution.
  Eigen::VectorXd recover(const Eigen::VectorXd& x_edge) const;

 private:
  struct Block {
    int offset = 0;
    Eigen::LLT<Eigen::MatrixXd> llt;
    std::vector<int> cols;     // coupled trailing DOFs (edge numbering)
    Eigen::MatrixXd coupling;  // size x cols
    Eigen::VectorXd load;
  };
  int n_interior_ = 0;
  int n_edge_ = 0;
  CsrMatrix schur_;
  Eigen::VectorXd rhs_;
  std::vector<Block> blocks_;
  double min_pivot_ = 0.0;
};

// Eigen-decomposition of the symmetric pencil M x = lambda B x (B = I when
// null). Returns ascending eigenvalues and B-orthonormal eigenvectors;
// throws SolverError if B is not SPD or a residual check fails.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> dense_sym_eig(
    const Eigen::MatrixXd& m, const Eigen::MatrixXd* b = nullptr);

}  // namespace wg
