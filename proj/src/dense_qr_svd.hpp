#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace straintomo::detail {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Upper-triangular factor of [A | B] = Q [R | Q^T B]: `r` is n x n and
/// `qtb` holds the first n rows of Q^T B.
struct TriangularFactor {
  Eigen::MatrixXd r;
  Eigen::MatrixXd qtb;
};

/// Householder QR of a tall sparse matrix, streamed through dense row blocks
/// so only the triangle and one block are resident.
TriangularFactor streamed_qr(const SparseRows& a, const Eigen::MatrixXd& b);

struct DenseSvd {
  Eigen::VectorXd sigma;  ///< descending
  Eigen::MatrixXd u;      ///< empty unless vectors were requested
  Eigen::MatrixXd v;
};

/// SVD of a square matrix (divide and conquer).
DenseSvd square_svd(Eigen::MatrixXd m, bool vectors);

}  // namespace straintomo::detail
