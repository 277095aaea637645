#include "dense_qr_svd.hpp"

#include <lapacke.h>

#include <algorithm>
#include <string>

#include "straintomo/grid.hpp"

namespace straintomo::detail {
namespace {

constexpr std::size_t kBlockBytes = std::size_t{256} << 20;

void check_info(lapack_int info, const char* routine) {
  if (info != 0) {
    throw Error(std::string("LAPACK ") + routine + " failed with info " + std::to_string(info));
  }
}

}  // namespace

TriangularFactor streamed_qr(const SparseRows& a, const Eigen::MatrixXd& b) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index n = a.cols();
  const Eigen::Index k = b.cols();
  if (k > 0 && b.rows() != rows) throw Error("streamed_qr: right-hand side row mismatch");
  const Eigen::Index width = n + k;

  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(width, width);
  const Eigen::Index block_rows = std::clamp<Eigen::Index>(
      static_cast<Eigen::Index>(kBlockBytes / (sizeof(double) * std::max<Eigen::Index>(width, 1))),
      1, std::max<Eigen::Index>(rows, 1));
  const lapack_int nb = static_cast<lapack_int>(std::min<Eigen::Index>(width, 64));
  Eigen::MatrixXd block(block_rows, width);
  Eigen::MatrixXd t(nb, width);

  for (Eigen::Index start = 0; start < rows; start += block_rows) {
    const Eigen::Index m = std::min(block_rows, rows - start);
    block.topRows(m).setZero();
    for (Eigen::Index i = 0; i < m; ++i) {
      for (SparseRows::InnerIterator it(a, start + i); it; ++it) block(i, it.col()) = it.value();
      if (k > 0) block.row(i).tail(k) = b.row(start + i);
    }
    const lapack_int info = LAPACKE_dtpqrt(
        LAPACK_COL_MAJOR, static_cast<lapack_int>(m), static_cast<lapack_int>(width), 0, nb,
        tri.data(), static_cast<lapack_int>(width), block.data(),
        static_cast<lapack_int>(block_rows), t.data(), nb);
    check_info(info, "dtpqrt");
  }

  TriangularFactor out;
  out.r = tri.topLeftCorner(n, n).triangularView<Eigen::Upper>();
  out.qtb = tri.topRightCorner(n, k);
  return out;
}

DenseSvd square_svd(Eigen::MatrixXd m, bool vectors) {
  const lapack_int n = static_cast<lapack_int>(m.rows());
  DenseSvd out;
  out.sigma.resize(n);
  if (n == 0) return out;
  if (vectors) {
    out.u.resize(n, n);
    Eigen::MatrixXd vt(n, n);
    const lapack_int info =
        LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', n, n, m.data(), n, out.sigma.data(), out.u.data(),
                       n, vt.data(), n);
    check_info(info, "dgesdd");
    out.v = vt.transpose();
  } else {
    double dummy = 0.0;
    const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', n, n, m.data(), n,
                                           out.sigma.data(), &dummy, 1, &dummy, 1);
    check_info(info, "dgesdd");
  }
  return out;
}

}  // namespace straintomo::detail
