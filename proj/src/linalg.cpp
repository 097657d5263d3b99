#include "twr/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace twr {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vec vec(const Mat& a) {
  return Eigen::Map<const Vec>(a.data(), a.size());
}

Mat unvec(const Vec& v, Index rows, Index cols) {
  if (v.size() != rows * cols) {
    throw DimensionError("unvec: vector of length " + std::to_string(v.size()) +
                         " cannot fill a " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " matrix");
  }
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

Mat blkdiag(const Mat& a, const Mat& b) {
  Mat out = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

void ensure_hermitian(const Mat& a, double tol) {
  if (a.rows() != a.cols()) {
    throw DimensionError("hermitian op on non-square matrix");
  }
  const double scale = a.cwiseAbs().maxCoeff();
  const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol * scale) {
    throw Error("matrix is not Hermitian: asymmetry " + std::to_string(asym) +
                " exceeds " + std::to_string(tol) + " * " + std::to_string(scale));
  }
}

HermitianEig hermitian_eig(const Mat& a) {
  ensure_hermitian(a);
  const Mat sym = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success) {
    throw Error("Hermitian eigendecomposition failed");
  }
  const RealVec& vals = es.eigenvalues();
  std::vector<Index> order(static_cast<size_t>(vals.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return vals[i] > vals[j]; });

  HermitianEig out;
  out.vectors.resize(a.rows(), a.cols());
  out.values.resize(vals.size());
  for (Index k = 0; k < vals.size(); ++k) {
    out.values[k] = vals[order[static_cast<size_t>(k)]];
    out.vectors.col(k) = es.eigenvectors().col(order[static_cast<size_t>(k)]);
  }
  return out;
}

Mat hermitian_factor(const Mat& z) {
  HermitianEig eg = hermitian_eig(z);
  const Index n = z.rows();
  const double trace = eg.values.sum();
  const double floor = -1e-10 * std::max(trace, 0.0) / static_cast<double>(std::max<Index>(n, 1));
  if (eg.values.size() > 0 && eg.values.minCoeff() < floor) {
    throw NotPsdError("hermitian_factor: eigenvalue " +
                      std::to_string(eg.values.minCoeff()) +
                      " below PSD tolerance floor " + std::to_string(floor));
  }
  const RealVec clipped = eg.values.cwiseMax(0.0);
  return eg.vectors * clipped.cwiseSqrt().asDiagonal();
}

Mat psd_project(const Mat& a) {
  HermitianEig eg = hermitian_eig(a);
  const RealVec clipped = eg.values.cwiseMax(0.0);
  return eg.vectors * clipped.asDiagonal() * eg.vectors.adjoint();
}

Mat selection_matrix_e(Index n_rows, Index m, Index l) {
  if (n_rows < 1 || m < 1 || l < 1) {
    throw DimensionError("selection_matrix_e: all dimensions must be >= 1");
  }
  Mat e = Mat::Zero(n_rows * m * m * l, n_rows * l);
  for (Index lc = 0; lc < l; ++lc) {
    for (Index j = 0; j < n_rows; ++j) {
      for (Index c = 0; c < m; ++c) {
        const Index row = (lc * m + c) * (n_rows * m) + j * m + c;
        const Index col = lc * n_rows + j;
        e(row, col) = 1.0;
      }
    }
  }
  return e;
}

namespace {

bool solve_ok(const Mat& a, const Mat& b, const Mat& x) {
  if (!x.allFinite()) return false;
  const double lhs = (a * x - b).norm();
  const double scale = a.norm() * x.norm() + b.norm();
  return lhs <= 1e-8 * std::max(scale, 1e-300);
}

}  // namespace

Mat solve_hermitian(const Mat& a, const Mat& b) {
  const Mat sym = (a + a.adjoint()) / 2.0;
  Eigen::LDLT<Mat> ldlt(sym);
  if (ldlt.info() == Eigen::Success) {
    Mat x = ldlt.solve(b);
    if (x.allFinite()) {
      x += ldlt.solve(b - sym * x);  // one refinement step
      if (solve_ok(sym, b, x)) return x;
    }
  }
  return solve_lu(sym, b);
}

Mat solve_lu(const Mat& a, const Mat& b) {
  Eigen::FullPivLU<Mat> lu(a);
  if (!lu.isInvertible()) {
    throw SingularGramError("linear solve: matrix is numerically singular");
  }
  Mat x = lu.solve(b);
  if (!x.allFinite()) {
    throw SingularGramError("linear solve: non-finite solution");
  }
  return x;
}

}  // namespace twr
