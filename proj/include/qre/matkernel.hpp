#pragma once

// Dense complex-matrix kernel shared by every other module.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "qre/errors.hpp"

namespace qre {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr std::size_t kDefaultDimCap = 4096;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;

struct HermEig {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // orthonormal columns, matching eigenvalues
};

inline bool all_finite(const CMatrix& a) {
  return a.allFinite();
}

/// Relative Frobenius distance of `a` from its adjoint.
inline double hermiticity_defect(const CMatrix& a) {
  const double scale = std::max(1.0, a.norm());
  return (a - a.adjoint()).norm() / scale;
}

inline void require_square(const CMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + " must be a non-empty square matrix");
  }
}

inline void require_same_dim(const CMatrix& a, const CMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()));
  }
}

inline HermEig herm_eig(const CMatrix& a, double tol = kHermitianTol) {
  require_square(a, "herm_eig input");
  const double defect = hermiticity_defect(a);
  if (!(defect <= tol)) {
    throw Error(ErrorKind::NotHermitian,
                "relative anti-Hermitian part " + std::to_string(defect) + " exceeds " +
                    std::to_string(tol));
  }
  // Eigen reads only the lower triangle; symmetrize so both halves contribute.
  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  return HermEig{solver.eigenvalues(), solver.eigenvectors()};
}

inline std::size_t checked_product(std::size_t a, std::size_t b, std::size_t cap) {
  if (a != 0 && b > cap / a) {
    throw Error(ErrorKind::DimensionOverflow, "dimension " + std::to_string(a) + "*" +
                                                  std::to_string(b) + " exceeds cap " +
                                                  std::to_string(cap));
  }
  const std::size_t p = a * b;
  if (p > cap) {
    throw Error(ErrorKind::DimensionOverflow,
                "dimension " + std::to_string(p) + " exceeds cap " + std::to_string(cap));
  }
  return p;
}

/// k^n, or DimensionOverflow if it exceeds `cap`.
inline std::size_t checked_power(std::size_t k, int n, std::size_t cap) {
  std::size_t d = 1;
  for (int i = 0; i < n; ++i) d = checked_product(d, k, cap);
  return d;
}

/// Kronecker product, (A⊗B)[i*dimB + j, k*dimB + l] = A[i,k] B[j,l].
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
          std::size_t dim_cap = kDefaultDimCap) {
  using Scalar = typename DerivedA::Scalar;
  checked_product(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(b.rows()),
                  dim_cap);
  checked_product(static_cast<std::size_t>(a.cols()), static_cast<std::size_t>(b.cols()),
                  dim_cap);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                            a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      out.block(i * b.rows(), k * b.cols(), b.rows(), b.cols()) = a(i, k) * b;
    }
  }
  return out;
}

template <typename Derived>
auto kron_power(const Eigen::MatrixBase<Derived>& a, int n, std::size_t dim_cap = kDefaultDimCap) {
  using Scalar = typename Derived::Scalar;
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "kron_power needs n >= 1");
  checked_power(static_cast<std::size_t>(std::max(a.rows(), a.cols())), n, dim_cap);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = a;
  for (int i = 1; i < n; ++i) out = kron(out, a, dim_cap);
  return out;
}

struct LogOnSupport {
  CMatrix log;                // Hermitian; zero on the kernel
  std::vector<bool> support;  // per eigenvector of `eig`, true when kept
  HermEig eig;
};

/// Matrix logarithm of a PSD matrix restricted to eigenvalues above `support_tol`.
inline LogOnSupport mat_log_on_support(const CMatrix& a, double support_tol) {
  HermEig eig = herm_eig(a);
  const auto d = eig.eigenvalues.size();
  if (eig.eigenvalues.minCoeff() < -kPsdTol * std::max(1.0, eig.eigenvalues.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::NotPSD, "mat_log_on_support input has eigenvalue " +
                                       std::to_string(eig.eigenvalues.minCoeff()));
  }
  RVector logs = RVector::Zero(d);
  std::vector<bool> support(static_cast<std::size_t>(d), false);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (eig.eigenvalues(i) > support_tol) {
      logs(i) = std::log(eig.eigenvalues(i));
      support[static_cast<std::size_t>(i)] = true;
    }
  }
  CMatrix log = eig.eigenvectors * logs.asDiagonal() * eig.eigenvectors.adjoint();
  return LogOnSupport{std::move(log), std::move(support), std::move(eig)};
}

/// ‖AB − BA‖_F
inline double comm_norm(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "comm_norm");
  return (a * b - b * a).norm();
}

inline Complex trace_of_product(const CMatrix& a, const CMatrix& b) {
  // Tr[AB] = Σ_ij A_ij B_ji
  return (a.array() * b.transpose().array()).sum();
}

}  // namespace qre
