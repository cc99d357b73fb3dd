#pragma once

// Density matrices, their spectral PVMs, tensor powers and seeded random states.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qre/matkernel.hpp"

namespace qre {

inline constexpr double kTraceTol = 1e-10;
/// Eigenvalues of a state at or below this are treated as exact zeros (kernel).
inline constexpr double kKernelTol = 1e-12;
inline constexpr double kDefaultClusterTol = 1e-9;

class DensityMatrix {
 public:
  const CMatrix& mat() const noexcept { return mat_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(mat_.rows()); }

  /// Wraps a matrix the caller has already proven to be a state (e.g. a tensor
  /// power of validated states). No checks beyond shape.
  static DensityMatrix assume_valid(CMatrix mat) {
    require_square(mat, "density matrix");
    return DensityMatrix(std::move(mat));
  }

  friend DensityMatrix validate_state(const CMatrix& mat);

 private:
  explicit DensityMatrix(CMatrix mat) : mat_(std::move(mat)) {}
  CMatrix mat_;
};

inline DensityMatrix validate_state(const CMatrix& mat) {
  require_square(mat, "density matrix");
  if (!all_finite(mat)) throw Error(ErrorKind::InvalidArgument, "state has non-finite entries");
  const double defect = hermiticity_defect(mat);
  if (defect > kHermitianTol) {
    throw Error(ErrorKind::NotHermitian,
                "state violates Hermiticity (relative defect " + std::to_string(defect) + ")");
  }
  const HermEig eig = herm_eig(mat);
  const double min_eig = eig.eigenvalues.minCoeff();
  if (min_eig < -kPsdTol) {
    throw Error(ErrorKind::NotPSD, "state violates positivity (min eigenvalue " +
                                       std::to_string(min_eig) + ")");
  }
  const double tr = mat.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw Error(ErrorKind::TraceNotOne, "state violates unit trace (trace " + std::to_string(tr) + ")");
  }
  return DensityMatrix(0.5 * (mat + mat.adjoint()));
}

/// Spectral measure of a Hermitian operator. Besides the projectors it keeps the
/// eigenbasis and the block index of every basis column, which lets consumers
/// pinch or intersect with it in O(d^3) total instead of per element.
struct SpectralPvm {
  std::vector<CMatrix> projectors;
  std::vector<double> eigenvalues;      // one per projector, descending
  std::vector<double> log_eigenvalues;  // -inf for the kernel block
  CMatrix basis;                        // unitary, columns grouped by `block`
  std::vector<std::size_t> block;       // block[col] = projector index

  std::size_t size() const noexcept { return projectors.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(basis.rows()); }

  std::vector<std::size_t> ranks() const {
    std::vector<std::size_t> r(projectors.size(), 0);
    for (auto b : block) ++r[b];
    return r;
  }

  std::vector<std::vector<Eigen::Index>> columns_per_block() const {
    std::vector<std::vector<Eigen::Index>> cols(projectors.size());
    for (std::size_t c = 0; c < block.size(); ++c) cols[block[c]].push_back(static_cast<Eigen::Index>(c));
    return cols;
  }
};

namespace detail {

inline CMatrix projector_from_columns(const CMatrix& basis, const std::vector<Eigen::Index>& cols) {
  CMatrix w(basis.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) w.col(static_cast<Eigen::Index>(i)) = basis.col(cols[i]);
  return w * w.adjoint();
}

/// Groups the sorted-descending `keys` by single linkage; `close(a, b)` decides
/// whether neighbours merge. Returns the group id per position.
template <typename Close>
std::vector<std::size_t> cluster_sorted(const std::vector<double>& keys, Close close) {
  std::vector<std::size_t> group(keys.size(), 0);
  for (std::size_t i = 1; i < keys.size(); ++i) {
    group[i] = close(keys[i - 1], keys[i]) ? group[i - 1] : group[i - 1] + 1;
  }
  return group;
}

inline SpectralPvm assemble_spectral(CMatrix basis, const std::vector<std::size_t>& order,
                                     const std::vector<std::size_t>& group_of_sorted,
                                     const std::vector<double>& log_values) {
  const std::size_t d = order.size();
  const std::size_t groups = d == 0 ? 0 : group_of_sorted.back() + 1;
  SpectralPvm out;
  out.basis = CMatrix(basis.rows(), basis.cols());
  out.block.resize(d);
  std::vector<double> log_sum(groups, 0.0);
  std::vector<std::size_t> count(groups, 0);
  for (std::size_t pos = 0; pos < d; ++pos) {
    out.basis.col(static_cast<Eigen::Index>(pos)) = basis.col(static_cast<Eigen::Index>(order[pos]));
    out.block[pos] = group_of_sorted[pos];
    log_sum[group_of_sorted[pos]] += log_values[order[pos]];
    ++count[group_of_sorted[pos]];
  }
  std::vector<std::vector<Eigen::Index>> cols(groups);
  for (std::size_t pos = 0; pos < d; ++pos) cols[out.block[pos]].push_back(static_cast<Eigen::Index>(pos));
  for (std::size_t g = 0; g < groups; ++g) {
    const double lg = std::isinf(log_sum[g]) ? -std::numeric_limits<double>::infinity()
                                             : log_sum[g] / static_cast<double>(count[g]);
    out.log_eigenvalues.push_back(lg);
    out.eigenvalues.push_back(std::isinf(lg) ? 0.0 : std::exp(lg));
    out.projectors.push_back(projector_from_columns(out.basis, cols[g]));
  }
  return out;
}

}  // namespace detail

/// Spectral PVM of a state. Eigenvalues within relative distance `cluster_tol`
/// share a projector; eigenvalues at or below kKernelTol form the kernel block.
inline SpectralPvm spectral_pvm(const DensityMatrix& rho, double cluster_tol = kDefaultClusterTol) {
  const HermEig eig = herm_eig(rho.mat());
  const auto d = static_cast<std::size_t>(eig.eigenvalues.size());
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return eig.eigenvalues(static_cast<Eigen::Index>(a)) > eig.eigenvalues(static_cast<Eigen::Index>(b));
  });
  std::vector<double> sorted(d), logs(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double v = eig.eigenvalues(static_cast<Eigen::Index>(i));
    logs[i] = v > kKernelTol ? std::log(v) : -std::numeric_limits<double>::infinity();
  }
  for (std::size_t pos = 0; pos < d; ++pos) sorted[pos] = eig.eigenvalues(static_cast<Eigen::Index>(order[pos]));
  const auto group = detail::cluster_sorted(sorted, [&](double a, double b) {
    if (a <= kKernelTol && b <= kKernelTol) return true;
    if (a <= kKernelTol || b <= kKernelTol) return false;
    return std::abs(a - b) <= cluster_tol * std::max(std::abs(a), std::abs(b));
  });
  auto out = detail::assemble_spectral(eig.eigenvectors, order, group, logs);
  // The averaged log is exact for clustered values; report the plain eigenvalue
  // for singleton blocks so diag inputs round-trip without exp/log noise.
  const auto cols = out.columns_per_block();
  for (std::size_t g = 0; g < out.size(); ++g) {
    if (cols[g].size() == 1 && out.eigenvalues[g] != 0.0) out.eigenvalues[g] = sorted[static_cast<std::size_t>(cols[g][0])];
  }
  return out;
}

inline DensityMatrix tensor_power(const DensityMatrix& rho, int n, std::size_t dim_cap = kDefaultDimCap) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "tensor power needs n >= 1");
  CMatrix m = kron_power(rho.mat(), n, dim_cap);
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > 1e-9) {
    throw Error(ErrorKind::TraceNotOne, "tensor power trace drifted to " + std::to_string(tr));
  }
  return DensityMatrix::assume_valid(std::move(m));
}

/// Spectral PVM of ρ^⊗n assembled from ρ's eigenbasis: the eigenvector for the
/// index tuple (a_1..a_n) is v_{a_1}⊗...⊗v_{a_n} with log-eigenvalue Σ ln p_{a_t}.
/// Tuples are grouped by log-eigenvalue with absolute tolerance `cluster_tol`
/// (default 1e-9·n); tuples touching ρ's kernel form one kernel block.
inline SpectralPvm spectral_pvm_of_power(const DensityMatrix& rho, int n,
                                         std::optional<double> cluster_tol = std::nullopt,
                                         std::size_t dim_cap = kDefaultDimCap) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "spectral_pvm_of_power needs n >= 1");
  const std::size_t k = rho.dim();
  const std::size_t d = checked_power(k, n, dim_cap);
  const double tol = cluster_tol.value_or(kDefaultClusterTol * n);

  const HermEig eig = herm_eig(rho.mat());
  std::vector<double> single_log(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double v = eig.eigenvalues(static_cast<Eigen::Index>(i));
    single_log[i] = v > kKernelTol ? std::log(v) : -std::numeric_limits<double>::infinity();
  }
  std::vector<double> tuple_log(d, 0.0);
  for (std::size_t idx = 0; idx < d; ++idx) {
    std::size_t rest = idx;
    double s = 0.0;
    for (int t = 0; t < n; ++t) {
      s += single_log[rest % k];
      rest /= k;
    }
    tuple_log[idx] = s;
  }
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return tuple_log[a] > tuple_log[b]; });
  std::vector<double> sorted(d);
  for (std::size_t pos = 0; pos < d; ++pos) sorted[pos] = tuple_log[order[pos]];
  const auto group = detail::cluster_sorted(sorted, [&](double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return std::isinf(a) && std::isinf(b);
    return std::abs(a - b) <= tol;
  });
  CMatrix basis = kron_power(eig.eigenvectors, n, dim_cap);
  return detail::assemble_spectral(std::move(basis), order, group, tuple_log);
}

/// G·G†/Tr(G·G†) with G a k×k matrix of standard complex Gaussians drawn from a
/// generator seeded with `seed`.
inline DensityMatrix random_state(int k, std::uint64_t seed) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "random_state needs k >= 1");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double re = normal(gen);
      const double im = normal(gen);
      g(i, j) = Complex(re, im);
    }
  }
  CMatrix m = g * g.adjoint();
  m /= m.trace().real();
  return validate_state(m);
}

/// Haar-ish random unitary from the QR of a complex Gaussian matrix.
inline CMatrix random_unitary(int k, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) g(i, j) = Complex(normal(gen), normal(gen));
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  return q;
}

inline DensityMatrix diagonal_state(const std::vector<double>& probs) {
  if (probs.empty()) throw Error(ErrorKind::InvalidArgument, "diagonal state needs at least one entry");
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(probs.size()), static_cast<Eigen::Index>(probs.size()));
  for (std::size_t i = 0; i < probs.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = probs[i];
  return validate_state(m);
}

/// Qubit state (I + xX + yY + zZ)/2.
inline DensityMatrix bloch_state(double x, double y, double z) {
  const double r2 = x * x + y * y + z * z;
  if (r2 > 1.0 + 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "Bloch vector has length^2 " + std::to_string(r2) + " > 1");
  }
  CMatrix m(2, 2);
  m << Complex(1 + z, 0), Complex(x, -y), Complex(x, y), Complex(1 - z, 0);
  return validate_state(0.5 * m);
}

}  // namespace qre
