#pragma once

// Classical KL, Umegaki relative entropy, measured and pinched divergences.
// All logarithms are natural (nats).

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>

#include "qre/matkernel.hpp"
#include "qre/measurement.hpp"
#include "qre/quantum_state.hpp"

namespace qre {

inline constexpr double kSupportTol = 1e-10;

/// A divergence value: finite and nonnegative, or +infinity.
class ExtReal {
 public:
  static ExtReal finite(double v) { return ExtReal(v, false); }
  static ExtReal infinity() { return ExtReal(0.0, true); }

  bool is_finite() const noexcept { return !infinite_; }
  bool is_infinite() const noexcept { return infinite_; }

  /// The finite value, or +inf as a double.
  double value() const noexcept {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtReal& x) {
    if (x.infinite_) return os << "inf";
    return os << x.value_;
  }

 private:
  ExtReal(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

namespace detail {

/// Roundoff can leave a mathematically nonnegative sum at -1e-16.
inline ExtReal nonneg(double v) { return ExtReal::finite(v < 0.0 && v > -1e-9 ? 0.0 : v); }

}  // namespace detail

/// Σ p_i ln(p_i/q_i) with 0·ln(0/q) = 0 and p_i > 0 = q_i giving +infinity.
inline ExtReal kl_divergence(const ClassicalDist& p, const ClassicalDist& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorKind::LengthMismatch, "kl_divergence: " + std::to_string(p.size()) + " vs " +
                                               std::to_string(q.size()) + " outcomes");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.probs[i];
    const double qi = q.probs[i];
    if (pi <= 0.0) continue;
    if (qi <= 0.0) return ExtReal::infinity();
    sum += pi * std::log(pi / qi);
  }
  return detail::nonneg(sum);
}

/// Tr σ(log σ − log ρ), each logarithm taken in its own eigenbasis. Returns
/// +infinity when σ puts more than `support_tol` weight on ρ's kernel
/// (eigenvalues ≤ support_tol).
inline ExtReal quantum_relative_entropy(const DensityMatrix& sigma, const DensityMatrix& rho,
                                        double support_tol = kSupportTol) {
  if (sigma.dim() != rho.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "quantum_relative_entropy: state dimensions differ");
  }
  const HermEig se = herm_eig(sigma.mat());
  const HermEig re = herm_eig(rho.mat());

  double s_log_s = 0.0;
  for (Eigen::Index i = 0; i < se.eigenvalues.size(); ++i) {
    const double s = se.eigenvalues(i);
    if (s > support_tol) s_log_s += s * std::log(s);
  }
  // ⟨v_j|σ|v_j⟩ for ρ's eigenvectors v_j.
  const RVector weights = (re.eigenvectors.adjoint() * sigma.mat() * re.eigenvectors).diagonal().real();
  double kernel_weight = 0.0;
  double s_log_r = 0.0;
  for (Eigen::Index j = 0; j < re.eigenvalues.size(); ++j) {
    const double r = re.eigenvalues(j);
    if (r > support_tol) {
      s_log_r += weights(j) * std::log(r);
    } else {
      kernel_weight += weights(j);
    }
  }
  if (kernel_weight > support_tol) return ExtReal::infinity();
  return detail::nonneg(s_log_s - s_log_r);
}

inline ExtReal measured_divergence(const Povm& m, const DensityMatrix& sigma, const DensityMatrix& rho) {
  return kl_divergence(measure(m, sigma), measure(m, rho));
}

inline ExtReal measured_divergence(const Pvm& e, const DensityMatrix& sigma, const DensityMatrix& rho) {
  return kl_divergence(measure(e, sigma), measure(e, rho));
}

namespace detail {

/// D(τ‖ρ^⊗n) for τ block diagonal in the spectral basis of ρ^⊗n, given τ's
/// matrix `b` in that basis. Uses the exact log-eigenvalues of ρ^⊗n rather than
/// a numerical logarithm of the power.
inline ExtReal divergence_against_power(const SpectralPvm& spec, const CMatrix& b, double support_tol) {
  const auto cols = spec.columns_per_block();
  double tau_log_tau = 0.0;
  double tau_log_rho = 0.0;
  double kernel_weight = 0.0;
  for (std::size_t s = 0; s < cols.size(); ++s) {
    const auto m = static_cast<Eigen::Index>(cols[s].size());
    CMatrix blk(m, m);
    double diag_sum = 0.0;
    for (Eigen::Index r = 0; r < m; ++r) {
      for (Eigen::Index c = 0; c < m; ++c) blk(r, c) = b(cols[s][static_cast<std::size_t>(r)], cols[s][static_cast<std::size_t>(c)]);
      diag_sum += blk(r, r).real();
    }
    if (std::isinf(spec.log_eigenvalues[s])) {
      kernel_weight += diag_sum;
      continue;
    }
    tau_log_rho += diag_sum * spec.log_eigenvalues[s];
    const auto eig = herm_eig(blk, 1e-8);
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
      const double t = eig.eigenvalues(i);
      if (t > support_tol) tau_log_tau += t * std::log(t);
    }
  }
  if (kernel_weight > support_tol) return ExtReal::infinity();
  return nonneg(tau_log_tau - tau_log_rho);
}

}  // namespace detail

/// D(E_{ρ^⊗n}(σ^⊗n) ‖ ρ^⊗n), where E_{ρ^⊗n} pinches by the spectral PVM of ρ^⊗n.
inline ExtReal pinched_divergence(const DensityMatrix& rho, const DensityMatrix& sigma, int n,
                                  std::optional<double> cluster_tol = std::nullopt,
                                  double support_tol = kSupportTol,
                                  std::size_t dim_cap = kDefaultDimCap) {
  if (sigma.dim() != rho.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "pinched_divergence: state dimensions differ");
  }
  const SpectralPvm spec = spectral_pvm_of_power(rho, n, cluster_tol, dim_cap);
  const CMatrix sigma_n = kron_power(sigma.mat(), n, dim_cap);
  const CMatrix b = spec.basis.adjoint() * sigma_n * spec.basis;
  return detail::divergence_against_power(spec, b, support_tol);
}

/// D(σ‖ρ) split through a PVM F with E(ρ) ≤ F:
/// D(σ‖ρ) = D(E_F(σ)‖ρ) + D(σ‖E_F(σ)). When every element of F has rank one,
/// D(E_F(σ)‖ρ) coincides with the measured divergence D_F(σ‖ρ).
struct PinchingSplit {
  ExtReal total;         // D(σ‖ρ)
  ExtReal measured;      // D_F(σ‖ρ)
  ExtReal pinched;       // D(E_F(σ)‖ρ)
  ExtReal pinching_loss; // D(σ‖E_F(σ))
};

inline PinchingSplit pinching_split(const Pvm& f, const DensityMatrix& sigma, const DensityMatrix& rho,
                                    double support_tol = kSupportTol) {
  const DensityMatrix pinched = DensityMatrix::assume_valid(pinch(f, sigma.mat()));
  return PinchingSplit{quantum_relative_entropy(sigma, rho, support_tol), measured_divergence(f, sigma, rho),
                       quantum_relative_entropy(pinched, rho, support_tol),
                       quantum_relative_entropy(sigma, pinched, support_tol)};
}

}  // namespace qre
