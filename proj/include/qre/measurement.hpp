#pragma once

// PVM/POVM algebra: width, refinement, commuting products, pinching, readout.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qre/matkernel.hpp"
#include "qre/quantum_state.hpp"

namespace qre {

inline constexpr double kPvmTol = 1e-9;
inline constexpr double kCommuteTol = 1e-8;
inline constexpr double kRefineTol = 1e-8;

/// Worst-case defects of a projector family, all Frobenius norms.
struct PvmDefects {
  double idempotence = 0.0;  // max ‖P² − P‖
  double hermiticity = 0.0;  // max ‖P − P†‖
  double overlap = 0.0;      // max ‖P_i P_j‖, i ≠ j
  double completeness = 0.0; // ‖Σ P − I‖

  double worst() const { return std::max({idempotence, hermiticity, overlap, completeness}); }
};

inline PvmDefects pvm_defects(std::span<const CMatrix> elements) {
  PvmDefects out;
  if (elements.empty()) {
    out.completeness = std::numeric_limits<double>::infinity();
    return out;
  }
  const auto d = elements.front().rows();
  CMatrix sum = CMatrix::Zero(d, d);
  for (const auto& p : elements) {
    require_same_dim(p, elements.front(), "PVM element");
    out.idempotence = std::max(out.idempotence, (p * p - p).norm());
    out.hermiticity = std::max(out.hermiticity, (p - p.adjoint()).norm());
    sum += p;
  }
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (std::size_t j = i + 1; j < elements.size(); ++j) {
      out.overlap = std::max(out.overlap, (elements[i] * elements[j]).norm());
    }
  }
  out.completeness = (sum - CMatrix::Identity(d, d)).norm();
  return out;
}

class Pvm {
 public:
  /// Validates idempotence, Hermiticity, orthogonality and completeness at `tol`.
  static Pvm from_projectors(std::vector<CMatrix> elements, std::vector<std::string> labels,
                             double tol = kPvmTol) {
    if (labels.empty()) {
      for (std::size_t i = 0; i < elements.size(); ++i) labels.push_back(std::to_string(i));
    }
    if (labels.size() != elements.size()) {
      throw Error(ErrorKind::LengthMismatch, "PVM needs one label per element");
    }
    const auto defects = pvm_defects(elements);
    if (!(defects.idempotence <= tol && defects.hermiticity <= tol)) {
      throw Error(ErrorKind::InvalidArgument,
                  "PVM element is not a projector (defect " +
                      std::to_string(std::max(defects.idempotence, defects.hermiticity)) + ")");
    }
    if (!(defects.overlap <= tol)) {
      throw Error(ErrorKind::InvalidArgument,
                  "PVM elements are not orthogonal (overlap " + std::to_string(defects.overlap) + ")");
    }
    if (!(defects.completeness <= tol)) {
      throw Error(ErrorKind::InvalidArgument,
                  "PVM elements do not sum to identity (defect " + std::to_string(defects.completeness) + ")");
    }
    return Pvm(std::move(elements), std::move(labels));
  }

  /// For families whose invariants hold by construction; no checks.
  static Pvm assume_valid(std::vector<CMatrix> elements, std::vector<std::string> labels) {
    return Pvm(std::move(elements), std::move(labels));
  }

  static Pvm trivial(std::size_t dim) {
    return Pvm({CMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))}, {"I"});
  }

  static Pvm standard_basis(std::size_t dim) {
    std::vector<CMatrix> el;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < dim; ++i) {
      CMatrix p = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
      p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
      el.push_back(std::move(p));
      labels.push_back("e" + std::to_string(i));
    }
    return Pvm(std::move(el), std::move(labels));
  }

  /// Rank-one PVM onto the columns of a unitary.
  static Pvm from_basis(const CMatrix& unitary, const std::string& prefix = "b") {
    std::vector<CMatrix> el;
    std::vector<std::string> labels;
    for (Eigen::Index c = 0; c < unitary.cols(); ++c) {
      el.push_back(unitary.col(c) * unitary.col(c).adjoint());
      labels.push_back(prefix + std::to_string(c));
    }
    return from_projectors(std::move(el), std::move(labels));
  }

  static Pvm from_spectral(const SpectralPvm& s) {
    std::vector<std::string> labels;
    for (double v : s.eigenvalues) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "eig=%.6g", v);
      labels.emplace_back(buf);
    }
    return Pvm(s.projectors, std::move(labels));
  }

  const std::vector<CMatrix>& elements() const noexcept { return elements_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return elements_.size(); }
  std::size_t dim() const noexcept {
    return elements_.empty() ? 0 : static_cast<std::size_t>(elements_.front().rows());
  }

  /// Rounded traces, i.e. the rank of each element.
  std::vector<std::size_t> ranks() const {
    std::vector<std::size_t> r;
    for (const auto& p : elements_) r.push_back(static_cast<std::size_t>(std::llround(p.trace().real())));
    return r;
  }

 private:
  Pvm(std::vector<CMatrix> elements, std::vector<std::string> labels)
      : elements_(std::move(elements)), labels_(std::move(labels)) {}

  std::vector<CMatrix> elements_;
  std::vector<std::string> labels_;
};

class Povm {
 public:
  static Povm from_elements(std::vector<CMatrix> elements, double tol = kPvmTol) {
    if (elements.empty()) throw Error(ErrorKind::InvalidArgument, "POVM needs at least one element");
    const auto d = elements.front().rows();
    CMatrix sum = CMatrix::Zero(d, d);
    for (const auto& m : elements) {
      require_same_dim(m, elements.front(), "POVM element");
      const auto eig = herm_eig(m);
      if (eig.eigenvalues.minCoeff() < -kPsdTol) {
        throw Error(ErrorKind::NotPSD, "POVM element has eigenvalue " + std::to_string(eig.eigenvalues.minCoeff()));
      }
      sum += m;
    }
    const double defect = (sum - CMatrix::Identity(d, d)).norm();
    if (defect > tol) {
      throw Error(ErrorKind::InvalidArgument, "POVM elements do not sum to identity (defect " +
                                                  std::to_string(defect) + ")");
    }
    return Povm(std::move(elements));
  }

  static Povm from_pvm(const Pvm& e) { return Povm(e.elements()); }

  const std::vector<CMatrix>& elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }

 private:
  explicit Povm(std::vector<CMatrix> elements) : elements_(std::move(elements)) {}
  std::vector<CMatrix> elements_;
};

struct ClassicalDist {
  std::vector<double> probs;

  static ClassicalDist from_probs(std::vector<double> p, double tol = kPvmTol) {
    double s = 0.0;
    for (double x : p) {
      if (!(x >= 0.0)) throw Error(ErrorKind::NegativeProbability, "probability " + std::to_string(x));
      s += x;
    }
    if (std::abs(s - 1.0) > tol) {
      throw Error(ErrorKind::InvalidArgument, "probabilities sum to " + std::to_string(s));
    }
    return ClassicalDist{std::move(p)};
  }

  std::size_t size() const noexcept { return probs.size(); }
};

/// w(E): the largest rank among the elements.
inline std::size_t width(const Pvm& e) {
  const auto r = e.ranks();
  return r.empty() ? 0 : *std::max_element(r.begin(), r.end());
}

struct Refinement {
  bool refines = false;
  std::vector<std::size_t> assignment;  // F index -> E index, filled when refines
};

/// Whether F refines E (E ≤ F): every F_j sits inside some E_i and each E_i is the
/// sum of the F_j assigned to it, both within `tol` (Frobenius).
inline Refinement refines(const Pvm& f, const Pvm& e, double tol = kRefineTol) {
  if (f.dim() != e.dim()) throw Error(ErrorKind::DimensionMismatch, "refines: PVM dimensions differ");
  Refinement out;
  out.assignment.resize(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    const auto& fj = f.elements()[j];
    // Candidate: the E_i capturing most of F_j's trace; then check E_i F_j = F_j.
    double best_overlap = -std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double t = trace_of_product(e.elements()[i], fj).real();
      if (t > best_overlap) {
        best_overlap = t;
        best_i = i;
      }
    }
    if (!((e.elements()[best_i] * fj - fj).norm() <= tol)) return Refinement{};
    out.assignment[j] = best_i;
  }
  const auto d = static_cast<Eigen::Index>(e.dim());
  for (std::size_t i = 0; i < e.size(); ++i) {
    CMatrix sum = CMatrix::Zero(d, d);
    for (std::size_t j = 0; j < f.size(); ++j)
      if (out.assignment[j] == i) sum += f.elements()[j];
    if (!((sum - e.elements()[i]).norm() <= tol)) return Refinement{};
  }
  out.refines = true;
  return out;
}

namespace detail {

inline std::string product_label(const std::string& a, const std::string& b) { return a + "|" + b; }

}  // namespace detail

/// F × E style product {E_i F_j} of two commuting PVMs; empty intersections
/// (trace < 0.5) are dropped and labels read "E-label|F-label".
/// `origin`, when given, receives the (E index, F index) pair of every kept element.
inline Pvm product_pvm(const Pvm& e, const Pvm& f, double tol = kCommuteTol,
                       std::vector<std::pair<std::size_t, std::size_t>>* origin = nullptr) {
  if (e.dim() != f.dim()) throw Error(ErrorKind::DimensionMismatch, "product_pvm: PVM dimensions differ");
  double worst = 0.0;
  std::size_t wi = 0, wj = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = 0; j < f.size(); ++j) {
      const double c = comm_norm(e.elements()[i], f.elements()[j]);
      if (c > worst) {
        worst = c;
        wi = i;
        wj = j;
      }
    }
  }
  if (worst > tol) {
    throw Error(ErrorKind::NotCommuting, "elements '" + e.labels()[wi] + "' and '" + f.labels()[wj] +
                                             "' have commutator norm " + std::to_string(worst));
  }
  std::vector<CMatrix> el;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = 0; j < f.size(); ++j) {
      CMatrix p = e.elements()[i] * f.elements()[j];
      if (p.trace().real() < 0.5) continue;
      el.push_back(0.5 * (p + p.adjoint()));
      labels.push_back(detail::product_label(e.labels()[i], f.labels()[j]));
      if (origin) origin->emplace_back(i, j);
    }
  }
  return Pvm::assume_valid(std::move(el), std::move(labels));
}

/// Product with a spectral PVM, done in the spectral eigenbasis U: with B = U†E_iU,
/// [E_i, Q_s] vanishes iff B has no entries coupling block s to the rest, and
/// E_i Q_s = U B[:, s] U_s†.
inline Pvm product_pvm(const Pvm& e, const SpectralPvm& f, double tol = kCommuteTol,
                       std::vector<std::pair<std::size_t, std::size_t>>* origin = nullptr) {
  if (e.dim() != f.dim()) throw Error(ErrorKind::DimensionMismatch, "product_pvm: PVM dimensions differ");
  const auto cols = f.columns_per_block();
  const auto f_labels = Pvm::from_spectral(f).labels();
  const CMatrix& u = f.basis;
  std::vector<CMatrix> el;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const CMatrix b = u.adjoint() * e.elements()[i] * u;
    for (std::size_t s = 0; s < cols.size(); ++s) {
      double leak = 0.0;
      for (auto c : cols[s]) {
        for (Eigen::Index r = 0; r < b.rows(); ++r) {
          if (f.block[static_cast<std::size_t>(r)] != s) leak += std::norm(b(r, c)) + std::norm(b(c, r));
        }
      }
      const double comm = std::sqrt(leak);
      if (comm > tol) {
        throw Error(ErrorKind::NotCommuting, "elements '" + e.labels()[i] + "' and '" + f_labels[s] +
                                                 "' have commutator norm " + std::to_string(comm));
      }
      CMatrix us(u.rows(), static_cast<Eigen::Index>(cols[s].size()));
      CMatrix bs(b.rows(), static_cast<Eigen::Index>(cols[s].size()));
      for (std::size_t t = 0; t < cols[s].size(); ++t) {
        us.col(static_cast<Eigen::Index>(t)) = u.col(cols[s][t]);
        bs.col(static_cast<Eigen::Index>(t)) = b.col(cols[s][t]);
      }
      // Tr(E_i Q_s) = Σ_{c∈s} B_cc
      double tr = 0.0;
      for (auto c : cols[s]) tr += b(c, c).real();
      if (tr < 0.5) continue;
      CMatrix p = (u * bs) * us.adjoint();
      el.push_back(0.5 * (p + p.adjoint()));
      labels.push_back(detail::product_label(e.labels()[i], f_labels[s]));
      if (origin) origin->emplace_back(i, s);
    }
  }
  return Pvm::assume_valid(std::move(el), std::move(labels));
}

/// Conditional expectation A ↦ Σ_i E_i A E_i.
inline CMatrix pinch(const Pvm& e, const CMatrix& a) {
  if (static_cast<std::size_t>(a.rows()) != e.dim() || a.rows() != a.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "pinch: operator and PVM dimensions differ");
  }
  CMatrix out = CMatrix::Zero(a.rows(), a.cols());
  for (const auto& p : e.elements()) out += p * a * p;
  return out;
}

/// Pinching by a spectral PVM: mask the off-block entries of U†AU.
inline CMatrix pinch(const SpectralPvm& e, const CMatrix& a) {
  if (static_cast<std::size_t>(a.rows()) != e.dim() || a.rows() != a.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "pinch: operator and PVM dimensions differ");
  }
  CMatrix b = e.basis.adjoint() * a * e.basis;
  for (Eigen::Index c = 0; c < b.cols(); ++c)
    for (Eigen::Index r = 0; r < b.rows(); ++r)
      if (e.block[static_cast<std::size_t>(r)] != e.block[static_cast<std::size_t>(c)]) b(r, c) = 0.0;
  return e.basis * b * e.basis.adjoint();
}

inline ClassicalDist measure(std::span<const CMatrix> elements, const CMatrix& state) {
  std::vector<double> probs;
  probs.reserve(elements.size());
  for (const auto& m : elements) {
    require_same_dim(m, state, "measure");
    double p = trace_of_product(m, state).real();
    if (p < -kPsdTol) {
      throw Error(ErrorKind::NegativeProbability, "Tr[M_i ρ] = " + std::to_string(p));
    }
    probs.push_back(std::max(0.0, p));
  }
  return ClassicalDist{std::move(probs)};
}

inline ClassicalDist measure(const Povm& m, const DensityMatrix& rho) { return measure(m.elements(), rho.mat()); }
inline ClassicalDist measure(const Pvm& e, const DensityMatrix& rho) { return measure(e.elements(), rho.mat()); }

}  // namespace qre
