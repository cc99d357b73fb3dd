#pragma once

// Schur-Weyl machinery on (C^k)^⊗n: partitions, symmetric-group dimensions and
// characters, permutation operators, the isotypic PVM and the spin-1/2 oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "qre/matkernel.hpp"
#include "qre/measurement.hpp"
#include "qre/quantum_state.hpp"

namespace qre {

/// Exact group sums enumerate all n! permutations.
inline constexpr int kMaxSymmetricN = 10;

/// A Young diagram: weakly decreasing positive row lengths.
struct Partition {
  std::vector<int> rows;

  static Partition from_rows(std::vector<int> rows) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i] <= 0) throw Error(ErrorKind::InvalidArgument, "partition rows must be positive");
      if (i > 0 && rows[i] > rows[i - 1]) {
        throw Error(ErrorKind::InvalidArgument, "partition rows must be weakly decreasing");
      }
    }
    return Partition{std::move(rows)};
  }

  int n() const { return std::accumulate(rows.begin(), rows.end(), 0); }
  int num_rows() const { return static_cast<int>(rows.size()); }
  int row(int i) const { return i < num_rows() ? rows[static_cast<std::size_t>(i)] : 0; }

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(rows[i]);
    }
    return s + ")";
  }

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition&, const Partition&) = default;
};

namespace detail {

inline void partitions_rec(int remaining, int max_part, int rows_left, std::vector<int>& cur,
                           std::vector<Partition>& out) {
  if (remaining == 0) {
    out.push_back(Partition{cur});
    return;
  }
  if (rows_left == 0) return;
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions_rec(remaining - p, p, rows_left - 1, cur, out);
    cur.pop_back();
  }
}

inline std::uint64_t factorial(int n) {
  if (n < 0 || n > 20) throw Error(ErrorKind::NTooLarge, "factorial argument " + std::to_string(n) + " out of range");
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

}  // namespace detail

/// Partitions of n with at most `max_rows` rows, descending lexicographic order.
inline std::vector<Partition> partitions(int n, int max_rows) {
  if (n < 1 || max_rows < 1) throw Error(ErrorKind::InvalidArgument, "partitions needs n >= 1 and k >= 1");
  std::vector<Partition> out;
  std::vector<int> cur;
  detail::partitions_rec(n, n, max_rows, cur, out);
  return out;
}

/// Conjugate (transposed) diagram.
inline Partition conjugate(const Partition& lambda) {
  std::vector<int> cols;
  for (int j = 0; j < lambda.row(0); ++j) {
    int c = 0;
    while (c < lambda.num_rows() && lambda.row(c) > j) ++c;
    cols.push_back(c);
  }
  return Partition{std::move(cols)};
}

/// Symmetric-group irrep dimension d_λ = n!/Π hook lengths.
inline std::uint64_t hook_dim(const Partition& lambda) {
  const Partition cols = conjugate(lambda);
  std::uint64_t prod = 1;
  for (int i = 0; i < lambda.num_rows(); ++i) {
    for (int j = 0; j < lambda.row(i); ++j) {
      const int hook = (lambda.row(i) - j - 1) + (cols.row(j) - i - 1) + 1;
      prod *= static_cast<std::uint64_t>(hook);
    }
  }
  return detail::factorial(lambda.n()) / prod;
}

/// GL(k) irrep dimension m_λ = Π_{i<j} (λ_i − λ_j + j − i)/(j − i), λ padded to k rows.
inline std::uint64_t weyl_dim(const Partition& lambda, int k) {
  if (lambda.num_rows() > k) {
    throw Error(ErrorKind::TooManyRows, "partition " + lambda.str() + " has more than " + std::to_string(k) + " rows");
  }
  std::uint64_t num = 1, den = 1;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      num *= static_cast<std::uint64_t>(lambda.row(i) - lambda.row(j) + j - i);
      den *= static_cast<std::uint64_t>(j - i);
      const auto g = std::gcd(num, den);
      num /= g;
      den /= g;
    }
  }
  return num / den;
}

struct CycleType {
  std::vector<int> lengths;  // weakly decreasing
  std::uint64_t class_size = 0;

  int n() const { return std::accumulate(lengths.begin(), lengths.end(), 0); }
  std::string str() const { return Partition{lengths}.str(); }
};

/// n!/z_μ with z_μ = Π_i i^{m_i} m_i!.
inline std::uint64_t class_size(const std::vector<int>& lengths) {
  const int n = std::accumulate(lengths.begin(), lengths.end(), 0);
  std::map<int, int> mult;
  for (int l : lengths) ++mult[l];
  std::uint64_t z = 1;
  for (auto [len, m] : mult) {
    for (int t = 0; t < m; ++t) z *= static_cast<std::uint64_t>(len);
    z *= detail::factorial(m);
  }
  return detail::factorial(n) / z;
}

inline CycleType make_cycle_type(std::vector<int> lengths) {
  std::sort(lengths.begin(), lengths.end(), std::greater<>());
  const auto size = class_size(lengths);
  return CycleType{std::move(lengths), size};
}

/// All conjugacy classes of S_n, in descending lexicographic order of cycle type.
inline std::vector<CycleType> cycle_types(int n) {
  std::vector<CycleType> out;
  for (auto& p : partitions(n, n)) out.push_back(make_cycle_type(p.rows));
  return out;
}

/// One-line notation, 0-based: perm[j] = π(j).
using Permutation = std::vector<int>;

inline CycleType cycle_type_of(const Permutation& perm) {
  std::vector<bool> seen(perm.size(), false);
  std::vector<int> lengths;
  for (std::size_t s = 0; s < perm.size(); ++s) {
    if (seen[s]) continue;
    int len = 0;
    for (std::size_t j = s; !seen[j]; j = static_cast<std::size_t>(perm[j])) {
      seen[j] = true;
      ++len;
    }
    lengths.push_back(len);
  }
  return make_cycle_type(std::move(lengths));
}

namespace detail {

// Character via beta-sets: a rim hook of length h corresponds to moving one bead
// β → β − h onto a free position; its height is the number of beads jumped over.
inline long long mn_beta(std::vector<int>& beta, const std::vector<int>& parts, std::size_t next) {
  if (next == parts.size()) return 1;
  const int h = parts[next];
  long long total = 0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    const int from = beta[i];
    const int to = from - h;
    if (to < 0 || std::find(beta.begin(), beta.end(), to) != beta.end()) continue;
    int jumped = 0;
    for (int b : beta)
      if (b > to && b < from) ++jumped;
    beta[i] = to;
    const long long sub = mn_beta(beta, parts, next + 1);
    beta[i] = from;
    total += (jumped % 2 == 0) ? sub : -sub;
  }
  return total;
}

}  // namespace detail

/// χ_λ(μ) by Murnaghan-Nakayama rim-hook removal.
inline long long mn_character(const Partition& lambda, const CycleType& mu) {
  if (lambda.n() != mu.n()) {
    throw Error(ErrorKind::SizeMismatch, "character of " + lambda.str() + " at class " + mu.str());
  }
  const int r = lambda.num_rows();
  std::vector<int> beta;
  for (int i = 0; i < r; ++i) beta.push_back(lambda.row(i) + r - 1 - i);
  return detail::mn_beta(beta, mu.lengths, 0);
}

/// Sparse 0/1 operator on (C^k)^⊗n: column b has its single 1 in row image[b].
struct PermutationOperator {
  int n = 0;
  int k = 0;
  std::vector<std::uint32_t> image;

  std::size_t dim() const noexcept { return image.size(); }

  RMatrix to_dense() const {
    const auto d = static_cast<Eigen::Index>(image.size());
    RMatrix m = RMatrix::Zero(d, d);
    for (Eigen::Index b = 0; b < d; ++b) m(image[static_cast<std::size_t>(b)], b) = 1.0;
    return m;
  }

  /// Operator product this·other.
  PermutationOperator then_after(const PermutationOperator& other) const {
    PermutationOperator out{n, k, std::vector<std::uint32_t>(image.size())};
    for (std::size_t b = 0; b < image.size(); ++b) out.image[b] = image[other.image[b]];
    return out;
  }

  friend bool operator==(const PermutationOperator&, const PermutationOperator&) = default;
};

namespace detail {

inline std::vector<std::uint32_t> place_values(int n, int k) {
  std::vector<std::uint32_t> w(static_cast<std::size_t>(n));
  std::uint32_t v = 1;
  for (int t = n - 1; t >= 0; --t) {
    w[static_cast<std::size_t>(t)] = v;
    v *= static_cast<std::uint32_t>(k);
  }
  return w;
}

/// digits[b*n + t] = t-th tensor factor index of basis vector b (t = 0 most significant).
inline std::vector<std::uint8_t> basis_digits(int n, int k, std::size_t d) {
  std::vector<std::uint8_t> digits(d * static_cast<std::size_t>(n));
  for (std::size_t b = 0; b < d; ++b) {
    std::size_t rest = b;
    for (int t = n - 1; t >= 0; --t) {
      digits[b * static_cast<std::size_t>(n) + static_cast<std::size_t>(t)] = static_cast<std::uint8_t>(rest % static_cast<std::size_t>(k));
      rest /= static_cast<std::size_t>(k);
    }
  }
  return digits;
}

inline void fill_image(const Permutation& perm, int n, const std::vector<std::uint32_t>& place,
                       const std::vector<std::uint8_t>& digits, std::vector<std::uint32_t>& image) {
  std::vector<std::uint32_t> w(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) w[static_cast<std::size_t>(t)] = place[static_cast<std::size_t>(perm[static_cast<std::size_t>(t)])];
  const auto nn = static_cast<std::size_t>(n);
  for (std::size_t b = 0; b < image.size(); ++b) {
    std::uint32_t out = 0;
    const std::uint8_t* dg = &digits[b * nn];
    for (std::size_t t = 0; t < nn; ++t) out += dg[t] * w[t];
    image[b] = out;
  }
}

inline void require_permutation(const Permutation& perm) {
  std::vector<bool> seen(perm.size(), false);
  for (int p : perm) {
    if (p < 0 || static_cast<std::size_t>(p) >= perm.size() || seen[static_cast<std::size_t>(p)]) {
      throw Error(ErrorKind::InvalidArgument, "not a permutation in one-line notation");
    }
    seen[static_cast<std::size_t>(p)] = true;
  }
}

}  // namespace detail

/// U(π): e_{i_1}⊗…⊗e_{i_n} ↦ e_{i_{π⁻¹(1)}}⊗…⊗e_{i_{π⁻¹(n)}}, i.e. the factor in
/// slot j moves to slot π(j). U(π∘τ) = U(π)U(τ).
inline PermutationOperator permutation_operator(const Permutation& perm, int k,
                                                std::size_t dim_cap = kDefaultDimCap) {
  detail::require_permutation(perm);
  const int n = static_cast<int>(perm.size());
  if (n < 1 || k < 1 || k > 255) throw Error(ErrorKind::InvalidArgument, "permutation_operator needs n >= 1, 1 <= k <= 255");
  const std::size_t d = checked_power(static_cast<std::size_t>(k), n, dim_cap);
  PermutationOperator op{n, k, std::vector<std::uint32_t>(d)};
  detail::fill_image(perm, n, detail::place_values(n, k), detail::basis_digits(n, k, d), op.image);
  return op;
}

struct IsotypicPvm {
  Pvm pvm;
  int n = 0;
  int k = 0;
  std::vector<Partition> labels;
  std::vector<std::uint64_t> sym_dims;  // d_λ
  std::vector<std::uint64_t> gl_dims;   // m_λ

  /// Largest GL multiplicity-space dimension, the width of any fine PVM that
  /// splits each isotypic block into single irreducible copies.
  std::uint64_t irreducible_width() const {
    return gl_dims.empty() ? 0 : *std::max_element(gl_dims.begin(), gl_dims.end());
  }

  /// (n+1)^(k−1)
  std::uint64_t width_bound() const {
    std::uint64_t b = 1;
    for (int i = 0; i < k - 1; ++i) b *= static_cast<std::uint64_t>(n + 1);
    return b;
  }
};

namespace detail {

/// Class sums C_μ = Σ_{π∈μ} U(π) as dense count matrices, one per cycle type.
inline std::vector<Eigen::MatrixXi> class_operators(int n, int k, std::size_t d,
                                                    const std::vector<CycleType>& classes) {
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t c = 0; c < classes.size(); ++c) index[classes[c].lengths] = c;
  std::vector<Eigen::MatrixXi> sums(classes.size(), Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  const auto place = place_values(n, k);
  const auto digits = basis_digits(n, k, d);
  std::vector<std::uint32_t> image(d);
  Permutation perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    auto& c = sums[index.at(cycle_type_of(perm).lengths)];
    fill_image(perm, n, place, digits, image);
    for (std::size_t b = 0; b < d; ++b) c(image[b], static_cast<Eigen::Index>(b)) += 1;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sums;
}

}  // namespace detail

/// Isotypic projectors P_λ = (d_λ/n!) Σ_π χ_λ(π) U(π) for every λ ⊢ n with at
/// most k rows, in descending lexicographic order of λ.
inline IsotypicPvm isotypic_pvm(int n, int k, std::size_t dim_cap = kDefaultDimCap) {
  if (n < 1 || k < 1) throw Error(ErrorKind::InvalidArgument, "isotypic_pvm needs n >= 1 and k >= 1");
  if (n > kMaxSymmetricN) {
    throw Error(ErrorKind::NTooLarge, "n = " + std::to_string(n) + " exceeds the exact group-sum limit " +
                                          std::to_string(kMaxSymmetricN));
  }
  const std::size_t d = checked_power(static_cast<std::size_t>(k), n, dim_cap);
  const auto classes = cycle_types(n);
  const auto sums = detail::class_operators(n, k, d, classes);
  const double n_fact = static_cast<double>(detail::factorial(n));

  IsotypicPvm out{Pvm::trivial(1), n, k, {}, {}, {}};
  std::vector<CMatrix> elements;
  std::vector<std::string> names;
  for (auto& lambda : partitions(n, k)) {
    const auto dl = hook_dim(lambda);
    RMatrix p = RMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const auto chi = mn_character(lambda, classes[c]);
      if (chi != 0) p += static_cast<double>(chi) * sums[c].cast<double>();
    }
    p *= static_cast<double>(dl) / n_fact;
    elements.push_back(p.cast<Complex>());
    names.push_back("λ=" + lambda.str());
    out.sym_dims.push_back(dl);
    out.gl_dims.push_back(weyl_dim(lambda, k));
    out.labels.push_back(std::move(lambda));
  }
  out.pvm = Pvm::assume_valid(std::move(elements), std::move(names));
  return out;
}

/// max_λ ‖[P_λ, A]‖_F
inline double max_commutator(const IsotypicPvm& p, const CMatrix& a) {
  if (static_cast<std::size_t>(a.rows()) != p.pvm.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "operator does not act on (C^k)^⊗n");
  }
  double worst = 0.0;
  for (const auto& e : p.pvm.elements()) worst = std::max(worst, comm_norm(e, a));
  return worst;
}

/// max_λ ‖[P_λ, σ^⊗n]‖_F
inline double commutes_with_tensor_power(const IsotypicPvm& p, const DensityMatrix& sigma,
                                         std::size_t dim_cap = kDefaultDimCap) {
  if (static_cast<int>(sigma.dim()) != p.k) {
    throw Error(ErrorKind::DimensionMismatch, "state dimension " + std::to_string(sigma.dim()) +
                                                  " does not match k = " + std::to_string(p.k));
  }
  return max_commutator(p, kron_power(sigma.mat(), p.n, dim_cap));
}

/// Total-spin PVM on n spin-1/2 factors, built by coupling one spin at a time with
/// the j ⊗ 1/2 Clebsch-Gordan rule. Elements are ordered by descending total
/// spin j and labelled "j=…". Basis index 0 of each factor is spin up.
inline Pvm spin_coupling_pvm(int n, std::size_t dim_cap = kDefaultDimCap) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "spin_coupling_pvm needs n >= 1");
  checked_power(2, n, dim_cap);

  // A multiplet of spin j = two_j/2; states[t] has m = j − t.
  struct Multiplet {
    int two_j;
    std::vector<RVector> states;
  };
  auto up_down = [](const RVector& v, int bit) {
    RVector out = RVector::Zero(2 * v.size());
    for (Eigen::Index a = 0; a < v.size(); ++a) out(2 * a + bit) = v(a);
    return out;
  };

  std::vector<Multiplet> level;
  {
    RVector up = RVector::Zero(2), down = RVector::Zero(2);
    up(0) = 1.0;
    down(1) = 1.0;
    level.push_back(Multiplet{1, {up, down}});
  }
  for (int step = 2; step <= n; ++step) {
    std::vector<Multiplet> next;
    for (const auto& mult : level) {
      const int tj = mult.two_j;
      const double j = tj / 2.0;
      const auto dim_old = mult.states.front().size();
      // |j, m⟩ or zero when |m| > j
      auto state = [&](int two_m) -> RVector {
        if (std::abs(two_m) > tj) return RVector::Zero(dim_old);
        return mult.states[static_cast<std::size_t>((tj - two_m) / 2)];
      };
      for (int two_big_j : {tj + 1, tj - 1}) {
        if (two_big_j < 0) continue;
        Multiplet out{two_big_j, {}};
        for (int two_m = two_big_j; two_m >= -two_big_j; two_m -= 2) {
          const double m = two_m / 2.0;
          const double a = std::sqrt((j + m + 0.5) / (2 * j + 1));
          const double b = std::sqrt((j - m + 0.5) / (2 * j + 1));
          const RVector from_up = up_down(state(two_m - 1), 0);
          const RVector from_down = up_down(state(two_m + 1), 1);
          out.states.push_back(two_big_j > tj ? RVector(a * from_up + b * from_down)
                                              : RVector(-b * from_up + a * from_down));
        }
        next.push_back(std::move(out));
      }
    }
    level = std::move(next);
  }

  std::map<int, RMatrix, std::greater<>> by_spin;
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
  for (const auto& mult : level) {
    auto [it, fresh] = by_spin.try_emplace(mult.two_j, RMatrix::Zero(d, d));
    for (const auto& v : mult.states) it->second.noalias() += v * v.transpose();
  }
  std::vector<CMatrix> elements;
  std::vector<std::string> labels;
  for (auto& [two_j, proj] : by_spin) {
    elements.push_back(proj.cast<Complex>());
    labels.push_back(two_j % 2 == 0 ? "j=" + std::to_string(two_j / 2) : "j=" + std::to_string(two_j) + "/2");
  }
  return Pvm::assume_valid(std::move(elements), std::move(labels));
}

}  // namespace qre
