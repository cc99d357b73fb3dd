#pragma once

// The universal measurement M_n = IR^⊗n × E(ρ^⊗n) and the convergence sweep
// that compares D_{M_n}(σ^⊗n‖ρ^⊗n)/n against D(σ‖ρ).

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qre/divergence.hpp"
#include "qre/io.hpp"
#include "qre/measurement.hpp"
#include "qre/quantum_state.hpp"
#include "qre/schur_weyl.hpp"

namespace qre {

inline constexpr double kBoundSlack = 1e-8;

struct UniversalPvm {
  Pvm pvm;
  std::vector<std::size_t> isotypic_index;   // per element: which P_λ
  std::vector<std::size_t> spectral_index;   // per element: which eigenspace of ρ^⊗n
  std::vector<double> rho_log_eigenvalue;    // per element: log of ρ^⊗n's eigenvalue there
  std::uint64_t irreducible_width = 0;       // max_λ m_λ

  /// P^{M}_{ρ^⊗n}: ρ^⊗n is flat on every element, so Tr[M_i ρ^⊗n] = rank_i · e^{log λ_i}.
  /// This avoids the absolute roundoff of a dense trace on tiny eigenvalues.
  ClassicalDist rho_distribution() const {
    const auto ranks = pvm.ranks();
    std::vector<double> q(ranks.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
      q[i] = std::isinf(rho_log_eigenvalue[i]) ? 0.0
                                               : static_cast<double>(ranks[i]) * std::exp(rho_log_eigenvalue[i]);
    }
    return ClassicalDist{std::move(q)};
  }
};

/// IR^⊗n × E(ρ^⊗n) from a prebuilt isotypic PVM. A NotCommuting error here is an
/// internal failure: the isotypic projectors commute with every ρ^⊗n.
inline UniversalPvm universal_pvm(const IsotypicPvm& iso, const DensityMatrix& rho,
                                  std::optional<double> cluster_tol = std::nullopt,
                                  std::size_t dim_cap = kDefaultDimCap) {
  if (static_cast<int>(rho.dim()) != iso.k) {
    throw Error(ErrorKind::DimensionMismatch, "state dimension does not match the isotypic PVM");
  }
  const SpectralPvm spec = spectral_pvm_of_power(rho, iso.n, cluster_tol, dim_cap);
  std::vector<std::pair<std::size_t, std::size_t>> origin;
  Pvm product = product_pvm(iso.pvm, spec, kCommuteTol, &origin);
  UniversalPvm out{std::move(product), {}, {}, {}, iso.irreducible_width()};
  for (auto [l, s] : origin) {
    out.isotypic_index.push_back(l);
    out.spectral_index.push_back(s);
    out.rho_log_eigenvalue.push_back(spec.log_eigenvalues[s]);
  }
  return out;
}

inline UniversalPvm universal_pvm(const DensityMatrix& rho, int n, std::optional<double> cluster_tol = std::nullopt,
                                  std::size_t dim_cap = kDefaultDimCap) {
  return universal_pvm(isotypic_pvm(n, static_cast<int>(rho.dim()), dim_cap), rho, cluster_tol, dim_cap);
}

struct SweepRecord {
  int n = 0;
  double target = 0.0;         // D(σ‖ρ), nats
  double measured_rate = 0.0;  // D_{M_n}(σ^⊗n‖ρ^⊗n)/n
  double pinched_rate = 0.0;   // D(E_{ρ^⊗n}(σ^⊗n)‖ρ^⊗n)/n
  double gap = 0.0;            // target − measured_rate
  double bound = 0.0;          // (k−1)·ln(n+1)/n
  double width_bound = 0.0;    // ln(max_λ m_λ)/n, never looser than `bound`
  std::size_t outcome_count = 0;
};

struct SweepOptions {
  int n_min = 1;
  int n_max = 8;
  std::optional<double> cluster_tol;
  double support_tol = kSupportTol;
  std::size_t dim_cap = kDefaultDimCap;
};

struct SweepConfig {
  std::string rho_spec;
  std::string sigma_spec;
  SweepOptions options;
  std::uint64_t seed = 0;
  std::string output_path;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  bool finite = true;  // false when supp σ ⊄ supp ρ, i.e. D(σ‖ρ) = +∞
};

inline double gap_bound(int k, int n) { return (k - 1) * std::log(static_cast<double>(n + 1)) / n; }

/// Human-readable list of violated SweepRecord invariants (empty when all hold).
inline std::vector<std::string> record_violations(const SweepRecord& r) {
  std::vector<std::string> v;
  auto fmt = [](double x) { return io::format_double(x); };
  const std::string at = " at n=" + std::to_string(r.n);
  if (std::isinf(r.target)) return v;  // supp σ ⊄ supp ρ: nothing to bound
  if (!(r.gap >= -kBoundSlack)) v.push_back("gap " + fmt(r.gap) + " < 0" + at);
  if (!(r.gap <= r.bound + kBoundSlack)) v.push_back("gap " + fmt(r.gap) + " > bound " + fmt(r.bound) + at);
  if (!(r.gap <= r.width_bound + kBoundSlack)) {
    v.push_back("gap " + fmt(r.gap) + " > ln(width)/n " + fmt(r.width_bound) + at);
  }
  if (!(r.measured_rate <= r.target + kBoundSlack)) {
    v.push_back("measured rate " + fmt(r.measured_rate) + " exceeds target " + fmt(r.target) + at);
  }
  if (!(r.pinched_rate <= r.target + kBoundSlack)) {
    v.push_back("pinched rate " + fmt(r.pinched_rate) + " exceeds target " + fmt(r.target) + at);
  }
  return v;
}

inline SweepRecord sweep_point(const IsotypicPvm& iso, const DensityMatrix& rho, const DensityMatrix& sigma,
                               const ExtReal& target, const SweepOptions& opt) {
  const int n = iso.n;
  const int k = iso.k;
  const UniversalPvm m = universal_pvm(iso, rho, opt.cluster_tol, opt.dim_cap);
  const CMatrix sigma_n = kron_power(sigma.mat(), n, opt.dim_cap);
  const ExtReal measured = kl_divergence(measure(m.pvm.elements(), sigma_n), m.rho_distribution());
  const ExtReal pinched = pinched_divergence(rho, sigma, n, opt.cluster_tol, opt.support_tol, opt.dim_cap);

  SweepRecord r;
  r.n = n;
  r.target = target.value();
  r.measured_rate = measured.value() / n;
  r.pinched_rate = pinched.value() / n;
  r.gap = target.is_finite() ? r.target - r.measured_rate : std::numeric_limits<double>::infinity();
  r.bound = gap_bound(k, n);
  r.width_bound = std::log(static_cast<double>(m.irreducible_width)) / n;
  r.outcome_count = m.pvm.size();
  return r;
}

/// One record per n in [n_min, n_max], ascending.
inline SweepResult run_sweep(const DensityMatrix& rho, const DensityMatrix& sigma, const SweepOptions& opt) {
  if (rho.dim() != sigma.dim()) throw Error(ErrorKind::DimensionMismatch, "ρ and σ have different dimensions");
  if (opt.n_min < 1 || opt.n_max < opt.n_min) {
    throw Error(ErrorKind::InvalidArgument, "sweep needs 1 <= n_min <= n_max");
  }
  const int k = static_cast<int>(rho.dim());
  checked_power(static_cast<std::size_t>(k), opt.n_max, opt.dim_cap);
  const ExtReal target = quantum_relative_entropy(sigma, rho, opt.support_tol);

  SweepResult out;
  out.finite = target.is_finite();
  for (int n = opt.n_min; n <= opt.n_max; ++n) {
    out.records.push_back(sweep_point(isotypic_pvm(n, k, opt.dim_cap), rho, sigma, target, opt));
  }
  return out;
}

inline SweepResult run_sweep(const SweepConfig& cfg) {
  const DensityMatrix rho = io::parse_state_spec(cfg.rho_spec, cfg.seed);
  const DensityMatrix sigma = io::parse_state_spec(cfg.sigma_spec, cfg.seed + 1);
  return run_sweep(rho, sigma, cfg.options);
}

inline std::string sweep_csv(const std::vector<SweepRecord>& records) {
  std::ostringstream os;
  os << "n,target_nats,measured_rate,pinched_rate,gap,bound,outcomes\n";
  for (const auto& r : records) {
    os << r.n << ',' << io::format_double(r.target) << ',' << io::format_double(r.measured_rate) << ','
       << io::format_double(r.pinched_rate) << ',' << io::format_double(r.gap) << ','
       << io::format_double(r.bound) << ',' << r.outcome_count << '\n';
  }
  return os.str();
}

inline io::json sweep_json(const SweepResult& result) {
  auto num = [](double x) -> io::json {
    if (std::isfinite(x)) return x;
    return io::format_double(x);
  };
  io::json rows = io::json::array();
  for (const auto& r : result.records) {
    rows.push_back({{"n", r.n},
                    {"target_nats", num(r.target)},
                    {"measured_rate", num(r.measured_rate)},
                    {"pinched_rate", num(r.pinched_rate)},
                    {"gap", num(r.gap)},
                    {"bound", num(r.bound)},
                    {"outcomes", r.outcome_count}});
  }
  return io::json{{"finite", result.finite}, {"records", std::move(rows)}};
}

/// gnuplot recipe plotting the gap against its bound from a sweep CSV.
inline std::string plot_script(const std::string& csv_path) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set xlabel 'n'\n"
     << "set ylabel 'nats'\n"
     << "set logscale y\n"
     << "plot '" << csv_path << "' using 1:5 with linespoints title 'gap', \\\n"
     << "     '' using 1:6 with lines title '(k-1) ln(n+1)/n', \\\n"
     << "     '' using 1:3 with linespoints title 'measured rate', \\\n"
     << "     '' using 1:4 with linespoints title 'pinched rate'\n";
  return os.str();
}

/// One evaluation of D_F ≤ D ≤ D_F + ln w(E).
struct WidthBoundReport {
  // hypotheses
  double sigma_commutator = 0.0;  // max_i ‖[σ, E_i]‖
  double rho_commutator = 0.0;    // max_i ‖[ρ, E_i]‖
  bool e_refined_by_f = false;    // E ≤ F
  bool rho_spectral_refined_by_f = false;  // E(ρ) ≤ F
  bool hypotheses_hold = false;

  double measured = 0.0;  // D_F(σ‖ρ)
  double exact = 0.0;     // D(σ‖ρ)
  std::uint64_t width = 0;
  bool lower_holds = false;
  bool upper_holds = false;

  bool passed() const { return hypotheses_hold && lower_holds && upper_holds; }
};

/// `width_override` replaces w(E) when E is coarser than the PVM whose width
/// governs the bound (the isotypic PVM stands in for a fine irreducible PVM with
/// width max_λ m_λ and the same measured divergence).
inline WidthBoundReport check_theorem2_instance(const Pvm& e, const Pvm& f, const DensityMatrix& sigma,
                                              const DensityMatrix& rho,
                                              std::optional<std::uint64_t> width_override = std::nullopt,
                                              double support_tol = kSupportTol) {
  WidthBoundReport rep;
  for (const auto& p : e.elements()) {
    rep.sigma_commutator = std::max(rep.sigma_commutator, comm_norm(sigma.mat(), p));
    rep.rho_commutator = std::max(rep.rho_commutator, comm_norm(rho.mat(), p));
  }
  rep.e_refined_by_f = refines(f, e).refines;
  rep.rho_spectral_refined_by_f = refines(f, Pvm::from_spectral(spectral_pvm(rho))).refines;
  rep.hypotheses_hold = rep.sigma_commutator <= kCommuteTol && rep.rho_commutator <= kCommuteTol &&
                        rep.e_refined_by_f && rep.rho_spectral_refined_by_f;

  const ExtReal d_f = measured_divergence(f, sigma, rho);
  const ExtReal d = quantum_relative_entropy(sigma, rho, support_tol);
  rep.measured = d_f.value();
  rep.exact = d.value();
  rep.width = width_override.value_or(width(e));
  if (d.is_infinite()) {
    rep.lower_holds = true;
    rep.upper_holds = d_f.is_infinite();
  } else {
    rep.lower_holds = d_f.is_finite() && rep.measured <= rep.exact + kBoundSlack;
    rep.upper_holds = rep.exact <= rep.measured + std::log(static_cast<double>(rep.width)) + kBoundSlack;
  }
  return rep;
}

}  // namespace qre
