// qre: command-line front end for sweeps, projector dumps and one-shot divergences.
//
// Exit codes: 0 success, 1 bad input, 2 a mathematical invariant failed.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "qre/qre.hpp"

namespace {

constexpr int kExitInput = 1;
constexpr int kExitInvariant = 2;

struct Shared {
  std::uint64_t seed = 0;
  std::optional<double> cluster_tol;
  double support_tol = qre::kSupportTol;
  std::size_t dim_cap = qre::kDefaultDimCap;
};

void add_shared(CLI::App* cmd, Shared& s) {
  cmd->add_option("--seed", s.seed, "seed for random:k state specs");
  cmd->add_option("--cluster-tol", s.cluster_tol, "eigenvalue clustering tolerance");
  cmd->add_option("--support-tol", s.support_tol, "kernel weight treated as zero");
  cmd->add_option("--dim-cap", s.dim_cap, "largest allowed Hilbert space dimension");
}

// Thrown for usage problems CLI11 does not catch itself.
struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(const CLI::App* cmd, const std::string& flag) {
  if (cmd->count(flag) == 0) throw Usage("missing required flag: " + flag);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

qre::io::json number(double v, double scale = 1.0) {
  if (std::isinf(v)) return "inf";
  return v * scale;
}

qre::io::json number(const qre::ExtReal& v, double scale = 1.0) { return number(v.value(), scale); }

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::optional<int> k;
  std::string rho, sigma;
  int n_min = 1;
  std::optional<int> n_max;
  std::string out;
  std::string plot_script;
  bool bits = false;
};

int default_n_max(int k, std::size_t cap) {
  if (k == 2) return 8;
  if (k == 3) return 5;
  int n = 1;
  while (n < qre::kMaxSymmetricN) {
    try {
      qre::checked_power(static_cast<std::size_t>(k), n + 1, cap);
    } catch (const qre::Error&) {
      break;
    }
    ++n;
  }
  return n;
}

int run_sweep_cmd(const CLI::App* cmd, const SweepArgs& a, const Shared& s) {
  require(cmd, "--rho");
  require(cmd, "--sigma");
  const auto rho = qre::io::parse_state_spec(a.rho, s.seed);
  const auto sigma = qre::io::parse_state_spec(a.sigma, s.seed + 1);
  const int k = static_cast<int>(rho.dim());
  if (a.k && *a.k != k) {
    throw Usage("--k " + std::to_string(*a.k) + " does not match the dimension " + std::to_string(k) + " of --rho");
  }
  if (static_cast<int>(sigma.dim()) != k) throw Usage("--sigma has dimension " + std::to_string(sigma.dim()) + ", expected " + std::to_string(k));

  qre::SweepOptions opt;
  opt.n_min = a.n_min;
  opt.n_max = a.n_max.value_or(default_n_max(k, s.dim_cap));
  opt.cluster_tol = s.cluster_tol;
  opt.support_tol = s.support_tol;
  opt.dim_cap = s.dim_cap;
  if (opt.n_min < 1 || opt.n_max < opt.n_min) throw Usage("need 1 <= --n-min <= --n-max");
  if (opt.n_max > qre::kMaxSymmetricN) throw Usage("--n-max must be at most " + std::to_string(qre::kMaxSymmetricN));

  const auto result = qre::run_sweep(rho, sigma, opt);

  if (!a.out.empty()) {
    const std::string body = ends_with(a.out, ".json") ? qre::sweep_json(result).dump(2) + "\n"
                                                       : qre::sweep_csv(result.records);
    qre::io::write_atomic(a.out, body);
  }
  if (!a.plot_script.empty()) {
    qre::io::write_atomic(a.plot_script, qre::plot_script(a.out.empty() ? "sweep.csv" : a.out));
  }

  const double scale = a.bits ? 1.0 / std::log(2.0) : 1.0;
  std::printf("%3s %14s %14s %14s %14s %14s %8s  (%s)\n", "n", "target", "measured", "pinched", "gap", "bound",
              "outcomes", a.bits ? "bits" : "nats");
  for (const auto& r : result.records) {
    std::printf("%3d %14.8g %14.8g %14.8g %14.8g %14.8g %8zu\n", r.n, r.target * scale, r.measured_rate * scale,
                r.pinched_rate * scale, r.gap * scale, r.bound * scale, r.outcome_count);
  }
  if (!result.finite) std::printf("supp sigma is not inside supp rho: the target divergence is +inf\n");

  int bad = 0;
  for (const auto& r : result.records) {
    for (const auto& msg : qre::record_violations(r)) {
      std::fprintf(stderr, "invariant violated: %s\n", msg.c_str());
      ++bad;
    }
  }
  return bad ? kExitInvariant : 0;
}

// ------------------------------------------------------------ projectors

struct ProjectorArgs {
  int n = 0;
  int k = 0;
  std::string out;
  std::string summary;
  std::string rho;
  bool check = false;
};

std::string summary_csv(const qre::IsotypicPvm& iso) {
  std::string csv = "lambda,d_lambda,m_lambda,rank\n";
  const auto ranks = iso.pvm.ranks();
  for (std::size_t i = 0; i < iso.labels.size(); ++i) {
    csv += "\"" + iso.labels[i].str() + "\"," + std::to_string(iso.sym_dims[i]) + "," +
           std::to_string(iso.gl_dims[i]) + "," + std::to_string(ranks[i]) + "\n";
  }
  return csv;
}

bool run_checks(const qre::IsotypicPvm& iso, const Shared& s) {
  bool all = true;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    all = all && ok;
  };
  const auto defects = qre::pvm_defects(iso.pvm.elements());
  report("pvm", defects.worst() <= 1e-9, "worst defect " + qre::io::format_double(defects.worst()));

  const auto ranks = iso.pvm.ranks();
  bool ranks_ok = true;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    ranks_ok = ranks_ok && ranks[i] == iso.sym_dims[i] * iso.gl_dims[i];
    total += iso.sym_dims[i] * iso.gl_dims[i];
  }
  report("ranks", ranks_ok, "rank(P_lambda) = d_lambda * m_lambda");
  report("completeness", total == iso.pvm.dim(),
         "sum d_lambda * m_lambda = " + std::to_string(total) + ", k^n = " + std::to_string(iso.pvm.dim()));
  report("width", iso.irreducible_width() <= iso.width_bound(),
         "max m_lambda = " + std::to_string(iso.irreducible_width()) + " <= (n+1)^(k-1) = " +
             std::to_string(iso.width_bound()));

  double worst = 0.0;
  for (std::uint64_t t = 0; t < 10; ++t) {
    worst = std::max(worst, qre::commutes_with_tensor_power(iso, qre::random_state(iso.k, s.seed + t), s.dim_cap));
  }
  report("commutation", worst <= 1e-8, "max ||[P_lambda, sigma^n]|| over 10 random sigma = " + qre::io::format_double(worst));
  return all;
}

int run_projectors_cmd(const CLI::App* cmd, const ProjectorArgs& a, const Shared& s) {
  require(cmd, "--n");
  require(cmd, "--k");
  if (a.n < 1 || a.n > qre::kMaxSymmetricN) throw Usage("--n must be between 1 and " + std::to_string(qre::kMaxSymmetricN));
  if (a.k < 1) throw Usage("--k must be positive");

  const auto iso = qre::isotypic_pvm(a.n, a.k, s.dim_cap);
  if (!a.out.empty()) {
    qre::io::json body;
    if (a.rho.empty()) {
      body = qre::io::pvm_to_json(iso.pvm);
    } else {
      const auto rho = qre::io::parse_state_spec(a.rho, s.seed);
      body = qre::io::pvm_to_json(qre::universal_pvm(iso, rho, s.cluster_tol, s.dim_cap).pvm);
    }
    qre::io::write_atomic(a.out, body.dump() + "\n");
  }
  const std::string csv = summary_csv(iso);
  if (!a.summary.empty()) {
    qre::io::write_atomic(a.summary, csv);
  } else {
    std::fputs(csv.c_str(), stdout);
  }
  if (a.check && !run_checks(iso, s)) return kExitInvariant;
  return 0;
}

// ------------------------------------------------------------------- div

struct DivArgs {
  std::string rho, sigma, povm;
  std::optional<int> n;
  std::string p, q;
  bool bits = false;
};

qre::Povm read_povm(const std::string& path) {
  const auto j = qre::io::read_json_file(path);
  if (!j.is_array()) throw qre::Error(qre::ErrorKind::ParseError, "--povm file must hold a list of matrix objects");
  std::vector<qre::CMatrix> el;
  for (const auto& item : j) el.push_back(qre::io::matrix_from_json(item));
  return qre::Povm::from_elements(std::move(el));
}

int run_div_cmd(const CLI::App* cmd, const DivArgs& a, const Shared& s) {
  const bool classical = cmd->count("--p") || cmd->count("--q");
  const bool quantum = cmd->count("--rho") || cmd->count("--sigma") || !classical;
  const double scale = a.bits ? 1.0 / std::log(2.0) : 1.0;
  qre::io::json out = qre::io::json::object();

  if (classical) {
    require(cmd, "--p");
    require(cmd, "--q");
    const auto p = qre::ClassicalDist::from_probs(qre::io::parse_number_list(a.p));
    const auto q = qre::ClassicalDist::from_probs(qre::io::parse_number_list(a.q));
    out["kl"] = number(qre::kl_divergence(p, q), scale);
  }
  if (quantum) {
    require(cmd, "--rho");
    require(cmd, "--sigma");
    const auto rho = qre::io::parse_state_spec(a.rho, s.seed);
    const auto sigma = qre::io::parse_state_spec(a.sigma, s.seed + 1);
    out["quantum"] = number(qre::quantum_relative_entropy(sigma, rho, s.support_tol), scale);
    if (!a.povm.empty()) out["measured"] = number(qre::measured_divergence(read_povm(a.povm), sigma, rho), scale);
    if (a.n) {
      const int n = *a.n;
      if (n < 1 || n > qre::kMaxSymmetricN) throw Usage("--n must be between 1 and " + std::to_string(qre::kMaxSymmetricN));
      out["n"] = n;
      out["pinched"] = number(qre::pinched_divergence(rho, sigma, n, s.cluster_tol, s.support_tol, s.dim_cap), scale);
      const auto m = qre::universal_pvm(rho, n, s.cluster_tol, s.dim_cap);
      const auto sigma_n = qre::kron_power(sigma.mat(), n, s.dim_cap);
      out["universal"] = number(qre::kl_divergence(qre::measure(m.pvm.elements(), sigma_n), m.rho_distribution()), scale);
    }
  }
  if (a.bits) out["units"] = "bits";
  std::cout << out.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Universal measurements and quantum relative entropy"};
  app.require_subcommand(1);

  Shared shared;

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "compare D_Mn/n with D(sigma||rho) for n = n_min..n_max");
  sweep->add_option("--k", sw.k, "local dimension (checked against --rho)");
  sweep->add_option("--rho", sw.rho, "state spec: diag:p,..  bloch:x,y,z  random:k  or a matrix JSON file");
  sweep->add_option("--sigma", sw.sigma, "state spec for sigma");
  sweep->add_option("--n-min", sw.n_min, "first n");
  sweep->add_option("--n-max", sw.n_max, "last n (default 8 for qubits, 5 for qutrits)");
  sweep->add_option("--out", sw.out, "write records to a .csv or .json file");
  sweep->add_option("--plot-script", sw.plot_script, "write a gnuplot script for the CSV");
  sweep->add_flag("--bits", sw.bits, "show the console table in bits");
  add_shared(sweep, shared);

  ProjectorArgs pj;
  auto* proj = app.add_subcommand("projectors", "isotypic projectors of (C^k)^n");
  proj->add_option("--n", pj.n, "number of tensor factors");
  proj->add_option("--k", pj.k, "local dimension");
  proj->add_option("--out", pj.out, "write labelled projectors as JSON");
  proj->add_option("--summary", pj.summary, "write the lambda, d_lambda, m_lambda, rank table as CSV");
  proj->add_option("--rho", pj.rho, "write the universal PVM for this state instead");
  proj->add_flag("--check", pj.check, "verify the isotypic invariants");
  add_shared(proj, shared);

  DivArgs dv;
  auto* div = app.add_subcommand("div", "print divergences in nats as JSON");
  div->add_option("--rho", dv.rho, "reference state spec");
  div->add_option("--sigma", dv.sigma, "compared state spec");
  div->add_option("--povm", dv.povm, "JSON list of POVM elements for D_M");
  div->add_option("--n", dv.n, "also report the pinched and universal divergences on n copies");
  div->add_option("--p", dv.p, "classical distribution p1,p2,..");
  div->add_option("--q", dv.q, "classical distribution q1,q2,..");
  div->add_flag("--bits", dv.bits, "report in bits");
  add_shared(div, shared);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitInput;
  }

  try {
    if (sweep->parsed()) return run_sweep_cmd(sweep, sw, shared);
    if (proj->parsed()) return run_projectors_cmd(proj, pj, shared);
    return run_div_cmd(div, dv, shared);
  } catch (const Usage& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitInput;
  } catch (const qre::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.kind() == qre::ErrorKind::NotCommuting ? kExitInvariant : kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
}
