#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hinf/error.hpp"
#include "hinf/manifest.hpp"
#include "hinf/norm.hpp"
#include "hinf/parallel.hpp"
#include "hinf/random_system.hpp"
#include "hinf/transfer.hpp"

namespace hinf::cli {

namespace {

using nlohmann::json;
constexpr int kSchemaVersion = 1;

/// Exit status for library errors: malformed input is 2, numerics are 3.
int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::EmptySystem:
    case ErrorCode::InvalidArgument:
      return 2;
    default:
      return 3;
  }
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string variant = "hybrid-newton-interp";
  int phi = 1;
  double band_tol = kDefaultBandTol;
  double opt_tol = 1e-14;
  double level_bump = 1e-12;
  double ctrb_tol = kDefaultCtrbTol;
  std::string seeds_file;
  int threads = 1;
  std::string output;
  int max_iters = 50;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_variant) {
  if (with_variant) {
    cmd->add_option("--variant", f.variant,
                    "bbbs | cubic | hybrid-newton-interp | hybrid-newton-mp | "
                    "hybrid-secant-interp | hybrid-secant-mp | local-only");
  }
  cmd->add_option("--phi", f.phi, "intervals or seeds optimized per round");
  cmd->add_option("--band-tol", f.band_tol, "boundary band for pencil eigenvalues");
  cmd->add_option("--tol-band", f.band_tol, "alias of --band-tol");
  cmd->add_option("--opt-tol", f.opt_tol, "stationarity tolerance of the 1-D optimizer");
  cmd->add_option("--level-bump", f.level_bump, "relative inflation of the verification level");
  cmd->add_option("--ctrb-tol", f.ctrb_tol, "controllability/observability tolerance");
  cmd->add_option("--seeds", f.seeds_file, "file with one starting frequency per line");
  cmd->add_option("--threads", f.threads, "worker threads for independent evaluations");
  cmd->add_option("--output", f.output, "write the result here instead of stdout");
  cmd->add_option("--max-iters", f.max_iters, "outer iteration cap");
}

std::vector<Frequency> read_seed_file(const std::string& path, Domain domain) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open seeds file");
  std::vector<Frequency> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;
    if (tok == "inf" || tok == "Inf" || tok == "infinity") {
      out.push_back(Frequency::infinity());
      continue;
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
      out.push_back(Frequency::make(domain, v));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ParseError,
                  path + ":" + std::to_string(lineno) + ": not a frequency: " + tok);
    }
  }
  return out;
}

AlgoConfig make_config(const CommonFlags& f, Domain domain) {
  AlgoConfig cfg;
  const auto v = parse_variant(f.variant);
  if (!v) throw UsageError("unknown variant '" + f.variant + "'");
  cfg.variant = *v;
  if (f.phi < 1) throw UsageError("--phi must be at least 1");
  if (f.threads < 1) throw UsageError("--threads must be at least 1");
  if (!(f.band_tol >= 0.0) || !(f.opt_tol > 0.0) || !(f.level_bump >= 0.0) ||
      !(f.ctrb_tol >= 0.0) || f.max_iters < 1) {
    throw UsageError("tolerances must be nonnegative (opt-tol positive) and max-iters >= 1");
  }
  cfg.phi = f.phi;
  cfg.band_tol = f.band_tol;
  cfg.optimizer.opt_tol = f.opt_tol;
  cfg.level_bump = f.level_bump;
  cfg.tol_ctrb = f.ctrb_tol;
  cfg.threads = f.threads;
  cfg.max_outer_iters = f.max_iters;
  if (!f.seeds_file.empty()) cfg.seeds = read_seed_file(f.seeds_file, domain);
  return cfg;
}

json to_json(const NormResult& r, const std::string& name) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = name;
  j["variant"] = std::string(to_string(r.variant));
  j["gamma"] = r.gamma;
  j["at_infinity"] = r.frequency.at_infinity();
  if (r.frequency.at_infinity()) {
    j["frequency"] = nullptr;
  } else {
    j["frequency"] = r.frequency.value();
  }
  j["certified_global"] = r.certified_global;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["pencil_eig_count"] = r.pencil_eig_count;
  j["gain_eval_count"] = r.gain_eval_count;
  json hist = json::array();
  for (const auto& h : r.history) hist.push_back({{"iteration", h.iteration}, {"gamma", h.gamma}});
  j["history"] = hist;
  j["warnings"] = r.warnings;
  return j;
}

/// Writes to --output when given, else to out.
void emit(const std::string& path, std::ostream& out, const std::string& text) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::ParseError, path + ": cannot open for writing");
  f << text;
}

int cmd_norm(const std::string& manifest, const CommonFlags& flags, bool approx,
             int spectrum_seeds, std::ostream& out) {
  const SystemManifest m = read_manifest(manifest);
  const StateSpaceSystem sys = load_system(m);
  AlgoConfig cfg = make_config(flags, sys.domain());
  cfg.spectrum_seed_count = spectrum_seeds;
  const NormResult r = approx ? hinf_approx_local(sys, cfg) : hinf_norm(sys, cfg);
  emit(flags.output, out, to_json(r, m.name).dump(2) + "\n");
  return 0;
}

/// "3", "-2.5", "pi", "2pi", "-pi/2", "1.5pi".
double parse_range_value(const std::string& tok) {
  static const std::regex form(R"(^\s*([+-]?)(\d+\.?\d*(?:[eE][+-]?\d+)?)?(pi)?(?:/(\d+\.?\d*))?\s*$)");
  std::smatch mt;
  if (!std::regex_match(tok, mt, form) || (!mt[2].matched && !mt[3].matched)) {
    throw UsageError("malformed range value '" + tok + "'");
  }
  double v = mt[2].matched ? std::stod(mt[2]) : 1.0;
  if (mt[3].matched) v *= kPi;
  if (mt[4].matched) {
    const double den = std::stod(mt[4]);
    if (den == 0.0) throw UsageError("division by zero in range value '" + tok + "'");
    v /= den;
  }
  return mt[1] == "-" ? -v : v;
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto sep = text.find_first_of(",:");
  if (sep == std::string::npos) throw UsageError("range must look like lo,hi");
  const double lo = parse_range_value(text.substr(0, sep));
  const double hi = parse_range_value(text.substr(sep + 1));
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw UsageError("range needs finite lo < hi");
  }
  return {lo, hi};
}

int cmd_gain_curve(const std::string& manifest, const std::string& range, int samples,
                   const std::string& output, std::ostream& out) {
  const auto [lo, hi] = parse_range(range);
  if (samples < 2) throw UsageError("--samples must be at least 2");
  const StateSpaceSystem sys = load_system(manifest);

  // A full discrete period is sampled half-open so theta = 2*pi does not
  // repeat theta = 0.
  const bool full_period =
      sys.domain() == Domain::Discrete && std::abs((hi - lo) - kTwoPi) <= 1e-12 * kTwoPi;
  const double step = full_period ? (hi - lo) / samples : (hi - lo) / (samples - 1);

  std::ostringstream csv;
  csv << std::setprecision(17) << "frequency,gain\n";
  for (int k = 0; k < samples; ++k) {
    const double w = (!full_period && k == samples - 1) ? hi : lo + k * step;
    csv << w << ',';
    try {
      csv << gain_at(sys, w);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularShift) throw;
    }
    csv << '\n';
  }
  emit(output, out, csv.str());
  return 0;
}

struct BenchProblem {
  std::string name;
  std::function<StateSpaceSystem()> load;
};

std::string csv_escape(std::string s) {
  for (auto& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
  }
  return s;
}

int cmd_bench(const std::vector<std::string>& manifests, const std::string& random,
              const std::string& variants_text, const CommonFlags& flags, std::ostream& out) {
  std::vector<Variant> variants;
  {
    std::string list = variants_text;
    std::replace(list.begin(), list.end(), ',', ' ');
    std::istringstream ss(list);
    std::string tok;
    while (ss >> tok) {
      if (tok == "all") {
        variants.insert(variants.end(), kExactVariants.begin(), kExactVariants.end());
        continue;
      }
      const auto v = parse_variant(tok);
      if (!v) throw UsageError("unknown variant '" + tok + "'");
      variants.push_back(*v);
    }
  }
  if (variants.empty()) throw UsageError("empty variants list");

  std::vector<BenchProblem> problems;
  for (const auto& m : manifests) {
    const SystemManifest man = read_manifest(m);
    problems.push_back({man.name, [man] { return load_system(man); }});
  }
  if (!random.empty()) {
    const RandomSpec spec = parse_random_spec(random);
    for (int i = 0; i < spec.count; ++i) {
      problems.push_back(
          {"random-" + std::to_string(i), [spec, i] { return random_stable_system(spec, i); }});
    }
  }
  if (problems.empty()) throw UsageError("bench needs manifests or --random");

  CommonFlags per_run = flags;
  per_run.threads = 1;
  std::vector<std::string> rows(problems.size() * variants.size());
  parallel_for(problems.size(), flags.threads, [&](std::size_t pi) {
    std::optional<StateSpaceSystem> sys;
    std::string load_error;
    try {
      sys = problems[pi].load();
    } catch (const std::exception& e) {
      load_error = e.what();
    }
    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
      std::ostringstream row;
      row << std::setprecision(17) << csv_escape(problems[pi].name) << ','
          << to_string(variants[vi]) << ',';
      if (!sys) {
        row << ",,,,,,,," << csv_escape(load_error);
      } else {
        try {
          CommonFlags run = per_run;
          run.variant = std::string(to_string(variants[vi]));
          AlgoConfig cfg = make_config(run, sys->domain());
          const auto t0 = std::chrono::steady_clock::now();
          const NormResult r = hinf_norm(*sys, cfg);
          const double secs =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          row << r.gamma << ',';
          if (!r.frequency.at_infinity()) row << r.frequency.value();
          row << ',' << (r.frequency.at_infinity() ? 1 : 0) << ','
              << (r.certified_global ? 1 : 0) << ',' << r.pencil_eig_count << ','
              << r.gain_eval_count << ',' << r.iterations << ',' << secs << ',';
        } catch (const std::exception& e) {
          row << ",,,,,,,," << csv_escape(e.what());
        }
      }
      rows[pi * variants.size() + vi] = row.str();
    }
  });

  std::ostringstream csv;
  csv << "problem,variant,gamma,frequency,at_infinity,certified_global,pencil_eig_count,"
         "gain_eval_count,iterations,wall_time_seconds,error\n";
  for (const auto& r : rows) csv << r << '\n';
  emit(flags.output, out, csv.str());
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"H-infinity norm of descriptor LTI systems", "hinfnorm"};
  app.require_subcommand(1);

  CommonFlags norm_flags;
  std::string norm_manifest;
  auto* norm = app.add_subcommand("norm", "exact norm by a level-set variant");
  norm->add_option("manifest", norm_manifest, "system manifest (JSON)")->required();
  add_common(norm, norm_flags, true);

  CommonFlags approx_flags;
  std::string approx_manifest;
  int spectrum_seeds = 20;
  auto* approx = app.add_subcommand("approx", "local optimization from seeds (no certificate)");
  approx->add_option("manifest", approx_manifest, "system manifest (JSON)")->required();
  add_common(approx, approx_flags, false);
  approx->add_option("--spectrum-seeds", spectrum_seeds,
                     "spectrum-derived seeds (0 uses only --seeds)");

  CommonFlags bench_flags;
  std::vector<std::string> bench_manifests;
  std::string bench_random;
  std::string bench_variants = "all";
  auto* bench = app.add_subcommand("bench", "CSV of counters per (problem, variant)");
  bench->add_option("manifests", bench_manifests, "system manifests");
  bench->add_option("--random", bench_random,
                    "random suite, e.g. 5x(n=20,m=4,p=4,seed=1,domain=continuous)");
  bench->add_option("--variants", bench_variants, "comma separated variants or 'all'");
  add_common(bench, bench_flags, false);

  std::string curve_manifest;
  std::string curve_range;
  int curve_samples = 0;
  std::string curve_output;
  auto* curve = app.add_subcommand("gain-curve", "sample the gain on a frequency range");
  curve->add_option("manifest", curve_manifest, "system manifest (JSON)")->required();
  curve->add_option("--range", curve_range, "lo,hi (accepts pi multiples, e.g. 0,2pi)")
      ->required();
  curve->add_option("--samples", curve_samples, "number of samples (>= 2)")->required();
  curve->add_option("--output", curve_output, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (norm->parsed()) return cmd_norm(norm_manifest, norm_flags, false, 20, out);
    if (approx->parsed()) {
      if (spectrum_seeds < 0) throw UsageError("--spectrum-seeds must be nonnegative");
      return cmd_norm(approx_manifest, approx_flags, true, spectrum_seeds, out);
    }
    if (bench->parsed()) {
      return cmd_bench(bench_manifests, bench_random, bench_variants, bench_flags, out);
    }
    if (curve->parsed()) {
      return cmd_gain_curve(curve_manifest, curve_range, curve_samples, curve_output, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    err << "error: ParseError: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

}  // namespace hinf::cli
