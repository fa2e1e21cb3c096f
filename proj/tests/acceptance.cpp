// Acceptance suite: one PASS/FAIL line per criterion. Exit status is 0 only
// when every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "cli.hpp"
#include "fixtures.hpp"
#include "frit/benchlab.hpp"
#include "frit/tuning.hpp"

using namespace frit;
namespace fs = std::filesystem;

namespace {

// ---- pinned tolerances ----
constexpr double kJ0Relative = 0.01;
constexpr double kEx1Max = 0.6;
constexpr double kEx2Min = 10.0;
constexpr double kEx2Max = 60.0;
constexpr double kEx3FoMax = 1.2;
constexpr double kEx3IoMax = 1.5;
constexpr double kPoleMargin = 1e-6;
constexpr double kReconstructionRelative = 1e-6;
constexpr int kReconstructionTriples = 100;
constexpr double kToeplitzTolerance = 1e-10;
constexpr std::size_t kToeplitzMaxN = 50;
constexpr double kMagnitudeDb = 1.0;
constexpr double kPhaseDeg = 2.0;
constexpr int kFrequencyPoints = 200;
const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4, 5};
const std::vector<double> kAlphas{0.2, 0.5, 0.8, 1.3, 1.7};

int failures = 0;

void report(int id, bool pass, const std::string& title, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "PASS" : "FAIL") << " [" << id << "] " << title << ": " << detail << std::endl;
}

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

struct CaseRun {
  BenchmarkCase bench;
  double j0 = 0.0;
  TuningReport best;
  std::vector<TuningReport> runs;
  ValidationReport validation;
  double seconds = 0.0;
};

CaseRun tune_case(const std::string& name) {
  CaseRun run{builtin_case(name)};
  const BenchmarkCase& c = run.bench;
  PsoConfig pso;
  pso.workers = std::max(1u, std::thread::hardware_concurrency());
  const TuningProblem problem{collect_data(c), c.discrete_reference_model(), c.controller, c.bounds, c.theta0, pso};
  const auto start = std::chrono::steady_clock::now();
  run.best = tune_best_of(problem, kSeeds, &run.runs);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  run.j0 = run.best.j0;
  run.validation = validate(c, run.best.theta_star);
  std::cerr << "  tuned " << name << " over " << kSeeds.size() << " seeds in " << fmt(run.seconds, 3) << " s\n";
  return run;
}

void criterion_1() {
  std::ostringstream d;
  bool pass = true;
  for (const char* name : {"example1", "example2", "example3_io", "example3_fo"}) {
    const BenchmarkCase c = builtin_case(name);
    const LossFunction loss(collect_data(c), c.discrete_reference_model(), c.controller);
    const double j0 = loss(c.theta0).j;
    const double rel = std::abs(j0 - c.published.j0) / c.published.j0;
    pass = pass && rel <= kJ0Relative;
    d << name << " " << fmt(j0, 8) << " vs " << fmt(c.published.j0, 8) << " (" << fmt(100 * rel, 2) << "%); ";
  }
  report(1, pass, "J(theta0) within 1% of published", d.str());
}

void criterion_2(const std::map<std::string, CaseRun>& runs) {
  struct Limit {
    const char* name;
    double lo, hi;
  };
  const Limit limits[] = {{"example1", 0.0, kEx1Max},
                          {"example2", kEx2Min, kEx2Max},
                          {"example3_fo", 0.0, kEx3FoMax},
                          {"example3_io", 0.0, kEx3IoMax}};
  std::ostringstream d;
  bool pass = true;
  for (const Limit& l : limits) {
    const CaseRun& r = runs.at(l.name);
    const double j = r.best.j_star;
    const bool ok = j >= l.lo && j <= l.hi;
    pass = pass && ok;
    d << l.name << " " << fmt(j) << " in [" << fmt(l.lo) << ", " << fmt(l.hi) << "] (published "
      << fmt(r.bench.published.j_star) << ", seed " << r.best.seed << "); ";
  }
  report(2, pass, "best-of-5 J(theta*) within thresholds", d.str());
}

void criterion_3(const std::map<std::string, CaseRun>& runs) {
  const double fo = runs.at("example3_fo").best.j_star;
  const double io = runs.at("example3_io").best.j_star;
  report(3, fo < io, "example 3 FOPID beats IOPID", "J_FO " + fmt(fo) + " vs J_IO " + fmt(io));
}

void criterion_4(const std::map<std::string, CaseRun>& runs) {
  std::ostringstream d;
  bool pass = true;
  for (const auto& [name, r] : runs) {
    const double m = r.validation.max_pole_magnitude;
    const bool ok = m < 1.0 - kPoleMargin;
    pass = pass && ok;
    d << name << " max|p| " << (m < 1.0 && m > 0.999 ? "1-" + fmt(1.0 - m, 3) : fmt(m, 8)) << (ok ? "" : " (!)")
      << "; ";
  }
  report(4, pass, "tuned closed loops have all poles inside 1 - 1e-6", d.str());
}

void criterion_5() {
  const auto trials = fixture::reconstruction_trials(2024, kReconstructionTriples, 20 * kReconstructionTriples);
  int evaluated = 0;
  double worst = 0.0;
  for (const auto& t : trials) {
    if (!t.evaluated) continue;
    ++evaluated;
    worst = std::max(worst, t.relative_error);
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  double toeplitz_worst = 0.0;
  for (std::size_t n = 1; n <= kToeplitzMaxN; ++n) {
    std::vector<double> column(n), rhs(n);
    for (double& v : column) v = val(rng);
    column[0] = 1.5 + std::abs(column[0]);
    for (double& v : rhs) v = val(rng);
    const auto dense = oracle::dense_lower_solve(column, rhs);
    toeplitz_worst = std::max(toeplitz_worst, oracle::max_abs_diff(lower_toeplitz_solve(column, rhs), dense) /
                                                  (1.0 + oracle::inf_norm(dense)));
  }
  const bool pass = evaluated == kReconstructionTriples && worst <= kReconstructionRelative &&
                    toeplitz_worst <= kToeplitzTolerance;
  report(5, pass, "data-only reconstruction equals simulation",
         std::to_string(evaluated) + " triples, worst relative gap " + fmt(worst, 3) + " (<= 1e-6); " +
             std::to_string(trials.size() - evaluated) + " penalized draws skipped; Toeplitz vs dense worst " +
             fmt(toeplitz_worst, 3) + " (<= 1e-10, N <= 50)");
}

void criterion_6(const std::map<std::string, CaseRun>& runs) {
  std::ostringstream d;
  std::size_t violations = 0, induced = 0, evaluations = 0;
  for (const auto& [name, r] : runs) {
    std::size_t v = 0, iv = 0, n = 0;
    double worst = 0.0;
    for (const TuningReport& t : r.runs) {
      v += t.bound_violations;
      iv += t.induced_bound_violations;
      n += t.nonpenalized_evaluations;
      worst = std::max(worst, t.worst_bound_ratio);
    }
    violations += v;
    induced += iv;
    evaluations += n;
    d << name << " " << v << "/" << n << " (worst ratio " << fmt(worst, 4) << "); ";
  }
  d << "induced-norm variant: " << induced << " violations";
  report(6, violations == 0, "stability bound holds on every evaluation (" + std::to_string(evaluations) + ")",
         d.str());
}

void criterion_7(const std::map<std::string, CaseRun>& runs) {
  const OustaloupConfig cfg{5, 1e-6, 1e3};
  const double lo = 10.0 * cfg.w_b, hi = cfg.w_h / 10.0;
  std::ostringstream d;
  bool pass = true;
  for (double alpha : kAlphas) {
    const ContinuousTf g = oustaloup(alpha, cfg);
    double mag = 0.0, phase = 0.0;
    for (int i = 0; i < kFrequencyPoints; ++i) {
      const double w = lo * std::pow(hi / lo, i / double(kFrequencyPoints - 1));
      const std::complex<double> ratio = g.frequency_response(w) / std::pow(std::complex<double>(0.0, w), alpha);
      mag = std::max(mag, std::abs(20.0 * std::log10(std::abs(ratio))));
      phase = std::max(phase, std::abs(std::arg(ratio)) * 180.0 / std::numbers::pi);
    }
    pass = pass && mag <= kMagnitudeDb && phase <= kPhaseDeg;
    d << "a=" << alpha << " " << fmt(mag, 3) << " dB/" << fmt(phase, 3) << " deg; ";
  }
  // the figure-level ordering claim: FO tracks at least as well as IO
  const double te_fo = runs.at("example3_fo").validation.tracking_error_l1;
  const double te_io = runs.at("example3_io").validation.tracking_error_l1;
  pass = pass && te_fo <= te_io;
  d << "tracking l1 FO " << fmt(te_fo) << " <= IO " << fmt(te_io);
  report(7, pass, "Oustaloup within 1 dB / 2 deg on [1e-5, 1e2]", d.str());
}

void criterion_8() {
  const fs::path root = fs::temp_directory_path() / ("frit_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::ostringstream sink;
  std::string first, second;
  bool ran = true;
  for (const char* tag : {"a", "b"}) {
    const int code = frit_cli::run({"reproduce", "example3_io", "--seeds", "1..5", "--out-dir", (root / tag).string()},
                                   sink, sink);
    ran = ran && code == 0;
  }
  auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
  };
  first = slurp(root / "a" / "example3_io" / "summary.json");
  second = slurp(root / "b" / "example3_io" / "summary.json");
  fs::remove_all(root);
  const bool pass = ran && !first.empty() && first == second;
  report(8, pass, "repeated reproduce is byte-identical",
         "example3_io seeds 1..5, summary.json " + std::to_string(first.size()) + " bytes, " +
             (first == second ? "identical" : "different"));
}

}  // namespace

int main() {
  std::cout.setf(std::ios::unitbuf);
  std::cerr << "acceptance: tuning all examples with seeds 1..5\n";
  std::map<std::string, CaseRun> runs;
  for (const std::string& name : builtin_case_names()) runs.emplace(name, tune_case(name));

  criterion_1();
  criterion_2(runs);
  criterion_3(runs);
  criterion_4(runs);
  criterion_5();
  criterion_6(runs);
  criterion_7(runs);
  criterion_8();
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " of 8 criteria FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
