#include "frit/frit.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "frit/benchlab.hpp"
#include "frit/error.hpp"
#include "frit/tuning.hpp"

using namespace frit;

struct frit_tf {
  AnyTf tf;
  std::vector<double> num;
  std::vector<double> den;

  explicit frit_tf(AnyTf g) : tf(std::move(g)) {
    std::visit(
        [this](const auto& h) {
          num.assign(h.num().coeffs().begin(), h.num().coeffs().end());
          den.assign(h.den().coeffs().begin(), h.den().coeffs().end());
        },
        tf);
  }
  bool discrete() const { return std::holds_alternative<DiscreteTf>(tf); }
  const DiscreteTf& dtf() const { return std::get<DiscreteTf>(tf); }
};

struct frit_record {
  ExperimentRecord record;
};

struct frit_tuning {
  TuningReport best;
  std::vector<TuningReport> runs;
  std::vector<double> trace;
};

struct frit_validation {
  ValidationReport report;
};

struct frit_case {
  BenchmarkCase bench;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> reference;
};

namespace {

thread_local std::string last_error;

frit_status fail(frit_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
frit_status guarded(F&& body) {
  try {
    body();
    return FRIT_OK;
  } catch (const Error& e) {
    return fail(static_cast<frit_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(FRIT_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FRIT_E_INTERNAL, e.what());
  } catch (...) {
    return fail(FRIT_E_INTERNAL, "unknown failure");
  }
}

#define FRIT_REQUIRE(cond, what) \
  if (!(cond)) return fail(FRIT_E_INVALID_ARGUMENT, what)

std::vector<double> copy(const double* p, std::size_t n) { return p ? std::vector<double>(p, p + n) : std::vector<double>(); }

ControllerTemplate to_template(const frit_controller_spec& s) {
  ControllerTemplate t;
  if (s.kind != FRIT_FOPID && s.kind != FRIT_IOPID) throw Error(ErrorCode::kInvalidArgument, "unknown controller kind");
  t.kind = s.kind == FRIT_FOPID ? ControllerKind::kFopid : ControllerKind::kIopid;
  t.oustaloup = {s.oustaloup_order, s.w_b, s.w_h};
  t.sample_time = s.sample_time;
  if (t.kind == ControllerKind::kFopid) t.oustaloup.validate();
  return t;
}

frit_controller_spec from_template(const ControllerTemplate& t) {
  return {t.kind == ControllerKind::kFopid ? FRIT_FOPID : FRIT_IOPID, t.oustaloup.order, t.oustaloup.w_b,
          t.oustaloup.w_h, t.sample_time};
}

const DiscreteTf& require_discrete(const frit_tf* g, const char* role) {
  if (!g->discrete()) throw Error(ErrorCode::kInvalidArgument, std::string(role) + " must be discrete");
  return g->dtf();
}

frit_loss to_c(const LossBreakdown& b) {
  return {b.j, b.epsilon_l1, b.t_l1, b.penalized ? 1 : 0, static_cast<frit_penalty_reason>(b.penalty_reason)};
}

frit_bound to_c(const StabilityBoundReport& b, bool valid) {
  return {valid ? 1 : 0,     b.gamma_r0,      b.bound, b.t_l1, b.satisfied ? 1 : 0, b.inverse_l1,
          b.induced_bound, b.induced_satisfied ? 1 : 0};
}

frit_tuning_stats stats_of(const TuningReport& r) {
  return {r.seed,
          r.optim.trace.empty() ? 0 : r.optim.trace.size() - 1,
          r.optim.evaluations,
          r.nonpenalized_evaluations,
          r.penalized_evaluations,
          r.bound_violations,
          r.induced_bound_violations,
          r.worst_bound_ratio};
}

template <typename T>
const double* view(const std::vector<T>& v, std::size_t* n) {
  if (n) *n = v.size();
  return v.data();
}

}  // namespace

extern "C" {

const char* frit_last_error(void) { return last_error.c_str(); }

const char* frit_status_string(frit_status status) {
  switch (status) {
    case FRIT_OK:
      return "ok";
    case FRIT_E_BUFFER_TOO_SMALL:
      return "buffer too small";
    case FRIT_E_INTERNAL:
      return "internal error";
    default:
      if (status >= FRIT_E_INVALID_ARGUMENT && status <= FRIT_E_IO)
        return to_string(static_cast<ErrorCode>(static_cast<int>(status)));
      return "unknown status";
  }
}

frit_status frit_tf_continuous(const double* num, size_t num_len, const double* den, size_t den_len,
                               double dead_time, frit_tf** out) {
  FRIT_REQUIRE(out && num && den && num_len && den_len, "null or empty argument");
  return guarded([&] {
    *out = new frit_tf(ContinuousTf(Polynomial(copy(num, num_len)), Polynomial(copy(den, den_len)), dead_time));
  });
}

frit_status frit_tf_discrete(const double* num, size_t num_len, const double* den, size_t den_len,
                             double sample_time, size_t delay, frit_tf** out) {
  FRIT_REQUIRE(out && num && den && num_len && den_len, "null or empty argument");
  return guarded([&] {
    *out = new frit_tf(DiscreteTf(Polynomial(copy(num, num_len)), Polynomial(copy(den, den_len)), sample_time,
                                  static_cast<int>(delay)));
  });
}

frit_status frit_tf_tustin(const frit_tf* continuous, double sample_time, frit_tf** out) {
  FRIT_REQUIRE(continuous && out, "null argument");
  FRIT_REQUIRE(!continuous->discrete(), "model is already discrete");
  return guarded([&] { *out = new frit_tf(tustin(std::get<ContinuousTf>(continuous->tf), sample_time)); });
}

void frit_tf_free(frit_tf* tf) { delete tf; }

int frit_tf_is_discrete(const frit_tf* tf) { return tf && tf->discrete() ? 1 : 0; }

double frit_tf_sample_time(const frit_tf* tf) { return tf && tf->discrete() ? tf->dtf().sample_time() : 0.0; }

double frit_tf_delay(const frit_tf* tf) {
  if (!tf) return 0.0;
  if (tf->discrete()) return tf->dtf().delay_samples();
  return std::get<ContinuousTf>(tf->tf).dead_time();
}

const double* frit_tf_num(const frit_tf* tf, size_t* len) { return view(tf->num, len); }
const double* frit_tf_den(const frit_tf* tf, size_t* len) { return view(tf->den, len); }

frit_status frit_tf_poles(const frit_tf* tf, double* re, double* im, size_t capacity, size_t* count) {
  FRIT_REQUIRE(tf && count, "null argument");
  std::vector<std::complex<double>> p;
  const frit_status s = guarded([&] { p = poles(require_discrete(tf, "model")); });
  if (s != FRIT_OK) return s;
  *count = p.size();
  if (!re || !im) return FRIT_OK;
  if (capacity < p.size()) return fail(FRIT_E_BUFFER_TOO_SMALL, "pole buffer too small");
  for (std::size_t i = 0; i < p.size(); ++i) {
    re[i] = p[i].real();
    im[i] = p[i].imag();
  }
  return FRIT_OK;
}

frit_status frit_tf_simulate(const frit_tf* tf, const double* u, size_t n, double* y) {
  FRIT_REQUIRE(tf && (n == 0 || (u && y)), "null argument");
  return guarded([&] {
    const DiscreteTf& g = require_discrete(tf, "model");
    const Signal out = simulate(g, Signal(copy(u, n), g.sample_time()));
    std::copy(out.samples().begin(), out.samples().end(), y);
  });
}

void frit_controller_spec_default(frit_controller_spec* spec, frit_controller_kind kind, double sample_time) {
  if (!spec) return;
  ControllerTemplate t;
  t.kind = kind == FRIT_IOPID ? ControllerKind::kIopid : ControllerKind::kFopid;
  t.sample_time = sample_time;
  *spec = from_template(t);
}

size_t frit_controller_dimension(frit_controller_kind kind) { return kind == FRIT_IOPID ? 3 : 5; }

frit_status frit_controller_realize(const frit_controller_spec* spec, const double* theta, size_t n,
                                    frit_tf** out) {
  FRIT_REQUIRE(spec && theta && out, "null argument");
  return guarded([&] { *out = new frit_tf(realize_controller({theta, n}, to_template(*spec))); });
}

frit_status frit_record_create(const double* r0, size_t r0_len, const double* u0, size_t u0_len, const double* y0,
                               size_t y0_len, double sample_time, frit_record** out) {
  FRIT_REQUIRE(out && r0 && u0 && y0, "null argument");
  return guarded([&] {
    *out = new frit_record{ExperimentRecord(Signal(copy(r0, r0_len), sample_time),
                                            Signal(copy(u0, u0_len), sample_time),
                                            Signal(copy(y0, y0_len), sample_time))};
  });
}

void frit_record_free(frit_record* record) { delete record; }
size_t frit_record_size(const frit_record* record) { return record ? record->record.size() : 0; }
double frit_record_sample_time(const frit_record* record) { return record ? record->record.sample_time() : 0.0; }

const double* frit_record_signal(const frit_record* record, frit_signal_id which) {
  if (!record) return nullptr;
  switch (which) {
    case FRIT_SIGNAL_R0:
      return record->record.r0().samples().data();
    case FRIT_SIGNAL_U0:
      return record->record.u0().samples().data();
    case FRIT_SIGNAL_Y0:
      return record->record.y0().samples().data();
  }
  return nullptr;
}

const char* frit_penalty_reason_string(frit_penalty_reason reason) {
  return to_string(static_cast<PenaltyReason>(reason));
}

frit_status frit_evaluate_loss(const frit_record* data, const frit_tf* reference_model,
                               const frit_controller_spec* spec, const double* theta, size_t n, frit_loss* loss,
                               frit_bound* bound) {
  FRIT_REQUIRE(data && reference_model && spec && theta && loss, "null argument");
  return guarded([&] {
    const LossFunction f(data->record, require_discrete(reference_model, "reference model"), to_template(*spec));
    const LossFunction::Evaluation e = f.evaluate({theta, n});
    *loss = to_c(e.breakdown);
    if (bound) *bound = e.breakdown.penalized ? to_c(StabilityBoundReport{}, false) : to_c(f.bound_report(e), true);
  });
}

void frit_pso_config_default(frit_pso_config* cfg) {
  if (!cfg) return;
  const PsoConfig d;
  *cfg = {d.swarm_size,       d.max_iterations, d.inertia_min, d.inertia_max, d.cognitive_coeff,
          d.social_coeff,     d.stall_iterations, d.tolerance, d.workers};
}

frit_status frit_tune(const frit_record* data, const frit_tf* reference_model, const frit_controller_spec* spec,
                      const double* theta0, const double* lower, const double* upper, size_t n,
                      const frit_pso_config* cfg, const uint64_t* seeds, size_t seed_count, frit_tuning** out) {
  FRIT_REQUIRE(data && reference_model && spec && theta0 && lower && upper && cfg && seeds && out, "null argument");
  FRIT_REQUIRE(seed_count > 0, "at least one seed is required");
  return guarded([&] {
    PsoConfig pso;
    pso.swarm_size = cfg->swarm_size;
    pso.max_iterations = cfg->max_iterations;
    pso.inertia_min = cfg->inertia_min;
    pso.inertia_max = cfg->inertia_max;
    pso.cognitive_coeff = cfg->cognitive_coeff;
    pso.social_coeff = cfg->social_coeff;
    pso.stall_iterations = cfg->stall_iterations;
    pso.tolerance = cfg->tolerance;
    pso.workers = cfg->workers;
    const TuningProblem problem{data->record,
                                require_discrete(reference_model, "reference model"),
                                to_template(*spec),
                                Bounds{copy(lower, n), copy(upper, n)},
                                copy(theta0, n),
                                pso};
    auto result = std::make_unique<frit_tuning>();
    result->best = tune_best_of(problem, std::span<const std::uint64_t>(seeds, seed_count), &result->runs);
    for (const TracePoint& p : result->best.optim.trace) result->trace.push_back(p.best_value);
    *out = result.release();
  });
}

void frit_tuning_free(frit_tuning* tuning) { delete tuning; }

const double* frit_tuning_theta_star(const frit_tuning* tuning, size_t* n) { return view(tuning->best.theta_star, n); }
double frit_tuning_j0(const frit_tuning* tuning) { return tuning->best.j0; }
double frit_tuning_j_star(const frit_tuning* tuning) { return tuning->best.j_star; }

void frit_tuning_loss(const frit_tuning* tuning, frit_loss* loss) {
  if (tuning && loss) *loss = to_c(tuning->best.breakdown_star);
}

void frit_tuning_bound(const frit_tuning* tuning, frit_bound* bound) {
  if (tuning && bound) *bound = to_c(tuning->best.bound_star, !tuning->best.breakdown_star.penalized);
}

const double* frit_tuning_trace(const frit_tuning* tuning, size_t* len) { return view(tuning->trace, len); }

void frit_tuning_stats_get(const frit_tuning* tuning, frit_tuning_stats* stats) {
  if (tuning && stats) *stats = stats_of(tuning->best);
}

size_t frit_tuning_run_count(const frit_tuning* tuning) { return tuning ? tuning->runs.size() : 0; }

frit_status frit_tuning_run(const frit_tuning* tuning, size_t index, frit_tuning_stats* stats, double* j_star) {
  FRIT_REQUIRE(tuning, "null argument");
  if (index >= tuning->runs.size()) return fail(FRIT_E_INVALID_ARGUMENT, "run index out of range");
  if (stats) *stats = stats_of(tuning->runs[index]);
  if (j_star) *j_star = tuning->runs[index].j_star;
  return FRIT_OK;
}

frit_status frit_validate(const frit_tf* plant, const frit_tf* reference_model, const frit_controller_spec* spec,
                          const double* theta, size_t n, const double* r, size_t r_len, frit_validation** out) {
  FRIT_REQUIRE(plant && reference_model && spec && theta && r && out, "null argument");
  return guarded([&] {
    const ControllerTemplate t = to_template(*spec);
    auto discretize = [&](const frit_tf* g) {
      return g->discrete() ? g->dtf() : tustin(std::get<ContinuousTf>(g->tf), t.sample_time);
    };
    const DiscreteTf p = discretize(plant);
    const DiscreteTf md = discretize(reference_model);
    if (!same_sample_time(p.sample_time(), t.sample_time) || !same_sample_time(md.sample_time(), t.sample_time))
      throw Error(ErrorCode::kSampleTimeMismatch, "plant, reference model and controller sample times differ");
    *out = new frit_validation{validate(p, md, t, {theta, n}, Signal(copy(r, r_len), t.sample_time))};
  });
}

void frit_validation_free(frit_validation* validation) { delete validation; }

void frit_validation_summary_get(const frit_validation* validation, frit_validation_summary* summary) {
  if (!validation || !summary) return;
  const ValidationReport& v = validation->report;
  *summary = {v.stable ? 1 : 0,    v.max_pole_magnitude,        v.tracking_error_l1, v.max_abs_input,
              v.input_l1,          v.closed_loop_poles.size(), v.r.size()};
}

const double* frit_validation_trace(const frit_validation* validation, frit_trace_id which) {
  if (!validation) return nullptr;
  const ValidationReport& v = validation->report;
  switch (which) {
    case FRIT_TRACE_R:
      return v.r.data();
    case FRIT_TRACE_Y_MODEL:
      return v.y_model.data();
    case FRIT_TRACE_Y_CLOSED_LOOP:
      return v.y_closed_loop.data();
    case FRIT_TRACE_U:
      return v.u.data();
  }
  return nullptr;
}

void frit_validation_poles(const frit_validation* validation, double* re, double* im) {
  if (!validation || !re || !im) return;
  const auto& p = validation->report.closed_loop_poles;
  for (std::size_t i = 0; i < p.size(); ++i) {
    re[i] = p[i].real();
    im[i] = p[i].imag();
  }
}

frit_status frit_compare(const frit_validation* fo, double j_fo, const frit_validation* io, double j_io,
                         frit_comparison* out) {
  FRIT_REQUIRE(fo && io && out, "null argument");
  return guarded([&] {
    const ControllerComparison c = compare_fo_io(fo->report, j_fo, io->report, j_io);
    *out = {c.j_fo,
            c.j_io,
            c.tracking_error_l1_fo,
            c.tracking_error_l1_io,
            c.max_abs_input_fo,
            c.max_abs_input_io,
            c.input_l1_fo,
            c.input_l1_io,
            c.fo_lower_loss ? 1 : 0,
            c.fo_lower_tracking_error ? 1 : 0,
            c.fo_lower_peak_input ? 1 : 0};
  });
}

size_t frit_case_count(void) { return builtin_case_names().size(); }

const char* frit_case_name_at(size_t index) {
  const auto& names = builtin_case_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

frit_status frit_case_open(const char* name, frit_case** out) {
  FRIT_REQUIRE(name && out, "null argument");
  return guarded([&] {
    BenchmarkCase bench = builtin_case(name);
    std::vector<double> lower = bench.bounds.lower;
    std::vector<double> upper = bench.bounds.upper;
    const Signal r = bench.reference_signal();
    std::vector<double> reference(r.samples().begin(), r.samples().end());
    *out = new frit_case{std::move(bench), std::move(lower), std::move(upper), std::move(reference)};
  });
}

void frit_case_free(frit_case* bench) { delete bench; }

const char* frit_case_name(const frit_case* bench) { return bench->bench.name.c_str(); }

void frit_case_controller(const frit_case* bench, frit_controller_spec* spec) {
  if (bench && spec) *spec = from_template(bench->bench.controller);
}

double frit_case_sample_time(const frit_case* bench) { return bench->bench.sample_time; }
double frit_case_sim_time(const frit_case* bench) { return bench->bench.sim_time; }
size_t frit_case_horizon(const frit_case* bench) { return bench->bench.horizon(); }
const double* frit_case_theta0(const frit_case* bench, size_t* n) { return view(bench->bench.theta0, n); }
const double* frit_case_lower(const frit_case* bench, size_t* n) { return view(bench->lower, n); }
const double* frit_case_upper(const frit_case* bench, size_t* n) { return view(bench->upper, n); }
double frit_case_published_j0(const frit_case* bench) { return bench->bench.published.j0; }
double frit_case_published_j_star(const frit_case* bench) { return bench->bench.published.j_star; }

const double* frit_case_published_theta_star(const frit_case* bench, size_t* n) {
  return view(bench->bench.published.theta_star, n);
}

frit_status frit_case_plant(const frit_case* bench, frit_tf** out) {
  FRIT_REQUIRE(bench && out, "null argument");
  return guarded([&] { *out = new frit_tf(bench->bench.discrete_plant()); });
}

frit_status frit_case_reference_model(const frit_case* bench, frit_tf** out) {
  FRIT_REQUIRE(bench && out, "null argument");
  return guarded([&] { *out = new frit_tf(bench->bench.discrete_reference_model()); });
}

const double* frit_case_reference_signal(const frit_case* bench, size_t* len) { return view(bench->reference, len); }

frit_status frit_case_collect(const frit_case* bench, frit_record** out) {
  FRIT_REQUIRE(bench && out, "null argument");
  return guarded([&] { *out = new frit_record{collect_data(bench->bench)}; });
}

frit_status frit_case_validate(const frit_case* bench, const double* theta, size_t n, frit_validation** out) {
  FRIT_REQUIRE(bench && theta && out, "null argument");
  return guarded([&] { *out = new frit_validation{validate(bench->bench, {theta, n})}; });
}

}  // extern "C"
