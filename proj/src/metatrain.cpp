#include "metaet/metatrain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "metaet/errors.hpp"
#include "metaet/util.hpp"

namespace metaet {

namespace {

constexpr std::uint64_t kInitStream = 0x8000000000000001ULL;
constexpr double kAlphaFloor = 1e-6;

// Runs fn(0..count-1) across workers; each index is processed exactly once
// and results must be written to per-index slots so the caller's reduction
// order stays fixed.
void parallel_for(int count, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += workers) fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<ClassFeatureSet> query_feature_sets(const LearnerParams& adapted,
                                                const Episode& episode) {
  const int n = static_cast<int>(episode.class_ids.size());
  std::vector<ClassFeatureSet> sets(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    sets[static_cast<std::size_t>(c)].class_id =
        episode.class_ids[static_cast<std::size_t>(c)];
    sets[static_cast<std::size_t>(c)].dim = adapted.shape.feature_dim();
  }
  for (int i = 0; i < episode.query.size(); ++i) {
    const int label = episode.query.labels[static_cast<std::size_t>(i)];
    const auto g = extract_features(adapted, episode.query.row(i));
    auto& rows = sets[static_cast<std::size_t>(label)].rows;
    rows.insert(rows.end(), g.begin(), g.end());
  }
  return sets;
}

Phase flipped(Phase p) {
  return p == Phase::kPrimary ? Phase::kAdvanced : Phase::kPrimary;
}

int argmax_logit(const std::vector<double>& logits) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(logits.size()); ++i) {
    if (logits[static_cast<std::size_t>(i)] > logits[static_cast<std::size_t>(best)]) {
      best = i;
    }
  }
  return best;
}

}  // namespace

Schedule schedule_from_name(const std::string& name) {
  if (name == "uniform") return Schedule::kUniform;
  if (name == "expert") return Schedule::kExpert;
  if (name == "reversed") return Schedule::kReversed;
  if (name == "probabilistic_et") return Schedule::kProbabilisticEt;
  if (name == "semantic_expert") return Schedule::kSemanticExpert;
  throw ConfigError(
      "unknown schedule '" + name +
      "' (expected uniform|expert|reversed|probabilistic_et|semantic_expert)");
}

const char* schedule_name(Schedule s) {
  switch (s) {
    case Schedule::kUniform: return "uniform";
    case Schedule::kExpert: return "expert";
    case Schedule::kReversed: return "reversed";
    case Schedule::kProbabilisticEt: return "probabilistic_et";
    case Schedule::kSemanticExpert: return "semantic_expert";
  }
  return "?";
}

MetaMode meta_mode_from_name(const std::string& name) {
  if (name == "maml") return MetaMode::kMamlFixedAlpha;
  if (name == "metasgd") return MetaMode::kMetaSgdLearnedAlpha;
  throw ConfigError("unknown meta mode '" + name + "' (expected maml|metasgd)");
}

const char* meta_mode_name(MetaMode m) {
  return m == MetaMode::kMamlFixedAlpha ? "maml" : "metasgd";
}

TestMode test_mode_from_name(const std::string& name) {
  if (name == "random") return TestMode::kRandom;
  if (name == "all_easy") return TestMode::kAllEasy;
  if (name == "all_hard") return TestMode::kAllHard;
  throw ConfigError("unknown test mode '" + name +
                    "' (expected random|all_easy|all_hard)");
}

const char* test_mode_name(TestMode m) {
  switch (m) {
    case TestMode::kRandom: return "random";
    case TestMode::kAllEasy: return "all_easy";
    case TestMode::kAllHard: return "all_hard";
  }
  return "?";
}

void TrainPlan::validate() const {
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (total_tasks < batch_size) throw ConfigError("need T >= B");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must be in [0,1]");
  if (n_way < 2) throw ConfigError("n_way must be >= 2");
  if (k_shot < 1 || q_query < 1) throw ConfigError("k_shot and q_query must be >= 1");
  if (!(outer_rate > 0.0)) throw ConfigError("outer rate must be > 0");
  if (!(inner_rate_init > 0.0)) throw ConfigError("initial inner rate must be > 0");
  if (schedule == Schedule::kProbabilisticEt &&
      !(target_type_prob > 0.0 && target_type_prob < 1.0)) {
    throw ConfigError("probabilistic_et needs p in (0,1)");
  }
  for (const int h : hidden) {
    if (h < 1) throw ConfigError("hidden widths must be >= 1");
  }
}

Phase phase_of(std::int64_t task_index, const TrainPlan& plan) {
  if (task_index < 0 || task_index >= plan.total_tasks) {
    throw std::invalid_argument("task index " + std::to_string(task_index) +
                                " outside 0.." +
                                std::to_string(plan.total_tasks - 1));
  }
  const auto boundary = static_cast<std::int64_t>(
      std::floor(plan.lambda * static_cast<double>(plan.total_tasks)));
  return task_index < boundary ? Phase::kPrimary : Phase::kAdvanced;
}

LearnerState init_learner_state(const TrainPlan& plan, int input_dim) {
  MlpShape shape;
  shape.input_dim = input_dim;
  shape.hidden = plan.hidden;
  shape.output_dim = plan.n_way;
  Rng rng = Rng::keyed(plan.master_seed, kInitStream);
  LearnerState state;
  state.params = init_params(shape, rng);
  state.rates = InnerRates::broadcast(plan.inner_rate_init, shape.param_count());
  return state;
}

std::vector<std::string> select_task_classes(std::int64_t task_index,
                                             const TrainPlan& plan,
                                             const Taxonomy* tax,
                                             const DataDictionary& data,
                                             Rng& rng) {
  const Phase phase = phase_of(task_index, plan);
  const auto random_classes = [&] {
    const auto picked = rng.sample_indices(data.class_count(), plan.n_way);
    std::vector<std::string> classes;
    classes.reserve(picked.size());
    for (const int c : picked) {
      classes.push_back(data.class_ids()[static_cast<std::size_t>(c)]);
    }
    return classes;
  };

  switch (plan.schedule) {
    case Schedule::kUniform:
    case Schedule::kExpert:
    case Schedule::kReversed:
      return random_classes();
    case Schedule::kSemanticExpert: {
      if (tax == nullptr) {
        throw ConfigError("semantic_expert schedule needs a taxonomy");
      }
      return phase == Phase::kPrimary
                 ? sample_easy_classes(*tax, plan.n_way, rng)
                 : sample_hard_classes(*tax, plan.n_way, rng);
    }
    case Schedule::kProbabilisticEt: {
      if (tax == nullptr) {
        throw ConfigError("probabilistic_et schedule needs a taxonomy");
      }
      // Coin first, then sampling, so the stream layout is stable.
      const bool take_target = rng.next_double() < plan.target_type_prob;
      const bool want_easy = (phase == Phase::kPrimary) == take_target;
      return want_easy ? sample_easy_classes(*tax, plan.n_way, rng)
                       : sample_hard_classes(*tax, plan.n_way, rng);
    }
  }
  throw ConfigError("unhandled schedule");
}

Episode select_training_episode(std::int64_t task_index, const TrainPlan& plan,
                                const Taxonomy* tax,
                                const DataDictionary& data) {
  Rng rng = derive_task_rng(plan.master_seed, task_index);
  const auto classes = select_task_classes(task_index, plan, tax, data, rng);
  Episode ep = build_episode(data, classes, plan.k_shot, plan.q_query, rng);
  ep.task_index = task_index;
  return ep;
}

std::vector<double> alpha_gradient(const std::vector<double>& support_grad,
                                   const std::vector<double>& query_grad_adapted) {
  if (support_grad.size() != query_grad_adapted.size()) {
    throw std::invalid_argument("gradient length mismatch");
  }
  std::vector<double> out(support_grad.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = -support_grad[i] * query_grad_adapted[i];
  }
  return out;
}

TaskResult per_task_pass(const LearnerState& state, const Episode& episode,
                         Measure measure, bool exact_second_order) {
  const LossGrad support = loss_and_grad(state.params, episode.support);

  LearnerParams adapted = state.params;
  for (std::size_t i = 0; i < adapted.theta.size(); ++i) {
    adapted.theta[i] -= state.rates.alpha[i] * support.grad[i];
  }

  TaskResult result;
  result.th = task_hardness(query_feature_sets(adapted, episode), measure).th;

  const LossGrad query = loss_and_grad(adapted, episode.query);
  result.query_loss = query.loss;
  result.alpha_grad = alpha_gradient(support.grad, query.grad);

  if (exact_second_order) {
    // d/dtheta L_q(theta - alpha (.) g_s(theta))
    //   = g_q' - H_s (alpha (.) g_q'),  H_s the support-loss Hessian.
    std::vector<double> direction(query.grad.size());
    for (std::size_t i = 0; i < direction.size(); ++i) {
      direction[i] = state.rates.alpha[i] * query.grad[i];
    }
    const auto hv = loss_hvp(state.params, episode.support, direction);
    result.meta_grad.resize(query.grad.size());
    for (std::size_t i = 0; i < hv.size(); ++i) {
      result.meta_grad[i] = query.grad[i] - hv[i];
    }
  } else {
    result.meta_grad = query.grad;
  }
  return result;
}

std::pair<LearnerState, BatchLog> meta_batch_step(
    const LearnerState& state, const std::vector<Episode>& episodes,
    const TrainPlan& plan, Phase phase) {
  const int b = static_cast<int>(episodes.size());
  if (b < 1) throw std::invalid_argument("meta_batch_step needs >= 1 episode");

  std::vector<TaskResult> results(static_cast<std::size_t>(b));
  parallel_for(b, [&](int j) {
    results[static_cast<std::size_t>(j)] =
        per_task_pass(state, episodes[static_cast<std::size_t>(j)],
                      plan.measure, plan.exact_second_order);
  });

  std::vector<double> ths(static_cast<std::size_t>(b));
  for (int j = 0; j < b; ++j) {
    const auto& r = results[static_cast<std::size_t>(j)];
    if (!std::isfinite(r.query_loss) || !std::isfinite(r.th)) {
      throw std::runtime_error(
          "task " + std::to_string(episodes[static_cast<std::size_t>(j)].task_index) +
          ": non-finite query loss or hardness (loss=" +
          std::to_string(r.query_loss) + ", th=" + std::to_string(r.th) + ")");
    }
    ths[static_cast<std::size_t>(j)] = r.th;
  }

  // Only the computable-hardness schedules reweight the batch; the
  // uniform baseline and the semantic schedules average plainly.
  std::vector<double> weights;
  switch (plan.schedule) {
    case Schedule::kExpert:
      weights = batch_weights(ths, phase);
      break;
    case Schedule::kReversed:
      weights = batch_weights(ths, flipped(phase));
      break;
    default:
      weights.assign(static_cast<std::size_t>(b), 1.0 / b);
      break;
  }

  LearnerState next = state;
  const std::size_t p = next.params.theta.size();
  std::vector<double> meta_grad(p, 0.0);
  std::vector<double> alpha_grad(p, 0.0);
  double weighted_loss = 0.0;
  for (int j = 0; j < b; ++j) {
    const auto& r = results[static_cast<std::size_t>(j)];
    const double w = weights[static_cast<std::size_t>(j)];
    weighted_loss += w * r.query_loss;
    for (std::size_t i = 0; i < p; ++i) {
      meta_grad[i] += w * r.meta_grad[i];
      alpha_grad[i] += w * r.alpha_grad[i];
    }
  }

  for (std::size_t i = 0; i < p; ++i) {
    next.params.theta[i] -= plan.outer_rate * meta_grad[i];
    if (!std::isfinite(next.params.theta[i])) {
      throw std::runtime_error("meta update produced a non-finite parameter");
    }
  }
  if (plan.meta_mode == MetaMode::kMetaSgdLearnedAlpha) {
    for (std::size_t i = 0; i < p; ++i) {
      next.rates.alpha[i] = std::max(
          next.rates.alpha[i] - plan.outer_rate * alpha_grad[i], kAlphaFloor);
    }
  }

  BatchLog log;
  log.schedule = plan.schedule;
  log.phase = phase;
  log.mean_weighted_loss = weighted_loss;
  log.mean_th = 0.0;
  log.min_th = ths[0];
  log.max_th = ths[0];
  for (const double th : ths) {
    log.mean_th += th;
    log.min_th = std::min(log.min_th, th);
    log.max_th = std::max(log.max_th, th);
  }
  log.mean_th /= b;
  return {std::move(next), log};
}

TrainOutput train(const TrainPlan& plan, const DataDictionary& data,
                  const Taxonomy* tax) {
  plan.validate();
  if (plan.n_way > data.class_count()) {
    throw ConfigError("plan asks for " + std::to_string(plan.n_way) +
                      "-way tasks but the dataset has " +
                      std::to_string(data.class_count()) + " classes");
  }

  TrainOutput out;
  out.state = init_learner_state(plan, data.dim());
  const std::int64_t batches = plan.batch_count();
  out.logs.reserve(static_cast<std::size_t>(batches));

  std::vector<Episode> episodes(static_cast<std::size_t>(plan.batch_size));
  for (std::int64_t t = 0; t < batches; ++t) {
    const std::int64_t first_task = t * plan.batch_size;
    for (int j = 0; j < plan.batch_size; ++j) {
      episodes[static_cast<std::size_t>(j)] =
          select_training_episode(first_task + j, plan, tax, data);
    }
    // The batch that straddles the phase boundary is weighted as a whole
    // by the phase of its first task.
    const Phase phase = phase_of(first_task, plan);
    auto [next, log] = meta_batch_step(out.state, episodes, plan, phase);
    out.state = std::move(next);
    log.batch_index = t;
    log.first_task_index = first_task;
    out.logs.push_back(log);
  }
  return out;
}

EvalResult evaluate(const LearnerState& state, const DataDictionary& data,
                    const Taxonomy* tax, int v, int n, int k, int q,
                    TestMode mode, std::uint64_t seed) {
  if (v < 1) throw ConfigError("evaluation needs V >= 1 tasks");
  if (n != state.params.shape.output_dim) {
    throw ConfigError("checkpoint was trained for " +
                      std::to_string(state.params.shape.output_dim) +
                      "-way tasks, asked for " + std::to_string(n));
  }
  if (data.dim() != state.params.shape.input_dim) {
    throw ConfigError("dataset dimension does not match the checkpoint");
  }
  if (mode != TestMode::kRandom && tax == nullptr) {
    throw ConfigError(std::string(test_mode_name(mode)) +
                      " evaluation needs a taxonomy");
  }

  EvalResult result;
  result.accuracies.assign(static_cast<std::size_t>(v), 0.0);
  parallel_for(v, [&](int i) {
    Rng rng = derive_task_rng(seed, i);
    Episode ep;
    switch (mode) {
      case TestMode::kRandom:
        ep = random_episode(data, n, k, q, rng);
        break;
      case TestMode::kAllEasy:
        ep = build_episode(data, sample_easy_classes(*tax, n, rng), k, q, rng);
        break;
      case TestMode::kAllHard:
        ep = build_episode(data, sample_hard_classes(*tax, n, rng), k, q, rng);
        break;
    }
    ep.task_index = i;
    const LearnerParams adapted = inner_update(state.params, state.rates, ep.support);
    int correct = 0;
    for (int s = 0; s < ep.query.size(); ++s) {
      const auto logits = forward(adapted, ep.query.row(s));
      if (argmax_logit(logits) == ep.query.labels[static_cast<std::size_t>(s)]) {
        ++correct;
      }
    }
    result.accuracies[static_cast<std::size_t>(i)] =
        static_cast<double>(correct) / ep.query.size();
  });

  double sum = 0.0;
  for (const double a : result.accuracies) sum += a;
  result.mean = sum / v;
  double ss = 0.0;
  for (const double a : result.accuracies) ss += (a - result.mean) * (a - result.mean);
  result.stddev = v > 1 ? std::sqrt(ss / (v - 1)) : 0.0;
  result.ci95 = 1.96 * result.stddev / std::sqrt(static_cast<double>(v));
  return result;
}

void write_metrics_csv(std::ostream& out, const std::vector<BatchLog>& logs) {
  out << "batch_index,first_task_index,phase,schedule,mean_weighted_loss,"
         "mean_TH,min_TH,max_TH\n";
  for (const auto& log : logs) {
    out << log.batch_index << ',' << log.first_task_index << ','
        << phase_name(log.phase) << ',' << schedule_name(log.schedule) << ','
        << format_double(log.mean_weighted_loss) << ','
        << format_double(log.mean_th) << ',' << format_double(log.min_th)
        << ',' << format_double(log.max_th) << '\n';
  }
}

void write_eval_csv(std::ostream& out, TestMode mode, const EvalResult& result) {
  out << "mode,V,mean_acc,std_acc,ci95\n";
  out << test_mode_name(mode) << ',' << result.accuracies.size() << ','
      << format_double(result.mean) << ',' << format_double(result.stddev)
      << ',' << format_double(result.ci95) << '\n';
}

void save_state(const LearnerState& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write checkpoint: " + path);
  out << "mlp," << state.params.shape.input_dim;
  for (const int h : state.params.shape.hidden) out << ',' << h;
  out << ',' << state.params.shape.output_dim << '\n';
  out << "theta";
  for (const double t : state.params.theta) out << ',' << format_double(t);
  out << "\nalpha";
  for (const double a : state.rates.alpha) out << ',' << format_double(a);
  out << '\n';
}

LearnerState load_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint: " + path);
  std::string line;

  if (!std::getline(in, line)) throw FormatError("checkpoint is empty");
  auto fields = split(line, ',');
  if (fields.size() < 3 || fields[0] != "mlp") {
    throw FormatError("line 1: expected 'mlp,<input>,...,<output>'");
  }
  MlpShape shape;
  shape.input_dim = static_cast<int>(parse_integer(fields[1], 1));
  for (std::size_t i = 2; i + 1 < fields.size(); ++i) {
    shape.hidden.push_back(static_cast<int>(parse_integer(fields[i], 1)));
  }
  shape.output_dim = static_cast<int>(parse_integer(fields.back(), 1));

  const auto read_values = [&](const char* name, int line_no) {
    if (!std::getline(in, line)) {
      throw FormatError("checkpoint is missing the " + std::string(name) + " line");
    }
    auto f = split(line, ',');
    if (f.empty() || f[0] != name) {
      throw FormatError("line " + std::to_string(line_no) + ": expected '" +
                        name + ",...'");
    }
    std::vector<double> values;
    values.reserve(f.size() - 1);
    for (std::size_t i = 1; i < f.size(); ++i) {
      values.push_back(parse_double(f[i], line_no));
    }
    return values;
  };

  LearnerState state;
  state.params.shape = shape;
  state.params.theta = read_values("theta", 2);
  state.rates.alpha = read_values("alpha", 3);
  if (static_cast<int>(state.params.theta.size()) != shape.param_count() ||
      state.rates.alpha.size() != state.params.theta.size()) {
    throw FormatError("checkpoint value counts do not match the architecture");
  }
  return state;
}

}  // namespace metaet
