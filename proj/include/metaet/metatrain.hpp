#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "metaet/episode.hpp"
#include "metaet/hardness.hpp"
#include "metaet/learner.hpp"
#include "metaet/taxonomy.hpp"

namespace metaet {

/// How training episodes are drawn and weighted.
///  - uniform: random tasks, equal loss weights (the plain baseline);
///  - expert: random tasks, hardness-weighted per phase;
///  - reversed: expert with the two phase weightings swapped;
///  - probabilistic_et: semantic sampling, target task type with prob. p;
///  - semantic_expert: semantic sampling, easy first then hard.
enum class Schedule {
  kUniform,
  kExpert,
  kReversed,
  kProbabilisticEt,
  kSemanticExpert,
};

Schedule schedule_from_name(const std::string& name);
const char* schedule_name(Schedule s);

enum class MetaMode { kMamlFixedAlpha, kMetaSgdLearnedAlpha };

MetaMode meta_mode_from_name(const std::string& name);
const char* meta_mode_name(MetaMode m);

struct TrainPlan {
  std::int64_t total_tasks = 60000;  // T
  int batch_size = 4;                // B
  double lambda = 1.0 / 3.0;         // primary-phase fraction of T
  int n_way = 5;
  int k_shot = 5;
  int q_query = 20;
  double outer_rate = 1e-3;          // beta
  double inner_rate_init = 0.3;      // initial alpha
  Measure measure = Measure::kHsic;
  Schedule schedule = Schedule::kExpert;
  MetaMode meta_mode = MetaMode::kMetaSgdLearnedAlpha;
  bool exact_second_order = false;
  double target_type_prob = 0.8;     // p, probabilistic_et only
  std::vector<int> hidden = {64, 32};
  std::uint64_t master_seed = 0;

  void validate() const;  // throws ConfigError on bad ranges
  std::int64_t batch_count() const { return total_tasks / batch_size; }
};

/// Meta-parameters theta plus the per-parameter inner rates alpha.
struct LearnerState {
  LearnerParams params;
  InnerRates rates;
};

struct BatchLog {
  std::int64_t batch_index = 0;
  std::int64_t first_task_index = 0;
  Phase phase = Phase::kPrimary;
  Schedule schedule = Schedule::kExpert;
  double mean_weighted_loss = 0.0;
  double mean_th = 0.0;
  double min_th = 0.0;
  double max_th = 0.0;
};

struct TrainOutput {
  LearnerState state;
  std::vector<BatchLog> logs;
};

enum class TestMode { kRandom, kAllEasy, kAllHard };

TestMode test_mode_from_name(const std::string& name);
const char* test_mode_name(TestMode m);

struct EvalResult {
  std::vector<double> accuracies;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double ci95 = 0.0;    // 1.96 * stddev / sqrt(V)
};

/// Primary iff task_index < floor(lambda * T).
Phase phase_of(std::int64_t task_index, const TrainPlan& plan);

LearnerState init_learner_state(const TrainPlan& plan, int input_dim);

/// Class selection for one training task under the plan's schedule.
/// Exposed separately from episode construction so the sampling statistics
/// can be tested cheaply.
std::vector<std::string> select_task_classes(std::int64_t task_index,
                                             const TrainPlan& plan,
                                             const Taxonomy* tax,
                                             const DataDictionary& data,
                                             Rng& rng);

Episode select_training_episode(std::int64_t task_index, const TrainPlan& plan,
                                const Taxonomy* tax,
                                const DataDictionary& data);

/// Exact inner-rate gradient: alpha only enters through
/// theta' = theta - alpha (.) support_grad, so
/// dL_q/dalpha_k = -support_grad_k * query_grad_adapted_k.
std::vector<double> alpha_gradient(const std::vector<double>& support_grad,
                                   const std::vector<double>& query_grad_adapted);

/// Everything one task contributes to the outer update.
struct TaskResult {
  double query_loss = 0.0;
  double th = 0.0;
  std::vector<double> meta_grad;   // dL_query/dtheta
  std::vector<double> alpha_grad;  // dL_query/dalpha
};

/// Inner adaptation, feature extraction, hardness scoring and the per-task
/// meta/alpha gradients. Pure; tasks of a batch may run in parallel.
TaskResult per_task_pass(const LearnerState& state, const Episode& episode,
                         Measure measure, bool exact_second_order);

/// One outer step over a batch of episodes (Expert Training step): adapts
/// per task, scores hardness, reweights the query losses by phase and
/// applies the weighted meta-gradient (and the alpha update in Meta-SGD
/// mode, with alpha clamped to >= 1e-6).
std::pair<LearnerState, BatchLog> meta_batch_step(
    const LearnerState& state, const std::vector<Episode>& episodes,
    const TrainPlan& plan, Phase phase);

/// The full two-phase loop: floor(T/B) meta-batch steps with one log
/// record per batch. Deterministic given the plan's master seed,
/// regardless of worker count.
TrainOutput train(const TrainPlan& plan, const DataDictionary& data,
                  const Taxonomy* tax);

/// Adapts on each test task's support set and scores query accuracy.
/// No meta-update happens here. Test classes are expected to be disjoint
/// from training classes; that split is the caller's responsibility.
EvalResult evaluate(const LearnerState& state, const DataDictionary& data,
                    const Taxonomy* tax, int v, int n, int k, int q,
                    TestMode mode, std::uint64_t seed);

void write_metrics_csv(std::ostream& out, const std::vector<BatchLog>& logs);
void write_eval_csv(std::ostream& out, TestMode mode, const EvalResult& result);

void save_state(const LearnerState& state, const std::string& path);
LearnerState load_state(const std::string& path);

}  // namespace metaet
