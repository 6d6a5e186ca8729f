// Command-line front door: synth | train | eval | hardness | sample.
// Every numeric artifact is CSV with round-trip float formatting, so a
// re-run with the same config and seed reproduces files byte for byte.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "metaet/dataset.hpp"
#include "metaet/episode.hpp"
#include "metaet/errors.hpp"
#include "metaet/hardness.hpp"
#include "metaet/metatrain.hpp"
#include "metaet/synth.hpp"
#include "metaet/util.hpp"

namespace {

using namespace metaet;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file: " + path);
  return out;
}

std::vector<int> parse_hidden(const std::string& text) {
  std::vector<int> widths;
  if (text.empty() || text == "none") return widths;
  for (const auto part : split(text, ',')) {
    widths.push_back(static_cast<int>(parse_integer(part, 0)));
  }
  return widths;
}

struct SynthArgs {
  SynthSpec spec;
  int train_superclasses = 7;
  std::string out_dir = ".";
};

void add_synth(CLI::App& app, std::shared_ptr<SynthArgs> args) {
  CLI::App* cmd = app.add_subcommand(
      "synth", "Generate a hierarchical synthetic dataset with a train/test "
               "superclass split");
  cmd->set_config("--config");
  cmd->add_option("--superclasses", args->spec.superclasses, "Superclass count L")
      ->capture_default_str();
  cmd->add_option("--classes-per-super", args->spec.classes_per_super,
                  "Classes per superclass")
      ->capture_default_str();
  cmd->add_option("--samples-per-class", args->spec.samples_per_class,
                  "Samples per class")
      ->capture_default_str();
  cmd->add_option("--dim", args->spec.dim, "Feature dimension")
      ->capture_default_str();
  cmd->add_option("--sigma-super", args->spec.sigma_super,
                  "Superclass mean spread")
      ->capture_default_str();
  cmd->add_option("--sigma-class", args->spec.sigma_class,
                  "Class mean spread within a superclass")
      ->capture_default_str();
  cmd->add_option("--sigma-noise", args->spec.sigma_noise, "Sample noise")
      ->capture_default_str();
  cmd->add_option("--seed", args->spec.seed, "Generation seed")
      ->capture_default_str();
  cmd->add_option("--train-superclasses", args->train_superclasses,
                  "Superclasses kept on the train side of the split")
      ->capture_default_str();
  cmd->add_option("--out", args->out_dir, "Output directory")
      ->capture_default_str();

  cmd->callback([args] {
    const auto [data, tax] = generate(args->spec);
    const SplitDataset split =
        split_by_superclass(data, tax, args->train_superclasses);
    const std::string base = args->out_dir + "/";
    save_dataset(split.train_data, base + "train.csv");
    save_taxonomy(split.train_tax, base + "train.taxonomy");
    save_dataset(split.test_data, base + "test.csv");
    save_taxonomy(split.test_tax, base + "test.taxonomy");
    std::cout << "wrote " << base << "{train,test}.{csv,taxonomy}: "
              << split.train_data.class_count() << " train / "
              << split.test_data.class_count() << " test classes\n";
  });
}

struct TrainArgs {
  TrainPlan plan;
  std::string hidden_text = "64,32";
  std::string schedule = "expert";
  std::string measure = "hsic";
  std::string meta_mode = "metasgd";
  std::string data_path;
  std::string taxonomy_path;
  std::string metrics_path = "metrics.csv";
  std::string checkpoint_path = "checkpoint.csv";
};

void add_plan_options(CLI::App* cmd, TrainArgs& args) {
  cmd->add_option("--t,--total-tasks", args.plan.total_tasks,
                  "Total training tasks T")
      ->capture_default_str();
  cmd->add_option("--b,--batch-size", args.plan.batch_size, "Tasks per batch B")
      ->capture_default_str();
  cmd->add_option("--lambda", args.plan.lambda,
                  "Primary-phase fraction of T in [0,1]")
      ->capture_default_str();
  cmd->add_option("--n,--n-way", args.plan.n_way, "Classes per task N")
      ->capture_default_str();
  cmd->add_option("--k,--k-shot", args.plan.k_shot, "Support samples per class K")
      ->capture_default_str();
  cmd->add_option("--q,--q-query", args.plan.q_query, "Query samples per class Q")
      ->capture_default_str();
  cmd->add_option("--beta,--outer-rate", args.plan.outer_rate,
                  "Meta learning rate")
      ->capture_default_str();
  cmd->add_option("--alpha0,--inner-rate", args.plan.inner_rate_init,
                  "Initial inner learning rate")
      ->capture_default_str();
  cmd->add_option("--measure", args.measure,
                  "Hardness measure: pairwise|hausdorff|hsic")
      ->capture_default_str();
  cmd->add_option("--schedule", args.schedule,
                  "uniform|expert|reversed|probabilistic_et|semantic_expert")
      ->capture_default_str();
  cmd->add_option("--meta-mode", args.meta_mode,
                  "maml (fixed alpha) | metasgd (learned alpha)")
      ->capture_default_str();
  cmd->add_flag("--exact-second-order", args.plan.exact_second_order,
                "Use the exact meta-gradient instead of first-order");
  cmd->add_option("--p,--target-prob", args.plan.target_type_prob,
                  "Target task-type probability for probabilistic_et")
      ->capture_default_str();
  cmd->add_option("--hidden", args.hidden_text,
                  "Hidden widths, comma separated ('none' for linear)")
      ->capture_default_str();
  cmd->add_option("--seed", args.plan.master_seed, "Master seed")
      ->capture_default_str();
}

void add_train(CLI::App& app, std::shared_ptr<TrainArgs> args) {
  CLI::App* cmd = app.add_subcommand(
      "train", "Run the two-phase expert meta-training loop");
  cmd->set_config("--config");
  add_plan_options(cmd, *args);
  cmd->add_option("--data", args->data_path, "Training dataset CSV")->required();
  cmd->add_option("--taxonomy", args->taxonomy_path,
                  "Taxonomy file (needed by semantic schedules)");
  cmd->add_option("--metrics", args->metrics_path, "Metrics CSV output")
      ->capture_default_str();
  cmd->add_option("--checkpoint", args->checkpoint_path,
                  "Checkpoint output (theta and alpha)")
      ->capture_default_str();

  cmd->callback([args] {
    args->plan.hidden = parse_hidden(args->hidden_text);
    args->plan.schedule = schedule_from_name(args->schedule);
    args->plan.measure = measure_from_name(args->measure);
    args->plan.meta_mode = meta_mode_from_name(args->meta_mode);
    args->plan.validate();

    const DataDictionary data = load_dataset(args->data_path);
    std::optional<Taxonomy> tax;
    if (!args->taxonomy_path.empty()) {
      tax = load_taxonomy(args->taxonomy_path);
      data.validate_against(*tax);
    }

    const TrainOutput out = train(args->plan, data, tax ? &*tax : nullptr);
    auto metrics = open_output(args->metrics_path);
    write_metrics_csv(metrics, out.logs);
    save_state(out.state, args->checkpoint_path);
    std::cout << "trained " << out.logs.size() << " batches; wrote "
              << args->metrics_path << " and " << args->checkpoint_path << "\n";
  });
}

struct EvalArgs {
  std::string checkpoint_path;
  std::string data_path;
  std::string taxonomy_path;
  std::string mode = "random";
  std::string out_path;
  int v = 600;
  int k = 5;
  int q = 20;
  std::uint64_t seed = 1;
};

void add_eval(CLI::App& app, std::shared_ptr<EvalArgs> args) {
  CLI::App* cmd = app.add_subcommand(
      "eval", "Adapt on novel tasks and report accuracy statistics");
  cmd->set_config("--config");
  cmd->add_option("--checkpoint", args->checkpoint_path, "Trained checkpoint")
      ->required();
  cmd->add_option("--data", args->data_path, "Test dataset CSV")->required();
  cmd->add_option("--taxonomy", args->taxonomy_path,
                  "Taxonomy (needed by all_easy/all_hard)");
  cmd->add_option("--mode", args->mode, "random|all_easy|all_hard")
      ->capture_default_str();
  cmd->add_option("--v,--tasks", args->v, "Novel task count V")
      ->capture_default_str();
  cmd->add_option("--k,--k-shot", args->k, "Support samples per class")
      ->capture_default_str();
  cmd->add_option("--q,--q-query", args->q, "Query samples per class")
      ->capture_default_str();
  cmd->add_option("--seed", args->seed, "Evaluation seed")->capture_default_str();
  cmd->add_option("--out", args->out_path, "Write the CSV here instead of stdout");

  cmd->callback([args] {
    const LearnerState state = load_state(args->checkpoint_path);
    const DataDictionary data = load_dataset(args->data_path);
    std::optional<Taxonomy> tax;
    if (!args->taxonomy_path.empty()) tax = load_taxonomy(args->taxonomy_path);

    const TestMode mode = test_mode_from_name(args->mode);
    const EvalResult result =
        evaluate(state, data, tax ? &*tax : nullptr, args->v,
                 state.params.shape.output_dim, args->k, args->q, mode,
                 args->seed);
    if (args->out_path.empty()) {
      write_eval_csv(std::cout, mode, result);
    } else {
      auto out = open_output(args->out_path);
      write_eval_csv(out, mode, result);
    }
  });
}

struct HardnessArgs {
  std::string data_path;
  std::string checkpoint_path;
  std::string measure = "hsic";
  std::string out_path;
  int tasks = 100;
  int n = 5;
  int k = 5;
  int q = 20;
  std::uint64_t seed = 1;
};

void add_hardness(CLI::App& app, std::shared_ptr<HardnessArgs> args) {
  CLI::App* cmd = app.add_subcommand(
      "hardness", "Score the hardness of randomly sampled tasks");
  cmd->set_config("--config");
  cmd->add_option("--data", args->data_path, "Dataset CSV")->required();
  cmd->add_option("--checkpoint", args->checkpoint_path,
                  "Optional checkpoint: score learner features instead of "
                  "raw ones (adapts on each task's support set first)");
  cmd->add_option("--measure", args->measure,
                  "Hardness measure: pairwise|hausdorff|hsic")
      ->capture_default_str();
  cmd->add_option("--tasks", args->tasks, "Number of tasks to score")
      ->capture_default_str();
  cmd->add_option("--n,--n-way", args->n, "Classes per task")
      ->capture_default_str();
  cmd->add_option("--k,--k-shot", args->k, "Support samples per class")
      ->capture_default_str();
  cmd->add_option("--q,--q-query", args->q, "Query samples per class")
      ->capture_default_str();
  cmd->add_option("--seed", args->seed, "Sampling seed")->capture_default_str();
  cmd->add_option("--out", args->out_path, "Write the CSV here instead of stdout");

  cmd->callback([args] {
    const DataDictionary data = load_dataset(args->data_path);
    const Measure measure = measure_from_name(args->measure);
    std::optional<LearnerState> state;
    if (!args->checkpoint_path.empty()) {
      state = load_state(args->checkpoint_path);
      if (state->params.shape.input_dim != data.dim()) {
        throw ConfigError("checkpoint input dimension does not match dataset");
      }
      if (state->params.shape.output_dim != args->n) {
        throw ConfigError("checkpoint was trained for " +
                          std::to_string(state->params.shape.output_dim) +
                          "-way tasks");
      }
    }

    std::string csv = "task_index,measure,TH\n";
    for (int t = 0; t < args->tasks; ++t) {
      Rng rng = derive_task_rng(args->seed, t);
      const Episode ep = random_episode(data, args->n, args->k, args->q, rng);

      std::vector<ClassFeatureSet> sets(static_cast<std::size_t>(args->n));
      const int feature_dim = state ? state->params.shape.feature_dim()
                                    : data.dim();
      for (int c = 0; c < args->n; ++c) {
        sets[static_cast<std::size_t>(c)].class_id =
            ep.class_ids[static_cast<std::size_t>(c)];
        sets[static_cast<std::size_t>(c)].dim = feature_dim;
      }
      std::optional<LearnerParams> adapted;
      if (state) {
        adapted = inner_update(state->params, state->rates, ep.support);
      }
      for (int i = 0; i < ep.query.size(); ++i) {
        const int label = ep.query.labels[static_cast<std::size_t>(i)];
        auto& rows = sets[static_cast<std::size_t>(label)].rows;
        if (adapted) {
          const auto g = extract_features(*adapted, ep.query.row(i));
          rows.insert(rows.end(), g.begin(), g.end());
        } else {
          const auto r = ep.query.row(i);
          rows.insert(rows.end(), r.begin(), r.end());
        }
      }
      const HardnessReport report = task_hardness(sets, measure);
      csv += std::to_string(t);
      csv += ',';
      csv += measure_name(measure);
      csv += ',';
      csv += format_double(report.th);
      csv += '\n';
    }
    if (args->out_path.empty()) {
      std::cout << csv;
    } else {
      open_output(args->out_path) << csv;
    }
  });
}

struct SampleArgs {
  std::string taxonomy_path;
  std::string type = "easy";
  std::string out_path;
  int n = 5;
  int count = 10;
  std::uint64_t seed = 1;
};

void add_sample(CLI::App& app, std::shared_ptr<SampleArgs> args) {
  CLI::App* cmd = app.add_subcommand(
      "sample", "Draw semantic easy/hard class selections from a taxonomy");
  cmd->set_config("--config");
  cmd->add_option("--taxonomy", args->taxonomy_path, "Taxonomy file")->required();
  cmd->add_option("--type", args->type, "easy|hard")->capture_default_str();
  cmd->add_option("--n,--n-way", args->n, "Classes per draw")
      ->capture_default_str();
  cmd->add_option("--count", args->count, "Number of draws")
      ->capture_default_str();
  cmd->add_option("--seed", args->seed, "Sampling seed")->capture_default_str();
  cmd->add_option("--out", args->out_path, "Write the CSV here instead of stdout");

  cmd->callback([args] {
    if (args->type != "easy" && args->type != "hard") {
      throw ConfigError("--type must be easy or hard");
    }
    const Taxonomy tax = load_taxonomy(args->taxonomy_path);
    std::string csv = "draw,type,classes\n";
    for (int i = 0; i < args->count; ++i) {
      Rng rng = derive_task_rng(args->seed, i);
      const auto classes = args->type == "easy"
                               ? sample_easy_classes(tax, args->n, rng)
                               : sample_hard_classes(tax, args->n, rng);
      csv += std::to_string(i);
      csv += ',';
      csv += args->type;
      csv += ',';
      for (std::size_t c = 0; c < classes.size(); ++c) {
        if (c > 0) csv += ';';
        csv += classes[c];
      }
      csv += '\n';
    }
    if (args->out_path.empty()) {
      std::cout << csv;
    } else {
      open_output(args->out_path) << csv;
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task-hardness-aware meta-learning toolkit"};
  app.require_subcommand(1);

  auto synth_args = std::make_shared<SynthArgs>();
  auto train_args = std::make_shared<TrainArgs>();
  auto eval_args = std::make_shared<EvalArgs>();
  auto hardness_args = std::make_shared<HardnessArgs>();
  auto sample_args = std::make_shared<SampleArgs>();
  add_synth(app, synth_args);
  add_train(app, train_args);
  add_eval(app, eval_args);
  add_hardness(app, hardness_args);
  add_sample(app, sample_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  } catch (const metaet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
