#pragma once

#include <string>
#include <vector>

namespace metaet {

/// Set-to-set relation used to score task hardness.
enum class Measure { kPairwiseEuclidean, kHausdorff, kHsic };

Measure measure_from_name(const std::string& name);
const char* measure_name(Measure m);

enum class Phase { kPrimary, kAdvanced };

const char* phase_name(Phase p);

/// Feature rows of one class inside a task, row-major (samples x dim).
struct ClassFeatureSet {
  std::string class_id;
  int dim = 0;
  std::vector<double> rows;  // size() == count() * dim

  int count() const {
    return dim > 0 ? static_cast<int>(rows.size()) / dim : 0;
  }
};

/// Pairwise class relations of a task plus its scalar hardness.
///
/// For distance measures the hardness is the reciprocal of the smallest
/// off-diagonal relation; for HSIC it is the largest. `pair_a`/`pair_b`
/// name the class pair that decided the score (lowest pair index on ties).
struct HardnessReport {
  Measure measure = Measure::kPairwiseEuclidean;
  int n = 0;
  std::vector<double> relations;  // n*n symmetric, diagonal unused (0)
  double th = 0.0;
  int pair_a = 0;
  int pair_b = 1;

  double relation(int i, int j) const {
    return relations[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                     static_cast<std::size_t>(j)];
  }
};

/// Floor applied to the minimum distance and to HSIC hardness so the score
/// stays positive for coincident or constant classes.
inline constexpr double kHardnessEpsilon = 1e-12;

/// Root mean squared Euclidean distance over all cross-set sample pairs.
double dist_pairwise(const ClassFeatureSet& a, const ClassFeatureSet& b);

/// Symmetrized Hausdorff distance with the Euclidean point metric.
double dist_hausdorff(const ClassFeatureSet& a, const ClassFeatureSet& b);

/// tr(Ka H Kb H) with linear kernels K = G G^T and the centering matrix
/// H = I - (1/Q) 1 1^T. Both sets must have the same number of rows Q >= 1.
double hsic(const ClassFeatureSet& a, const ClassFeatureSet& b);

/// Fills all unordered pair relations and reduces them to the task score.
HardnessReport task_hardness(const std::vector<ClassFeatureSet>& sets,
                             Measure measure);

/// Phase-dependent weight transform: 1/th in the primary learning phase,
/// th otherwise.
double phase_transform(double th, Phase phase);

/// Batch loss weights: transformed scores normalized to sum to one.
std::vector<double> batch_weights(const std::vector<double>& ths, Phase phase);

}  // namespace metaet
