#include "metaet/hardness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "metaet/errors.hpp"

namespace metaet {

namespace {

void check_dims(const ClassFeatureSet& a, const ClassFeatureSet& b) {
  if (a.dim != b.dim) {
    throw std::invalid_argument("feature dimension mismatch: " +
                                std::to_string(a.dim) + " vs " +
                                std::to_string(b.dim));
  }
  if (a.count() < 1 || b.count() < 1) {
    throw std::invalid_argument("class feature sets must be non-empty");
  }
}

double sq_dist(const double* x, const double* y, int dim) {
  double s = 0.0;
  for (int f = 0; f < dim; ++f) {
    const double diff = x[f] - y[f];
    s += diff * diff;
  }
  return s;
}

}  // namespace

Measure measure_from_name(const std::string& name) {
  if (name == "pairwise") return Measure::kPairwiseEuclidean;
  if (name == "hausdorff") return Measure::kHausdorff;
  if (name == "hsic") return Measure::kHsic;
  throw ConfigError("unknown measure '" + name +
                    "' (expected pairwise|hausdorff|hsic)");
}

const char* measure_name(Measure m) {
  switch (m) {
    case Measure::kPairwiseEuclidean: return "pairwise";
    case Measure::kHausdorff: return "hausdorff";
    case Measure::kHsic: return "hsic";
  }
  return "?";
}

const char* phase_name(Phase p) {
  return p == Phase::kPrimary ? "primary" : "advanced";
}

double dist_pairwise(const ClassFeatureSet& a, const ClassFeatureSet& b) {
  check_dims(a, b);
  const int na = a.count(), nb = b.count(), d = a.dim;
  // Sum over pairs of ||x - y||^2 expands to
  // nb*sum||x||^2 + na*sum||y||^2 - 2 <sum x, sum y>.
  double sum_sq_a = 0.0, sum_sq_b = 0.0, cross = 0.0;
  std::vector<double> col_a(static_cast<std::size_t>(d), 0.0);
  std::vector<double> col_b(static_cast<std::size_t>(d), 0.0);
  for (int s = 0; s < na; ++s) {
    const double* x = a.rows.data() + static_cast<std::size_t>(s) * d;
    for (int f = 0; f < d; ++f) {
      sum_sq_a += x[f] * x[f];
      col_a[static_cast<std::size_t>(f)] += x[f];
    }
  }
  for (int t = 0; t < nb; ++t) {
    const double* y = b.rows.data() + static_cast<std::size_t>(t) * d;
    for (int f = 0; f < d; ++f) {
      sum_sq_b += y[f] * y[f];
      col_b[static_cast<std::size_t>(f)] += y[f];
    }
  }
  for (int f = 0; f < d; ++f) {
    cross += col_a[static_cast<std::size_t>(f)] * col_b[static_cast<std::size_t>(f)];
  }
  const double total = nb * sum_sq_a + na * sum_sq_b - 2.0 * cross;
  const double mean = total / (static_cast<double>(na) * static_cast<double>(nb));
  return std::sqrt(std::max(mean, 0.0));
}

double dist_hausdorff(const ClassFeatureSet& a, const ClassFeatureSet& b) {
  check_dims(a, b);
  const int na = a.count(), nb = b.count(), d = a.dim;

  // Directed distances from one pass over the squared-distance matrix:
  // row minima give h(a,b), column minima give h(b,a).
  std::vector<double> col_min(static_cast<std::size_t>(nb),
                              std::numeric_limits<double>::infinity());
  double h_ab = 0.0;
  for (int s = 0; s < na; ++s) {
    const double* x = a.rows.data() + static_cast<std::size_t>(s) * d;
    double row_min = std::numeric_limits<double>::infinity();
    for (int t = 0; t < nb; ++t) {
      const double* y = b.rows.data() + static_cast<std::size_t>(t) * d;
      const double sq = sq_dist(x, y, d);
      if (sq < row_min) row_min = sq;
      if (sq < col_min[static_cast<std::size_t>(t)]) {
        col_min[static_cast<std::size_t>(t)] = sq;
      }
    }
    if (row_min > h_ab) h_ab = row_min;
  }
  double h_ba = 0.0;
  for (int t = 0; t < nb; ++t) {
    if (col_min[static_cast<std::size_t>(t)] > h_ba) {
      h_ba = col_min[static_cast<std::size_t>(t)];
    }
  }
  return std::sqrt(std::max(h_ab, h_ba));
}

double hsic(const ClassFeatureSet& a, const ClassFeatureSet& b) {
  check_dims(a, b);
  const int qa = a.count(), qb = b.count(), d = a.dim;
  if (qa != qb) {
    throw std::invalid_argument("hsic needs equal set sizes, got " +
                                std::to_string(qa) + " and " +
                                std::to_string(qb));
  }
  const int q = qa;

  // tr(Ka H Kb H) = <H Ka H, H Kb H>_F since H is idempotent and the
  // kernels are symmetric. Double-centering K costs O(q^2) after the
  // O(q^2 d) kernel build.
  const auto kernel = [d, q](const ClassFeatureSet& s) {
    std::vector<double> k(static_cast<std::size_t>(q) * q);
    for (int i = 0; i < q; ++i) {
      const double* xi = s.rows.data() + static_cast<std::size_t>(i) * d;
      for (int j = i; j < q; ++j) {
        const double* xj = s.rows.data() + static_cast<std::size_t>(j) * d;
        double dot = 0.0;
        for (int f = 0; f < d; ++f) dot += xi[f] * xj[f];
        k[static_cast<std::size_t>(i) * q + j] = dot;
        k[static_cast<std::size_t>(j) * q + i] = dot;
      }
    }
    return k;
  };
  const auto center = [q](std::vector<double>& k) {
    std::vector<double> row_mean(static_cast<std::size_t>(q), 0.0);
    double total = 0.0;
    for (int i = 0; i < q; ++i) {
      double s = 0.0;
      for (int j = 0; j < q; ++j) s += k[static_cast<std::size_t>(i) * q + j];
      row_mean[static_cast<std::size_t>(i)] = s / q;
      total += s;
    }
    const double grand = total / (static_cast<double>(q) * q);
    for (int i = 0; i < q; ++i) {
      for (int j = 0; j < q; ++j) {
        k[static_cast<std::size_t>(i) * q + j] +=
            grand - row_mean[static_cast<std::size_t>(i)] -
            row_mean[static_cast<std::size_t>(j)];
      }
    }
  };

  auto ka = kernel(a);
  auto kb = kernel(b);
  center(ka);
  center(kb);
  double trace = 0.0;
  for (std::size_t i = 0; i < ka.size(); ++i) trace += ka[i] * kb[i];
  return trace;
}

HardnessReport task_hardness(const std::vector<ClassFeatureSet>& sets,
                             Measure measure) {
  const int n = static_cast<int>(sets.size());
  if (n < 2) throw std::invalid_argument("task hardness needs >= 2 classes");
  for (const auto& s : sets) {
    for (const double v : s.rows) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("non-finite feature in class '" +
                                    s.class_id + "'");
      }
    }
  }

  HardnessReport report;
  report.measure = measure;
  report.n = n;
  report.relations.assign(static_cast<std::size_t>(n) * n, 0.0);

  const bool is_distance = measure != Measure::kHsic;
  double best = 0.0;
  bool first = true;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double rel = 0.0;
      switch (measure) {
        case Measure::kPairwiseEuclidean:
          rel = dist_pairwise(sets[static_cast<std::size_t>(i)],
                              sets[static_cast<std::size_t>(j)]);
          break;
        case Measure::kHausdorff:
          rel = dist_hausdorff(sets[static_cast<std::size_t>(i)],
                               sets[static_cast<std::size_t>(j)]);
          break;
        case Measure::kHsic:
          rel = hsic(sets[static_cast<std::size_t>(i)],
                     sets[static_cast<std::size_t>(j)]);
          break;
      }
      report.relations[static_cast<std::size_t>(i) * n + j] = rel;
      report.relations[static_cast<std::size_t>(j) * n + i] = rel;
      const bool better = is_distance ? rel < best : rel > best;
      if (first || better) {
        best = rel;
        report.pair_a = i;
        report.pair_b = j;
        first = false;
      }
    }
  }

  report.th = is_distance ? 1.0 / std::max(best, kHardnessEpsilon)
                          : std::max(best, kHardnessEpsilon);
  return report;
}

double phase_transform(double th, Phase phase) {
  if (!(th > 0.0)) {
    throw std::invalid_argument("phase_transform needs th > 0");
  }
  return phase == Phase::kPrimary ? 1.0 / th : th;
}

std::vector<double> batch_weights(const std::vector<double>& ths, Phase phase) {
  if (ths.empty()) throw std::invalid_argument("batch_weights needs B >= 1");
  std::vector<double> weights(ths.size());
  double total = 0.0;
  for (std::size_t j = 0; j < ths.size(); ++j) {
    weights[j] = phase_transform(ths[j], phase);
    total += weights[j];
  }
  for (double& w : weights) w /= total;
  return weights;
}

}  // namespace metaet
