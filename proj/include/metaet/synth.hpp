#pragma once

#include <cstdint>
#include <utility>

#include "metaet/dataset.hpp"
#include "metaet/taxonomy.hpp"

namespace metaet {

/// Planted two-level Gaussian hierarchy. With sigma_cls < sigma_sup,
/// classes sharing a superclass sit closer together than classes from
/// different superclasses, so semantically hard tasks are geometrically
/// hard too.
struct SynthSpec {
  int superclasses = 12;       // L
  int classes_per_super = 5;
  int samples_per_class = 50;
  int dim = 16;
  double sigma_super = 3.0;    // spread of superclass means
  double sigma_class = 1.0;    // spread of class means inside a superclass
  double sigma_noise = 0.5;    // per-sample noise
  std::uint64_t seed = 0;

  void validate() const;
};

/// Superclass means ~ N(0, sigma_super^2 I); class means offset by
/// N(0, sigma_class^2 I); samples offset by N(0, sigma_noise^2 I).
std::pair<DataDictionary, Taxonomy> generate(const SynthSpec& spec);

/// Splits by superclass: the first `train_superclasses` go to the train
/// side, the rest to the test side, mirroring a disjoint train/test class
/// discipline.
struct SplitDataset {
  DataDictionary train_data;
  Taxonomy train_tax;
  DataDictionary test_data;
  Taxonomy test_tax;
};

SplitDataset split_by_superclass(const DataDictionary& data,
                                 const Taxonomy& tax, int train_superclasses);

}  // namespace metaet
