#pragma once

#include <span>
#include <string>
#include <vector>

#include "metaet/taxonomy.hpp"

namespace metaet {

/// Feature vectors for a batch of labeled samples, stored row-major.
/// Labels are local class indices in 0..n_classes-1.
struct LabeledBatch {
  int dim = 0;
  int n_classes = 0;
  std::vector<double> features;  // size() == labels.size() * dim
  std::vector<int> labels;

  int size() const { return static_cast<int>(labels.size()); }
  std::span<const double> row(int i) const {
    return std::span<const double>(features).subspan(
        static_cast<std::size_t>(i) * static_cast<std::size_t>(dim),
        static_cast<std::size_t>(dim));
  }
};

/// The auxiliary dataset: per class, a list of feature vectors of shared
/// dimension. Immutable after construction or load.
class DataDictionary {
 public:
  DataDictionary(int dim, std::vector<std::string> class_ids,
                 std::vector<std::vector<double>> samples);

  int dim() const { return dim_; }
  int class_count() const { return static_cast<int>(class_ids_.size()); }
  const std::vector<std::string>& class_ids() const { return class_ids_; }

  int index_of(const std::string& class_id) const;  // -1 when absent
  int sample_count(int class_index) const;
  std::span<const double> sample(int class_index, int sample_index) const;

  /// Every class of `tax` must be present here and vice versa.
  void validate_against(const Taxonomy& tax) const;

  std::string to_csv() const;

 private:
  int dim_;
  std::vector<std::string> class_ids_;            // insertion order
  std::vector<std::string> sorted_ids_;           // for lookup
  std::vector<int> sorted_to_index_;
  std::vector<std::vector<double>> samples_;      // flat per class
};

/// Parses the dataset CSV format: header `dim,<d>`, then one
/// `<class-id>,<f1>,...,<fd>` row per sample.
DataDictionary parse_dataset(const std::string& text);

DataDictionary load_dataset(const std::string& path);

void save_dataset(const DataDictionary& data, const std::string& path);
void save_taxonomy(const Taxonomy& tax, const std::string& path);

}  // namespace metaet
