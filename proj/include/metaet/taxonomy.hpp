#pragma once

#include <string>
#include <vector>

#include "metaet/rng.hpp"

namespace metaet {

/// One superclass and the classes grouped under it, in file order.
struct Superclass {
  std::string id;
  std::vector<std::string> classes;
};

/// Tree-shaped label hierarchy, flattened to one superclass level.
/// Immutable after parse; every class id belongs to exactly one superclass.
class Taxonomy {
 public:
  explicit Taxonomy(std::vector<Superclass> superclasses);

  int superclass_count() const { return static_cast<int>(superclasses_.size()); }
  int class_count() const { return class_count_; }
  const std::vector<Superclass>& superclasses() const { return superclasses_; }

  /// Index of the superclass that owns a class id, or -1 if unknown.
  int owner_of(const std::string& class_id) const;

  std::string to_text() const;

 private:
  std::vector<Superclass> superclasses_;
  std::vector<std::string> owner_class_ids_;  // sorted, parallel to owner_index_
  std::vector<int> owner_index_;
  int class_count_ = 0;
};

/// Parses the taxonomy file format: one `<superclass>\t<class>` record per
/// line, `#` comments and blank lines ignored. Superclass order is first
/// appearance; classes keep file order within their superclass.
Taxonomy parse_taxonomy(const std::string& text);

Taxonomy load_taxonomy(const std::string& path);

/// Easy-task category selection: n distinct superclasses drawn uniformly
/// without replacement, then one class uniformly from each.
std::vector<std::string> sample_easy_classes(const Taxonomy& tax, int n,
                                             Rng& rng);

/// Hard-task category selection: shuffle the superclasses, seed the
/// candidate pool with the first one and keep extending with the next
/// shuffled superclass only while the pool is still smaller than n, then
/// draw n classes uniformly without replacement from the pool.
std::vector<std::string> sample_hard_classes(const Taxonomy& tax, int n,
                                             Rng& rng);

}  // namespace metaet
