#include "metaet/taxonomy.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "metaet/errors.hpp"

namespace metaet {

Taxonomy::Taxonomy(std::vector<Superclass> superclasses)
    : superclasses_(std::move(superclasses)) {
  std::vector<std::pair<std::string, int>> owners;
  for (std::size_t s = 0; s < superclasses_.size(); ++s) {
    if (superclasses_[s].classes.empty()) {
      throw FormatError("superclass '" + superclasses_[s].id +
                        "' has no classes");
    }
    for (const auto& c : superclasses_[s].classes) {
      owners.emplace_back(c, static_cast<int>(s));
    }
  }
  std::sort(owners.begin(), owners.end());
  owner_class_ids_.reserve(owners.size());
  owner_index_.reserve(owners.size());
  for (auto& [c, s] : owners) {
    owner_class_ids_.push_back(std::move(c));
    owner_index_.push_back(s);
  }
  class_count_ = static_cast<int>(owner_class_ids_.size());
}

int Taxonomy::owner_of(const std::string& class_id) const {
  const auto it = std::lower_bound(owner_class_ids_.begin(),
                                   owner_class_ids_.end(), class_id);
  if (it == owner_class_ids_.end() || *it != class_id) return -1;
  return owner_index_[static_cast<std::size_t>(it - owner_class_ids_.begin())];
}

std::string Taxonomy::to_text() const {
  std::string out;
  for (const auto& sup : superclasses_) {
    for (const auto& c : sup.classes) {
      out += sup.id;
      out += '\t';
      out += c;
      out += '\n';
    }
  }
  return out;
}

Taxonomy parse_taxonomy(const std::string& text) {
  std::vector<Superclass> sups;
  std::unordered_map<std::string, std::size_t> sup_index;
  std::unordered_map<std::string, int> class_line;  // class id -> first line

  std::istringstream in(text);
  std::string line;
  int line_number = 0;
  int records = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw FormatError("line " + std::to_string(line_number) +
                        ": expected '<superclass>\\t<class>'");
    }
    std::string sup_id = line.substr(0, tab);
    std::string class_id = line.substr(tab + 1);
    if (sup_id.empty() || class_id.empty()) {
      throw FormatError("line " + std::to_string(line_number) +
                        ": empty superclass or class id");
    }
    if (const auto it = class_line.find(class_id); it != class_line.end()) {
      throw FormatError("line " + std::to_string(line_number) +
                        ": duplicate class id '" + class_id +
                        "' (first seen on line " + std::to_string(it->second) +
                        ")");
    }
    class_line.emplace(class_id, line_number);

    const auto it = sup_index.find(sup_id);
    if (it == sup_index.end()) {
      sup_index.emplace(sup_id, sups.size());
      sups.push_back(Superclass{std::move(sup_id), {std::move(class_id)}});
    } else {
      sups[it->second].classes.push_back(std::move(class_id));
    }
    ++records;
  }
  if (records == 0) {
    throw FormatError("taxonomy file contains no records");
  }
  return Taxonomy(std::move(sups));
}

Taxonomy load_taxonomy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open taxonomy file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_taxonomy(buf.str());
}

std::vector<std::string> sample_easy_classes(const Taxonomy& tax, int n,
                                             Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_easy_classes: n must be >= 1");
  const int L = tax.superclass_count();
  if (n > L) {
    throw std::invalid_argument(
        "sample_easy_classes: " + std::to_string(n) +
        " ways but only " + std::to_string(L) + " superclasses");
  }
  const auto picked = rng.sample_indices(L, n);
  std::vector<std::string> classes;
  classes.reserve(static_cast<std::size_t>(n));
  for (const int s : picked) {
    const auto& members = tax.superclasses()[static_cast<std::size_t>(s)].classes;
    classes.push_back(members[rng.next_below(members.size())]);
  }
  return classes;
}

std::vector<std::string> sample_hard_classes(const Taxonomy& tax, int n,
                                             Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_hard_classes: n must be >= 1");
  if (n > tax.class_count()) {
    throw std::invalid_argument(
        "sample_hard_classes: " + std::to_string(n) + " ways but only " +
        std::to_string(tax.class_count()) + " classes");
  }
  std::vector<int> order(static_cast<std::size_t>(tax.superclass_count()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  rng.shuffle(order);

  // Pool the first shuffled superclass, widening only while it is too small.
  std::vector<std::string> candidate;
  std::size_t k = 0;
  candidate = tax.superclasses()[static_cast<std::size_t>(order[k])].classes;
  ++k;
  while (static_cast<int>(candidate.size()) < n) {
    const auto& next = tax.superclasses()[static_cast<std::size_t>(order[k])].classes;
    candidate.insert(candidate.end(), next.begin(), next.end());
    ++k;
  }

  const auto picked = rng.sample_indices(static_cast<int>(candidate.size()), n);
  std::vector<std::string> classes;
  classes.reserve(static_cast<std::size_t>(n));
  for (const int i : picked) {
    classes.push_back(candidate[static_cast<std::size_t>(i)]);
  }
  return classes;
}

}  // namespace metaet
