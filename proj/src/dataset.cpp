#include "metaet/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "metaet/errors.hpp"
#include "metaet/util.hpp"

namespace metaet {

DataDictionary::DataDictionary(int dim, std::vector<std::string> class_ids,
                               std::vector<std::vector<double>> samples)
    : dim_(dim),
      class_ids_(std::move(class_ids)),
      samples_(std::move(samples)) {
  if (dim_ < 1) throw std::invalid_argument("dataset dimension must be >= 1");
  if (class_ids_.empty()) throw FormatError("dataset has no classes");
  if (class_ids_.size() != samples_.size()) {
    throw std::invalid_argument("class id / sample list size mismatch");
  }
  for (std::size_t c = 0; c < samples_.size(); ++c) {
    if (samples_[c].empty() || samples_[c].size() % static_cast<std::size_t>(dim_) != 0) {
      throw std::invalid_argument("class '" + class_ids_[c] +
                                  "' has no samples or a ragged sample list");
    }
  }
  std::vector<std::pair<std::string, int>> order;
  order.reserve(class_ids_.size());
  for (std::size_t i = 0; i < class_ids_.size(); ++i) {
    order.emplace_back(class_ids_[i], static_cast<int>(i));
  }
  std::sort(order.begin(), order.end());
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i].first == order[i - 1].first) {
      throw std::invalid_argument("duplicate class id '" + order[i].first + "'");
    }
  }
  for (auto& [id, idx] : order) {
    sorted_ids_.push_back(std::move(id));
    sorted_to_index_.push_back(idx);
  }
}

int DataDictionary::index_of(const std::string& class_id) const {
  const auto it =
      std::lower_bound(sorted_ids_.begin(), sorted_ids_.end(), class_id);
  if (it == sorted_ids_.end() || *it != class_id) return -1;
  return sorted_to_index_[static_cast<std::size_t>(it - sorted_ids_.begin())];
}

int DataDictionary::sample_count(int class_index) const {
  return static_cast<int>(samples_[static_cast<std::size_t>(class_index)].size() /
                          static_cast<std::size_t>(dim_));
}

std::span<const double> DataDictionary::sample(int class_index,
                                               int sample_index) const {
  const auto& flat = samples_[static_cast<std::size_t>(class_index)];
  return std::span<const double>(flat).subspan(
      static_cast<std::size_t>(sample_index) * static_cast<std::size_t>(dim_),
      static_cast<std::size_t>(dim_));
}

void DataDictionary::validate_against(const Taxonomy& tax) const {
  for (const auto& id : class_ids_) {
    if (tax.owner_of(id) < 0) {
      throw ConfigError("dataset class '" + id + "' is missing from the taxonomy");
    }
  }
  for (const auto& sup : tax.superclasses()) {
    for (const auto& id : sup.classes) {
      if (index_of(id) < 0) {
        throw ConfigError("taxonomy class '" + id + "' is missing from the dataset");
      }
    }
  }
}

std::string DataDictionary::to_csv() const {
  std::string out = "dim," + std::to_string(dim_) + "\n";
  for (std::size_t c = 0; c < class_ids_.size(); ++c) {
    const int count = sample_count(static_cast<int>(c));
    for (int s = 0; s < count; ++s) {
      out += class_ids_[c];
      const auto row = sample(static_cast<int>(c), s);
      for (const double v : row) {
        out += ',';
        out += format_double(v);
      }
      out += '\n';
    }
  }
  return out;
}

DataDictionary parse_dataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_number = 0;

  int dim = -1;
  std::vector<std::string> class_ids;
  std::vector<std::vector<double>> samples;
  std::unordered_map<std::string, std::size_t> index;

  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    const auto fields = split(line, ',');
    if (dim < 0) {
      if (fields.size() != 2 || fields[0] != "dim") {
        throw FormatError("line " + std::to_string(line_number) +
                          ": expected header 'dim,<d>'");
      }
      dim = static_cast<int>(parse_integer(fields[1], line_number));
      if (dim < 1) {
        throw FormatError("line " + std::to_string(line_number) +
                          ": dimension must be >= 1");
      }
      continue;
    }
    if (fields.size() != static_cast<std::size_t>(dim) + 1 || fields[0].empty()) {
      throw FormatError("line " + std::to_string(line_number) + ": expected '" +
                        "<class-id>," + std::to_string(dim) + " features'");
    }
    const std::string id(fields[0]);
    auto it = index.find(id);
    if (it == index.end()) {
      it = index.emplace(id, class_ids.size()).first;
      class_ids.push_back(id);
      samples.emplace_back();
    }
    auto& flat = samples[it->second];
    for (std::size_t f = 1; f < fields.size(); ++f) {
      flat.push_back(parse_double(fields[f], line_number));
    }
  }
  if (dim < 0) throw FormatError("dataset file is empty");
  if (class_ids.empty()) throw FormatError("dataset has no sample rows");
  return DataDictionary(dim, std::move(class_ids), std::move(samples));
}

DataDictionary load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open dataset file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

void save_dataset(const DataDictionary& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write dataset file: " + path);
  out << data.to_csv();
}

void save_taxonomy(const Taxonomy& tax, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write taxonomy file: " + path);
  out << tax.to_text();
}

}  // namespace metaet
