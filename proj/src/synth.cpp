#include "metaet/synth.hpp"

#include <cstdio>
#include <string>

#include "metaet/errors.hpp"
#include "metaet/rng.hpp"

namespace metaet {

namespace {

std::string padded(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%02d", prefix, i);
  return buf;
}

}  // namespace

void SynthSpec::validate() const {
  if (superclasses < 1 || classes_per_super < 1 || samples_per_class < 1 ||
      dim < 1) {
    throw ConfigError("synth spec counts must be >= 1");
  }
  if (sigma_super < 0.0 || sigma_class < 0.0 || sigma_noise < 0.0) {
    throw ConfigError("synth spec sigmas must be >= 0");
  }
}

std::pair<DataDictionary, Taxonomy> generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng = Rng::keyed(spec.seed, 0x5F3E6A2C9D18B407ULL);

  std::vector<Superclass> sups;
  std::vector<std::string> class_ids;
  std::vector<std::vector<double>> samples;
  std::vector<double> sup_mean(static_cast<std::size_t>(spec.dim));
  std::vector<double> cls_mean(static_cast<std::size_t>(spec.dim));

  for (int s = 0; s < spec.superclasses; ++s) {
    Superclass sup;
    sup.id = padded("sup", s);
    for (int f = 0; f < spec.dim; ++f) {
      sup_mean[static_cast<std::size_t>(f)] = spec.sigma_super * rng.next_normal();
    }
    for (int c = 0; c < spec.classes_per_super; ++c) {
      const std::string class_id = sup.id + "_" + padded("cls", c);
      sup.classes.push_back(class_id);
      class_ids.push_back(class_id);
      for (int f = 0; f < spec.dim; ++f) {
        cls_mean[static_cast<std::size_t>(f)] =
            sup_mean[static_cast<std::size_t>(f)] +
            spec.sigma_class * rng.next_normal();
      }
      std::vector<double> flat;
      flat.reserve(static_cast<std::size_t>(spec.samples_per_class * spec.dim));
      for (int i = 0; i < spec.samples_per_class; ++i) {
        for (int f = 0; f < spec.dim; ++f) {
          flat.push_back(cls_mean[static_cast<std::size_t>(f)] +
                         spec.sigma_noise * rng.next_normal());
        }
      }
      samples.push_back(std::move(flat));
    }
    sups.push_back(std::move(sup));
  }

  return {DataDictionary(spec.dim, std::move(class_ids), std::move(samples)),
          Taxonomy(std::move(sups))};
}

SplitDataset split_by_superclass(const DataDictionary& data,
                                 const Taxonomy& tax, int train_superclasses) {
  const int L = tax.superclass_count();
  if (train_superclasses < 1 || train_superclasses >= L) {
    throw ConfigError("train split must keep between 1 and L-1 superclasses");
  }

  const auto take = [&](int from, int to) {
    std::vector<Superclass> sups(tax.superclasses().begin() + from,
                                 tax.superclasses().begin() + to);
    std::vector<std::string> ids;
    std::vector<std::vector<double>> samples;
    for (const auto& sup : sups) {
      for (const auto& id : sup.classes) {
        const int c = data.index_of(id);
        if (c < 0) throw ConfigError("taxonomy class '" + id + "' not in dataset");
        ids.push_back(id);
        std::vector<double> flat;
        const int count = data.sample_count(c);
        flat.reserve(static_cast<std::size_t>(count * data.dim()));
        for (int i = 0; i < count; ++i) {
          const auto row = data.sample(c, i);
          flat.insert(flat.end(), row.begin(), row.end());
        }
        samples.push_back(std::move(flat));
      }
    }
    return std::pair<DataDictionary, Taxonomy>(
        DataDictionary(data.dim(), std::move(ids), std::move(samples)),
        Taxonomy(std::move(sups)));
  };

  auto [train_data, train_tax] = take(0, train_superclasses);
  auto [test_data, test_tax] = take(train_superclasses, L);
  return SplitDataset{std::move(train_data), std::move(train_tax),
                      std::move(test_data), std::move(test_tax)};
}

}  // namespace metaet
