#include "metaet/episode.hpp"

#include <algorithm>
#include <stdexcept>

namespace metaet {

Rng derive_task_rng(std::uint64_t master_seed, std::int64_t task_index) {
  return Rng::keyed(master_seed, static_cast<std::uint64_t>(task_index));
}

Episode build_episode(const DataDictionary& data,
                      const std::vector<std::string>& classes, int k, int q,
                      Rng& rng) {
  if (classes.size() < 2) {
    throw std::invalid_argument("an episode needs at least 2 classes");
  }
  if (k < 1 || q < 1) {
    throw std::invalid_argument("episode needs k >= 1 and q >= 1");
  }

  Episode ep;
  ep.class_ids = classes;
  std::sort(ep.class_ids.begin(), ep.class_ids.end());

  const int n = static_cast<int>(ep.class_ids.size());
  const int d = data.dim();
  ep.support.dim = d;
  ep.support.n_classes = n;
  ep.query.dim = d;
  ep.query.n_classes = n;
  ep.support.features.reserve(static_cast<std::size_t>(n * k * d));
  ep.query.features.reserve(static_cast<std::size_t>(n * q * d));

  for (int label = 0; label < n; ++label) {
    const std::string& id = ep.class_ids[static_cast<std::size_t>(label)];
    const int c = data.index_of(id);
    if (c < 0) {
      throw std::invalid_argument("class '" + id + "' is not in the dataset");
    }
    const int count = data.sample_count(c);
    if (count < k + q) {
      throw std::invalid_argument(
          "class '" + id + "' has " + std::to_string(count) +
          " samples, needs " + std::to_string(k + q));
    }
    std::vector<int> order(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) order[static_cast<std::size_t>(i)] = i;
    rng.shuffle(order);

    for (int i = 0; i < k; ++i) {
      const auto row = data.sample(c, order[static_cast<std::size_t>(i)]);
      ep.support.features.insert(ep.support.features.end(), row.begin(), row.end());
      ep.support.labels.push_back(label);
    }
    for (int i = k; i < k + q; ++i) {
      const auto row = data.sample(c, order[static_cast<std::size_t>(i)]);
      ep.query.features.insert(ep.query.features.end(), row.begin(), row.end());
      ep.query.labels.push_back(label);
    }
  }
  return ep;
}

Episode random_episode(const DataDictionary& data, int n, int k, int q,
                       Rng& rng) {
  if (n > data.class_count()) {
    throw std::invalid_argument("requested " + std::to_string(n) +
                                " classes, dataset has " +
                                std::to_string(data.class_count()));
  }
  const auto picked = rng.sample_indices(data.class_count(), n);
  std::vector<std::string> classes;
  classes.reserve(static_cast<std::size_t>(n));
  for (const int c : picked) {
    classes.push_back(data.class_ids()[static_cast<std::size_t>(c)]);
  }
  return build_episode(data, classes, k, q, rng);
}

}  // namespace metaet
