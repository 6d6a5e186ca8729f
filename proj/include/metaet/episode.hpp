#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metaet/dataset.hpp"
#include "metaet/rng.hpp"

namespace metaet {

/// One N-way K-shot Q-query task. Local labels are the positions of the
/// (sorted) class ids; support and query rows are disjoint per class.
struct Episode {
  std::int64_t task_index = 0;
  std::vector<std::string> class_ids;  // sorted; label i <-> class_ids[i]
  LabeledBatch support;                // N*K rows
  LabeledBatch query;                  // N*Q rows
};

/// Random stream for task `task_index`, a pure function of the pair.
Rng derive_task_rng(std::uint64_t master_seed, std::int64_t task_index);

/// Builds an episode over the given classes: per class, shuffle its samples
/// and take the first k as support and the next q as query.
Episode build_episode(const DataDictionary& data,
                      const std::vector<std::string>& classes, int k, int q,
                      Rng& rng);

/// n classes uniformly without replacement, then build_episode.
Episode random_episode(const DataDictionary& data, int n, int k, int q,
                       Rng& rng);

}  // namespace metaet
