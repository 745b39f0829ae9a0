#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fastimpute/completion.hpp"

namespace fastimpute {

// Column partition for the identity-feature specialization: contiguous
// ranges of at most `block_size` columns; all but the last have exactly
// that length.
struct BlockPlan {
  std::int64_t block_size = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges;  // [begin, end)
};

BlockPlan plan_blocks(std::int64_t m, std::int64_t ell);

// Seed used for block `index` of a run with master seed `seed`; exposed
// so block solutions can be reproduced in isolation.
std::uint64_t block_seed(std::uint64_t seed, std::int64_t index);

// Identity features couple no columns, so each block is solved as an
// independent completion problem and slotted back into place. Operates
// on the transpose when n < m (overridable). Per-block seeds derive from
// (seed, block index), so the block order cannot affect any output.
CompletionReport complete_blocked(const ObservedMatrix& obs, std::int64_t k,
                                  const DescentConfig& config,
                                  const PipelineOptions& options,
                                  std::uint64_t seed);

}  // namespace fastimpute
