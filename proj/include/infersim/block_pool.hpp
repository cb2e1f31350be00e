/* Copyright 2026 The infersim Authors.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <cstdint>
#include <map>

namespace infersim {

struct SeqAllocation {
  std::int64_t tokens_held = 0;
  std::int64_t blocks_held = 0;
};

/// Paged KV block pool for one DP replica. Every allocation covers
/// ceil(tokens / block_size) blocks; free + allocated == total at all times.
/// Capacity is the only constraint: the paged design has no contiguity
/// requirement, so a request admits iff its block count fits.
class BlockPool {
 public:
  BlockPool(std::int64_t total_blocks, std::int64_t block_size);

  /// Pool backed by `headroom` bytes of HBM at a given per-token KV cost.
  /// total_blocks = floor(headroom / (kv_bytes_per_token * block_size)).
  static BlockPool with_headroom(double headroom_bytes,
                                 std::int64_t kv_bytes_per_token,
                                 std::int64_t block_size);

  /// Reserves blocks for a new request. Returns false (pool untouched) when
  /// not enough free blocks. Duplicate ids are a contract violation.
  bool try_allocate(std::int64_t request_id, std::int64_t tokens);

  /// Grows an existing allocation to `new_total_tokens`, reserving only the
  /// marginal blocks. Returns false with the pool unchanged on exhaustion;
  /// the caller is expected to preempt. Shrinking is a contract violation.
  bool extend(std::int64_t request_id, std::int64_t new_total_tokens);

  /// Returns all blocks of a request to the pool; yields the count released.
  std::int64_t release(std::int64_t request_id);

  /// (total - free) / total; 0 for a zero-block pool.
  double utilization() const;
  /// High-water mark of utilization() over the pool's lifetime.
  double peak_utilization() const { return peak_utilization_; }

  std::int64_t total_blocks() const { return total_blocks_; }
  std::int64_t free_blocks() const { return free_blocks_; }
  std::int64_t block_size() const { return block_size_; }
  std::int64_t num_allocations() const {
    return static_cast<std::int64_t>(allocations_.size());
  }

  bool holds(std::int64_t request_id) const;
  std::int64_t tokens_held(std::int64_t request_id) const;
  std::int64_t blocks_held(std::int64_t request_id) const;

  /// Largest token extension currently possible for this request
  /// (intra-block slack plus whole free blocks).
  std::int64_t max_extend_tokens(std::int64_t request_id) const;
  /// Largest fresh allocation currently possible.
  std::int64_t max_admit_tokens() const { return free_blocks_ * block_size_; }

  /// Verifies the conservation invariant; throws std::logic_error on breach.
  void check_conservation() const;

 private:
  std::int64_t blocks_for(std::int64_t tokens) const;
  void note_usage();

  std::int64_t block_size_;
  std::int64_t total_blocks_;
  std::int64_t free_blocks_;
  double peak_utilization_ = 0.0;
  std::map<std::int64_t, SeqAllocation> allocations_;
};

}  // namespace infersim
