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
#include "infersim/block_pool.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace infersim {

BlockPool::BlockPool(std::int64_t total_blocks, std::int64_t block_size)
    : block_size_(block_size),
      total_blocks_(total_blocks),
      free_blocks_(total_blocks) {
  if (block_size <= 0)
    throw std::invalid_argument("block_size must be positive");
  if (total_blocks < 0)
    throw std::invalid_argument("total_blocks must be non-negative");
}

BlockPool BlockPool::with_headroom(double headroom_bytes,
                                   std::int64_t kv_bytes_per_token,
                                   std::int64_t block_size) {
  if (kv_bytes_per_token <= 0)
    throw std::invalid_argument("kv_bytes_per_token must be positive");
  const double block_bytes =
      static_cast<double>(kv_bytes_per_token) * static_cast<double>(block_size);
  const double blocks = std::floor(std::max(0.0, headroom_bytes) / block_bytes);
  return BlockPool(static_cast<std::int64_t>(blocks), block_size);
}

std::int64_t BlockPool::blocks_for(std::int64_t tokens) const {
  return (tokens + block_size_ - 1) / block_size_;
}

void BlockPool::note_usage() {
  const double util = utilization();
  if (util > peak_utilization_) peak_utilization_ = util;
}

bool BlockPool::try_allocate(std::int64_t request_id, std::int64_t tokens) {
  if (tokens < 0) throw std::invalid_argument("tokens must be >= 0");
  if (allocations_.count(request_id))
    throw std::invalid_argument("request " + std::to_string(request_id) +
                                " already holds an allocation");
  const std::int64_t need = blocks_for(tokens);
  if (need > free_blocks_) return false;
  allocations_[request_id] = SeqAllocation{tokens, need};
  free_blocks_ -= need;
  note_usage();
  return true;
}

bool BlockPool::extend(std::int64_t request_id,
                       std::int64_t new_total_tokens) {
  auto it = allocations_.find(request_id);
  if (it == allocations_.end())
    throw std::invalid_argument("unknown request " +
                                std::to_string(request_id));
  SeqAllocation& alloc = it->second;
  if (new_total_tokens < alloc.tokens_held)
    throw std::invalid_argument("extend cannot shrink an allocation");
  const std::int64_t need = blocks_for(new_total_tokens) - alloc.blocks_held;
  if (need > free_blocks_) return false;
  alloc.tokens_held = new_total_tokens;
  alloc.blocks_held += need;
  free_blocks_ -= need;
  note_usage();
  return true;
}

std::int64_t BlockPool::release(std::int64_t request_id) {
  auto it = allocations_.find(request_id);
  if (it == allocations_.end())
    throw std::invalid_argument("unknown request " +
                                std::to_string(request_id));
  const std::int64_t released = it->second.blocks_held;
  free_blocks_ += released;
  allocations_.erase(it);
  return released;
}

double BlockPool::utilization() const {
  if (total_blocks_ == 0) return 0.0;
  return static_cast<double>(total_blocks_ - free_blocks_) /
         static_cast<double>(total_blocks_);
}

bool BlockPool::holds(std::int64_t request_id) const {
  return allocations_.count(request_id) > 0;
}

std::int64_t BlockPool::tokens_held(std::int64_t request_id) const {
  auto it = allocations_.find(request_id);
  return it == allocations_.end() ? 0 : it->second.tokens_held;
}

std::int64_t BlockPool::blocks_held(std::int64_t request_id) const {
  auto it = allocations_.find(request_id);
  return it == allocations_.end() ? 0 : it->second.blocks_held;
}

std::int64_t BlockPool::max_extend_tokens(std::int64_t request_id) const {
  auto it = allocations_.find(request_id);
  if (it == allocations_.end())
    throw std::invalid_argument("unknown request " +
                                std::to_string(request_id));
  const SeqAllocation& alloc = it->second;
  const std::int64_t slack =
      alloc.blocks_held * block_size_ - alloc.tokens_held;
  return slack + free_blocks_ * block_size_;
}

void BlockPool::check_conservation() const {
  std::int64_t held = 0;
  for (const auto& [id, alloc] : allocations_) {
    held += alloc.blocks_held;
    if (alloc.blocks_held != blocks_for(alloc.tokens_held))
      throw std::logic_error("allocation " + std::to_string(id) +
                             " violates blocks = ceil(tokens/block_size)");
  }
  if (held + free_blocks_ != total_blocks_)
    throw std::logic_error("block conservation violated: " +
                           std::to_string(held) + " held + " +
                           std::to_string(free_blocks_) +
                           " free != " + std::to_string(total_blocks_));
}

}  // namespace infersim
