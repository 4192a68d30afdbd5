// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "jsplit/csr.hpp"
#include "jsplit/error.hpp"

namespace jsplit {

struct FabricOptions {
  /// A recv that waits longer than this is reported as a deadlock.
  std::chrono::duration<double> recv_timeout{30.0};

  /// Defaults, with the timeout overridden by JACOBI_SPLIT_TIMEOUT_S if set.
  static FabricOptions from_env() {
    FabricOptions o;
    if (const char* s = std::getenv("JACOBI_SPLIT_TIMEOUT_S")) {
      char* end = nullptr;
      const double v = std::strtod(s, &end);
      if (end == s || *end != '\0' || !(v > 0.0)) {
        throw Error("JACOBI_SPLIT_TIMEOUT_S must be a positive number of seconds, got '" +
                    std::string(s) + "'");
      }
      o.recv_timeout = std::chrono::duration<double>(v);
    }
    return o;
  }
};

/// A worker raised; the message names the rank.
class WorldError : public Error {
public:
  WorldError(int rank, const std::string& what)
      : Error("rank " + std::to_string(rank) + ": " + what), rank_(rank) {}
  int rank() const noexcept { return rank_; }

private:
  int rank_;
};

/// Thrown into blocked ranks once another rank has failed.
class WorldAborted : public FabricError {
public:
  WorldAborted() : FabricError("world aborted by a failing rank") {}
};

/// Tags at or above this value are reserved for collectives.
inline constexpr int kReservedTagBase = 1 << 24;

struct ChannelKey {
  int from;
  int to;
  int tag;
  friend auto operator<=>(const ChannelKey&, const ChannelKey&) = default;
};

/// Per-channel message counts gathered over a world's lifetime.
struct TrafficStats {
  std::map<ChannelKey, std::uint64_t> sent;
  std::map<ChannelKey, std::uint64_t> received;
};

class World;

/// One rank's handle on the fabric. Sends are buffered and never block;
/// receives block until the matching message arrives. Messages on a given
/// (sender, receiver, tag) channel are delivered in FIFO order.
class RankEndpoint {
public:
  int rank() const noexcept { return rank_; }
  int size() const noexcept;

  void send(int to, int tag, std::vector<double> payload) { post(to, tag, std::move(payload), true); }

  std::vector<double> recv(int from, int tag) { return take(from, tag); }

  /// recv that also checks the payload length.
  std::vector<double> recv(int from, int tag, std::size_t expected) {
    auto v = take(from, tag);
    if (v.size() != expected) {
      throw FabricError("rank " + std::to_string(rank_) + " expected " + std::to_string(expected) +
                        " values from rank " + std::to_string(from) + " (tag " +
                        std::to_string(tag) + "), got " + std::to_string(v.size()));
    }
    return v;
  }

  /// Seconds spent inside fabric calls.
  double comm_time() const noexcept { return comm_time_; }

  /// Point-to-point payload bytes sent by this rank (8 per value). Reductions
  /// are not counted.
  std::uint64_t bytes_sent() const noexcept { return bytes_sent_; }

  // Used by collectives.
  void post_uncounted(int to, int tag, std::vector<double> payload) {
    post(to, tag, std::move(payload), false);
  }
  int next_collective_tag() { return kReservedTagBase + static_cast<int>(collective_seq_++ % (1u << 20)); }

private:
  friend class World;
  RankEndpoint(World* world, int rank) : world_(world), rank_(rank) {}

  void post(int to, int tag, std::vector<double> payload, bool counted);
  std::vector<double> take(int from, int tag);

  World* world_;
  int rank_;
  double comm_time_ = 0.0;
  std::uint64_t bytes_sent_ = 0;
  std::uint64_t collective_seq_ = 0;
};

/// p workers, one per rank, connected all-to-all.
class World {
public:
  explicit World(int size, FabricOptions options = {}) : size_(size), options_(options) {
    if (size < 1) throw FabricError("world size must be at least 1");
    for (int r = 0; r < size; ++r) boxes_.push_back(std::make_unique<Mailbox>());
  }

  int size() const noexcept { return size_; }

  /// Runs `program(endpoint)` on every rank concurrently and returns the
  /// per-rank results. If any rank throws, the others are released and the
  /// first failure is rethrown as WorldError after all workers have joined.
  template <class Program>
  auto run(Program&& program) {
    using R = std::invoke_result_t<Program&, RankEndpoint&>;
    static_assert(!std::is_void_v<R>, "rank programs must return a value");
    std::vector<std::optional<R>> results(static_cast<std::size_t>(size_));
    std::mutex fail_mutex;
    std::optional<std::pair<int, std::string>> failure;

    auto body = [&](int r) {
      RankEndpoint ep(this, r);
      try {
        results[static_cast<std::size_t>(r)].emplace(program(ep));
      } catch (const WorldAborted&) {
        // secondary; the primary failure is already recorded
      } catch (const std::exception& e) {
        {
          std::lock_guard lock(fail_mutex);
          if (!failure) failure.emplace(r, e.what());
        }
        abort();
      } catch (...) {
        {
          std::lock_guard lock(fail_mutex);
          if (!failure) failure.emplace(r, "unknown exception");
        }
        abort();
      }
    };

    if (size_ == 1) {
      body(0);
    } else {
      std::vector<std::jthread> workers;
      workers.reserve(static_cast<std::size_t>(size_));
      for (int r = 0; r < size_; ++r) workers.emplace_back(body, r);
    }
    if (failure) throw WorldError(failure->first, failure->second);

    std::vector<R> out;
    out.reserve(results.size());
    for (auto& r : results) out.push_back(std::move(*r));
    return out;
  }

  TrafficStats traffic() const {
    TrafficStats t;
    for (int to = 0; to < size_; ++to) {
      auto& box = *boxes_[static_cast<std::size_t>(to)];
      std::lock_guard lock(box.mutex);
      for (const auto& [key, n] : box.sent) t.sent[{key.first, to, key.second}] = n;
      for (const auto& [key, n] : box.received) t.received[{key.first, to, key.second}] = n;
    }
    return t;
  }

  /// Messages posted but never received.
  std::size_t undelivered() const {
    std::size_t n = 0;
    for (const auto& box : boxes_) {
      std::lock_guard lock(box->mutex);
      for (const auto& [key, q] : box->queues) n += q.size();
    }
    return n;
  }

private:
  friend class RankEndpoint;
  using Key = std::pair<int, int>;  // (from, tag)

  struct Mailbox {
    mutable std::mutex mutex;
    std::condition_variable arrived;
    std::map<Key, std::deque<std::vector<double>>> queues;
    std::map<Key, std::uint64_t> sent;
    std::map<Key, std::uint64_t> received;
  };

  void abort() {
    aborted_.store(true);
    for (auto& box : boxes_) {
      std::lock_guard lock(box->mutex);
      box->arrived.notify_all();
    }
  }

  void deliver(int from, int to, int tag, std::vector<double> payload) {
    if (to < 0 || to >= size_ || to == from) {
      throw FabricError("rank " + std::to_string(from) + " cannot send to rank " +
                        std::to_string(to));
    }
    auto& box = *boxes_[static_cast<std::size_t>(to)];
    {
      std::lock_guard lock(box.mutex);
      box.queues[{from, tag}].push_back(std::move(payload));
      ++box.sent[{from, tag}];
    }
    box.arrived.notify_all();
  }

  std::vector<double> collect(int to, int from, int tag) {
    if (from < 0 || from >= size_ || from == to) {
      throw FabricError("rank " + std::to_string(to) + " cannot receive from rank " +
                        std::to_string(from));
    }
    auto& box = *boxes_[static_cast<std::size_t>(to)];
    std::unique_lock lock(box.mutex);
    const Key key{from, tag};
    auto ready = [&] {
      if (aborted_.load()) return true;
      auto it = box.queues.find(key);
      return it != box.queues.end() && !it->second.empty();
    };
    if (!box.arrived.wait_for(lock, options_.recv_timeout, ready)) {
      throw FabricError("deadlock: rank " + std::to_string(to) + " waited on rank " +
                        std::to_string(from) + " for tag " + std::to_string(tag));
    }
    if (aborted_.load()) throw WorldAborted();
    auto& q = box.queues[key];
    auto msg = std::move(q.front());
    q.pop_front();
    ++box.received[key];
    return msg;
  }

  int size_;
  FabricOptions options_;
  std::vector<std::unique_ptr<Mailbox>> boxes_;
  std::atomic<bool> aborted_{false};
};

inline int RankEndpoint::size() const noexcept { return world_->size(); }

inline void RankEndpoint::post(int to, int tag, std::vector<double> payload, bool counted) {
  const auto start = std::chrono::steady_clock::now();
  if (counted) bytes_sent_ += 8 * payload.size();
  world_->deliver(rank_, to, tag, std::move(payload));
  comm_time_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline std::vector<double> RankEndpoint::take(int from, int tag) {
  const auto start = std::chrono::steady_clock::now();
  auto v = world_->collect(rank_, from, tag);
  comm_time_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return v;
}

/// Launches a p-rank world and returns every rank's result.
template <class Program>
auto spawn_world(int p, Program&& program, FabricOptions options = FabricOptions::from_env()) {
  World world(p, options);
  return world.run(std::forward<Program>(program));
}

// ---------------------------------------------------------------------------
// Collectives
// ---------------------------------------------------------------------------

/// Partner sequence rank-1, rank+1, rank-2, rank+2, ... without wraparound.
inline std::vector<int> left_right_order(int rank, int size) {
  std::vector<int> order;
  for (int d = 1; d < size; ++d) {
    if (rank - d >= 0) order.push_back(rank - d);
    if (rank + d < size) order.push_back(rank + d);
  }
  return order;
}

/// Every rank contributes its block; every rank gets the concatenation.
/// `block_sizes[q]` is rank q's block length. Pairs exchange in left-right
/// order, the lower rank of each pair sending first.
inline Vector left_right_allgather(RankEndpoint& ep, std::span<const double> local_block,
                                   std::span<const std::size_t> block_sizes) {
  const int p = ep.size();
  const int me = ep.rank();
  if (block_sizes.size() != static_cast<std::size_t>(p)) {
    throw FabricError("allgather layout has " + std::to_string(block_sizes.size()) +
                      " blocks for " + std::to_string(p) + " ranks");
  }
  if (local_block.size() != block_sizes[static_cast<std::size_t>(me)]) {
    throw FabricError("allgather: rank " + std::to_string(me) + " block length differs from layout");
  }
  std::vector<std::size_t> offset(block_sizes.size() + 1, 0);
  for (std::size_t q = 0; q < block_sizes.size(); ++q) offset[q + 1] = offset[q] + block_sizes[q];

  Vector full(offset.back());
  std::copy(local_block.begin(), local_block.end(),
            full.begin() + static_cast<std::ptrdiff_t>(offset[static_cast<std::size_t>(me)]));
  const int tag = ep.next_collective_tag();
  const Vector mine(local_block.begin(), local_block.end());
  for (int k : left_right_order(me, p)) {
    const auto kq = static_cast<std::size_t>(k);
    auto receive = [&] {
      auto block = ep.recv(k, tag, block_sizes[kq]);
      std::copy(block.begin(), block.end(), full.begin() + static_cast<std::ptrdiff_t>(offset[kq]));
    };
    if (me < k) {
      ep.send(k, tag, mine);
      receive();
    } else {
      receive();
      ep.send(k, tag, mine);
    }
  }
  return full;
}

/// Binary-tree reduction to rank 0 followed by a broadcast. Partial results
/// are always combined as op(lower ranks, higher ranks), so the result is
/// bitwise identical on every rank and across runs.
template <class Op>
Vector all_reduce(RankEndpoint& ep, std::span<const double> local, Op op) {
  const int p = ep.size();
  const int me = ep.rank();
  Vector acc(local.begin(), local.end());
  if (p == 1) return acc;
  const int tag = ep.next_collective_tag();

  int mask = 1;
  for (; mask < p; mask <<= 1) {
    if (me & mask) {
      ep.post_uncounted(me - mask, tag, acc);
      break;
    }
    if (me + mask < p) {
      const auto other = ep.recv(me + mask, tag, acc.size());
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = op(acc[i], other[i]);
    }
  }

  int child;
  if (me == 0) {
    child = static_cast<int>(std::bit_ceil(static_cast<unsigned>(p))) >> 1;
  } else {
    const int low = me & -me;
    acc = ep.recv(me - low, tag, acc.size());
    child = low >> 1;
  }
  for (; child > 0; child >>= 1) {
    if (me + child < p) ep.post_uncounted(me + child, tag, acc);
  }
  return acc;
}

inline Vector all_reduce_sum(RankEndpoint& ep, std::span<const double> local) {
  return all_reduce(ep, local, [](double a, double b) { return a + b; });
}

inline double all_reduce_sum(RankEndpoint& ep, double local) {
  return all_reduce_sum(ep, std::span<const double>(&local, 1))[0];
}

/// NaN wins, so a diverged rank is never masked.
inline double all_reduce_max(RankEndpoint& ep, double local) {
  return all_reduce(ep, std::span<const double>(&local, 1),
                    [](double a, double b) { return (a >= b || a != a) ? a : b; })[0];
}

inline bool all_reduce_land(RankEndpoint& ep, bool local) {
  const double v = local ? 1.0 : 0.0;
  return all_reduce(ep, std::span<const double>(&v, 1),
                    [](double a, double b) { return std::min(a, b); })[0] != 0.0;
}

}  // namespace jsplit
