// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

#include <numeric>
#include <random>

#include <catch_amalgamated.hpp>

#include "jsplit/fabric.hpp"

using namespace jsplit;
using namespace std::chrono_literals;

namespace {

FabricOptions quick_timeout() {
  FabricOptions o;
  o.recv_timeout = 500ms;
  return o;
}

}  // namespace

TEST_CASE("single rank world") {
  const auto out = spawn_world(1, [](RankEndpoint& ep) { return ep.rank(); });
  CHECK(out == std::vector<int>{0});
}

TEST_CASE("ranks send their ids to rank 0") {
  const auto out = spawn_world(4, [](RankEndpoint& ep) {
    if (ep.rank() != 0) {
      ep.send(0, 1, {static_cast<double>(ep.rank())});
      return 0.0;
    }
    double sum = 0.0;
    for (int r = 1; r < ep.size(); ++r) sum += ep.recv(r, 1, 1)[0];
    return sum;
  });
  CHECK(out[0] == 6.0);
}

TEST_CASE("ring forward") {
  const auto out = spawn_world(3, [](RankEndpoint& ep) {
    const int p = ep.size();
    const int me = ep.rank();
    ep.send((me + 1) % p, 7, {static_cast<double>(me), 10.0 * me});
    return ep.recv((me + p - 1) % p, 7, 2);
  });
  CHECK(out[0] == Vector{2.0, 20.0});
  CHECK(out[1] == Vector{0.0, 0.0});
  CHECK(out[2] == Vector{1.0, 10.0});
}

TEST_CASE("channels are FIFO and tags are separate") {
  World world(2);
  const auto out = world.run([](RankEndpoint& ep) {
    if (ep.rank() == 0) {
      for (int k = 0; k < 50; ++k) ep.send(1, k % 2, {static_cast<double>(k)});
      return Vector{};
    }
    Vector seen;
    for (int k = 0; k < 25; ++k) seen.push_back(ep.recv(0, 1, 1)[0]);
    for (int k = 0; k < 25; ++k) seen.push_back(ep.recv(0, 0, 1)[0]);
    return seen;
  });
  for (int k = 0; k < 25; ++k) {
    CHECK(out[1][static_cast<std::size_t>(k)] == 2 * k + 1);
    CHECK(out[1][static_cast<std::size_t>(25 + k)] == 2 * k);
  }
  const auto t = world.traffic();
  CHECK(t.sent == t.received);
  CHECK(world.undelivered() == 0);
}

TEST_CASE("left-right partner order") {
  CHECK(left_right_order(2, 5) == std::vector<int>{1, 3, 0, 4});
  CHECK(left_right_order(0, 3) == std::vector<int>{1, 2});
  CHECK(left_right_order(0, 1).empty());
}

TEST_CASE("allgather of three blocks") {
  const std::vector<std::size_t> layout{1, 1, 1};
  const auto out = spawn_world(3, [&](RankEndpoint& ep) {
    const Vector mine{static_cast<double>('a' + ep.rank())};
    return left_right_allgather(ep, mine, layout);
  });
  for (const auto& v : out) CHECK(v == Vector{'a', 'b', 'c'});
  const std::vector<std::size_t> one{2};
  const auto solo = spawn_world(1, [&](RankEndpoint& ep) {
    return left_right_allgather(ep, Vector{4.0, 5.0}, one);
  });
  CHECK(solo[0] == Vector{4.0, 5.0});
}

TEST_CASE("allgather matches a naive gather for random layouts") {
  std::mt19937_64 rng(9);
  for (int p = 1; p <= 8; ++p) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<std::size_t> layout(static_cast<std::size_t>(p));
      std::vector<Vector> blocks(static_cast<std::size_t>(p));
      Vector reference;
      for (int q = 0; q < p; ++q) {
        layout[static_cast<std::size_t>(q)] = rng() % 5;
        for (std::size_t k = 0; k < layout[static_cast<std::size_t>(q)]; ++k) {
          blocks[static_cast<std::size_t>(q)].push_back(static_cast<double>(rng() % 1000));
        }
        reference.insert(reference.end(), blocks[static_cast<std::size_t>(q)].begin(),
                         blocks[static_cast<std::size_t>(q)].end());
      }
      World world(p);
      const auto out = world.run([&](RankEndpoint& ep) {
        return left_right_allgather(ep, blocks[static_cast<std::size_t>(ep.rank())], layout);
      });
      for (const auto& v : out) CHECK(v == reference);
      CHECK(world.undelivered() == 0);
    }
  }
}

TEST_CASE("allgather rejects a block that disagrees with the layout") {
  const std::vector<std::size_t> layout{1, 1};
  CHECK_THROWS_AS(spawn_world(
                      2,
                      [&](RankEndpoint& ep) {
                        const Vector mine(ep.rank() == 0 ? 1 : 3, 0.0);
                        return left_right_allgather(ep, mine, layout);
                      },
                      quick_timeout()),
                  WorldError);
}

TEST_CASE("reductions") {
  const auto sums = spawn_world(4, [](RankEndpoint& ep) {
    return all_reduce_sum(ep, static_cast<double>(ep.rank() + 1));
  });
  for (double s : sums) CHECK(s == 10.0);

  const auto ands = spawn_world(3, [](RankEndpoint& ep) { return all_reduce_land(ep, ep.rank() != 2); });
  for (bool b : ands) CHECK_FALSE(b);
  const auto all_true = spawn_world(3, [](RankEndpoint& ep) { return all_reduce_land(ep, true); });
  for (bool b : all_true) CHECK(b);

  const auto vecs = spawn_world(2, [](RankEndpoint& ep) {
    const Vector mine = ep.rank() == 0 ? Vector{1, 0} : Vector{0, 1};
    return all_reduce_sum(ep, mine);
  });
  for (const auto& v : vecs) CHECK(v == Vector{1, 1});

  const auto maxes = spawn_world(5, [](RankEndpoint& ep) { return all_reduce_max(ep, ep.rank() == 3 ? 9.0 : 1.0); });
  for (double m : maxes) CHECK(m == 9.0);
  const auto nan_max = spawn_world(3, [](RankEndpoint& ep) {
    return all_reduce_max(ep, ep.rank() == 1 ? std::nan("") : 1.0);
  });
  for (double m : nan_max) CHECK(std::isnan(m));
}

TEST_CASE("sum reduction is bitwise identical on every rank for every p") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int p = 1; p <= 8; ++p) {
    Vector contrib(static_cast<std::size_t>(p));
    for (auto& c : contrib) c = val(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    const auto first = spawn_world(p, [&](RankEndpoint& ep) {
      return all_reduce_sum(ep, contrib[static_cast<std::size_t>(ep.rank())]);
    });
    const auto second = spawn_world(p, [&](RankEndpoint& ep) {
      return all_reduce_sum(ep, contrib[static_cast<std::size_t>(ep.rank())]);
    });
    for (double s : first) CHECK(s == first[0]);
    CHECK(first == second);
    CHECK(first[0] == Catch::Approx(std::accumulate(contrib.begin(), contrib.end(), 0.0)));
  }
}

TEST_CASE("reduction shape mismatch is an error") {
  CHECK_THROWS_AS(spawn_world(
                      2,
                      [](RankEndpoint& ep) {
                        return all_reduce_sum(ep, Vector(ep.rank() == 0 ? 2 : 3, 1.0));
                      },
                      quick_timeout()),
                  WorldError);
}

TEST_CASE("deadlock is reported with ranks and tag") {
  try {
    spawn_world(
        2, [](RankEndpoint& ep) { return ep.recv(1 - ep.rank(), 42); }, quick_timeout());
    FAIL("expected a deadlock error");
  } catch (const WorldError& e) {
    const std::string what = e.what();
    CHECK(what.find("deadlock") != std::string::npos);
    CHECK(what.find("tag 42") != std::string::npos);
  }
}

TEST_CASE("a failing rank releases the others") {
  FabricOptions o;
  o.recv_timeout = 30s;
  const auto start = std::chrono::steady_clock::now();
  try {
    spawn_world(
        4,
        [](RankEndpoint& ep) -> int {
          if (ep.rank() == 2) throw std::runtime_error("boom");
          ep.recv((ep.rank() + 1) % ep.size(), 1);
          return 0;
        },
        o);
    FAIL("expected a world error");
  } catch (const WorldError& e) {
    CHECK(e.rank() == 2);
    CHECK(std::string(e.what()).find("boom") != std::string::npos);
  }
  CHECK(std::chrono::steady_clock::now() - start < 5s);
}

TEST_CASE("self and out-of-range sends are rejected") {
  CHECK_THROWS_AS(spawn_world(2, [](RankEndpoint& ep) {
                    ep.send(ep.rank(), 0, {1.0});
                    return 0;
                  }),
                  WorldError);
  CHECK_THROWS_AS(spawn_world(2, [](RankEndpoint& ep) {
                    ep.send(5, 0, {1.0});
                    return 0;
                  }),
                  WorldError);
}

TEST_CASE("communication accounting") {
  const auto idle = spawn_world(1, [](RankEndpoint& ep) { return ep.comm_time(); });
  CHECK(idle[0] == 0.0);

  const auto bytes = spawn_world(3, [](RankEndpoint& ep) {
    const std::vector<std::size_t> layout{2, 2, 2};
    const double before = ep.comm_time();
    left_right_allgather(ep, Vector(2, 1.0), layout);
    const double mid = ep.comm_time();
    all_reduce_sum(ep, 1.0);
    CHECK(ep.comm_time() >= mid);
    CHECK(mid >= before);
    return ep.bytes_sent();
  });
  // each rank sends its 2-value block to the 2 others; the reduction is not counted
  for (auto b : bytes) CHECK(b == 2 * 2 * 8);
}

TEST_CASE("timeout option from the environment") {
  setenv("JACOBI_SPLIT_TIMEOUT_S", "2.5", 1);
  CHECK(FabricOptions::from_env().recv_timeout == 2500ms);
  setenv("JACOBI_SPLIT_TIMEOUT_S", "garbage", 1);
  CHECK_THROWS_AS(FabricOptions::from_env(), Error);
  unsetenv("JACOBI_SPLIT_TIMEOUT_S");
  CHECK(FabricOptions::from_env().recv_timeout == 30s);
}
