#include <cmath>
#include <queue>
#include <vector>

#include "aps/proposals.hpp"
#include "doctest.h"

using namespace aps;

TEST_CASE("circular neighbors at the wrap point") {
  const DecisionSpace space = DecisionSpace::coded({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  const ProposalKernel kernel = ProposalKernel::circular_neighbor();
  RandomSource rs(8, 0);
  int left = 0, right = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto c = kernel.propose_index(space, 0, rs);
    REQUIRE(c.has_value());
    REQUIRE((*c == 9 || *c == 1));
    (*c == 9 ? left : right) += 1;
  }
  CHECK(std::fabs(left / 10000.0 - 0.5) < 0.01);
  CHECK(std::fabs(right / 10000.0 - 0.5) < 0.01);
}

TEST_CASE("singleton spaces always stay") {
  const DecisionSpace space = DecisionSpace::coded({42});
  const ProposalKernel kernel = ProposalKernel::circular_neighbor();
  RandomSource rs(3, 0);
  for (int i = 0; i < 100; ++i) CHECK_FALSE(kernel.propose_index(space, 0, rs).has_value());
}

TEST_CASE("current state outside the space is a domain error") {
  const DecisionSpace space = DecisionSpace::coded({0, 1});
  const ProposalKernel kernel = ProposalKernel::circular_neighbor();
  RandomSource rs(3, 0);
  CHECK_THROWS_AS(kernel.propose_index(space, 5, rs), std::domain_error);
}

TEST_CASE("circular proposals reach every state") {
  // breadth-first over the neighbor relation from state 0
  for (std::size_t n : {2u, 3u, 7u}) {
    std::vector<double> codes(n);
    for (std::size_t i = 0; i < n; ++i) codes[i] = static_cast<double>(i);
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    while (!frontier.empty()) {
      const std::size_t cur = frontier.front();
      frontier.pop();
      for (std::size_t next : {(cur + 1) % n, (cur + n - 1) % n})
        if (!seen[next]) {
          seen[next] = true;
          frontier.push(next);
        }
    }
    for (std::size_t i = 0; i < n; ++i) CHECK(seen[i]);
  }
}

TEST_CASE("t-walk transition density is empirically symmetric") {
  const DecisionSpace space = DecisionSpace::box({0.0}, {1.0});
  const ProposalKernel kernel = ProposalKernel::student_t_walk(0.1, 5.0);
  RandomSource rs(17, 0);
  const double window = 0.01;
  const int n = 400000;
  int hits_from_half = 0, hits_from_sixth = 0;
  for (int i = 0; i < n; ++i) {
    if (auto c = kernel.propose_point(space, {0.5}, rs); c && std::fabs((*c)[0] - 0.6) < window)
      ++hits_from_half;
    if (auto c = kernel.propose_point(space, {0.6}, rs); c && std::fabs((*c)[0] - 0.5) < window)
      ++hits_from_sixth;
  }
  const double g1 = hits_from_half / static_cast<double>(n);
  const double g2 = hits_from_sixth / static_cast<double>(n);
  CHECK(std::fabs(g1 - g2) / g1 < 0.05);
}

TEST_CASE("out-of-box candidates become stays") {
  const DecisionSpace space = DecisionSpace::box({0.0}, {1.0});
  const ProposalKernel kernel = ProposalKernel::student_t_walk(0.5, 2.0);
  RandomSource rs(9, 0);
  int stays = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto c = kernel.propose_point(space, {0.01}, rs);
    if (!c)
      ++stays;
    else
      CHECK(((*c)[0] >= 0.0 && (*c)[0] <= 1.0));
  }
  CHECK(stays > 0);
}

TEST_CASE("kernel and space kinds must match") {
  const DecisionSpace discrete = DecisionSpace::coded({0, 1});
  const DecisionSpace box = DecisionSpace::box({0.0}, {1.0});
  RandomSource rs(1, 0);
  CHECK_THROWS(ProposalKernel::student_t_walk().propose_index(discrete, 0, rs));
  CHECK_THROWS(ProposalKernel::circular_neighbor().propose_point(box, {0.5}, rs));
}
