#include <algorithm>
#include <random>

#include "doctest.h"
#include "geoknit/assign/matching.hpp"
#include "geoknit/error.hpp"
#include "oracles.hpp"

using namespace geoknit;

namespace {

CostMatrix from_rows(const std::vector<std::vector<double>>& rows) {
  CostMatrix c(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t k = 0; k < rows[r].size(); ++k) c(r, k) = rows[r][k];
  return c;
}

using Pairs = std::vector<std::pair<int, int>>;

}  // namespace

TEST_CASE("hungarian examples") {
  const Assignment one = hungarian(from_rows({{7}}));
  CHECK(one.pairs == Pairs{{0, 0}});
  CHECK(one.total_cost == 7.0);

  const Assignment diag = hungarian(from_rows({{0, 9, 9}, {9, 0, 9}, {9, 9, 0}}));
  CHECK(diag.pairs == Pairs{{0, 0}, {1, 1}, {2, 2}});
  CHECK(diag.total_cost == 0.0);

  const Assignment wide = hungarian(from_rows({{5, 1, 9}, {2, 8, 3}}));
  CHECK(wide.pairs == Pairs{{0, 1}, {1, 0}});
  CHECK(wide.total_cost == 3.0);

  const Assignment tall = hungarian(from_rows({{4}, {1}, {3}}));
  CHECK(tall.pairs == Pairs{{1, 0}});

  // All-equal costs pick the lexicographically smallest matching.
  const Assignment ties = hungarian(CostMatrix(3, 3, 2.0));
  CHECK(ties.pairs == Pairs{{0, 0}, {1, 1}, {2, 2}});
}

TEST_CASE("hungarian errors") {
  CostMatrix bad(2, 2, 1.0);
  bad(1, 0) = std::nan("");
  CHECK_THROWS_AS(hungarian(bad), Error);
  CHECK_THROWS_AS(hungarian(CostMatrix{}), Error);
  bad(1, 0) = std::numeric_limits<double>::infinity();
  try {
    hungarian(bad);
  } catch (const Error& e) {
    CHECK(e.code() == "invalid-cost");
  }
}

TEST_CASE("hungarian against brute force and invariances") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 6);
    CostMatrix c(n, n);
    for (double& v : c.data) v = k % 3 == 0 ? std::floor(u(rng) / 3) : u(rng);
    const Assignment a = hungarian(c);
    const Assignment b = oracle::brute_force_assignment(c);
    CHECK(a.pairs == b.pairs);
    CHECK(a.total_cost == doctest::Approx(b.total_cost).epsilon(1e-12));

    // Permuting rows permutes the assignment.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), rng);
    CostMatrix pc(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t q = 0; q < n; ++q) pc(r, q) = c(perm[r], q);
    CHECK(hungarian(pc, TieBreak::any).total_cost == doctest::Approx(a.total_cost).epsilon(1e-12));

    // A constant shift adds pairs * constant.
    CostMatrix shifted = c;
    for (double& v : shifted.data) v += 2.5;
    CHECK(hungarian(shifted).total_cost == doctest::Approx(a.total_cost + 2.5 * static_cast<double>(n)).epsilon(1e-12));
  }
}

TEST_CASE("face_match") {
  const FaceGrid a = oracle::square({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  const FaceGrid b = oracle::square({0, 0, 1}, {1, 0, 0}, {0, 1, 0});
  const FaceGrid c01 = oracle::square({0, 0, 0.1}, {1, 0, 0}, {0, 1, 0});
  const FaceGrid c09 = oracle::square({0, 0, 0.9}, {1, 0, 0}, {0, 1, 0});

  const Assignment self = face_match({a, b}, {a, b});
  CHECK(self.pairs == Pairs{{0, 0}, {1, 1}});
  CHECK(self.total_cost == doctest::Approx(0.0));

  const Assignment planes = face_match({a, b}, {c09, c01});
  CHECK(planes.pairs == Pairs{{0, 1}, {1, 0}});
  CHECK(planes.total_cost == doctest::Approx(0.2).epsilon(1e-9));

  const FaceGrid far = oracle::square({5, 5, 5}, {1, 0, 0}, {0, 1, 0});
  CHECK(face_match({a, b, far}, {c01, c09}).pairs.size() == 2u);
}

TEST_CASE("edge_match") {
  const FaceGrid sq = oracle::square({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  const Assignment self = edge_match(sq, sq);
  CHECK(self.pairs == Pairs{{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  CHECK(self.total_cost == 0.0);

  // Same square, parameterized a quarter turn around: edges shift cyclically.
  const FaceGrid turned = oracle::square({1, 0, 0}, {0, 1, 0}, {-1, 0, 0});
  const Assignment rot = edge_match(turned, sq);
  CHECK(rot.total_cost == doctest::Approx(0.0).epsilon(1e-12));
  const auto eg = boundary_edges(turned);
  const auto ec = boundary_edges(sq);
  for (const auto& [i, j] : rot.pairs)
    CHECK(oracle::chamfer({eg[static_cast<std::size_t>(i)].samples.begin(), eg[static_cast<std::size_t>(i)].samples.end()},
                          {ec[static_cast<std::size_t>(j)].samples.begin(), ec[static_cast<std::size_t>(j)].samples.end()}) < 1e-12);
  int shifted = 0;
  for (const auto& [i, j] : rot.pairs) shifted += i != j;
  CHECK(shifted == 4);

  // Costs equal the explicit Chamfer matrix.
  const FaceGrid wide = oracle::square({-0.5, 0.25, 0}, {2, 0, 0}, {0, 0.5, 0});
  const CostMatrix m = edge_match_costs(wide, sq);
  const auto ew = boundary_edges(wide);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(m(i, j) == doctest::Approx(oracle::chamfer({ew[i].samples.begin(), ew[i].samples.end()},
                                                       {ec[j].samples.begin(), ec[j].samples.end()}))
                           .epsilon(1e-12));
  const Assignment near = edge_match(wide, sq);
  CHECK(near.total_cost == doctest::Approx(oracle::brute_force_assignment(m).total_cost).epsilon(1e-12));
}
