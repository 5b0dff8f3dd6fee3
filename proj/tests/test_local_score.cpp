#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "perc/local_score.hpp"
#include "perc/oracle.hpp"
#include "perc/rng.hpp"

using namespace perc;

namespace {

PointSet sample(const Box& box, double lambda, std::uint64_t seed, std::uint64_t stream) {
  RngStream rng = derive_stream(seed, stream);
  return sample_poisson(box, lambda, rng);
}

}  // namespace

TEST_CASE("window half-edge follows the (theta ln n)^(1/(m-1)) formula") {
  // m = 2, theta = 1, box edge e: half-edge 1, unclipped edge 2.
  const double e = std::exp(1.0);
  CHECK(window_half_edge(1.0, e, 2) == doctest::Approx(1.0).epsilon(1e-14));
  // m = 3: square root.
  CHECK(window_half_edge(2.0, e, 3) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(window_half_edge(0.0, 10.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(window_half_edge(-1.0, 10.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(window_half_edge(1.0, 1.0, 2), std::invalid_argument);  // ln n = 0
  CHECK_THROWS_AS(window_half_edge(1.0, 0.5, 2), std::invalid_argument);
  CHECK_THROWS_AS(window_half_edge(1.0, 10.0, 1), std::invalid_argument);
}

TEST_CASE("make_window clips to the box") {
  const double e = std::exp(1.0);
  const Box box = Box::centered_cube(2, e);
  SUBCASE("interior point") {
    const std::vector<double> x = {0.0, 0.0};
    const Window w = make_window(x, 1.0, box);
    CHECK(w.half_edge == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w.clipped.lower()[0] == doctest::Approx(-1.0));
    CHECK(w.clipped.upper()[1] == doctest::Approx(1.0));
    CHECK(w.clipped.contains(x));
  }
  SUBCASE("corner point clips to a quadrant") {
    const std::vector<double> x = {-e / 2, -e / 2};
    const Window w = make_window(x, 1.0, box);
    CHECK(w.clipped.lower()[0] == -e / 2);
    CHECK(w.clipped.lower()[1] == -e / 2);
    CHECK(w.clipped.upper()[0] == doctest::Approx(-e / 2 + 1.0));
    CHECK(w.clipped.contains(x));
  }
  SUBCASE("huge theta covers the whole box for every point") {
    for (const auto& x : std::vector<std::vector<double>>{{0.0, 0.0}, {-e / 2, e / 2}}) {
      const Window w = make_window(x, 1000.0, box);
      CHECK(w.clipped.lower() == box.lower());
      CHECK(w.clipped.upper() == box.upper());
    }
  }
  SUBCASE("rejects a point outside the box") {
    CHECK_THROWS_AS(make_window(std::vector<double>{e, e}, 1.0, box), std::invalid_argument);
  }
}

TEST_CASE("huge theta makes the local score equal the global score everywhere") {
  const Box box = Box::centered_cube(2, 20.0);
  const PointSet ps = sample(box, 1.5, 2024, 0);
  REQUIRE(ps.size() > 100);
  const double theta = 400.0;  // half-edge = 400 ln 20 >> box diameter
  WindowScorer scorer(ps, theta, 1.0);
  WindowScorer::Scratch scratch(scorer);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto eval = scorer.evaluate(i, scratch);
    CHECK(eval.pair.global_bit == eval.pair.local_bit);
    CHECK(eval.pair.event != CouplingEvent::e1_global_only);
    CHECK(eval.pair.event != CouplingEvent::e2_local_only);
  }
  const CouplingReport report = localized_total(ps, theta, 1.0);
  CHECK(report.n_local == report.n_global);
  CHECK(report.mismatch_count == 0);
}

TEST_CASE("hand-built window splitting the global largest gives event E1") {
  // Global clusters: chain {x, a, b} (largest) and pair {p, q}. The window of
  // x (half-edge 0.85) captures only x from the chain plus the whole pair, so
  // locally x is a singleton and the pair is the unique local largest.
  const Box box = Box::centered_cube(2, 10.0);
  const std::vector<double> coords = {
      0.0,   0.0,   // x  (index 0)
      0.9,   0.0,   // a
      1.8,   0.0,   // b
      -0.83, 0.84,  // p
      -0.77, 0.80,  // q
  };
  const PointSet ps(box, coords);
  const double theta = 0.85 / std::log(10.0);  // half-edge exactly 0.85

  // Hand-enumerated global structure.
  const ClusterLabeling lab = find_clusters(ps, 1.0);
  REQUIRE(lab.num_components() == 2);
  REQUIRE(lab.sizes[cluster_of(lab, 0)] == 3);
  REQUIRE(lab.sizes[cluster_of(lab, 3)] == 2);

  const ScorePair pair = local_score(ps, 0, theta, 1.0);
  CHECK(pair.global_bit);
  CHECK_FALSE(pair.local_bit);
  CHECK(pair.event == CouplingEvent::e1_global_only);

  // The proof-taxonomy disconnection bit: the local largest {p, q} is a
  // different global component, at distance >= r from the chain.
  CHECK(classify_e3(ps, 0, theta, 1.0) == E3Class::disconnected);
}

TEST_CASE("tied local largest gives event E0 and local score zero") {
  // Window of x (half-edge 3) sees two disjoint pairs; the global largest is
  // a 3-chain outside the window.
  const Box box = Box::centered_cube(2, 10.0);
  const std::vector<double> coords = {
      0.0,  0.0,                          // x
      2.0,  2.0,  2.0,  2.5,              // pair 1
      -2.0, -2.0, -2.0, -2.5,             // pair 2
      -4.5, 4.5,  -4.5, 3.7,  -4.5, 2.9,  // 3-chain, outside the window
  };
  const PointSet ps(box, coords);
  const double theta = 3.0 / std::log(10.0);  // half-edge exactly 3

  const TopClusters top = top_clusters(find_clusters(ps, 1.0));
  REQUIRE(top.largest_size == 3);
  REQUIRE(top.largest_unique);

  const ScorePair pair = local_score(ps, 0, theta, 1.0);
  CHECK_FALSE(pair.global_bit);
  CHECK_FALSE(pair.local_bit);
  CHECK(pair.event == CouplingEvent::e0_local_tie);
  CHECK(classify_e3(ps, 0, theta, 1.0) == E3Class::unclassifiable);
}

TEST_CASE("local largest inside the global largest is connected (E3 = 0)") {
  // x in the middle of a 5-chain; the window captures a sub-chain, which is
  // the local largest and shares points with the global largest.
  const Box box = Box::centered_cube(2, 10.0);
  std::vector<double> coords;
  for (int i = 0; i < 5; ++i) coords.insert(coords.end(), {-1.8 + 0.9 * i, 0.0});
  const PointSet ps(box, coords);
  const double theta = 1.0 / std::log(10.0);  // half-edge exactly 1
  const ScorePair pair = local_score(ps, 2, theta, 1.0);
  CHECK(pair.global_bit);
  CHECK(pair.local_bit);
  CHECK(pair.event == CouplingEvent::agree);
  CHECK(classify_e3(ps, 2, theta, 1.0) == E3Class::connected);
}

TEST_CASE("empty and trivial inputs") {
  const Box box = Box::centered_cube(2, 10.0);
  const PointSet empty(box, {});
  const CouplingReport report = localized_total(empty, 2.0, 1.0);
  CHECK(report.n_local == 0);
  CHECK(report.n_global == 0);
  CHECK(report.mismatch_count == 0);
  CHECK_THROWS_AS(localized_total(empty, -1.0, 1.0), std::invalid_argument);
  const PointSet one(box, {0.0, 0.0});
  CHECK_THROWS_AS(local_score(one, 5, 2.0, 1.0), std::out_of_range);
  const ScorePair pair = local_score(one, 0, 2.0, 1.0);
  CHECK(pair.global_bit);
  CHECK(pair.local_bit);
}

TEST_CASE("localized total matches the from-scratch window oracle") {
  // Random instances across clipping regimes and dimensions.
  struct Case {
    int m;
    double edge;
    double lambda;
    double theta;
  };
  const std::vector<Case> cases = {
      {2, 20.0, 2.0, 2.0}, {2, 20.0, 1.0, 0.5}, {2, 30.0, 2.0, 1.0},
      {2, 20.0, 0.3, 3.0}, {3, 8.0, 1.2, 1.5},  {3, 10.0, 0.8, 4.0},
  };
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const auto& c = cases[ci];
    for (std::uint64_t inst = 0; inst < 3; ++inst) {
      const PointSet ps = sample(Box::centered_cube(c.m, c.edge), c.lambda, 5000 + ci, inst);
      if (ps.empty()) continue;
      const CouplingReport report = localized_total(ps, c.theta, 1.0);
      const std::uint64_t expected = naive_localized_total(ps, c.theta, 1.0, ps.size());
      CHECK(report.n_local == expected);
    }
  }
}

TEST_CASE("spec-scale oracle agreement at n = 40") {
  const PointSet ps = sample(Box::centered_cube(2, 40.0), 2.0, 777, 0);
  REQUIRE(ps.size() > 2500);
  const CouplingReport report = localized_total(ps, 2.0, 1.0);
  const std::uint64_t expected = naive_localized_total(ps, 2.0, 1.0, ps.size());
  CHECK(report.n_local == expected);
  CHECK(report.n_global == top_clusters(find_clusters(ps, 1.0)).largest_size);
}

TEST_CASE("degenerate theta reproduces the global largest exactly") {
  for (std::uint64_t inst = 0; inst < 10; ++inst) {
    const Box box = Box::centered_cube(2, 15.0);
    const PointSet ps = sample(box, 1.5, 31337, inst);
    if (ps.empty()) continue;
    // half-edge >= box diameter makes every clipped window the whole box.
    const double diameter = 15.0 * std::sqrt(2.0);
    const double theta = diameter / std::log(15.0) + 1.0;
    REQUIRE(window_half_edge(theta, 15.0, 2) >= diameter);
    const CouplingReport report = localized_total(ps, theta, 1.0);
    const TopClusters top = top_clusters(find_clusters(ps, 1.0));
    const std::uint64_t n_expected = top.largest_unique ? top.largest_size : 0;
    CHECK(report.n_local == n_expected);
    CHECK(report.n_local == report.n_global);
    CHECK(report.mismatch_count == 0);
  }
}

TEST_CASE("report invariants hold on random instances") {
  for (std::uint64_t inst = 0; inst < 20; ++inst) {
    const PointSet ps = sample(Box::centered_cube(2, 25.0), 1.7, 9090, inst);
    if (ps.empty()) continue;
    WindowScorer scorer(ps, 1.0, 1.0);
    const CouplingReport rep = localized_total(scorer);
    const std::uint64_t gap = rep.n_local > rep.n_global ? rep.n_local - rep.n_global
                                                         : rep.n_global - rep.n_local;
    CHECK(gap <= rep.mismatch_count);
    CHECK(rep.mismatch_count <= rep.e0_count + rep.e1_count + rep.e2_count);
    if (scorer.top().largest_unique) {
      CHECK(rep.e1_count + rep.e2_count <= rep.e3_count + rep.e0_count);
    }
  }
}

TEST_CASE("every E1 or E2 point is disconnected from the global largest") {
  // Pointwise check of the event-taxonomy inclusion on supercritical data.
  std::uint64_t mismatches_seen = 0;
  for (std::uint64_t inst = 0; inst < 20; ++inst) {
    const PointSet ps = sample(Box::centered_cube(2, 30.0), 2.0, 4242, inst);
    WindowScorer scorer(ps, 0.4, 1.0);  // small windows to provoke events
    if (!scorer.top().largest_unique) continue;
    WindowScorer::Scratch scratch(scorer);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const auto eval = scorer.evaluate(i, scratch);
      if (eval.pair.event == CouplingEvent::e1_global_only ||
          eval.pair.event == CouplingEvent::e2_local_only) {
        ++mismatches_seen;
        CHECK(eval.e3 == E3Class::disconnected);
      }
    }
  }
  CHECK(mismatches_seen > 0);  // the check must actually exercise the events
}

TEST_CASE("e3 classification agrees with the pairwise-distance definition") {
  // Brute-force oracle: recluster the window, take the local largest, and
  // compare min pairwise distance to the global largest against r.
  for (std::uint64_t inst = 0; inst < 6; ++inst) {
    const PointSet ps = sample(Box::centered_cube(2, 15.0), 1.8, 616, inst);
    if (ps.size() < 10) continue;
    WindowScorer scorer(ps, 0.8, 1.0);
    WindowScorer::Scratch scratch(scorer);
    const ClusterLabeling lab = find_clusters(ps, 1.0);
    const TopClusters top = top_clusters(lab);
    if (!top.largest_unique) continue;
    const double he = scorer.half_edge();
    for (std::size_t x = 0; x < ps.size(); ++x) {
      const auto eval = scorer.evaluate(x, scratch);
      if (eval.e3 == E3Class::unclassifiable) continue;
      std::vector<std::uint32_t> win;
      for (std::size_t p = 0; p < ps.size(); ++p) {
        bool inside = true;
        for (int a = 0; a < 2; ++a) {
          if (std::abs(ps.point(p)[a] - ps.point(x)[a]) > he) inside = false;
        }
        if (inside) win.push_back(static_cast<std::uint32_t>(p));
      }
      UnionFind uf;
      uf.reset(win.size());
      for (std::size_t a = 0; a < win.size(); ++a) {
        for (std::size_t b = a + 1; b < win.size(); ++b) {
          double d2 = 0.0;
          for (int ax = 0; ax < 2; ++ax) {
            const double d = ps.point(win[a])[ax] - ps.point(win[b])[ax];
            d2 += d * d;
          }
          if (d2 < 1.0) uf.unite(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
        }
      }
      std::vector<std::uint32_t> size_of(win.size(), 0);
      for (std::size_t i = 0; i < win.size(); ++i) {
        ++size_of[uf.find(static_cast<std::uint32_t>(i))];
      }
      std::uint32_t best_root = 0;
      std::uint32_t best = 0;
      for (std::size_t i = 0; i < win.size(); ++i) {
        if (size_of[i] > best) {
          best = size_of[i];
          best_root = static_cast<std::uint32_t>(i);
        }
      }
      double min_d2 = 1e300;
      for (std::size_t i = 0; i < win.size(); ++i) {
        if (uf.find(static_cast<std::uint32_t>(i)) != best_root) continue;
        for (std::size_t g = 0; g < ps.size(); ++g) {
          if (lab.component_of[g] != *top.largest_id) continue;
          double d2 = 0.0;
          for (int ax = 0; ax < 2; ++ax) {
            const double d = ps.point(win[i])[ax] - ps.point(g)[ax];
            d2 += d * d;
          }
          min_d2 = std::min(min_d2, d2);
        }
      }
      const bool disconnected_by_distance = min_d2 >= 1.0;
      CHECK((eval.e3 == E3Class::disconnected) == disconnected_by_distance);
    }
  }
}

TEST_CASE("changing the configuration far from x never changes the local score") {
  for (std::uint64_t inst = 0; inst < 5; ++inst) {
    const Box box = Box::centered_cube(2, 30.0);
    const PointSet ps = sample(box, 1.0, 11011, inst);
    if (ps.size() < 5) continue;
    const double theta = 0.8;
    const double he = window_half_edge(theta, 30.0, 2);
    const std::size_t x = ps.size() / 2;
    const bool base = local_score(ps, x, theta, 1.0).local_bit;
    // Insert points at Chebyshev distance > 2 * half_edge from x.
    RngStream rng = derive_stream(888, inst);
    std::vector<double> coords(ps.coords());
    int inserted = 0;
    while (inserted < 10) {
      const double px = box.lower()[0] + rng.next_unit() * box.extent(0);
      const double py = box.lower()[1] + rng.next_unit() * box.extent(1);
      if (std::max(std::abs(px - ps.point(x)[0]), std::abs(py - ps.point(x)[1])) <= 2.0 * he) {
        continue;
      }
      coords.push_back(px);
      coords.push_back(py);
      ++inserted;
    }
    const PointSet extended(box, std::move(coords));
    CHECK(local_score(extended, x, theta, 1.0).local_bit == base);
  }
}

TEST_CASE("localized total is independent of the thread count") {
  const PointSet ps = sample(Box::centered_cube(2, 25.0), 2.0, 2025, 3);
  const CouplingReport serial = localized_total(ps, 1.5, 1.0, {.threads = 1});
  const CouplingReport parallel = localized_total(ps, 1.5, 1.0, {.threads = 4});
  CHECK(serial.n_local == parallel.n_local);
  CHECK(serial.n_global == parallel.n_global);
  CHECK(serial.mismatch_count == parallel.mismatch_count);
  CHECK(serial.e0_count == parallel.e0_count);
  CHECK(serial.e1_count == parallel.e1_count);
  CHECK(serial.e2_count == parallel.e2_count);
  CHECK(serial.e3_count == parallel.e3_count);
}
