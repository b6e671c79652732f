#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "pamlab/core/error.hpp"
#include "pamlab/meo/meo.hpp"

using namespace pamlab;
using namespace pamlab::meo;

namespace {

// Connected subsets of an n x n grid with at most k cells, by bitmask.
std::size_t brute_animals(int n, int k) {
  std::size_t count = 0;
  const int cells = n * n;
  for (unsigned mask = 1; mask < (1u << cells); ++mask) {
    const int size = __builtin_popcount(mask);
    if (size > k) continue;
    const int first = __builtin_ctz(mask);
    unsigned seen = 1u << first;
    std::queue<int> q;
    q.push(first);
    while (!q.empty()) {
      const int c = q.front();
      q.pop();
      const int x = c % n, y = c / n;
      const int nb[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (auto& p : nb) {
        if (p[0] < 0 || p[0] >= n || p[1] < 0 || p[1] >= n) continue;
        const unsigned bit = 1u << (p[1] * n + p[0]);
        if ((mask & bit) && !(seen & bit)) {
          seen |= bit;
          q.push(p[1] * n + p[0]);
        }
      }
    }
    count += seen == mask;
  }
  return count;
}

}  // namespace

TEST_SUITE("meo") {
  TEST_CASE("dyadic level n_beta") {
    for (double r : {2.0, 7.5, 32.0, 1000.0}) {
      for (double beta : {0.25, 0.5, 1.0}) {
        const int n = n_beta(beta, r);
        const double x = std::pow(r, -beta);
        CHECK(std::ldexp(1.0, -n - 1) < x);
        CHECK(x <= std::ldexp(1.0, -n) * (1 + 1e-12));
      }
    }
  }

  TEST_CASE("chosen parameters are feasible") {
    for (auto [d, a] : {std::pair{2, 4.0}, std::pair{3, 5.0}, std::pair{3, 6.0}}) {
      model::ModelParams p;
      p.dim = d;
      p.alpha = a;
      p.theta = 1.5;
      const auto m = choose_meo_params(p);
      const double mu = (a == d + 2.0) ? 1.0 : 2.0 * (a - 2.0) / (d * (a - d));
      CHECK(meo_params_feasible(m, d, p.theta, mu));
      CHECK(m.eta > 0.0);
    }
    model::ModelParams one;
    CHECK_THROWS_AS(choose_meo_params(one), InvalidArgument);
  }

  TEST_CASE("animal enumeration against a bitmask census") {
    const auto region = spectral::GridDomain::box(2, {0, 0, 0}, {2, 2, 0}, 2);
    for (int k : {1, 2, 3, 4}) CHECK(enumerate_animals(region, k).size() == brute_animals(3, k));
    const auto one_d = spectral::GridDomain::box(1, {0, 0, 0}, {4, 0, 0}, 2);
    CHECK(enumerate_animals(one_d, 2).size() == 5 + 4);
  }

  TEST_CASE("lattice animals are the face components") {
    const auto cells = spectral::GridDomain::from_cells(2, {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {3, 3, 0}, {2, 2, 0}}, 2);
    const auto parts = lattice_animals(cells);
    CHECK(parts.size() == 3);
    std::size_t total = 0;
    for (const auto& p : parts) {
      CHECK(p.is_lattice_animal());
      total += p.cells.size();
    }
    CHECK(total == 5);
  }

  TEST_CASE("capped displacements are ordered by length") {
    CHECK(capped_displacements(1, 2).size() == 5);
    CHECK(capped_displacements(2, 1).size() == 5);
    const auto m = capped_displacements(2, 2);
    CHECK(m.size() == 13);
    for (std::size_t i = 1; i < m.size(); ++i) CHECK(norm2(m[i - 1], 2) <= norm2(m[i], 2));
    CHECK(m.front() == Site{0, 0, 0});
  }

  TEST_CASE("relevant enumerator streams exactly its count") {
    RelevantCaps caps;
    caps.dim = 1;
    caps.max_cells = 2;
    caps.displacement_cap = 1;
    RelevantEnumerator en(1.0, 4.0, caps);
    std::uint64_t streamed = 0;
    RelevantPair pair;
    std::set<std::vector<Site>> animals;
    while (en.next(pair)) {
      ++streamed;
      CHECK(pair.zeta.size() == pair.halo_sites.size());
      animals.insert(pair.animal);
    }
    CHECK(streamed == en.count());
    CHECK(animals.size() == en.animals());
    en.reset();
    CHECK(en.next(pair));
    caps.work_bound = 10;
    CHECK_THROWS_AS(RelevantEnumerator(1.0, 4.0, caps), WorkBoundExceeded);
  }

  TEST_CASE("halo sites lie within r l of the scaled animal") {
    const std::vector<Site> animal{{0, 0, 0}};
    const auto h = halo_sites(1, animal, 2.0, 20.0, 1.0);
    // r [0, 1] = [0, 2]; open halo width 2 gives q in (-2, 4).
    std::vector<int> xs;
    for (const auto& s : h) xs.push_back(s[0]);
    std::sort(xs.begin(), xs.end());
    CHECK(xs == std::vector<int>{-1, 0, 1, 2, 3});
  }

  TEST_CASE("an emptied cube is rarefied") {
    model::ModelParams p;
    p.dim = 2;
    p.alpha = 4.0;
    const auto mp = choose_meo_params(p);
    const double r = 8.0, t = 32.0;
    const auto lam = spectral::GridDomain::centred_box(2, t / r, 2);
    auto cfg = model::DisplacementConfig::zeros(classification_sites(2, lam.cell_bounds(), r));
    CHECK(classify_box(cfg, r, t, mp).rarefied.cells.empty());
    // Push every point of cube (0, 0) far outside the box.
    for (int x = 0; x < 8; ++x)
      for (int y = 0; y < 8; ++y) cfg.set({x, y, 0}, {0, 64, 0});
    const auto rep = classify_box(cfg, r, t, mp);
    REQUIRE(rep.rarefied.cells.size() >= 1);
    CHECK(std::find(rep.rarefied.cells.begin(), rep.rarefied.cells.end(), Site{0, 0, 0}) != rep.rarefied.cells.end());
    CHECK_FALSE(classify_density(cfg, r, {0, 0, 0}, mp));
    CHECK(classify_density(cfg, r, {-2, -2, 0}, mp));
  }

  TEST_CASE("volume trial is reproducible") {
    model::ModelParams p;
    p.dim = 2;
    p.alpha = 4.0;
    const auto mp = choose_meo_params(p);
    const auto a = volume_bound_trial(p, 4.0, 16.0, mp, 8, 42);
    const auto b = volume_bound_trial(p, 4.0, 16.0, mp, 8, 42);
    CHECK(a.hits == b.hits);
    CHECK(a.samples == 8);
    CHECK(a.wilson.lower <= a.probability);
    CHECK(a.probability <= a.wilson.upper);
  }
}
