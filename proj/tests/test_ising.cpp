#include <doctest.h>

#include "aclab/ising.hpp"

using namespace aclab;

namespace {

WeightedGraph edge_graph(const char* w0, const char* w1) {
  WeightedGraph g;
  g.n = 2;
  g.weights = {Decimal::parse(w0), Decimal::parse(w1)};
  g.edges = {{0, 1}};
  g.finalize();
  return g;
}

}  // namespace

TEST_CASE("qubo construction") {
  auto g = edge_graph("1", "1");
  auto q = mwis_to_qubo(g);
  CHECK(q.linear[0] == Decimal(1));
  CHECK(q.linear[1] == Decimal(1));
  REQUIRE(q.quadratic.size() == 1);
  CHECK(std::get<2>(q.quadratic[0]) == Decimal(4));

  WeightedGraph iso;
  iso.n = 1;
  iso.weights = {Decimal(2)};
  iso.finalize();
  auto qi = mwis_to_qubo(iso);
  CHECK(qi.linear[0] == Decimal(2));
  CHECK(qi.quadratic.empty());

  // the penalty must strictly exceed min(w_i, w_j)
  CHECK_THROWS(mwis_to_qubo(edge_graph("1", "2"), Decimal(1)));
  CHECK_NOTHROW(mwis_to_qubo(edge_graph("1", "2"), Decimal::parse("1.01")));
}

TEST_CASE("qubo maximizers are the mwis indicators") {
  auto g9 = build_g9();
  auto q = mwis_to_qubo(g9);
  auto [opt, w] = brute_force_mwis(g9);
  uint64_t best = 0;
  double besty = -1e300;
  for (uint64_t x = 0; x < 512; ++x) {
    double y = q.value(x);
    if (y > besty) {
      besty = y;
      best = x;
    }
  }
  CHECK(best == opt.bits);
  CHECK(besty == doctest::Approx(w.to_double()).epsilon(1e-12));
}

TEST_CASE("ising conversion formulas") {
  auto q = mwis_to_qubo(edge_graph("1", "1"));
  auto m = qubo_to_ising(q);
  CHECK(m.h[0] == Decimal(2));
  CHECK(m.h[1] == Decimal(2));
  REQUIRE(m.coupling.size() == 1);
  CHECK(std::get<2>(m.coupling[0]) == Decimal(4));

  WeightedGraph iso;
  iso.n = 1;
  iso.weights = {Decimal(1)};
  iso.finalize();
  auto mi = qubo_to_ising(mwis_to_qubo(iso));
  CHECK(mi.h[0] == Decimal(-2));

  // spins (-1,-1) on h=(2,2), J=4: -2-2+4 plus the offset
  double expect = -2 - 2 + 4 + m.offsetd;
  CHECK(ising_energy(m, {-1, -1}) == doctest::Approx(expect).epsilon(1e-14));
  CHECK_THROWS(ising_energy(m, {1}));

  IsingModel zero;
  zero.n = 2;
  zero.h = {Decimal(0), Decimal(0)};
  zero.offset = Decimal::parse("0.25");
  zero.materialize();
  CHECK(ising_energy(zero, {1, -1}) == 0.25);
}

TEST_CASE("energy equals -4Y over every configuration") {
  auto g = build_g12();
  auto q = mwis_to_qubo(g);
  auto m = qubo_to_ising(q);
  for (uint64_t x = 0; x < (uint64_t(1) << g.n); ++x) {
    uint64_t basis = set_to_basis(VertexSet(x), g.n);
    CHECK(ising_energy_basis(m, basis) == doctest::Approx(-4.0 * q.value(x)).epsilon(1e-12));
  }
}

TEST_CASE("argmin of the ising energy is the mwis") {
  std::vector<WeightedGraph> graphs{build_g9(), build_grm(Decimal(1), Decimal::parse("1.8"))};
  for (uint64_t seed : {1, 2, 3}) {
    graphs.push_back(generate_gic(3, 2, Decimal::parse("1.34"), Decimal::parse("1.20"),
                                  Decimal::parse("1.30"), seed));
    graphs.push_back(generate_gic(2, 3, Decimal::parse("1.34"), Decimal::parse("1.20"),
                                  Decimal::parse("1.30"), seed));
  }
  for (const auto& g : graphs) {
    auto m = qubo_to_ising(mwis_to_qubo(g));
    auto [opt, w] = brute_force_mwis(g);
    (void)w;
    uint64_t best = 0;
    double beste = 1e300;
    for (uint64_t b = 0; b < (uint64_t(1) << g.n); ++b) {
      double e = ising_energy_basis(m, b);
      if (e < beste) {
        beste = e;
        best = b;
      }
    }
    CHECK(basis_to_set(best, g.n) == opt);
  }
}

TEST_CASE("weight recovery is exact") {
  for (const auto& g : {build_g9(), build_g12(), build_grm(Decimal(1), Decimal::parse("1.8"))}) {
    auto m = qubo_to_ising(mwis_to_qubo(g));
    auto w = recover_weights(m);
    REQUIRE(static_cast<int>(w.size()) == g.n);
    for (int i = 0; i < g.n; ++i) CHECK(w[i] == g.weights[i]);
  }
}

TEST_CASE("set to basis mapping") {
  CHECK(set_to_basis(VertexSet::of({0}), 2) == 0b10);
  CHECK(set_to_basis(VertexSet(), 2) == 0b11);
  for (uint64_t b = 0; b < 16; ++b) CHECK(set_to_basis(basis_to_set(b, 4), 4) == b);
}
