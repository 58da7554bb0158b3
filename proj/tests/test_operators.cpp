#include <doctest.h>

#include <random>

#include "aclab/operators.hpp"

using namespace aclab;

namespace {

IsingModel single_qubit(const char* h) {
  IsingModel m;
  m.n = 1;
  m.h = {Decimal::parse(h)};
  m.materialize();
  return m;
}

SystemSpec g9_spec(DriverSpec d) {
  auto g = build_g9();
  return SystemSpec{qubo_to_ising(mwis_to_qubo(g)), std::move(d)};
}

uint64_t state_of(const char* bits) {
  uint64_t s = 0;
  for (int i = 0; bits[i]; ++i)
    if (bits[i] == '1') s |= uint64_t(1) << i;
  return s;
}

}  // namespace

TEST_CASE("problem operator diagonal") {
  auto op = build_problem_operator(single_qubit("1"));
  REQUIRE(op.dim() == 2);
  CHECK(op.diag[0] == 1.0);   // |0> has spin +1
  CHECK(op.diag[1] == -1.0);

  IsingModel two;
  two.n = 2;
  two.h = {Decimal(0), Decimal(0)};
  two.coupling = {{0, 1, Decimal(1)}};
  two.materialize();
  auto op2 = build_problem_operator(two);
  CHECK(op2.diag[0] == 1.0);
  CHECK(op2.diag[1] == -1.0);
  CHECK(op2.diag[2] == -1.0);
  CHECK(op2.diag[3] == 1.0);

  auto spec = g9_spec(DriverSpec::transverse_field());
  auto op9 = build_problem_operator(spec.ising);
  for (uint64_t k = 0; k < 512; ++k)
    CHECK(op9.diag[k] == doctest::Approx(ising_energy_basis(spec.ising, k)).epsilon(1e-14));
}

TEST_CASE("system operator endpoints and a hand-built reference") {
  auto spec = g9_spec(DriverSpec::transverse_field());
  auto h0 = build_system_operator(spec, 0.0);
  CHECK(h0.diag.cwiseAbs().maxCoeff() == 0.0);
  for (const auto& t : h0.flips) {
    CHECK(__builtin_popcountll(t.mask) == 1);
    CHECK(t.coeff == -1.0);
  }
  auto h1 = build_system_operator(spec, 1.0);
  Matrix d1 = h1.dense();
  for (uint64_t k = 0; k < 512; ++k)
    CHECK(d1(k, k) == doctest::Approx(ising_energy_basis(spec.ising, k)).epsilon(1e-14));
  CHECK((d1 - Matrix(d1.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS(build_system_operator(spec, -0.1));
  CHECK_THROWS(build_system_operator(spec, 1.1));

  // 2-qubit catalyst reference at s = 0.5, one driver edge, jxx = 0.8
  IsingModel m;
  m.n = 2;
  m.h = {Decimal(1), Decimal(2)};
  m.materialize();
  SystemSpec cat{m, DriverSpec::catalyst(0.8, {{0, 1}})};
  Matrix h = build_system_operator(cat, 0.5).dense();
  Matrix ref(4, 4);
  ref << 1.5, -0.5, -0.5, 0.2,
        -0.5, 0.5, 0.2, -0.5,
        -0.5, 0.2, -0.5, -0.5,
         0.2, -0.5, -0.5, -1.5;
  CHECK((h - ref).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("operators are symmetric and matvec matches dense") {
  auto spec = g9_spec(DriverSpec::catalyst(0.7, {{0, 1}, {3, 4}, {6, 7}}));
  for (double s : {0.2, 0.55, 0.9}) {
    auto op = build_system_operator(spec, s);
    Matrix d = op.dense();
    CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    Vector x(op.dim());
    for (auto& v : x) v = gauss(rng);
    Vector y = op.apply(x);
    CHECK((y - d * x).cwiseAbs().maxCoeff() < 1e-12 * d.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("catalyst with jxx=0 equals the transverse-field operator") {
  auto a = g9_spec(DriverSpec::transverse_field());
  auto b = g9_spec(DriverSpec::catalyst(0.0, {{0, 1}, {3, 4}}));
  for (double s : {0.1, 0.6}) {
    Matrix da = build_system_operator(a, s).dense();
    Matrix db = build_system_operator(b, s).dense();
    CHECK((da - db).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("schedule derivative matches finite differences") {
  auto spec = g9_spec(DriverSpec::catalyst(0.8, {{0, 1}, {3, 4}, {6, 7}}));
  double s = 0.37, e = 1e-3;
  Matrix dplus = build_system_operator(spec, s + e).dense();
  Matrix dminus = build_system_operator(spec, s - e).dense();
  Matrix dh = build_schedule_derivative(spec, s).dense();
  // H(s) is quadratic in s, so the central difference is exact
  CHECK(((dplus - dminus) / (2 * e) - dh).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("driver neighborhoods") {
  IsingModel m3;
  m3.n = 3;
  m3.h = {Decimal(0), Decimal(0), Decimal(0)};
  m3.materialize();
  SystemSpec d1{m3, DriverSpec::transverse_field()};
  auto nb = nbr_hd(d1, state_of("101"));
  std::vector<uint64_t> expect{state_of("001"), state_of("100"), state_of("111")};
  std::sort(expect.begin(), expect.end());
  CHECK(nb == expect);

  IsingModel m1;
  m1.n = 1;
  m1.h = {Decimal(0)};
  m1.materialize();
  SystemSpec one{m1, DriverSpec::transverse_field()};
  CHECK(nbr_hd(one, 0) == std::vector<uint64_t>{1});

  IsingModel m2;
  m2.n = 2;
  m2.h = {Decimal(0), Decimal(0)};
  m2.materialize();
  SystemSpec cat{m2, DriverSpec::catalyst(1.0, {{0, 1}})};
  auto nb2 = nbr_hd(cat, state_of("00"));
  CHECK(nb2 == std::vector<uint64_t>{1, 2, 3});

  // symmetry: y in nbr(x) iff x in nbr(y)
  auto spec9 = g9_spec(DriverSpec::catalyst(0.5, {{0, 1}, {3, 4}, {6, 7}}));
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    uint64_t x = rng() % 512;
    for (uint64_t y : nbr_hd(spec9, x)) {
      auto back = nbr_hd(spec9, y);
      CHECK(std::binary_search(back.begin(), back.end(), x));
    }
  }
}

TEST_CASE("driver distances") {
  IsingModel m3;
  m3.n = 3;
  m3.h = {Decimal(0), Decimal(0), Decimal(0)};
  m3.materialize();
  SystemSpec d1{m3, DriverSpec::transverse_field()};
  CHECK(dist_hd(d1, {state_of("101")}, {state_of("011")}) == 2);
  CHECK(dist_hd(d1, {state_of("101")}, {state_of("101")}) == 0);
  CHECK_THROWS(dist_hd(d1, {}, {state_of("101")}));

  auto spec = g9_spec(DriverSpec::transverse_field());
  auto g9 = build_g9();
  std::vector<uint64_t> locals;
  for (const auto& [s, w] : enumerate_maximal_is(g9))
    if (!(s == VertexSet::of({2, 5, 8}))) locals.push_back(set_to_basis(s, 9));
  std::vector<uint64_t> global{set_to_basis(VertexSet::of({2, 5, 8}), 9)};
  CHECK(dist_hd(spec, locals, global) == 6);

  // a double flip on a driver edge counts as one move
  SystemSpec cat{m3, DriverSpec::catalyst(1.0, {{0, 1}})};
  CHECK(dist_hd(cat, {state_of("000")}, {state_of("110")}) == 1);
}

TEST_CASE("state partition") {
  IsingModel m1;
  m1.n = 1;
  m1.h = {Decimal(0)};
  m1.materialize();
  SystemSpec one{m1, DriverSpec::transverse_field()};
  auto p1 = partition_nl_nr(one, {0}, {1});
  CHECK(p1.count(StatePartition::InL) == 1);
  CHECK(p1.count(StatePartition::InR) == 1);
  CHECK(p1.count(StatePartition::NearL) == 0);
  CHECK(p1.count(StatePartition::NearR) == 0);

  IsingModel m2;
  m2.n = 2;
  m2.h = {Decimal(0), Decimal(0)};
  m2.materialize();
  SystemSpec two{m2, DriverSpec::transverse_field()};
  auto p2 = partition_nl_nr(two, {state_of("00")}, {state_of("11")});
  // the two equidistant states go to n(L) by the tie rule
  CHECK(p2.side[state_of("10")] == StatePartition::NearL);
  CHECK(p2.side[state_of("01")] == StatePartition::NearL);

  auto spec = g9_spec(DriverSpec::transverse_field());
  auto g9 = build_g9();
  std::vector<uint64_t> locals;
  for (const auto& [s, w] : enumerate_maximal_is(g9))
    if (!(s == VertexSet::of({2, 5, 8}))) locals.push_back(set_to_basis(s, 9));
  std::vector<uint64_t> global{set_to_basis(VertexSet::of({2, 5, 8}), 9)};
  auto p9 = partition_nl_nr(spec, locals, global);
  CHECK(p9.count(StatePartition::InL) + p9.count(StatePartition::NearL) +
            p9.count(StatePartition::InR) + p9.count(StatePartition::NearR) ==
        512);
  CHECK_THROWS(partition_nl_nr(spec, locals, locals));
}

TEST_CASE("coordinate dump is upper triangular and complete") {
  auto spec = g9_spec(DriverSpec::catalyst(0.5, {{0, 1}}));
  auto op = build_system_operator(spec, 0.4);
  auto entries = op.coo();
  Matrix d = op.dense();
  Matrix rebuilt = Matrix::Zero(d.rows(), d.cols());
  for (auto [r, c, v] : entries) {
    rebuilt(r, c) += v;
    if (r != c) rebuilt(c, r) += v;
  }
  CHECK((rebuilt - d).cwiseAbs().maxCoeff() == 0.0);
}
