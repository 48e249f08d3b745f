#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "orbint.hpp"

using namespace asf;

namespace {

Laurent mono(const Fq& F, long c, int e) { return Laurent::monomial(F, F.from_int(c), e); }

LMatrix sl2_diag(const Fq& F, int k) {
  const auto& G = GroupModel::get(GroupType::A1);
  return G.cartan_element(F, {mono(F, 1, k), mono(F, -1, k)});
}

QValue Qi(int q, long v) { return QValue::integer(q, v); }

KMat sl2_E(const Fq& F, Elt c) {
  KMat e(F, 2);
  e.at(0, 1) = c;
  return e;
}

}  // namespace

TEST_CASE("sl2 values by both routes") {
  const auto& G = GroupModel::get(GroupType::A1);
  for (int q : {3, 5}) {
    CAPTURE(q);
    const Fq& F = Fq::of_order(q);
    auto fx = lattice_indicator(G.rs, "x", 0), fo = lattice_indicator(G.rs, "o", 0);
    for (Route r : {Route::PointCount, Route::Direct}) {
      CAPTURE(route_name(r));
      CHECK(orbital_integral(G, sl2_diag(F, 0), fx, F, r).value == Qi(q, 2));
      CHECK(orbital_integral(G, sl2_diag(F, 1), fx, F, r).value == Qi(q, 2));
      CHECK(orbital_integral(G, sl2_diag(F, 1), fo, F, r).value == Qi(q, q + 1));
      CHECK(orbital_integral(G, sl2_diag(F, 0), fo, F, r).value == Qi(q, q + 1));
    }
    // |W| q^{v(D)/2} points times q^{-v(D)/2}
    CHECK(orbital_integral(G, sl2_diag(F, 2), fx, F).value == Qi(q, 2));
  }
}

TEST_CASE("supports away from the orbit give zero") {
  const auto& G = GroupModel::get(GroupType::A1);
  const Fq& F = Fq::of_order(5);
  // toral part of every conjugate is gamma itself
  CHECK(orbital_integral(G, sl2_diag(F, 0), lattice_indicator(G.rs, "x", 1), F).value.is_zero());
  CHECK(orbital_integral(G, sl2_diag(F, -1), lattice_indicator(G.rs, "o", 0), F).value.is_zero());
  CHECK(orbital_integral(G, sl2_diag(F, 1), zero_function(G.rs), F).value.is_zero());
  // a topologically nilpotent element never reduces to a nonzero semisimple class
  KMat h(F, 2);
  h.at(0, 0) = 1, h.at(1, 1) = F.neg(1);
  CHECK_THROWS_AS(orbital_integral(G, sl2_diag(F, 1), coset_indicator(G.rs, "o", h), F), Error);
}

TEST_CASE("route equivalence across groups and test functions") {
  struct Case {
    GroupType t;
    int q;
    std::vector<std::vector<std::pair<long, int>>> diag;  // ambient entries as sums of c t^e
    std::vector<std::string> ys;
  };
  std::vector<Case> cases = {
      {GroupType::A1, 7, {{{1, 2}}, {{-1, 2}}}, {"x", "o"}},
      {GroupType::A2, 5, {{{1, 0}}, {{-1, 0}}, {}}, {"x", "o", "v1"}},
      {GroupType::A2, 5, {{{1, 0}}, {{1, 0}, {1, 1}}, {{-2, 0}, {-1, 1}}}, {"x", "o"}},
      {GroupType::C2, 5, {{{1, 0}}, {{2, 0}}}, {"x", "o", "v1"}},
  };
  for (const auto& c : cases) {
    const auto& G = GroupModel::get(c.t);
    const Fq& F = Fq::of_order(c.q);
    std::vector<Laurent> amb;
    for (const auto& terms : c.diag) {
      Laurent s(F);
      for (auto [k, e] : terms) s += mono(F, k, e);
      amb.push_back(s);
    }
    LMatrix g = G.cartan_element(F, amb);
    for (const auto& y : c.ys) {
      CAPTURE(group_name(c.t));
      CAPTURE(y);
      auto f = lattice_indicator(G.rs, y, 0);
      auto a = orbital_integral(G, g, f, F, Route::PointCount);
      auto b = orbital_integral(G, g, f, F, Route::Direct);
      CHECK(a.value == b.value);
      CHECK(Qi(c.q, 0) < a.value);
    }
  }
  // class-resolved functions on a topologically nilpotent element
  const auto& A1 = GroupModel::get(GroupType::A1);
  for (int q : {5, 7}) {
    const Fq& F = Fq::of_order(q);
    LMatrix g = sl2_diag(F, 1);
    for (Elt c : {Elt(1), F.primitive()}) {
      auto f = coset_indicator(A1.rs, "o", sl2_E(F, c), 2);
      CHECK(orbital_integral(A1, g, f, F, Route::PointCount).value == orbital_integral(A1, g, f, F, Route::Direct).value);
    }
    for (const char* label : {"reg", "0"}) {
      auto f = orbit_indicator(A1.rs, "o", label);
      CHECK(orbital_integral(A1, g, f, F, Route::PointCount).value == orbital_integral(A1, g, f, F, Route::Direct).value);
    }
  }
}

TEST_CASE("orbit preimages partition the parahoric lattice") {
  const auto& A2 = GroupModel::get(GroupType::A2);
  const Fq& F = Fq::of_order(7);
  LMatrix g = A2.cartan_element(F, {mono(F, 1, 1), mono(F, 2, 1), mono(F, -3, 1)});
  auto Q = reductive_quotient(A2.rs, A2.rs.origin());
  QValue sum = Qi(7, 0);
  for (const auto& label : quotient_orbit_labels(A2, Q)) {
    auto v = orbital_integral(A2, g, orbit_indicator(A2.rs, "o", label), F).value;
    CHECK(Qi(7, 0) <= v);
    sum += v;
  }
  CHECK(sum == orbital_integral(A2, g, lattice_indicator(A2.rs, "o", 0), F).value);
  // closures accumulate the smaller orbits
  CHECK(orbital_integral(A2, g, orbit_indicator(A2.rs, "o", "reg", 0, true), F).value == sum);
  CHECK(orbital_integral(A2, g, orbit_indicator(A2.rs, "o", "0", 0, true), F).value ==
        orbital_integral(A2, g, orbit_indicator(A2.rs, "o", "0"), F).value);
}

TEST_CASE("conjugation invariance of coset integrals") {
  // I_gamma(1_{Ad(k) ebar + g_{o,>0}}) = I_gamma(1_{ebar + g_{o,>0}}) for k in G_{o,>=0}
  const auto& A2 = GroupModel::get(GroupType::A2);
  const Fq& F = Fq::of_order(7);
  LMatrix g = A2.cartan_element(F, {mono(F, 1, 1), mono(F, 2, 1), mono(F, -3, 1)});
  KMat e(F, 3);
  e.at(0, 1) = 1, e.at(1, 2) = 1;
  QValue base = orbital_integral(A2, g, coset_indicator(A2.rs, "o", e), F).value;
  std::vector<std::pair<int, Elt>> samples = {{0, 3}, {3, 5}, {4, 1}, {5, 2}};
  KMat k = KMat::identity(F, 3), kinv = KMat::identity(F, 3);
  for (auto [a, c] : samples) {
    k = k * A2.root_subgroup_k(F, a, c);
    kinv = A2.root_subgroup_k(F, a, F.neg(c)) * kinv;
    KMat e2 = k * e * kinv;
    CHECK(orbital_integral(A2, g, coset_indicator(A2.rs, "o", e2), F).value == base);
  }
  // a different cube class gives a different function with its own value
  KMat e3 = e;
  e3.at(0, 1) = F.primitive();
  auto v3 = orbital_integral(A2, g, coset_indicator(A2.rs, "o", e3), F);
  CHECK(Qi(7, 0) <= v3.value);
}

TEST_CASE("dilation") {
  const auto& A1 = GroupModel::get(GroupType::A1);
  const auto& A2 = GroupModel::get(GroupType::A2);
  for (int q : {3, 5}) {
    const Fq& F = Fq::of_order(q);
    for (int k : {0, 1, 2})
      for (const char* y : {"x", "o"}) {
        auto [lhs, rhs] = dilate(A1, sl2_diag(F, k), lattice_indicator(A1.rs, y, 0), F);
        CHECK(lhs == rhs);
        CHECK(lhs == QValue::qpow(q, 1) * orbital_integral(A1, sl2_diag(F, k), lattice_indicator(A1.rs, y, 0), F).value);
      }
  }
  const Fq& F7 = Fq::of_order(7);
  LMatrix g = A2.cartan_element(F7, {mono(F7, 1, 1), mono(F7, 2, 1), mono(F7, -3, 1)});
  auto [lhs, rhs] = dilate(A2, g, lattice_indicator(A2.rs, "x", 0), F7);
  CHECK(lhs == rhs);
  CHECK(lhs == QValue::qpow(7, 3) * orbital_integral(A2, g, lattice_indicator(A2.rs, "x", 0), F7).value);
  auto [z1, z2] = dilate(A1, sl2_diag(F7, 1), zero_function(A1.rs), F7);
  CHECK(z1.is_zero());
  CHECK(z2.is_zero());
}

TEST_CASE("normalization conversions") {
  const auto& A1 = GroupModel::get(GroupType::A1);
  const Fq& F = Fq::of_order(5);
  auto Qo = reductive_quotient(A1.rs, A1.rs.origin());
  auto Qx = reductive_quotient(A1.rs, A1.rs.base_point);
  // v(D) = 0 leaves the DK value unchanged
  auto n0 = convert_normalization(Qi(5, 2), 0, Qx, 5);
  CHECK(n0.dk == Qi(5, 2));
  // diag(t,-t) at o: I = q + 1 = 6, I^DK = q I = 30, I^GKM = 30 (q-1)/(q^3-q) q = 5 = the fiber count
  auto v = orbital_integral(A1, sl2_diag(F, 1), lattice_indicator(A1.rs, "o", 0), F).value;
  auto n = convert_normalization(v, 2, Qo, 5);
  CHECK(v == Qi(5, 6));
  CHECK(n.dk == Qi(5, 30));
  CHECK(n.gkm == Qi(5, 5));
  CHECK(self_dual_from_gkm(n.gkm, 2, Qo, 5) == v);
  CHECK(self_dual_from_gkm(n0.gkm, 0, Qx, 5) == Qi(5, 2));
}

TEST_CASE("volume factors from dual lattices") {
  for (GroupType t : {GroupType::A1, GroupType::A2, GroupType::C2}) {
    const auto& G = GroupModel::get(t);
    const Fq& F = Fq::of_order(7);
    // g_{x,>0} and t(Lie T) both have measure q^{-rank/2}
    CHECK(iwahori_torus_volume_ratio(G, F) == Qi(7, 1));
  }
  const auto& A2 = GroupModel::get(GroupType::A2);
  const Fq& F = Fq::of_order(7);
  LMatrix g = A2.cartan_element(F, {mono(F, 1, 1), mono(F, 2, 1) + mono(F, 1, 2), mono(F, -3, 1) + mono(F, -1, 2)});
  CHECK(tangent_factor(A2, g) == QValue::qpow_half(7, -discriminant_valuation(A2, g)));
}

TEST_CASE("evaluation and csv") {
  const auto& A1 = GroupModel::get(GroupType::A1);
  const Fq& F = Fq::of_order(5);
  LMatrix X = parse_lie_element(A1, "[[t,1+t],[t^2,-t]]", F);
  CHECK(evaluate(A1, coset_indicator(A1.rs, "o", sl2_E(F, 1), 2), X, 5) == Qi(5, 5));
  CHECK(evaluate(A1, coset_indicator(A1.rs, "o", sl2_E(F, 2), 2), X, 5).is_zero());
  CHECK(evaluate(A1, orbit_indicator(A1.rs, "o", "reg", -2), X, 5) == QValue(5, mpq_class(1, 5)));
  CHECK(evaluate(A1, lattice_indicator(A1.rs, "x", 0), X, 5) == Qi(5, 1));
  CHECK(evaluate(A1, lattice_indicator(A1.rs, "x", 1), X, 5).is_zero());
  auto v = orbital_integral(A1, sl2_diag(F, 1), lattice_indicator(A1.rs, "o", 0), F);
  CHECK(integral_csv_header() == "gamma,f,q,value_num,value_den,route");
  CHECK(integral_csv_row("diag(t,-t)", lattice_indicator(A1.rs, "o", 0), 5, v) ==
        "\"diag(t,-t)\",\"1[g_{o,>=0}]\",5,6,1,point-count");
}
