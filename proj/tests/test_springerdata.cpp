#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <unordered_map>
#include <unordered_set>

#include "exactnum.hpp"
#include "flagcount.hpp"
#include "liemodel.hpp"
#include "rootdata.hpp"
#include "springerdata.hpp"

using namespace asf;

namespace {

KMat diag_k(const Fq& F, const std::vector<Elt>& d) {
  KMat m(F, static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m.at(i, i) = d[i];
  return m;
}

// Adjoint rational orbits of G_{o,0}(F_q) on the nilpotent cone: breadth-first
// search under root subgroups, the simply connected torus, and one similitude
// (diag(c, 1, ..) for sl_n, diag(c, c, 1, 1) for sp4) generating the adjoint
// torus modulo the simply connected one. Returns orbit id per element key.
std::unordered_map<std::string, int> adjoint_orbits(const GroupModel& G, const ReductiveQuotient& Q, const Fq& F,
                                                    std::vector<KMat>& reps) {
  std::vector<std::pair<KMat, KMat>> gens;
  for (int a : Q.roots)
    for (Elt b : F.prime_basis()) gens.push_back({G.root_subgroup_k(F, a, b), G.root_subgroup_k(F, a, F.neg(b))});
  Elt c = F.primitive(), ci = F.inv(c);
  std::vector<Elt> d(G.n, 1), di(G.n, 1);
  d[0] = c, di[0] = ci;
  if (G.rs.type == GroupType::C2) d[1] = c, di[1] = ci;
  gens.push_back({diag_k(F, d), diag_k(F, di)});
  for (int j : G.rs.simple) {
    std::vector<Elt> t(G.n, 1), ti(G.n, 1);
    const auto& lam = G.rs.coroots[j];
    auto pw = [&](Elt z, int e) {
      Elt b = e >= 0 ? z : F.inv(z), r = 1;
      for (int i = 0; i < std::abs(e); ++i) r = F.mul(r, b);
      return r;
    };
    if (G.rs.type == GroupType::C2) {
      t = {pw(c, lam[0]), pw(c, lam[1]), pw(c, -lam[1]), pw(c, -lam[0])};
    } else {
      for (int i = 0; i < G.n; ++i) t[i] = pw(c, lam[i]);
    }
    for (int i = 0; i < G.n; ++i) ti[i] = F.inv(t[i]);
    gens.push_back({diag_k(F, t), diag_k(F, ti)});
  }
  std::unordered_map<std::string, int> id;
  std::vector<int> pos = Q.positive;
  std::vector<int> digits(pos.size(), 0);
  for (;;) {
    std::vector<Elt> cf(G.dim, 0);
    for (size_t i = 0; i < pos.size(); ++i) cf[G.rs.rank + pos[i]] = static_cast<Elt>(digits[i]);
    KMat X = G.from_coords(F, cf);
    if (!id.count(X.key())) {
      int k = static_cast<int>(reps.size());
      reps.push_back(X);
      std::vector<KMat> orbit{X};
      id[X.key()] = k;
      for (size_t i = 0; i < orbit.size(); ++i)
        for (const auto& [g, gi] : gens) {
          KMat Y = g * orbit[i] * gi;
          if (id.emplace(Y.key(), k).second) orbit.push_back(Y);
        }
    }
    size_t i = 0;
    while (i < digits.size() && ++digits[i] == F.q()) digits[i++] = 0;
    if (i == digits.size()) break;
  }
  return id;
}

struct PointCase {
  GroupType t;
  const char* y;
  const char* weyl;
};

const std::vector<PointCase> points = {
    {GroupType::A1, "o", "A1"},          {GroupType::A1, "x", "1"},          {GroupType::A2, "o", "A2"},
    {GroupType::A2, "x", "1"},           {GroupType::A2, "1/2,-1/2,0", "A1"}, {GroupType::C2, "o", "C2"},
    {GroupType::C2, "v1", "A1xA1"},      {GroupType::C2, "v2", "C2"},        {GroupType::C2, "x", "1"},
    {GroupType::C2, "1/2,1/4", "A1"},
};

}  // namespace

TEST_CASE("Springer tables: every Weyl representation appears once") {
  for (const auto& [t, y, weyl] : points) {
    CAPTURE(group_name(t));
    CAPTURE(y);
    const auto& G = GroupModel::get(t);
    auto Q = reductive_quotient(G.rs, G.rs.named_point(y));
    CHECK(weyl_group_name(Q) == weyl);
    auto table = springer_table(G, Q);
    CHECK(springer_square_sum(table) == static_cast<int>(Q.weyl.size()));
    for (const auto& r : table) CHECK(r.rho_dim > 0);
  }
}

TEST_CASE("Springer table entries") {
  const auto& A1 = GroupModel::get(GroupType::A1);
  auto t = springer_table(A1, reductive_quotient(A1.rs, A1.rs.origin()));
  REQUIRE(t.size() == 2);
  CHECK(t[0].label == "reg");
  CHECK(t[0].rho_dim == 1);
  CHECK(t[0].centralizer_dim == 1);
  CHECK(t[1].label == "0");
  CHECK(t[1].rho_dim == 1);
  CHECK(t[1].centralizer_dim == 3);

  auto tx = springer_table(A1, reductive_quotient(A1.rs, A1.rs.named_point("x")));
  REQUIRE(tx.size() == 1);
  CHECK(tx[0].label == "0");
  CHECK(tx[0].rho_dim == 1);

  const auto& C2 = GroupModel::get(GroupType::C2);
  auto QC = reductive_quotient(C2.rs, C2.rs.origin());
  auto tc = springer_table(C2, QC);
  int subreg = 0;
  for (const auto& r : tc) {
    CHECK(r.component_group == (r.label == "subreg" ? 2 : 1));
    if (r.label == "subreg") ++subreg;
  }
  CHECK(subreg == 2);
  CHECK(component_group(C2, QC, "subreg") == 2);
  CHECK(component_group(C2, QC, "min") == 1);
  CHECK_THROWS_AS(component_group(C2, QC, "bogus"), Error);

  auto Qv1 = reductive_quotient(C2.rs, C2.rs.named_point("v1"));
  auto tv = springer_table(C2, Qv1);
  CHECK(tv.size() == 4);
  CHECK(tv.front().label == "reg+reg");
  CHECK(tv.front().eta == "1+1");
}

TEST_CASE("table witnesses in the matrix model") {
  for (int q : {5, 7}) {
    const Fq& F = Fq::of_order(q);
    for (const auto& [t, y, weyl] : points) {
      CAPTURE(group_name(t));
      CAPTURE(y);
      const auto& G = GroupModel::get(t);
      auto Q = reductive_quotient(G.rs, G.rs.named_point(y));
      for (const auto& r : springer_table(G, Q)) {
        KMat e = orbit_witness(G, Q, r.label, F);
        CHECK(classify_reduction(G, Q, e).label == r.label);
        CHECK(is_nilpotent(e));
        CHECK(centralizer_dim(G, Q, e) == r.centralizer_dim);
        CHECK((r.centralizer_dim - G.rs.rank) % 2 == 0);
        CHECK(springer_fiber_dim(G, Q, r.label) == (r.centralizer_dim - G.rs.rank) / 2);
      }
    }
  }
}

TEST_CASE("component groups count the adjoint rational forms") {
  // Lang: a split geometric orbit with abelian A(e) splits into |A(e)| rational orbits
  for (auto [t, q] : {std::pair{GroupType::A1, 5}, std::pair{GroupType::A1, 7}, std::pair{GroupType::A2, 7},
                      std::pair{GroupType::C2, 5}}) {
    CAPTURE(group_name(t));
    CAPTURE(q);
    const auto& G = GroupModel::get(t);
    const Fq& F = Fq::of_order(q);
    auto Q = reductive_quotient(G.rs, G.rs.origin());
    std::vector<KMat> reps;
    adjoint_orbits(G, Q, F, reps);
    std::map<std::string, int> per_label;
    for (const auto& X : reps) per_label[classify_reduction(G, Q, X).label] += 1;
    for (const auto& label : quotient_orbit_labels(G, Q)) {
      CAPTURE(label);
      CHECK(per_label[label] == component_group(G, Q, label));
    }
  }
}

TEST_CASE("trace classes against exhaustive conjugation") {
  const auto& G = GroupModel::get(GroupType::C2);
  const Fq& F = Fq::of_order(5);
  auto Q = reductive_quotient(G.rs, G.rs.origin());
  std::vector<KMat> reps;
  auto id = adjoint_orbits(G, Q, F, reps);
  int tested = 0, nontrivial = 0;
  for (const auto& label : {"subreg", "min", "reg"}) {
    KMat e = orbit_witness(G, Q, label, F);
    CHECK(trace_class(G, Q, e, e).cls == "1");
    int k = 0;
    for (const auto& [key, orbit] : id) {
      if (k++ % 37) continue;
      KMat X(F, G.n);
      X.a.assign(key.begin(), key.end());
      if (classify_reduction(G, Q, X).label != label) continue;
      bool conj = orbit == id.at(e.key());
      CHECK(trace_class(G, Q, X, e).cls == (conj ? "1" : "s"));
      ++tested;
      if (!conj) ++nontrivial;
    }
  }
  CHECK(tested > 50);
  CHECK(nontrivial > 0);
  CHECK(trace_value("sgn", TraceClass{"s"}) == -1);
  CHECK(trace_value("sgn", TraceClass{"1"}) == 1);
  CHECK(trace_value("1", TraceClass{"s"}) == 1);
  // trivial A(e): always the identity class
  const auto& A1 = GroupModel::get(GroupType::A1);
  auto QA = reductive_quotient(A1.rs, A1.rs.origin());
  KMat e = orbit_witness(A1, QA, "reg", F);
  CHECK(trace_class(A1, QA, e.scaled(F.primitive()), e).cls == "1");
  CHECK_THROWS_AS(trace_class(A1, QA, KMat(F, 2), e), Error);
}

TEST_CASE("Steinberg stratification for sl2") {
  const auto& G = GroupModel::get(GroupType::A1);
  auto rep = steinberg_check(G, "[[t^2,0],[0,-t^2]]", "o", {3, 5, 7, 11, 13});
  REQUIRE(rep.strata.size() == 2);
  CHECK(rep.dim_fiber == 2);
  const auto& reg = rep.strata[0];
  CHECK(reg.ebar == "reg");
  CHECK(reg.fit.d == 2);
  CHECK(reg.fit.C == doctest::Approx(1.0).epsilon(0.2));
  CHECK(reg.pass);
  const auto& zero = rep.strata[1];
  CHECK(zero.ebar == "0");
  CHECK(zero.expected_d == 1);
  CHECK(zero.fit.d == 1);
  CHECK(zero.fit.C == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(zero.pass);
  CHECK(rep.strata_sum_ok);
  CHECK(std::lround(rep.component_total) == 2);
  CHECK(rep.parahoric_fit.d == 2);
  CHECK(rep.parahoric_expected_C == 1);
  CHECK(rep.parahoric_fit.C == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.pass);
  for (size_t i = 0; i < reg.counts.size(); ++i) {
    mpz_class q = reg.counts[i].first;
    CHECK(reg.counts[i].second == q * q - q);
    CHECK(zero.counts[i].second == q);
  }
  // three small q bias the log-log slope of q^2 - q upward; start at 5
  auto only = steinberg_check(G, "[[t^2,0],[0,-t^2]]", "o", {5, 7, 11}, "reg");
  CHECK(only.strata.size() == 1);
  CHECK(only.pass);
  CHECK_THROWS_AS(steinberg_check(G, "[[t,0],[0,-t]]", "o", {3, 5, 7}), Error);
  auto rows = steinberg_csv_rows(only);
  CHECK(steinberg_csv_header() == "y,ebar,eta,q,count_weighted,fit_d,fit_C");
  CHECK(rows.size() == 3);
  CHECK(rows[0].rfind("o,reg,1,5,20,2,", 0) == 0);
}
