#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>

#include "rangarao.hpp"

using namespace asf;

namespace {

QValue Qi(int q, long v) { return QValue::integer(q, v); }
QValue Qr(int q, long a, long b) { return QValue(q, mpq_class(a, b)); }

const std::vector<GroupType> kGroups = {GroupType::A1, GroupType::A2, GroupType::C2};

// weights of the standard basis for a nilpotent partial permutation matrix:
// a chain v_k -> ... -> v_1 -> 0 of length k carries k-1, k-3, ..., 1-k
std::vector<int> jordan_weights(const KMat& e) {
  int n = e.n;
  std::vector<int> next(n, -1), prev(n, -1), w(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (e.at(i, j)) next[j] = i, prev[i] = j;  // e v_j = v_i
  for (int top = 0; top < n; ++top) {
    if (next[top] != -1) continue;  // top of a chain: e kills it
    std::vector<int> chain = {top};
    while (prev[chain.back()] != -1) chain.push_back(prev[chain.back()]);
    int k = static_cast<int>(chain.size());
    for (int j = 0; j < k; ++j) w[chain[j]] = k - 1 - 2 * j;
  }
  return w;
}

// diagonal exponents of lambda(z) in the matrix model
std::vector<int> lambda_diag(GroupType t, const IVec& l) {
  if (t == GroupType::C2) return {l[0], l[1], -l[1], -l[0]};
  return std::vector<int>(l.begin(), l.end());
}

}  // namespace

TEST_CASE("Jacobson-Morozov cocharacters") {
  const Fq& F = Fq::of_order(7);
  for (GroupType t : kGroups) {
    const auto& G = GroupModel::get(t);
    for (const auto& label : nilpotent_labels(t)) {
      CAPTURE(group_name(t));
      CAPTURE(label);
      auto d = nilpotent_datum(G, label, F);
      // Ad(lambda(z)) e = z^2 e entrywise
      auto D = lambda_diag(t, d.lambda);
      for (int i = 0; i < G.n; ++i)
        for (int j = 0; j < G.n; ++j)
          if (d.e.at(i, j)) CHECK(D[i] - D[j] == 2);
      // for sl_n the cocharacter is read off the Jordan chains
      if (t != GroupType::C2) CHECK(lambda_diag(t, d.lambda) == jordan_weights(d.e));
      if (label == "0") CHECK(d.lambda == IVec(G.rs.ambient, 0));
    }
  }
  const auto& A1 = GroupModel::get(GroupType::A1);
  const auto& A2 = GroupModel::get(GroupType::A2);
  const auto& C2 = GroupModel::get(GroupType::C2);
  CHECK(nilpotent_datum(A1, "reg", F).lambda == IVec{1, -1});
  CHECK(nilpotent_datum(A2, "reg", F).lambda == IVec{2, 0, -2});
  CHECK(nilpotent_datum(A2, "min", F).lambda == IVec{1, 0, -1});
  CHECK(nilpotent_datum(C2, "reg", F).lambda == IVec{3, 1});
  CHECK(nilpotent_datum(C2, "subreg", F).lambda == IVec{1, 1});
  CHECK(nilpotent_datum(C2, "min", F).lambda == IVec{1, 0});
  // orbit dimensions: sl2 2; sl3 6, 4; sp4 8, 6, 4
  CHECK(nilpotent_datum(A2, "min", F).orbit_dim == 4);
  CHECK(nilpotent_datum(C2, "subreg", F).orbit_dim == 6);
  CHECK(nilpotent_datum(C2, "min", F).orbit_dim == 4);
  CHECK(nilpotent_datum(C2, "reg", F).orbit_dim == 8);

  KMat dep = standard_nilpotent(A2, "reg", F) + standard_nilpotent(A2, "min", F);
  CHECK_THROWS_AS(jm_cocharacter(A2, dep), Error);
  KMat h(F, 2);
  h.at(0, 0) = 1, h.at(1, 1) = F.neg(1);
  try {
    jm_cocharacter(A1, h);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotNilpotent);
  }
}

TEST_CASE("mu_even normalization") {
  const auto& A1 = GroupModel::get(GroupType::A1);
  for (int q : {3, 5, 7}) {
    const Fq& F = Fq::of_order(q);
    auto d = nilpotent_datum(A1, "reg", F);
    const auto& rs = A1.rs;
    CHECK(mu_even(A1, weighted_lattice(rs, d.lambda, rs.base_point, 0, true), q) == Qi(q, 1));
    auto Lo = weighted_lattice(rs, d.lambda, rs.origin(), 0, true);
    CHECK(mu_even(A1, Lo, q) == Qr(q, q + 1, q));
    auto scaled = Lo;
    for (auto& e : scaled.exps) ++e;
    CHECK(mu_even(A1, scaled, q) * QValue::qpow(q, static_cast<int>(Lo.roots.size())) == mu_even(A1, Lo, q));
    auto bad = Lo;
    bad.exps.push_back(0);
    CHECK_THROWS_AS(mu_even(A1, bad, q), Error);
  }
}

TEST_CASE("mu_odd") {
  for (int q : {5, 7}) {
    const Fq& F = Fq::of_order(q);
    for (GroupType t : kGroups) {
      const auto& G = GroupModel::get(t);
      auto d = nilpotent_datum(G, "reg", F);
      LMatrix e = G.from_coords(F, [&] {
        std::vector<Laurent> c(G.dim, Laurent(F));
        for (int a : d.support) c[G.rs.rank + a] = Laurent::constant(F, 1);
        return c;
      }());
      for (const char* y : {"o", "x"}) CHECK(mu_odd(G, d.lambda, G.rs.named_point(y), e) == Qi(q, 1));
      auto z = nilpotent_datum(G, "0", F);
      CHECK(mu_odd(G, z.lambda, G.rs.origin(), LMatrix(F, G.n, G.n)) == Qi(q, 1));
    }
    // sp4 minimal orbit at o: ad(E_{2e1}) carries the two weight -1 lines of
    // g_{o,>=0} onto the weight 1 lines, which sit one step above g_{o,>0}
    const auto& C2 = GroupModel::get(GroupType::C2);
    auto d = nilpotent_datum(C2, "min", F);
    const auto& rs = C2.rs;
    auto k0 = mp_lattice(rs, rs.origin(), 0, false).root_exp, kp = mp_lattice(rs, rs.origin(), 0, true).root_exp;
    std::vector<int> minus, plus;
    for (int a = 0; a < rs.num_roots(); ++a) {
      if (d.weight(rs, a) == -1) minus.push_back(a);
      if (d.weight(rs, a) == 1) plus.push_back(a);
    }
    REQUIRE(minus.size() == 2);
    for (int n : {0, 1, 3}) {
      LMatrix X = C2.root_element(F, rs.theta, Laurent::monomial(F, 2, n));
      LMatrix T(F, 2, 2);
      for (int i = 0; i < 2; ++i) {
        auto img = C2.coords(bracket(X, C2.root_element(F, minus[i], Laurent::monomial(F, 1, k0[minus[i]]))));
        for (int j = 0; j < 2; ++j) T.at(j, i) = img[rs.rank + plus[j]];
      }
      int half = kp[plus[0]] + kp[plus[1]] - T.det().valuation();
      CHECK(mu_odd(C2, d.lambda, rs.origin(), X) == QValue::qpow_half(q, half));
      CHECK(mu_odd(C2, d.lambda, rs.origin(), X) == QValue::qpow(q, 1 - n));
    }
  }
}

TEST_CASE("nilpotent orbital integrals on lattices") {
  const auto& A1 = GroupModel::get(GroupType::A1);
  for (int q : {3, 5, 7, 11}) {
    const Fq& F = Fq::of_order(q);
    auto reg = nilpotent_datum(A1, "reg", F);
    auto vx = nilpotent_orbital_integral(A1, reg, lattice_indicator(A1.rs, "x", 0), F);
    CHECK(vx.total == Qi(q, 2));
    REQUIRE(vx.parts.size() == 2);
    for (const auto& p : vx.parts) CHECK(p.value == Qi(q, 1));
    CHECK(nilpotent_orbital_integral(A1, reg, lattice_indicator(A1.rs, "o", 0), F).total == Qi(q, q + 1));
    CHECK(nilpotent_orbital_integral(A1, reg, lattice_indicator(A1.rs, "x", -1), F).total == Qi(q, 2 * q));
    auto zero = nilpotent_datum(A1, "0", F);
    CHECK(nilpotent_orbital_integral(A1, zero, lattice_indicator(A1.rs, "o", 1), F).total == Qi(q, 1));
    CHECK(nilpotent_orbital_integral(A1, reg, zero_function(A1.rs), F).total.is_zero());
  }
  for (int q : {5, 7, 11, 13}) {
    const Fq& F = Fq::of_order(q);
    for (GroupType t : kGroups) {
      const auto& G = GroupModel::get(t);
      CAPTURE(group_name(t));
      CAPTURE(q);
      auto reg = nilpotent_datum(G, "reg", F);
      auto v = nilpotent_orbital_integral(G, reg, lattice_indicator(G.rs, "x", 0), F);
      CHECK(v.total == Qi(q, G.rs.order_w()));
      for (const auto& label : nilpotent_labels(t)) {
        CAPTURE(label);
        auto d = nilpotent_datum(G, label, F);
        auto w = nilpotent_orbital_integral(G, d, lattice_indicator(G.rs, "x", 0), F);
        CHECK(Qi(q, 0) < w.total);
        CHECK(w.total <= Qi(q, parabolic_index(G, d)));
        for (const auto& p : w.parts) CHECK(p.value <= Qi(q, 1));
      }
    }
  }
}

TEST_CASE("degeneration functions integrate to one") {
  for (int q : {5, 7, 13}) {
    const Fq& F = Fq::of_order(q);
    for (GroupType t : kGroups) {
      const auto& G = GroupModel::get(t);
      auto labels = nilpotent_labels(t);
      for (size_t i = 0; i < labels.size(); ++i) {
        CAPTURE(group_name(t));
        CAPTURE(q);
        CAPTURE(labels[i]);
        auto di = nilpotent_datum(G, labels[i], F);
        for (Elt c : {Elt(1), F.primitive()}) {
          auto f = coset_indicator(G.rs, "o", di.e.scaled(c), di.orbit_dim);
          CHECK(nilpotent_orbital_integral(G, di, f, F).total == Qi(q, 1));
          // smaller orbits never meet the support
          for (size_t j = i + 1; j < labels.size(); ++j)
            CHECK(nilpotent_orbital_integral(G, nilpotent_datum(G, labels[j], F), f, F).total.is_zero());
        }
        auto fo = orbit_indicator(G.rs, "o", labels[i], -di.orbit_dim);
        CHECK(nilpotent_orbital_integral(G, di, fo, F).total ==
              QValue::qpow_half(q, -di.orbit_dim) * nilpotent_orbital_integral(G, di, orbit_indicator(G.rs, "o", labels[i]), F).total);
      }
    }
  }
}

TEST_CASE("orbit preimages partition the lattice for nilpotent integrals") {
  for (GroupType t : kGroups) {
    const auto& G = GroupModel::get(t);
    const Fq& F = Fq::of_order(7);
    auto Q = reductive_quotient(G.rs, G.rs.origin());
    for (const auto& label : nilpotent_labels(t)) {
      auto d = nilpotent_datum(G, label, F);
      QValue sum = Qi(7, 0);
      for (const auto& l : quotient_orbit_labels(G, Q)) sum += nilpotent_orbital_integral(G, d, orbit_indicator(G.rs, "o", l), F).total;
      CHECK(sum == nilpotent_orbital_integral(G, d, lattice_indicator(G.rs, "o", 0), F).total);
    }
  }
}

TEST_CASE("anchor identity on every double coset") {
  for (int q : {5, 7}) {
    const Fq& F = Fq::of_order(q);
    for (GroupType t : kGroups) {
      const auto& G = GroupModel::get(t);
      std::vector<std::string> points = {"o", "x"};
      for (size_t v = 1; v <= G.rs.alcove_vertices().size(); ++v) points.push_back("v" + std::to_string(v));
      for (const auto& label : nilpotent_labels(t)) {
        if (label == "0") continue;
        auto d = nilpotent_datum(G, label, F);
        for (int w = 0; w < G.rs.order_w(); ++w) {
          auto dw = conjugate_datum(G, d, w);
          for (const auto& y : points)
            for (int level : {0, 1, 2}) {
              CAPTURE(group_name(t));
              CAPTURE(label);
              CAPTURE(w);
              CAPTURE(y);
              CAPTURE(level);
              auto s = anchor_identity(G, dw, G.rs.named_point(y), level, F);
              CHECK(s.lhs == s.rhs);
            }
        }
      }
    }
  }
}

TEST_CASE("nilpotent dilation") {
  for (int q : {5, 7}) {
    const Fq& F = Fq::of_order(q);
    for (GroupType t : kGroups) {
      const auto& G = GroupModel::get(t);
      for (const auto& label : nilpotent_labels(t)) {
        auto d = nilpotent_datum(G, label, F);
        for (const char* y : {"o", "x", "v1"})
          for (int level : {0, 1}) {
            auto [lhs, rhs] = nilpotent_dilate(G, d, lattice_indicator(G.rs, y, level), F);
            CHECK(lhs == rhs);
          }
      }
    }
  }
}

TEST_CASE("csv rows") {
  const auto& A1 = GroupModel::get(GroupType::A1);
  const Fq& F = Fq::of_order(5);
  auto d = nilpotent_datum(A1, "reg", F);
  auto f = lattice_indicator(A1.rs, "x", 0);
  auto v = nilpotent_orbital_integral(A1, d, f, F);
  CHECK(nilpotent_csv_header() == "e_label,f,y,q,alpha,partial_value,total");
  auto rows = nilpotent_csv_rows(A1, d, f, 5, v);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "reg,\"1[g_{x,>=0}]\",x,5,1,\"1\",\"2\"");
  CHECK(rows[1] == "reg,\"1[g_{x,>=0}]\",x,5,s1,\"1\",\"2\"");
}
