#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "exactnum.hpp"

using namespace asf;

namespace {

Laurent poly(const Fq& F, std::initializer_list<std::pair<int, long>> terms) {
  Laurent x(F);
  for (auto [e, c] : terms) x += Laurent::monomial(F, F.from_int(c), e);
  return x;
}

Laurent random_poly(const Fq& F, std::mt19937& rng, int lo, int hi) {
  Laurent x(F);
  std::uniform_int_distribution<int> coef(0, F.q() - 1);
  for (int e = lo; e < hi; ++e) x += Laurent::monomial(F, static_cast<Elt>(coef(rng)), e);
  return x;
}

// determinant by permutation expansion, independent of the Berkowitz code
Laurent det_by_permutations(const LMatrix& M) {
  int n = M.rows();
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  Laurent total(M.field());
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    Laurent term = Laurent::constant(M.field(), 1);
    for (int i = 0; i < n; ++i) term *= M.at(i, perm[i]);
    total += (inversions % 2) ? -term : term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

}  // namespace

TEST_CASE("finite field tables satisfy the field axioms") {
  for (auto [p, m] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {5, 1}, {7, 1}, {2, 2}, {3, 2}, {5, 2}, {2, 3}, {3, 3}, {2, 4}}) {
    const Fq& F = Fq::get(p, m);
    CHECK(is_irreducible(p, F.spec().modulus));
    int q = F.q();
    for (int a = 0; a < q; ++a) {
      CHECK(F.add(static_cast<Elt>(a), F.neg(static_cast<Elt>(a))) == 0);
      if (a) CHECK(F.mul(static_cast<Elt>(a), F.inv(static_cast<Elt>(a))) == 1);
      for (int b = 0; b < q; ++b)
        for (int c = 0; c < q; c += 3) {
          Elt A = static_cast<Elt>(a), B = static_cast<Elt>(b), C = static_cast<Elt>(c);
          CHECK(F.mul(A, F.add(B, C)) == F.add(F.mul(A, B), F.mul(A, C)));
        }
    }
    // primitive element generates the multiplicative group
    std::set<Elt> seen;
    Elt x = 1;
    for (int i = 0; i < q - 1; ++i) {
      seen.insert(x);
      x = F.mul(x, F.primitive());
    }
    CHECK(static_cast<int>(seen.size()) == q - 1);
    int squares = 0;
    for (int a = 1; a < q; ++a) squares += F.is_square(static_cast<Elt>(a));
    CHECK(squares == (p == 2 ? q - 1 : (q - 1) / 2));
  }
}

TEST_CASE("reducible polynomials are rejected") {
  CHECK_FALSE(is_irreducible(5, {1, 0, 1 - 5}));  // x^2 - 4 = (x-2)(x+2)
  CHECK(is_irreducible(5, {2, 0, 1}));            // x^2 + 2, 3 is a non-square
  CHECK_FALSE(is_irreducible(2, {1, 0, 1}));      // (x+1)^2
}

TEST_CASE("Laurent arithmetic tracks precision") {
  const Fq& F = Fq::get(5, 1);
  Laurent a = poly(F, {{0, 1}, {1, 2}});
  Laurent b = poly(F, {{-1, 3}, {2, 1}});
  CHECK((a * b).valuation() == -1);
  CHECK((a * b).coeff(0) == F.from_int(6));
  Laurent inv = a.inverse(10);
  CHECK(inv.prec() == 10);
  Laurent one = (a * inv).truncated(10);
  CHECK(one.agrees_with(Laurent::constant(F, 1)));
  CHECK((a * inv).prec() == 10);

  Laurent z = Laurent::zero_mod(F, 3);
  CHECK_THROWS_AS(z.valuation(), Error);
  CHECK(z.in_tk(3));
  CHECK_THROWS_AS(z.in_tk(4), Error);
  // product of a truncated zero with t^2 is known to t^5
  CHECK((z * Laurent::monomial(F, 1, 2)).prec() == 5);
  Laurent t3 = Laurent::monomial(F, 1, 3);
  CHECK(t3.inverse(kExact) == Laurent::monomial(F, 1, -3));
  CHECK((t3 + -t3).is_exact_zero());
}

TEST_CASE("Laurent inverse over an extension field") {
  const Fq& F = Fq::get(3, 2);
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Laurent x = random_poly(F, rng, 0, 5) + Laurent::monomial(F, 1, -2);
    Laurent y = x.inverse(8);
    CHECK((x * y).agrees_with(Laurent::constant(F, 1)));
  }
}

TEST_CASE("charpoly and adjugate against a permutation-expansion oracle") {
  const Fq& F = Fq::get(7, 1);
  std::mt19937 rng(11);
  for (int n = 1; n <= 5; ++n)
    for (int trial = 0; trial < 4; ++trial) {
      LMatrix M(F, n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M.at(i, j) = random_poly(F, rng, -1, 2);
      CHECK(M.det() == det_by_permutations(M));
      LMatrix prod = M * M.adjugate();
      CHECK(prod == LMatrix::identity(F, n).scaled(M.det()));
    }
}

TEST_CASE("QValue arithmetic in Q(sqrt q)") {
  QValue r = QValue::qpow_half(5, 1);
  CHECK(r * r == QValue::integer(5, 5));
  CHECK(QValue::qpow_half(5, -1) * r == QValue::integer(5, 1));
  CHECK(QValue::qpow_half(9, 1) == QValue::integer(9, 3));
  QValue x(7, 2, 1), y(7, -1, 3);
  CHECK((x / y) * y == x);
  CHECK(QValue(7, 3) < QValue(7, 0, 2));   // 3 < 2*sqrt(7)
  CHECK(QValue(7, 0, 1) < QValue(7, 3));   // sqrt(7) < 3
  CHECK(QValue::qpow(3, -2).str() == "1/9");
  CHECK(eval_poly({-1, 0, 1}, 5) == 24);
}

TEST_CASE("lattice index examples") {
  const Fq& F = Fq::get(5, 1);
  OLattice A = OLattice::diagonal(F, {0, 0, 0});
  OLattice tA = OLattice::diagonal(F, {1, 1, 1});
  CHECK(lattice_index(A, tA) == QValue::qpow(5, 3));
  CHECK(lattice_index(A, A) == QValue::integer(5, 1));
  CHECK(lattice_index(A, tA) * lattice_index(tA, A) == QValue::integer(5, 1));
  // sl2 in the basis (H, E, F): hyperspecial O^3 against the Iwahori lattice
  OLattice go = OLattice::diagonal(F, {0, 0, 0});
  OLattice gx = OLattice::diagonal(F, {0, 0, 1});
  CHECK(lattice_index(go, gx) == QValue::qpow(5, 1));
}

TEST_CASE("Hermite basis is independent of the generating set") {
  const Fq& F = Fq::get(5, 1);
  std::mt19937 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 3;
    std::vector<LVector> gens(n, LVector(n, Laurent(F)));
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) gens[j][i] = random_poly(F, rng, -1, 3);
    OLattice L;
    try {
      L = OLattice::span(F, n, gens);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::RankDeficient);
      continue;
    }
    // mix generators by a unimodular O-matrix and add redundant ones
    std::vector<LVector> mixed = gens;
    for (int j = 0; j < n; ++j) {
      Laurent c = random_poly(F, rng, 0, 3);
      for (int i = 0; i < n; ++i) mixed[j][i] += c * gens[(j + 1) % n][i];
    }
    LVector extra(n, Laurent(F));
    for (int i = 0; i < n; ++i) extra[i] = gens[0][i].shifted(2) + gens[1][i];
    mixed.push_back(extra);
    OLattice L2 = OLattice::span(F, n, mixed);
    CHECK(L.key() == L2.key());
    CHECK(L.det_valuation() == det_by_permutations(L.basis()).valuation());
    for (const auto& g : gens) CHECK(L.contains(g));
    // determinant of the generators matches the index from the standard lattice
    LMatrix G(F, n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) G.at(i, j) = gens[j][i];
    CHECK(L.det_valuation() == G.det().valuation());
  }
}

TEST_CASE("dual lattice is an involution and the reference lattice is self-dual") {
  const Fq& F = Fq::get(7, 1);
  std::mt19937 rng(5);
  int n = 3;
  LMatrix gram(F, n, n);  // a symmetric unimodular form with an off-diagonal term
  gram.at(0, 0) = Laurent::from_int(F, 1);
  gram.at(1, 2) = Laurent::from_int(F, 1);
  gram.at(2, 1) = Laurent::from_int(F, 1);
  OLattice std0 = OLattice::diagonal(F, {0, 0, 0});
  CHECK(dual_lattice(std0, gram, 0) == std0);
  for (int trial = 0; trial < 15; ++trial) {
    std::vector<LVector> gens(n, LVector(n, Laurent(F)));
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) gens[j][i] = random_poly(F, rng, 0, 3);
    OLattice L;
    try {
      L = OLattice::span(F, n, gens);
    } catch (const Error&) {
      continue;
    }
    OLattice D = dual_lattice(L, gram, 1);
    CHECK(dual_lattice(D, gram, 1) == L);
    // index relation: [std:L] [std:L*] = q^{-n} for the shift-1 duality
    CHECK(L.det_valuation() + D.det_valuation() == n);
  }
  LMatrix zero(F, n, n);
  CHECK_THROWS_AS(dual_lattice(std0, zero, 0), Error);
}
