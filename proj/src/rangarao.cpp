#include "rangarao.hpp"

#include <sstream>

#include "flagcount.hpp"

namespace asf {

namespace {

LMatrix lift(const GroupModel& G, const KMat& X) {
  const Fq& F = *X.F;
  auto c = G.coords(X);
  std::vector<Laurent> l(G.dim, Laurent(F));
  for (int b = 0; b < G.dim; ++b)
    if (c[b]) l[b] = Laurent::constant(F, c[b]);
  return G.from_coords(F, l);
}

int weight_of(const RootSystem& rs, const IVec& lambda, int a) {
  int s = 0;
  for (int i = 0; i < rs.ambient; ++i) s += rs.roots[a][i] * lambda[i];
  return s;
}

std::vector<int> roots_with_weight(const RootSystem& rs, const IVec& lambda, int lo, int hi) {
  std::vector<int> out;
  for (int a = 0; a < rs.num_roots(); ++a) {
    int w = weight_of(rs, lambda, a);
    if (w >= lo && w <= hi) out.push_back(a);
  }
  return out;
}

// pieces of the parabolic ^lambda_{>=0} G_{y,0}
struct Parabolic {
  mpz_class group;  // |G_{y,0}|
  mpz_class levi;   // |^lambda_0 G_{y,0}|
  int neg = 0, pos = 0;
};

Parabolic parabolic(const GroupModel& G, const IVec& lambda, const QVec& y, int q) {
  const auto& rs = G.rs;
  auto Q = reductive_quotient(rs, y);
  Parabolic P;
  P.group = Q.order(q);
  std::vector<int> levi;
  for (int a : Q.roots) {
    int w = weight_of(rs, lambda, a);
    if (w < 0) ++P.neg;
    else if (w > 0) ++P.pos;
    else levi.push_back(a);
  }
  int npos = 0;
  for (int a : levi) npos += rs.positive[a];
  mpz_class poincare = 0;
  for (int u : reflection_subgroup(rs, levi)) {
    int len = 0;
    for (int a : levi)
      if (rs.positive[a] && !rs.positive[rs.root_perm[u][a]]) ++len;
    mpz_class t;
    mpz_ui_pow_ui(t.get_mpz_t(), q, len);
    poincare += t;
  }
  mpz_class torus, top;
  mpz_ui_pow_ui(torus.get_mpz_t(), q - 1, rs.rank);
  mpz_ui_pow_ui(top.get_mpz_t(), q, npos);
  P.levi = torus * top * poincare;
  return P;
}

QValue ratio(int q, const mpz_class& a, const mpz_class& b) {
  mpq_class r(a, b);
  r.canonicalize();
  return QValue(q, r);
}

// integral over one double coset after conjugating it to the identity
QValue coset_part(const GroupModel& G, const IVec& lambda, const TestFunction& f, const Fq& F) {
  const auto& rs = G.rs;
  int q = F.q();
  QValue zero = QValue::integer(q, 0);
  if (f.kind == TestKind::Zero) return zero;
  auto S = roots_with_weight(rs, lambda, 2, 1 << 20);
  int m = static_cast<int>(roots_with_weight(rs, lambda, 1, 1).size());
  QValue mu0 = mu_even_base(G, lambda, f.y, q);
  auto kp = mp_lattice(rs, f.y, 0, true).root_exp;
  auto k0 = mp_lattice(rs, f.y, 0, false).root_exp;
  QValue unit_odd = QValue::integer(q, 1);
  if (m > 0) {
    // odd weights occur only when the weight >= 2 space is a line
    if (S.size() != 1) fail(Errc::UnsupportedGroup, "odd weights with a weight >= 2 space of dimension > 1");
    unit_odd = mu_odd(G, lambda, f.y, G.root_element(F, S[0], Laurent::constant(F, 1)));
  }
  int s = 1 + m / 2;
  // integral of mu_odd over t^{kstart} O E_beta
  auto series = [&](int kstart) {
    int b = S[0];
    QValue one = QValue::integer(q, 1), qi = QValue(q, mpq_class(1, q));
    return mu0 * unit_odd * QValue::qpow(q, kp[b] - s * kstart) * (one - qi) / (one - QValue::qpow(q, -s));
  };
  if (f.kind == TestKind::Lattice) {
    auto kr = mp_lattice(rs, f.y, f.level, false).root_exp;
    QValue scale = QValue::qpow_half(q, f.scale_half);
    if (m > 0) return scale * series(kr[S[0]]);
    int e = 0;
    for (int b : S) e += kp[b] - kr[b];
    return scale * mu0 * QValue::qpow(q, e);
  }
  // level-0 kinds: residues of ^lambda_{>=2} g_{y,>=0} modulo g_{y,>0}
  auto Q = reductive_quotient(rs, f.y);
  std::vector<int> R;
  for (int b : S)
    if (Q.contains_root(b)) R.push_back(b);
  auto element = [&](const std::vector<Elt>& c) {
    std::vector<Laurent> l(G.dim, Laurent(F));
    for (size_t i = 0; i < R.size(); ++i)
      if (c[i]) l[rs.rank + R[i]] = Laurent::monomial(F, c[i], k0[R[i]]);
    return G.from_coords(F, l);
  };
  if (m > 0) {
    QValue at_zero = averaged_value(G, f, element(std::vector<Elt>(R.size(), 0)), q);
    if (R.empty()) return at_zero * series(k0[S[0]]);
    QValue sum = at_zero * series(kp[S[0]]);
    QValue odd = unit_odd * QValue::qpow_half(q, -m * k0[S[0]]);
    for (int c = 1; c < q; ++c) sum += averaged_value(G, f, element({static_cast<Elt>(c)}), q) * mu0 * odd;
    return sum;
  }
  QValue sum = zero;
  std::vector<Elt> c(R.size(), 0);
  while (true) {
    sum += averaged_value(G, f, element(c), q);
    size_t i = 0;
    while (i < c.size() && ++c[i] == q) c[i++] = 0;
    if (i == c.size()) break;
  }
  return sum * mu0;
}

}  // namespace

int NilpotentDatum::weight(const RootSystem& rs, int a) const { return weight_of(rs, lambda, a); }

std::vector<std::string> nilpotent_labels(GroupType t) {
  switch (t) {
    case GroupType::A1: return {"reg", "0"};
    case GroupType::A2: return {"reg", "min", "0"};
    case GroupType::C2: return {"reg", "subreg", "min", "0"};
  }
  return {};
}

KMat standard_nilpotent(const GroupModel& G, const std::string& label, const Fq& F) {
  const auto& rs = G.rs;
  std::vector<int> roots;
  if (label == "reg") roots = rs.simple;
  else if (label == "min" && rs.type != GroupType::A1) roots = {rs.theta};
  else if (label == "subreg" && rs.type == GroupType::C2) roots = {rs.root_index({1, 1})};
  else if (label != "0") fail(Errc::InvalidArgument, "unknown nilpotent orbit '" + label + "' for " + group_name(rs.type));
  KMat e(F, G.n);
  for (int a : roots) e = e + G.basis_element_k(F, rs.rank + a);
  return e;
}

NilpotentDatum jm_cocharacter(const GroupModel& G, const KMat& e) {
  const auto& rs = G.rs;
  const Fq& F = *e.F;
  if (!G.in_algebra(e) || !is_nilpotent(e)) fail(Errc::NotNilpotent, "element is not a nilpotent element of the Lie algebra");
  NilpotentDatum d;
  d.e = e;
  d.lambda = IVec(rs.ambient, 0);
  auto c = G.coords(e);
  for (int i = 0; i < rs.rank; ++i)
    if (c[i]) fail(Errc::NonStandardForm, "nilpotent element has a Cartan component; conjugate it first");
  for (int a = 0; a < rs.num_roots(); ++a)
    if (c[rs.rank + a]) d.support.push_back(a);
  int k = static_cast<int>(d.support.size());
  if (k > 0) {
    // lambda = sum x_i coroot_i with <beta_j, lambda> = 2
    std::vector<std::vector<mpq_class>> M(k, std::vector<mpq_class>(k + 1));
    for (int j = 0; j < k; ++j) {
      for (int i = 0; i < k; ++i) M[j][i] = rs.pair_coroot(d.support[j], d.support[i]);
      M[j][k] = 2;
    }
    for (int col = 0; col < k; ++col) {
      int piv = -1;
      for (int r = col; r < k; ++r)
        if (M[r][col] != 0) piv = r;
      if (piv < 0) fail(Errc::NonStandardForm, "support roots are linearly dependent; conjugate to a standard form");
      std::swap(M[col], M[piv]);
      for (int r = 0; r < k; ++r) {
        if (r == col || M[r][col] == 0) continue;
        mpq_class t = M[r][col] / M[col][col];
        for (int j = col; j <= k; ++j) M[r][j] -= t * M[col][j];
      }
    }
    QVec lam(rs.ambient, 0);
    for (int i = 0; i < k; ++i) {
      mpq_class x = M[i][k] / M[i][i];
      for (int a = 0; a < rs.ambient; ++a) lam[a] += x * rs.coroots[d.support[i]][a];
    }
    for (int a = 0; a < rs.ambient; ++a) {
      if (!is_integer(lam[a])) fail(Errc::NonStandardForm, "cocharacter is not integral");
      d.lambda[a] = static_cast<int>(lam[a].get_num().get_si());
    }
    // Jacobson-Morozov: h = d lambda(1) lies in [e, ^lambda_{-2} g]
    std::vector<Laurent> amb;
    for (int a = 0; a < rs.ambient; ++a) amb.push_back(Laurent::from_int(F, d.lambda[a]));
    auto hc = G.coords(residue(G.cartan_element(F, amb)));
    std::vector<std::vector<Elt>> rows;
    for (int b : roots_with_weight(rs, d.lambda, -2, -2)) rows.push_back(G.coords(bracket(e, G.basis_element_k(F, rs.rank + b))));
    int r0 = rank_k(F, rows);
    rows.push_back(hc);
    if (rank_k(F, rows) != r0) fail(Errc::NonStandardForm, "cocharacter is not a Jacobson-Morozov cocharacter of e");
  }
  KMat ad = G.adk(e);
  std::vector<std::vector<Elt>> rows(G.dim);
  for (int i = 0; i < G.dim; ++i)
    for (int j = 0; j < G.dim; ++j) rows[i].push_back(ad.at(i, j));
  d.orbit_dim = rank_k(F, rows);
  return d;
}

NilpotentDatum nilpotent_datum(const GroupModel& G, const std::string& label, const Fq& F) {
  auto d = jm_cocharacter(G, standard_nilpotent(G, label, F));
  d.label = label;
  return d;
}

NilpotentDatum conjugate_datum(const GroupModel& G, const NilpotentDatum& d, int w) {
  const auto& rs = G.rs;
  const Fq& F = *d.e.F;
  KMat n = G.weyl_lift_k(F, w), nt(F, G.n);
  for (int i = 0; i < G.n; ++i)
    for (int j = 0; j < G.n; ++j) nt.at(i, j) = n.at(j, i);
  if (!(n * nt == KMat::identity(F, G.n))) fail(Errc::InvalidArgument, "Weyl lift is not a signed permutation");
  NilpotentDatum out = d;
  out.e = n * d.e * nt;
  QVec lam(d.lambda.begin(), d.lambda.end());
  lam = rs.weyl[w].m.apply(lam);
  for (int a = 0; a < rs.ambient; ++a) out.lambda[a] = static_cast<int>(lam[a].get_num().get_si());
  out.support.clear();
  auto c = G.coords(out.e);
  for (int a = 0; a < rs.num_roots(); ++a)
    if (c[rs.rank + a]) {
      out.support.push_back(a);
      if (out.weight(rs, a) != 2) fail(Errc::InvalidArgument, "conjugated element left the weight-2 space");
    }
  return out;
}

WeightedLattice weighted_lattice(const RootSystem& rs, const IVec& lambda, const QVec& y, const mpq_class& r, bool strict) {
  WeightedLattice L;
  L.lambda = lambda;
  L.y = y;
  L.roots = roots_with_weight(rs, lambda, 2, 1 << 20);
  auto mp = mp_lattice(rs, y, r, strict);
  for (int b : L.roots) L.exps.push_back(mp.root_exp[b]);
  return L;
}

QValue mu_even_base(const GroupModel& G, const IVec& lambda, const QVec& y, int q) {
  auto P = parabolic(G, lambda, y, q);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), q, P.neg + P.pos);
  return ratio(q, P.group, den * P.levi);
}

QValue mu_even(const GroupModel& G, const WeightedLattice& region, int q) {
  auto ref = weighted_lattice(G.rs, region.lambda, region.y, 0, true);
  if (region.roots != ref.roots || region.exps.size() != ref.exps.size())
    fail(Errc::RegionNotMeasurable, "region is not a lattice in the weight >= 2 space");
  int e = 0;
  for (size_t i = 0; i < ref.exps.size(); ++i) e += ref.exps[i] - region.exps[i];
  return mu_even_base(G, region.lambda, region.y, q) * QValue::qpow(q, e);
}

QValue mu_odd(const GroupModel& G, const IVec& lambda, const QVec& y, const LMatrix& X) {
  const auto& rs = G.rs;
  const Fq& F = X.field();
  auto c = G.coords(X);
  for (int b = 0; b < G.dim; ++b) {
    bool allowed = b >= rs.rank && weight_of(rs, lambda, b - rs.rank) == 2;
    if (!allowed && !c[b].is_exact_zero()) fail(Errc::InvalidArgument, "argument of mu_odd is not in the weight-2 space");
  }
  auto minus = roots_with_weight(rs, lambda, -1, -1), plus = roots_with_weight(rs, lambda, 1, 1);
  if (plus.empty()) return QValue::integer(F.q(), 1);
  auto k0 = mp_lattice(rs, y, 0, false).root_exp, kp = mp_lattice(rs, y, 0, true).root_exp;
  std::vector<LVector> gens;
  for (int g : minus) {
    auto img = G.coords(bracket(X, G.root_element(F, g, Laurent::monomial(F, 1, k0[g]))));
    LVector v;
    for (int b : plus) v.push_back(img[rs.rank + b]);
    gens.push_back(v);
  }
  OLattice A;
  try {
    A = OLattice::span(F, static_cast<int>(plus.size()), gens);
  } catch (const Error& e) {
    if (e.code() != Errc::RankDeficient) throw;
    return QValue::integer(F.q(), 0);
  }
  std::vector<int> exps;
  for (int b : plus) exps.push_back(kp[b]);
  return QValue::qpow_half(F.q(), static_cast<int>(lattice_index_exponent(A, OLattice::diagonal(F, exps))));
}

NilpotentIntegral nilpotent_orbital_integral(const GroupModel& G, const NilpotentDatum& d, const TestFunction& f,
                                             const Fq& F) {
  const auto& rs = G.rs;
  int q = F.q();
  if (!rs.in_closed_alcove(f.y)) fail(Errc::InvalidArgument, "test function point lies outside the base alcove");
  NilpotentIntegral out;
  out.total = QValue::integer(q, 0);
  if (d.support.empty()) {
    // the zero orbit is a point of mass one
    out.total = f.kind == TestKind::Zero ? out.total : averaged_value(G, f, LMatrix(F, G.n, G.n), q);
    out.parts.push_back({0, out.total});
    return out;
  }
  auto Q = reductive_quotient(rs, f.y);
  auto WP = reflection_subgroup(rs, roots_with_weight(rs, d.lambda, 0, 0));
  for (int w : double_cosets(rs, Q.weyl, WP)) {
    QVec lam(d.lambda.begin(), d.lambda.end());
    lam = rs.weyl[w].m.apply(lam);
    IVec lw(rs.ambient);
    for (int a = 0; a < rs.ambient; ++a) lw[a] = static_cast<int>(lam[a].get_num().get_si());
    QValue v = coset_part(G, lw, f, F);
    out.parts.push_back({w, v});
    out.total += v;
  }
  return out;
}

int parabolic_index(const GroupModel& G, const NilpotentDatum& d) {
  auto WP = reflection_subgroup(G.rs, roots_with_weight(G.rs, d.lambda, 0, 0));
  return G.rs.order_w() / static_cast<int>(WP.size());
}

std::pair<QValue, QValue> nilpotent_dilate(const GroupModel& G, const NilpotentDatum& d, const TestFunction& f,
                                           const Fq& F) {
  QValue lhs = nilpotent_orbital_integral(G, d, dilated(f), F).total;
  QValue rhs = QValue::qpow_half(F.q(), d.orbit_dim) * nilpotent_orbital_integral(G, d, f, F).total;
  return {lhs, rhs};
}

AnchorSides anchor_identity(const GroupModel& G, const NilpotentDatum& d, const QVec& y, const mpq_class& level,
                            const Fq& F) {
  const auto& rs = G.rs;
  int q = F.q();
  if (level < 0) fail(Errc::InvalidArgument, "anchor level must be >= 0");
  auto K = mp_lattice(rs, y, level, level == 0);
  auto kp = mp_lattice(rs, y, 0, true).root_exp;
  LMatrix e = lift(G, d.e);
  auto basis = [&](int b) {
    int k = b < rs.rank ? K.toral_exp : K.root_exp[b - rs.rank];
    return G.basis_element(F, b).scaled(Laurent::monomial(F, 1, k));
  };
  // left side: mu_odd(e) mu_even(ad(^lambda_{>=0} K) e)
  auto S = roots_with_weight(rs, d.lambda, 2, 1 << 20);
  std::vector<LVector> gens;
  for (int b = 0; b < G.dim; ++b) {
    if (b >= rs.rank && d.weight(rs, b - rs.rank) < 0) continue;
    auto img = G.coords(bracket(e, basis(b)));
    LVector v;
    for (int a : S) v.push_back(img[rs.rank + a]);
    gens.push_back(v);
  }
  auto M = OLattice::span(F, static_cast<int>(S.size()), gens);
  std::vector<int> exps;
  for (int a : S) exps.push_back(kp[a]);
  QValue mu_e = mu_even_base(G, d.lambda, y, q) * QValue::qpow(q, static_cast<int>(lattice_index_exponent(M, OLattice::diagonal(F, exps))));
  AnchorSides out;
  out.lhs = mu_odd(G, d.lambda, y, e) * mu_e;
  // right side: parahoric index times the self-dual tangent measure
  auto P = parabolic(G, d.lambda, y, q);
  mpz_class pos;
  mpz_ui_pow_ui(pos.get_mpz_t(), q, P.pos);
  int shift = 0;
  for (int a = 0; a < rs.num_roots(); ++a)
    if (d.weight(rs, a) < 0) shift += K.root_exp[a] - kp[a];
  QValue index = ratio(q, P.group, P.levi * pos) * QValue::qpow(q, shift);
  LMatrix omega(F, G.dim, G.dim);
  for (int i = 0; i < G.dim; ++i)
    for (int j = 0; j < G.dim; ++j) omega.at(i, j) = G.form(e, bracket(basis(i), basis(j)));
  long v = 0;
  for (int x : elementary_divisor_valuations(omega, d.orbit_dim)) v += x;
  out.rhs = index * QValue::qpow_half(q, -static_cast<int>(v - d.orbit_dim));
  return out;
}

std::string nilpotent_csv_header() { return "e_label,f,y,q,alpha,partial_value,total"; }

std::vector<std::string> nilpotent_csv_rows(const GroupModel& G, const NilpotentDatum& d, const TestFunction& f, int q,
                                            const NilpotentIntegral& v) {
  std::vector<std::string> out;
  for (const auto& p : v.parts) {
    std::string word;
    for (int s : G.rs.weyl[p.w].word) word += "s" + std::to_string(s);
    if (word.empty()) word = "1";
    std::ostringstream os;
    os << d.label << ",\"" << f.name() << "\"," << f.y_name << "," << q << "," << word << ",\"" << p.value.str() << "\",\""
       << v.total.str() << "\"";
    out.push_back(os.str());
  }
  return out;
}

}  // namespace asf
