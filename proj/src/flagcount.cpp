#include "flagcount.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <mutex>
#include <set>
#include <sstream>

namespace asf {

const char* fiber_kind_name(FiberKind k) {
  switch (k) {
    case FiberKind::Iwahori: return "iwahori";
    case FiberKind::Parahoric: return "parahoric";
    case FiberKind::Stratum: return "stratum";
  }
  return "?";
}

FiberSpec iwahori_fiber(const RootSystem& rs) { return {FiberKind::Iwahori, rs.base_point, "x", ""}; }

FiberSpec parahoric_fiber(const RootSystem& rs, const std::string& y_name) {
  return {FiberKind::Parahoric, rs.named_point(y_name), y_name, ""};
}

FiberSpec stratum_fiber(const RootSystem& rs, const std::string& y_name, const std::string& ebar) {
  return {FiberKind::Stratum, rs.named_point(y_name), y_name, ebar};
}

// ---------------------------------------------------------------- nilpotent strata

namespace {

// orbit names by dimension for each simple factor type (keyed by root count)
std::vector<std::pair<int, std::string>> factor_orbits(size_t roots) {
  if (roots == 2) return {{2, "reg"}, {0, "0"}};
  if (roots == 6) return {{6, "reg"}, {4, "min"}, {0, "0"}};
  if (roots == 8) return {{8, "reg"}, {6, "subreg"}, {4, "min"}, {0, "0"}};
  fail(Errc::UnsupportedGroup, "unsupported simple factor with " + std::to_string(roots) + " roots");
}

// basis of the factor subalgebra: root vectors and coroot elements [E_a, E_-a]
std::vector<KMat> factor_basis(const GroupModel& G, const Fq& F, const std::vector<int>& roots) {
  std::vector<KMat> basis;
  for (int a : roots) basis.push_back(G.basis_element_k(F, G.rs.rank + a));
  for (int a : roots)
    if (G.rs.positive[a])
      basis.push_back(bracket(G.basis_element_k(F, G.rs.rank + a), G.basis_element_k(F, G.rs.rank + G.rs.negative_of(a))));
  return basis;
}

KMat factor_part(const GroupModel& G, const Fq& F, const std::vector<int>& roots, const KMat& R);

// discriminant class of the symmetric form v -> <v, e v> on V / ker e for sp4
int quadratic_form_class(const KMat& e) {
  const Fq& F = *e.F;
  // S = J e with J = antidiag(1, 1, -1, -1)
  const int s[4] = {1, 1, -1, -1};
  std::vector<std::vector<Elt>> S(4, std::vector<Elt>(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) S[i][j] = s[i] > 0 ? e.at(3 - i, j) : F.neg(e.at(3 - i, j));
  // diagonalize by congruence; product of the nonzero pivots
  Elt disc = 1;
  int n = 4;
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    for (int i = k; i < n; ++i)
      if (S[i][i]) {
        piv = i;
        break;
      }
    if (piv < 0) {
      // no diagonal pivot: create one from an off-diagonal entry
      int a = -1, b = -1;
      for (int i = k; i < n && a < 0; ++i)
        for (int j = i + 1; j < n; ++j)
          if (S[i][j]) {
            a = i, b = j;
            break;
          }
      if (a < 0) break;
      // row/column a += row/column b
      for (int j = 0; j < n; ++j) S[a][j] = F.add(S[a][j], S[b][j]);
      for (int i = 0; i < n; ++i) S[i][a] = F.add(S[i][a], S[i][b]);
      piv = a;
    }
    std::swap(S[k], S[piv]);
    for (int i = 0; i < n; ++i) std::swap(S[i][k], S[i][piv]);
    Elt d = S[k][k];
    disc = F.mul(disc, d);
    Elt dinv = F.inv(d);
    for (int i = k + 1; i < n; ++i) {
      Elt f = F.mul(S[i][k], dinv);
      if (!f) continue;
      for (int j = 0; j < n; ++j) S[i][j] = F.sub(S[i][j], F.mul(f, S[k][j]));
      for (int j = 0; j < n; ++j) S[j][i] = F.sub(S[j][i], F.mul(f, S[j][k]));
    }
  }
  return F.is_square(disc) ? 0 : 1;
}

}  // namespace

NilpotentClass classify_reduction(const GroupModel& G, const ReductiveQuotient& Q, const KMat& R) {
  NilpotentClass out;
  if (!is_nilpotent(R)) {
    out.label = "nonnil";
    return out;
  }
  if (Q.factors.empty()) {
    out.label = "0";
    return out;
  }
  const Fq& F = *R.F;
  auto coords = G.coords(R);
  for (size_t f = 0; f < Q.factors.size(); ++f) {
    const auto& roots = Q.factors[f];
    KMat Rf = factor_part(G, F, roots, R);
    std::vector<std::vector<Elt>> rows;
    for (const auto& b : factor_basis(G, F, roots)) rows.push_back(G.coords(bracket(Rf, b)));
    int rk = rank_k(F, rows);
    std::string name;
    for (const auto& [dim, label] : factor_orbits(roots.size()))
      if (dim == rk) name = label;
    if (name.empty()) fail(Errc::InvalidArgument, "nilpotent of unexpected orbit dimension " + std::to_string(rk));
    if (name == "subreg") out.form_class = quadratic_form_class(Rf);
    out.label += (f ? "+" : "") + name;
  }
  return out;
}

namespace {

// solve A x = b over F_q for a nonsingular square A
std::vector<Elt> solve_k(const Fq& F, std::vector<std::vector<Elt>> A, std::vector<Elt> b) {
  int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    while (piv < n && !A[piv][c]) ++piv;
    if (piv == n) fail(Errc::RankDeficient, "singular system over the residue field");
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    Elt inv = F.inv(A[c][c]);
    for (int r = 0; r < n; ++r) {
      if (r == c || !A[r][c]) continue;
      Elt f = F.mul(A[r][c], inv);
      for (int k = c; k < n; ++k) A[r][k] = F.sub(A[r][k], F.mul(f, A[c][k]));
      b[r] = F.sub(b[r], F.mul(f, b[c]));
    }
  }
  for (int c = 0; c < n; ++c) b[c] = F.mul(b[c], F.inv(A[c][c]));
  return b;
}

Elt trace_k(const KMat& X) {
  Elt s = 0;
  for (int i = 0; i < X.n; ++i) s = X.F->add(s, X.at(i, i));
  return s;
}

// component of R in the simple factor spanned by the given roots: root
// coordinates plus the trace-form projection of the Cartan part
KMat factor_part(const GroupModel& G, const Fq& F, const std::vector<int>& roots, const KMat& R) {
  auto c = G.coords(R);
  std::vector<Elt> rc(G.dim, 0);
  for (int a : roots) rc[G.rs.rank + a] = c[G.rs.rank + a];
  KMat out = G.from_coords(F, rc);
  std::vector<Elt> hc(G.dim, 0);
  for (int i = 0; i < G.rs.rank; ++i) hc[i] = c[i];
  KMat H = G.from_coords(F, hc);
  // independent coroot elements of the factor
  std::vector<KMat> hs;
  std::vector<std::vector<Elt>> rows;
  for (int a : roots) {
    if (!G.rs.positive[a]) continue;
    KMat h = bracket(G.basis_element_k(F, G.rs.rank + a), G.basis_element_k(F, G.rs.rank + G.rs.negative_of(a)));
    auto trial = rows;
    trial.push_back(G.coords(h));
    if (rank_k(F, trial) > static_cast<int>(rows.size())) {
      rows = trial;
      hs.push_back(h);
    }
  }
  size_t m = hs.size();
  std::vector<std::vector<Elt>> gram(m, std::vector<Elt>(m));
  std::vector<Elt> rhs(m);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < m; ++j) gram[i][j] = trace_k(hs[i] * hs[j]);
    rhs[i] = trace_k(H * hs[i]);
  }
  auto x = solve_k(F, gram, rhs);
  for (size_t i = 0; i < m; ++i) out = out + hs[i].scaled(x[i]);
  return out;
}

// matrix indices touched by the factor
std::vector<int> factor_block(const GroupModel& G, const Fq& F, const std::vector<int>& roots) {
  std::vector<bool> used(G.n, false);
  for (int a : roots) {
    KMat E = G.basis_element_k(F, G.rs.rank + a);
    for (int i = 0; i < G.n; ++i)
      for (int j = 0; j < G.n; ++j)
        if (E.at(i, j)) used[i] = used[j] = true;
  }
  std::vector<int> S;
  for (int i = 0; i < G.n; ++i)
    if (used[i]) S.push_back(i);
  return S;
}

std::vector<Elt> apply_k(const KMat& X, const std::vector<Elt>& v) {
  const Fq& F = *X.F;
  std::vector<Elt> w(X.n, 0);
  for (int i = 0; i < X.n; ++i)
    for (int j = 0; j < X.n; ++j) w[i] = F.add(w[i], F.mul(X.at(i, j), v[j]));
  return w;
}

Elt det_k(const Fq& F, std::vector<std::vector<Elt>> A) {
  int n = static_cast<int>(A.size());
  Elt d = 1;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    while (piv < n && !A[piv][c]) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(A[c], A[piv]);
      d = F.neg(d);
    }
    d = F.mul(d, A[c][c]);
    Elt inv = F.inv(A[c][c]);
    for (int r = c + 1; r < n; ++r) {
      Elt f = F.mul(A[r][c], inv);
      for (int k = c; k < n; ++k) A[r][k] = F.sub(A[r][k], F.mul(f, A[c][k]));
    }
  }
  return d;
}

// det(v, Xv, ..., X^{n-1} v) for the first basis vector with X^{n-1} v != 0
Elt cyclic_det(const KMat& X) {
  const Fq& F = *X.F;
  for (int k = 0; k < X.n; ++k) {
    std::vector<std::vector<Elt>> cols;
    std::vector<Elt> v(X.n, 0);
    v[k] = 1;
    for (int i = 0; i < X.n; ++i) {
      cols.push_back(v);
      v = apply_k(X, v);
    }
    Elt d = det_k(F, cols);
    if (d) return d;
  }
  fail(Errc::InvalidArgument, "nilpotent is not regular in its block");
}

// <v, X^m v> for the symplectic form of the sp4 model, first e_k giving a nonzero value
Elt symplectic_invariant(const KMat& X, int m) {
  const Fq& F = *X.F;
  const int s[4] = {1, 1, -1, -1};
  for (int k = 0; k < 4; ++k) {
    std::vector<Elt> v(4, 0);
    v[k] = 1;
    std::vector<Elt> w = v;
    for (int i = 0; i < m; ++i) w = apply_k(X, w);
    Elt val = 0;
    for (int i = 0; i < 4; ++i) {
      Elt term = F.mul(v[i], w[3 - i]);
      val = s[i] > 0 ? F.add(val, term) : F.sub(val, term);
    }
    if (val) return val;
  }
  fail(Errc::InvalidArgument, "symplectic invariant vanishes");
}

// index of a in F^* / (F^*)^m with m | q - 1
int power_class(const Fq& F, Elt a, int m) {
  Elt z = 1;
  for (int i = 0; i < F.q() - 1; ++i) {
    if (z == a) return i % m;
    z = F.mul(z, F.primitive());
  }
  fail(Errc::InvalidArgument, "power class of zero");
}

// an SL2 factor has two rational regular orbits exactly when the torus acts on
// its root spaces by squares, i.e. every simple coroot pairs evenly with the root
bool sl2_factor_splits(const RootSystem& rs, int a) {
  for (int j : rs.simple)
    if (rs.pair_coroot(a, j) % 2 != 0) return false;
  return true;
}

std::vector<std::string> split_label(const std::string& label) {
  std::vector<std::string> parts;
  std::stringstream ss(label);
  std::string tok;
  while (std::getline(ss, tok, '+')) parts.push_back(tok);
  return parts;
}

}  // namespace

std::string RationalClass::key() const {
  std::string k = label;
  if (!index.empty()) {
    k += '#';
    for (size_t i = 0; i < index.size(); ++i) k += (i ? "." : "") + std::to_string(index[i]);
  }
  return k;
}

RationalClass rational_class(const GroupModel& G, const ReductiveQuotient& Q, const KMat& R) {
  RationalClass out;
  out.label = classify_reduction(G, Q, R).label;
  if (out.label == "nonnil" || Q.factors.empty()) return out;
  const Fq& F = *R.F;
  auto parts = split_label(out.label);
  for (size_t f = 0; f < Q.factors.size(); ++f) {
    const auto& roots = Q.factors[f];
    const std::string& name = parts[f];
    int idx = 0;
    if (name != "0") {
      KMat Rf = factor_part(G, F, roots, R);
      auto S = factor_block(G, F, roots);
      KMat X(F, static_cast<int>(S.size()));
      for (size_t i = 0; i < S.size(); ++i)
        for (size_t j = 0; j < S.size(); ++j) X.at(i, j) = Rf.at(S[i], S[j]);
      if (roots.size() == 2) {
        if (sl2_factor_splits(G.rs, roots[0])) {
          if (X.n != 2) fail(Errc::InvalidArgument, "SL2 factor is not a 2 x 2 block");
          idx = F.is_square(cyclic_det(X)) ? 0 : 1;
        }
      } else if (roots.size() == 6) {
        if (name == "reg" && (F.q() - 1) % 3 == 0) idx = power_class(F, cyclic_det(X), 3);
      } else if (roots.size() == 8) {
        if (name == "reg") idx = F.is_square(symplectic_invariant(X, 3)) ? 0 : 1;
        if (name == "min") idx = F.is_square(symplectic_invariant(X, 1)) ? 0 : 1;
        if (name == "subreg") idx = quadratic_form_class(Rf);
      }
    }
    out.index.push_back(idx);
  }
  return out;
}

mpz_class rational_orbit_size(const GroupModel& G, const ReductiveQuotient& Q, const RationalClass& c, int q) {
  if (c.label == "nonnil") fail(Errc::InvalidArgument, "not a nilpotent class");
  if (Q.factors.empty()) return 1;
  const Fq& F = Fq::of_order(q);
  auto parts = split_label(c.label);
  mpz_class Z = q, size = 1;
  for (size_t f = 0; f < Q.factors.size(); ++f) {
    const auto& roots = Q.factors[f];
    const std::string& name = parts[f];
    mpz_class s = 1;
    if (name == "0") {
      s = 1;
    } else if (roots.size() == 2) {
      s = Z * Z - 1;
      if (sl2_factor_splits(G.rs, roots[0])) s /= 2;
    } else if (roots.size() == 6) {
      if (name == "reg") s = Z * (Z * Z - 1) * (Z * Z * Z - 1) / ((q - 1) % 3 == 0 ? 3 : 1);
      else s = (Z * Z - 1) * (Z * Z + Z + 1);
    } else {
      mpz_class q4 = Z * Z * Z * Z - 1;
      if (name == "reg") s = Z * Z * (Z * Z - 1) * q4 / 2;
      else if (name == "min") s = q4 / 2;
      else {
        // reductive centralizer O(2): split when minus the discriminant is a square
        bool disc_square = c.index[f] == 0;
        bool split = disc_square == F.is_square(F.neg(1));
        mpz_class r = split ? mpz_class(Z + 1) : mpz_class(Z - 1);
        s = Z * r * q4 / 2;
      }
    }
    size *= s;
  }
  return size;
}

bool label_leq(const GroupModel& G, const ReductiveQuotient& Q, const std::string& a, const std::string& b) {
  if (Q.factors.empty()) return a == "0" && b == "0";
  auto pa = split_label(a), pb = split_label(b);
  if (pa.size() != Q.factors.size() || pb.size() != Q.factors.size())
    fail(Errc::InvalidArgument, "orbit labels do not match the quotient");
  for (size_t f = 0; f < Q.factors.size(); ++f) {
    int da = -1, db = -1;
    for (const auto& [dim, name] : factor_orbits(Q.factors[f].size())) {
      if (name == pa[f]) da = dim;
      if (name == pb[f]) db = dim;
    }
    if (da < 0 || db < 0) fail(Errc::InvalidArgument, "unknown orbit label");
    if (da > db) return false;
  }
  (void)G;
  return true;
}

std::vector<std::string> quotient_orbit_labels(const GroupModel& G, const ReductiveQuotient& Q) {
  (void)G;
  std::vector<std::pair<int, std::string>> acc = {{0, ""}};
  if (Q.factors.empty()) return {"0"};
  for (size_t f = 0; f < Q.factors.size(); ++f) {
    std::vector<std::pair<int, std::string>> next;
    for (const auto& [d0, s0] : acc)
      for (const auto& [d1, s1] : factor_orbits(Q.factors[f].size())) next.push_back({d0 + d1, s0 + (f ? "+" : "") + s1});
    acc = next;
  }
  std::stable_sort(acc.begin(), acc.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::string> out;
  for (const auto& p : acc) out.push_back(p.second);
  return out;
}

int quotient_orbit_dim(const GroupModel& G, const ReductiveQuotient& Q, const std::string& label) {
  if (Q.factors.empty()) {
    if (label == "0") return 0;
    fail(Errc::InvalidArgument, "unknown orbit label '" + label + "'");
  }
  std::vector<std::string> parts;
  std::stringstream ss(label);
  std::string tok;
  while (std::getline(ss, tok, '+')) parts.push_back(tok);
  if (parts.size() != Q.factors.size()) fail(Errc::InvalidArgument, "orbit label '" + label + "' does not match the quotient");
  int d = 0;
  for (size_t f = 0; f < parts.size(); ++f) {
    bool found = false;
    for (const auto& [dim, name] : factor_orbits(Q.factors[f].size()))
      if (name == parts[f]) d += dim, found = true;
    if (!found) fail(Errc::InvalidArgument, "unknown orbit label '" + label + "'");
  }
  (void)G;
  return d;
}

mpz_class borel_count(const GroupModel& G, const ReductiveQuotient& Q, const KMat& R) {
  const Fq& F = *R.F;
  const auto& rs = G.rs;
  int npos = static_cast<int>(Q.positive.size());
  std::vector<bool> in_pos(rs.num_roots(), false);
  for (int a : Q.positive) in_pos[a] = true;
  // sum over w in W_y of q^{-(N - l(w))} #{u in U_y : Ad(n_w^{-1} u^{-1}) R in b_y}
  mpq_class total = 0;
  for (size_t wi = 0; wi < Q.weyl.size(); ++wi) {
    KMat n = G.weyl_lift_k(F, Q.weyl[wi]);
    // n^{-1} for a monomial matrix: transpose with inverted entries
    KMat ninv(F, G.n);
    for (int i = 0; i < G.n; ++i)
      for (int j = 0; j < G.n; ++j)
        if (n.at(i, j)) ninv.at(j, i) = F.inv(n.at(i, j));
    long hits = 0;
    std::vector<int> digits(npos, 0);
    for (;;) {
      KMat u = KMat::identity(F, G.n), uinv = KMat::identity(F, G.n);
      for (int i = 0; i < npos; ++i) u = u * G.root_subgroup_k(F, Q.positive[i], static_cast<Elt>(digits[i]));
      for (int i = npos - 1; i >= 0; --i)
        uinv = uinv * G.root_subgroup_k(F, Q.positive[i], F.neg(static_cast<Elt>(digits[i])));
      KMat X = ninv * uinv * R * u * n;
      auto c = G.coords(X);
      bool ok = true;
      for (int a : Q.roots)
        if (!in_pos[a] && c[rs.rank + a]) ok = false;
      hits += ok;
      int i = 0;
      while (i < npos && ++digits[i] == F.q()) digits[i++] = 0;
      if (i == npos) break;
    }
    long qdiv = 1;
    for (int i = 0; i < npos - Q.weyl_length[wi]; ++i) qdiv *= F.q();
    total += mpq_class(hits, qdiv);
  }
  total.canonicalize();
  if (total.get_den() != 1) fail(Errc::InvalidArgument, "Borel count is not an integer");
  return total.get_num();
}

// ---------------------------------------------------------------- solver route

namespace {

struct Solver {
  const GroupModel& G;
  const Fq& F;
  const LMatrix& gamma;
  const FiberSpec& fiber;
  const ReductiveQuotient& Q;
  int L;
  bool need_values;
  const PointVisitor* visit;
  std::vector<int> order;        // positive roots by height
  std::vector<Laurent> aval;     // alpha(gamma)
  std::map<std::string, std::array<mpz_class, 2>> strata;

  mpz_class qpow(int e) const {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), F.q(), static_cast<unsigned long>(e));
    return r;
  }

  struct State {
    int w = 0;
    std::vector<int> k;           // coordinate exponents < k[a] parametrize U(F) / (U(F) cap P_y)
    std::vector<int> kc;          // membership: v(N_a) >= kc[a]
    std::vector<Laurent> c;       // coordinates per root
    LMatrix N;                    // u^{-1} gamma u, filled in height order
    LMatrix nw, nwinv;
    bool overflow = false;
    mpz_class count;
  };

  void run(State& s, size_t idx) {
    const auto& rs = G.rs;
    if (idx == order.size()) {
      leaf(s);
      return;
    }
    int a = order[idx];
    auto [i, j] = G.entry[a];
    Laurent P(F);
    for (int m = i + 1; m < j; ++m) {
      Laurent um = G.unipotent_entry(F, s.c, i, m);
      if (um.is_exact_zero()) continue;
      P += um * s.N.at(m, j);
    }
    const Laurent& av = aval[a];
    int va = av.valuation();
    int k = s.k[a];
    int thr = s.kc[a] - va;
    Laurent forced(F);
    if (!P.is_exact_zero()) {
      int vP = P.valuation();
      if (vP - va < thr) forced = (P * av.inverse(thr - vP)).below(thr);
    }
    if (thr > k && !forced.is_exact_zero()) {
      // coordinates stop below k: the forced terms in [k, thr) cannot be matched
      Laurent hi = forced - forced.below(k);
      if (!hi.is_exact_zero()) return;
      forced = forced.below(k);
    }
    if (!forced.is_exact_zero() && forced.lo() < -L) {
      s.overflow = true;
      return;
    }
    int lo = std::max(-L, thr);
    int nfree = std::max(0, k - lo);
    bool terminal = idx + 1 == order.size() && !need_values;
    if (terminal) {
      s.count += qpow(nfree);
      return;
    }
    std::vector<int> digits(nfree, 0);
    for (;;) {
      Laurent c = forced;
      for (int e = 0; e < nfree; ++e)
        if (digits[e]) c += Laurent::monomial(F, static_cast<Elt>(digits[e]), lo + e);
      s.c[a] = c;
      Laurent Na = av * c - P;
      for (int p = 0; p < G.n * G.n; ++p)
        if (G.owner[p] == a) s.N.at(p / G.n, p % G.n) = G.owner_sign[p] > 0 ? Na : -Na;
      run(s, idx + 1);
      int e = 0;
      while (e < nfree && ++digits[e] == F.q()) digits[e++] = 0;
      if (e == nfree) break;
    }
    s.c[a] = Laurent(F);
    (void)rs;
  }

  void leaf(State& s) {
    s.count += 1;
    if (!need_values) return;
    LMatrix X = s.nwinv * s.N * s.nw;
    KMat R = G.reduce(X, fiber.y);
    if (visit) (*visit)(s.w, R);
    auto cls = classify_reduction(G, Q, R);
    strata[cls.label][cls.form_class] += 1;
  }
};

std::string word_label(const RootSystem& rs, int w) {
  std::string s = "w=";
  if (rs.weyl[w].word.empty()) return s + "e";
  for (int i : rs.weyl[w].word) s += std::to_string(i);
  return s;
}

}  // namespace

CountRecord count_at_budget(const GroupModel& G, const LMatrix& gamma, const Fq& F, const FiberSpec& fiber, int L,
                            const CountOptions& opt, const PointVisitor* visit) {
  const auto& rs = G.rs;
  CountRecord rec;
  rec.group = rs.type;
  rec.q = F.q();
  rec.L = L;
  rec.fiber = fiber;
  rec.gamma = gamma.str();
  ReductiveQuotient Q = reductive_quotient(rs, fiber.y);
  bool need_values = opt.collect_strata || fiber.kind == FiberKind::Stratum || visit != nullptr;

  if (fiber.level != 0 && need_values) fail(Errc::InvalidArgument, "reductions are taken at level 0 only");
  // toral part of Ad(g^{-1}) gamma is gamma itself: it must lie in t^{ceil(level)} O
  int toral = static_cast<int>(ceil_q(fiber.level));
  for (int i = 0; i < G.n; ++i)
    if (!gamma.at(i, i).in_tk(toral)) {
      rec.total = 0;
      rec.previous_total = 0;
      return rec;
    }

  std::vector<int> order = rs.positive_by_height();
  std::vector<Laurent> aval(rs.num_roots(), Laurent(F));
  for (int a = 0; a < rs.num_roots(); ++a) {
    aval[a] = G.root_value(gamma, a);
    if (aval[a].is_exact_zero()) fail(Errc::NotRegularSemisimple, "root vanishes on gamma");
  }
  std::vector<int> reps = double_cosets(rs, {0}, Q.weyl);

  auto work = [&](int w, std::map<std::string, std::array<mpz_class, 2>>& strata_out, bool& ovf) {
    Solver S{G, F, gamma, fiber, Q, L, need_values, visit, order, aval, {}};
    Solver::State st;
    st.w = w;
    QVec wy = rs.weyl[w].m.apply(fiber.y);
    st.k.assign(rs.num_roots(), 0);
    st.kc.assign(rs.num_roots(), 0);
    for (int a = 0; a < rs.num_roots(); ++a) {
      st.k[a] = static_cast<int>(ceil_q(-rs.pair(a, wy)));
      st.kc[a] = static_cast<int>(ceil_q(fiber.level - rs.pair(a, wy)));
    }
    st.c.assign(rs.num_roots(), Laurent(F));
    st.N = LMatrix(F, G.n, G.n);
    for (int i = 0; i < G.n; ++i) st.N.at(i, i) = gamma.at(i, i);
    st.nw = G.weyl_lift(F, w);
    st.nwinv = st.nw.inverse_monomial_det();
    S.run(st, 0);
    strata_out = std::move(S.strata);
    ovf = st.overflow;
    return st.count;
  };

  std::vector<mpz_class> counts(reps.size());
  std::vector<std::map<std::string, std::array<mpz_class, 2>>> strata(reps.size());
  std::vector<char> ovf(reps.size(), 0);
  if (opt.jobs > 1 && visit == nullptr) {
    std::vector<std::future<void>> futs;
    size_t next = 0;
    std::mutex mu;
    for (int t = 0; t < opt.jobs; ++t)
      futs.push_back(std::async(std::launch::async, [&]() {
        for (;;) {
          size_t i;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= reps.size()) return;
            i = next++;
          }
          bool o = false;
          counts[i] = work(reps[i], strata[i], o);
          ovf[i] = o;
        }
      }));
    for (auto& f : futs) f.get();
  } else {
    for (size_t i = 0; i < reps.size(); ++i) {
      bool o = false;
      counts[i] = work(reps[i], strata[i], o);
      ovf[i] = o;
    }
  }
  for (size_t i = 0; i < reps.size(); ++i) {
    rec.overflow = rec.overflow || ovf[i];
    for (const auto& [label, v] : strata[i]) {
      auto& slot = rec.strata[label];
      slot[0] += v[0];
      slot[1] += v[1];
    }
    mpz_class cell = counts[i];
    if (fiber.kind == FiberKind::Stratum) {
      cell = 0;
      auto it = strata[i].find(fiber.ebar);
      if (it != strata[i].end()) cell = it->second[0] + it->second[1];
    }
    rec.per_cell.push_back({word_label(rs, reps[i]), cell});
    rec.total += cell;
  }
  return rec;
}

CountRecord count_asf(const GroupModel& G, const LMatrix& gamma, const Fq& F, const FiberSpec& fiber,
                      const CountOptions& opt) {
  G.check_characteristic(F.p());
  if (fiber.kind == FiberKind::Stratum) {
    auto labels = quotient_orbit_labels(G, reductive_quotient(G.rs, fiber.y));
    if (std::find(labels.begin(), labels.end(), fiber.ebar) == labels.end())
      fail(Errc::InvalidArgument, "'" + fiber.ebar + "' is not a nilpotent orbit label at " + point_str(fiber.y));
  }
  if (!G.rs.in_closed_alcove(fiber.y)) fail(Errc::InvalidArgument, "point " + point_str(fiber.y) + " is outside the base alcove");
  LMatrix d = split_cartan_form(G, gamma);
  discriminant_valuation(G, d);  // regular semisimple check
  auto run_pair = [&](int L) {
    CountRecord prev = count_at_budget(G, d, F, fiber, L - 1, opt);
    CountRecord cur = count_at_budget(G, d, F, fiber, L, opt);
    cur.previous_total = prev.total;
    cur.stabilized = prev.total == cur.total && !cur.overflow;
    return cur;
  };
  CountRecord rec;
  if (opt.budget > 0) {
    rec = run_pair(opt.budget);
  } else {
    CountRecord prev = count_at_budget(G, d, F, fiber, 0, opt);
    for (int L = 1; L <= opt.max_budget; ++L) {
      rec = count_at_budget(G, d, F, fiber, L, opt);
      rec.previous_total = prev.total;
      rec.stabilized = prev.total == rec.total && !rec.overflow;
      if (rec.stabilized && L >= 2) break;
      prev = rec;
    }
  }
  rec.gamma = gamma.str();
  return rec;
}

std::string count_csv_header() { return "group,type,gamma,q,L,fiber_kind,count,stabilized"; }

std::string count_csv_row(const CountRecord& r) {
  const auto& rs = RootSystem::get(r.group);
  std::string kind = fiber_kind_name(r.fiber.kind);
  if (r.fiber.kind != FiberKind::Iwahori) kind += "(" + r.fiber.y_name;
  if (r.fiber.kind == FiberKind::Stratum) kind += ";" + r.fiber.ebar;
  if (r.fiber.kind != FiberKind::Iwahori) kind += ")";
  std::ostringstream os;
  os << group_name(r.group) << ',' << rs.label << ",\"" << r.gamma << "\"," << r.q << ',' << r.L << ',' << kind << ','
     << r.total.get_str() << ',' << (r.stabilized ? "true" : "false");
  return os.str();
}

mpq_class bezrukavnikov_dim(const GroupModel& G, const LMatrix& gamma) {
  // dim T_0 = rank for split centralizers, so the rank terms cancel
  mpq_class d(discriminant_valuation(G, gamma), 2);
  d.canonicalize();
  return d;
}

// ---------------------------------------------------------------- cell route

std::vector<AffineWeylElt> enumerate_cells(const RootSystem& rs, int L) { return affine_weyl_ball(rs, L); }

LMatrix cell_point(const GroupModel& G, const Fq& F, const AffineWeylElt& w, const std::vector<Elt>& c) {
  const auto& rs = G.rs;
  LMatrix g = LMatrix::identity(F, G.n);
  for (size_t k = 0; k < w.word.size(); ++k) {
    int i = w.word[k];
    LMatrix x;
    if (i == 0)
      x = G.root_subgroup(F, rs.negative_of(rs.theta), Laurent::monomial(F, c[k], 1));
    else
      x = G.root_subgroup(F, rs.simple[i - 1], Laurent::constant(F, c[k]));
    g = g * x * G.affine_simple_lift(F, i);
  }
  return g;
}

IVec translation_part(const GroupModel& G, const LMatrix& g) {
  int n = G.n;
  // v_j = min valuation of the j x j minors of the bottom j rows
  std::vector<int> v(n + 1, 0);
  for (int j = 1; j <= n; ++j) {
    int best = kInfVal;
    std::vector<int> cols(j);
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + j, true);
    do {
      int m = 0;
      for (int c = 0; c < n; ++c)
        if (pick[c]) cols[m++] = c;
      LMatrix sub(g.field(), j, j);
      for (int r = 0; r < j; ++r)
        for (int c = 0; c < j; ++c) sub.at(r, c) = g.at(n - j + r, cols[c]);
      Laurent d = sub.det();
      if (!d.is_exact_zero()) best = std::min(best, d.valuation());
    } while (std::prev_permutation(pick.begin(), pick.end()));
    v[j] = best;
  }
  IVec lam(n);
  for (int j = 1; j <= n; ++j) lam[n - j] = v[j] - v[j - 1];
  lam.resize(G.rs.ambient);
  return lam;
}

bool in_lambda_domain(const GroupModel& G, const LMatrix& g, const IVec& lambda0) { return translation_part(G, g) == lambda0; }

std::string iwahori_coset_key(const GroupModel& G, const LMatrix& g) {
  const Fq& F = g.field();
  int n = G.n;
  std::string key;
  // chain L_j = span(e_1..e_j, t e_{j+1}..t e_n), j = 1..n
  for (int j = 1; j <= n; ++j) {
    std::vector<LVector> gens;
    for (int c = 0; c < n; ++c) {
      LVector col(n, Laurent(F));
      for (int r = 0; r < n; ++r) col[r] = c < j ? g.at(r, c) : g.at(r, c).shifted(1);
      gens.push_back(col);
    }
    key += OLattice::span(F, n, gens).key();
    key += '|';
  }
  return key;
}

BruteCount brute_force_count(const GroupModel& G, const LMatrix& gamma, const Fq& F, const QVec& y, int L,
                             const IVec& lambda0, const mpq_class& r, const PointFilter* accept) {
  const auto& rs = G.rs;
  BruteCount out;
  out.per_length.assign(L + 1, 0);
  MPLattice target = mp_lattice(rs, y, r, false);
  for (const auto& w : enumerate_cells(rs, L)) {
    int len = w.length;
    std::vector<Elt> c(len, 0);
    for (;;) {
      LMatrix g = cell_point(G, F, w, c);
      bool hit = in_lambda_domain(G, g, lambda0);
      if (hit) {
        LMatrix X = conjugate_inv(g, gamma);
        hit = G.in_mp(X, target) && (!accept || (*accept)(X));
      }
      if (hit) {
        out.per_length[len] += 1;
        out.total += 1;
        if (len == L) out.boundary_hit = true;
      }
      int i = 0;
      while (i < len && ++c[i] == F.q()) c[i++] = 0;
      if (i == len) break;
    }
  }
  return out;
}

// ---------------------------------------------------------------- growth fit

FitResult fit_growth(const std::vector<std::pair<int, mpz_class>>& counts, double tolerance) {
  if (counts.size() < 3) fail(Errc::PoorFit, "growth fit needs at least three values of q");
  FitResult r;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = static_cast<int>(counts.size());
  for (const auto& [q, c] : counts) {
    if (c <= 0) fail(Errc::PoorFit, "zero count at q = " + std::to_string(q));
    double x = std::log(static_cast<double>(q)), yv = std::log(c.get_d());
    sx += x, sy += yv, sxx += x * x, sxy += x * yv;
  }
  r.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  r.d = mpq_class(static_cast<long>(std::lround(2 * r.slope)), 2);
  r.d.canonicalize();
  double d = r.d.get_d();
  // least squares for count/q^d = C + c q^{-1/2}
  double s1 = 0, su = 0, suu = 0, sv = 0, suv = 0;
  for (const auto& [q, c] : counts) {
    double v = c.get_d() / std::pow(static_cast<double>(q), d);
    double u = 1.0 / std::sqrt(static_cast<double>(q));
    r.qs.push_back(q);
    r.normalized.push_back(v);
    s1 += 1, su += u, suu += u * u, sv += v, suv += u * v;
  }
  double det = s1 * suu - su * su;
  r.c = (s1 * suv - su * sv) / det;
  r.C = (sv - r.c * su) / s1;
  for (size_t i = 0; i < r.qs.size(); ++i) {
    double sq = std::sqrt(static_cast<double>(r.qs[i]));
    r.residuals.push_back(r.normalized[i] - r.C);
    double err = std::fabs(r.normalized[i] - r.C - r.c / sq) * sq;
    r.max_model_error = std::max(r.max_model_error, err);
  }
  if (!(r.C > 0)) fail(Errc::PoorFit, "fitted leading coefficient is not positive");
  if (r.max_model_error > tolerance)
    fail(Errc::PoorFit, "residuals do not decay like q^{-1/2} (scaled error " + std::to_string(r.max_model_error) + ")");
  return r;
}

}  // namespace asf
