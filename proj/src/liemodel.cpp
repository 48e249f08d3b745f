#include "liemodel.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <mutex>
#include <set>

namespace asf {

// ---------------------------------------------------------------- residue-field matrices

KMat KMat::identity(const Fq& f, int size) {
  KMat m(f, size);
  for (int i = 0; i < size; ++i) m.at(i, i) = 1;
  return m;
}

KMat KMat::operator*(const KMat& o) const {
  KMat m(*F, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      Elt x = at(i, k);
      if (!x) continue;
      for (int j = 0; j < n; ++j)
        if (o.at(k, j)) m.at(i, j) = F->add(m.at(i, j), F->mul(x, o.at(k, j)));
    }
  return m;
}

KMat KMat::operator+(const KMat& o) const {
  KMat m(*F, n);
  for (size_t i = 0; i < a.size(); ++i) m.a[i] = F->add(a[i], o.a[i]);
  return m;
}

KMat KMat::operator-(const KMat& o) const {
  KMat m(*F, n);
  for (size_t i = 0; i < a.size(); ++i) m.a[i] = F->sub(a[i], o.a[i]);
  return m;
}

KMat KMat::scaled(Elt c) const {
  KMat m = *this;
  for (auto& x : m.a) x = F->mul(x, c);
  return m;
}

bool KMat::is_zero() const {
  return std::all_of(a.begin(), a.end(), [](Elt x) { return x == 0; });
}

int rank_k(const Fq& F, std::vector<std::vector<Elt>> rows) {
  int rank = 0;
  if (rows.empty()) return 0;
  int cols = static_cast<int>(rows[0].size());
  for (int c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    int piv = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if (rows[r][c]) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[rank]);
    Elt inv = F.inv(rows[rank][c]);
    for (auto& x : rows[rank]) x = F.mul(x, inv);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r)
      if (r != rank && rows[r][c]) {
        Elt f = rows[r][c];
        for (int k = 0; k < cols; ++k) rows[r][k] = F.sub(rows[r][k], F.mul(f, rows[rank][k]));
      }
    ++rank;
  }
  return rank;
}

KMat bracket(const KMat& X, const KMat& Y) { return X * Y - Y * X; }

LMatrix bracket(const LMatrix& X, const LMatrix& Y) { return X * Y - Y * X; }

KMat residue(const LMatrix& X) {
  KMat m(X.field(), X.rows());
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j < X.cols(); ++j) {
      const Laurent& x = X.at(i, j);
      if (!x.in_tk(0)) fail(Errc::InvalidArgument, "residue of a non-integral matrix");
      m.at(i, j) = x.coeff(0);
    }
  return m;
}

LMatrix conjugate(const LMatrix& g, const LMatrix& X) { return g * X * g.inverse_monomial_det(); }

LMatrix conjugate_inv(const LMatrix& g, const LMatrix& X) { return g.inverse_monomial_det() * X * g; }

// ---------------------------------------------------------------- group models

GroupModel::GroupModel(GroupType t) : rs(RootSystem::get(t)) {
  auto mat = [&]() { return std::vector<int>(n * n, 0); };
  if (t == GroupType::C2) {
    n = 4;
    // root vectors for J = antidiag(1,1,-1,-1)
    auto set = [&](std::vector<int>& m, int i, int j, int v) { m[i * n + j] = v; };
    root_vec.assign(rs.num_roots(), mat());
    entry.assign(rs.num_roots(), {0, 0});
    struct Spec {
      IVec root;
      std::vector<std::tuple<int, int, int>> entries;
    };
    std::vector<Spec> specs = {
        {{1, -1}, {{0, 1, 1}, {2, 3, -1}}}, {{-1, 1}, {{1, 0, 1}, {3, 2, -1}}},
        {{0, 2}, {{1, 2, 1}}},              {{0, -2}, {{2, 1, 1}}},
        {{1, 1}, {{0, 2, 1}, {1, 3, 1}}},   {{-1, -1}, {{2, 0, 1}, {3, 1, 1}}},
        {{2, 0}, {{0, 3, 1}}},              {{-2, 0}, {{3, 0, 1}}},
    };
    for (const auto& s : specs) {
      int a = rs.root_index(s.root);
      for (auto [i, j, v] : s.entries) set(root_vec[a], i, j, v);
      entry[a] = {std::get<0>(s.entries[0]), std::get<1>(s.entries[0])};
    }
    cartan_vec = {mat(), mat()};
    cartan_vec[0][0] = 1, cartan_vec[0][5] = -1, cartan_vec[0][10] = 1, cartan_vec[0][15] = -1;
    cartan_vec[1][5] = 1, cartan_vec[1][10] = -1;
  } else {
    n = rs.ambient;
    root_vec.assign(rs.num_roots(), mat());
    entry.assign(rs.num_roots(), {0, 0});
    for (int a = 0; a < rs.num_roots(); ++a) {
      int i = static_cast<int>(std::find(rs.roots[a].begin(), rs.roots[a].end(), 1) - rs.roots[a].begin());
      int j = static_cast<int>(std::find(rs.roots[a].begin(), rs.roots[a].end(), -1) - rs.roots[a].begin());
      root_vec[a][i * n + j] = 1;
      entry[a] = {i, j};
    }
    for (int i = 0; i + 1 < n; ++i) {
      auto h = mat();
      h[i * n + i] = 1;
      h[(i + 1) * n + i + 1] = -1;
      cartan_vec.push_back(h);
    }
  }
  dim = rs.rank + rs.num_roots();
  owner.assign(n * n, -1);
  owner_sign.assign(n * n, 0);
  for (int a = 0; a < rs.num_roots(); ++a)
    for (int p = 0; p < n * n; ++p)
      if (root_vec[a][p]) {
        owner[p] = a;
        owner_sign[p] = root_vec[a][p];
      }
  // Gram matrix of tr(XY)
  std::vector<std::vector<int>> basis = cartan_vec;
  basis.insert(basis.end(), root_vec.begin(), root_vec.end());
  gram.assign(dim, std::vector<long>(dim, 0));
  for (int x = 0; x < dim; ++x)
    for (int y = 0; y < dim; ++y) {
      long tr = 0;
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) tr += static_cast<long>(basis[x][i * n + k]) * basis[y][k * n + i];
      gram[x][y] = tr;
    }
}

const GroupModel& GroupModel::get(GroupType t) {
  static std::mutex mu;
  static std::map<GroupType, std::unique_ptr<GroupModel>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[t];
  if (!slot) slot.reset(new GroupModel(t));
  return *slot;
}

void GroupModel::check_characteristic(int p) const {
  if (p <= rs.rank + 1 || rs.order_w() % p == 0)
    fail(Errc::BadCharacteristic, "characteristic " + std::to_string(p) + " violates p > rank+1 and p coprime to |W| = " +
                                      std::to_string(rs.order_w()) + " for " + group_name(rs.type));
}

bool GroupModel::in_algebra(const LMatrix& X) const {
  if (X.rows() != n || X.cols() != n) return false;
  if (rs.type != GroupType::C2) {
    Laurent tr(X.field());
    for (int i = 0; i < n; ++i) tr += X.at(i, i);
    return tr.is_exact_zero();
  }
  // J X symmetric, with (J X)_{i,:} = s_i X_{3-i,:}, s = (1, 1, -1, -1)
  const int s[4] = {1, 1, -1, -1};
  auto jx = [&](int i, int j) { return s[i] > 0 ? X.at(3 - i, j) : -X.at(3 - i, j); };
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (!(jx(i, j) - jx(j, i)).is_exact_zero()) return false;
  return true;
}

bool GroupModel::in_algebra(const KMat& X) const {
  const Fq& F = *X.F;
  if (rs.type != GroupType::C2) {
    Elt tr = 0;
    for (int i = 0; i < n; ++i) tr = F.add(tr, X.at(i, i));
    return tr == 0;
  }
  const int s[4] = {1, 1, -1, -1};
  auto jx = [&](int i, int j) { return s[i] > 0 ? X.at(3 - i, j) : F.neg(X.at(3 - i, j)); };
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (jx(i, j) != jx(j, i)) return false;
  return true;
}

std::vector<Laurent> GroupModel::coords(const LMatrix& X) const {
  const Fq& F = X.field();
  std::vector<Laurent> c(dim, Laurent(F));
  if (rs.type == GroupType::C2) {
    c[0] = X.at(0, 0);
    c[1] = X.at(0, 0) + X.at(1, 1);
  } else {
    Laurent acc(F);
    for (int i = 0; i + 1 < n; ++i) {
      acc += X.at(i, i);
      c[i] = acc;
    }
  }
  for (int a = 0; a < rs.num_roots(); ++a) {
    auto [i, j] = entry[a];
    c[rs.rank + a] = X.at(i, j);
  }
  return c;
}

std::vector<Elt> GroupModel::coords(const KMat& X) const {
  const Fq& F = *X.F;
  std::vector<Elt> c(dim, 0);
  if (rs.type == GroupType::C2) {
    c[0] = X.at(0, 0);
    c[1] = F.add(X.at(0, 0), X.at(1, 1));
  } else {
    Elt acc = 0;
    for (int i = 0; i + 1 < n; ++i) {
      acc = F.add(acc, X.at(i, i));
      c[i] = acc;
    }
  }
  for (int a = 0; a < rs.num_roots(); ++a) c[rs.rank + a] = X.at(entry[a].first, entry[a].second);
  return c;
}

LMatrix GroupModel::basis_element(const Fq& F, int b) const {
  const auto& v = b < rs.rank ? cartan_vec[b] : root_vec[b - rs.rank];
  LMatrix m(F, n, n);
  for (int p = 0; p < n * n; ++p)
    if (v[p]) m.at(p / n, p % n) = Laurent::from_int(F, v[p]);
  return m;
}

KMat GroupModel::basis_element_k(const Fq& F, int b) const {
  const auto& v = b < rs.rank ? cartan_vec[b] : root_vec[b - rs.rank];
  KMat m(F, n);
  for (int p = 0; p < n * n; ++p) m.a[p] = F.from_int(v[p]);
  return m;
}

LMatrix GroupModel::from_coords(const Fq& F, const std::vector<Laurent>& c) const {
  LMatrix m(F, n, n);
  for (int b = 0; b < dim; ++b) {
    if (c[b].is_exact_zero()) continue;
    const auto& v = b < rs.rank ? cartan_vec[b] : root_vec[b - rs.rank];
    for (int p = 0; p < n * n; ++p)
      if (v[p]) m.at(p / n, p % n) += c[b] * Laurent::from_int(F, v[p]);
  }
  return m;
}

KMat GroupModel::from_coords(const Fq& F, const std::vector<Elt>& c) const {
  KMat m(F, n);
  for (int b = 0; b < dim; ++b) {
    if (!c[b]) continue;
    const auto& v = b < rs.rank ? cartan_vec[b] : root_vec[b - rs.rank];
    for (int p = 0; p < n * n; ++p)
      if (v[p]) m.a[p] = F.add(m.a[p], F.mul(c[b], F.from_int(v[p])));
  }
  return m;
}

LMatrix GroupModel::root_element(const Fq& F, int a, const Laurent& c) const {
  return basis_element(F, rs.rank + a).scaled(c);
}

LMatrix GroupModel::cartan_element(const Fq& F, const std::vector<Laurent>& amb) const {
  LMatrix m(F, n, n);
  if (rs.type == GroupType::C2) {
    m.at(0, 0) = amb[0];
    m.at(1, 1) = amb[1];
    m.at(2, 2) = -amb[1];
    m.at(3, 3) = -amb[0];
  } else {
    for (int i = 0; i < n; ++i) m.at(i, i) = amb[i];
  }
  return m;
}

std::vector<Laurent> GroupModel::cartan_ambient(const LMatrix& X) const {
  std::vector<Laurent> amb;
  for (int i = 0; i < rs.ambient; ++i) amb.push_back(X.at(i, i));
  return amb;
}

Laurent GroupModel::root_value(const LMatrix& X, int a) const {
  auto [i, j] = entry[a];
  return X.at(i, i) - X.at(j, j);
}

LMatrix GroupModel::root_subgroup(const Fq& F, int a, const Laurent& c) const {
  return LMatrix::identity(F, n) + root_element(F, a, c);
}

KMat GroupModel::root_subgroup_k(const Fq& F, int a, Elt c) const {
  return KMat::identity(F, n) + basis_element_k(F, rs.rank + a).scaled(c);
}

LMatrix GroupModel::weyl_lift(const Fq& F, int w) const {
  LMatrix g = LMatrix::identity(F, n);
  Laurent one = Laurent::constant(F, 1), minus = Laurent::from_int(F, -1);
  for (int i : rs.weyl[w].word) {
    int a = rs.simple[i - 1], na = rs.negative_of(a);
    g = g * root_subgroup(F, a, one) * root_subgroup(F, na, minus) * root_subgroup(F, a, one);
  }
  return g;
}

KMat GroupModel::weyl_lift_k(const Fq& F, int w) const {
  KMat g = KMat::identity(F, n);
  for (int i : rs.weyl[w].word) {
    int a = rs.simple[i - 1], na = rs.negative_of(a);
    g = g * root_subgroup_k(F, a, 1) * root_subgroup_k(F, na, F.neg(1)) * root_subgroup_k(F, a, 1);
  }
  return g;
}

LMatrix GroupModel::affine_simple_lift(const Fq& F, int i) const {
  if (i > 0) {
    int a = rs.simple[i - 1], na = rs.negative_of(a);
    Laurent one = Laurent::constant(F, 1), minus = Laurent::from_int(F, -1);
    return root_subgroup(F, a, one) * root_subgroup(F, na, minus) * root_subgroup(F, a, one);
  }
  // x_{-theta}(t) x_{theta}(-1/t) x_{-theta}(t)
  int th = rs.theta, nth = rs.negative_of(th);
  Laurent t = Laurent::monomial(F, 1, 1), mt = Laurent::monomial(F, F.neg(1), -1);
  return root_subgroup(F, nth, t) * root_subgroup(F, th, mt) * root_subgroup(F, nth, t);
}

LMatrix GroupModel::torus_element(const Fq& F, const IVec& lam) const {
  LMatrix g(F, n, n);
  if (rs.type == GroupType::C2) {
    g.at(0, 0) = Laurent::monomial(F, 1, lam[0]);
    g.at(1, 1) = Laurent::monomial(F, 1, lam[1]);
    g.at(2, 2) = Laurent::monomial(F, 1, -lam[1]);
    g.at(3, 3) = Laurent::monomial(F, 1, -lam[0]);
  } else {
    for (int i = 0; i < n; ++i) g.at(i, i) = Laurent::monomial(F, 1, lam[i]);
  }
  return g;
}

Laurent GroupModel::unipotent_entry(const Fq& F, const std::vector<Laurent>& c, int i, int k) const {
  int p = i * n + k;
  int a = owner[p];
  if (a < 0) return Laurent(F);
  if (rs.type != GroupType::C2 || entry[a] == std::make_pair(i, k)) return c[a];
  // sp4: u34 = -u12, u24 = u13 - u12 u23
  if (i == 2 && k == 3) return -c[a];
  if (i == 1 && k == 3) {
    int r12 = owner[0 * n + 1], r23 = owner[1 * n + 2];
    return c[a] - c[r12] * c[r23];
  }
  return c[a];
}

LMatrix GroupModel::unipotent(const Fq& F, const std::vector<Laurent>& c) const {
  LMatrix u = LMatrix::identity(F, n);
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) u.at(i, k) = unipotent_entry(F, c, i, k);
  return u;
}

bool GroupModel::in_group(const LMatrix& g) const {
  if (rs.type != GroupType::C2) return g.det() == Laurent::constant(g.field(), 1);
  const Fq& F = g.field();
  LMatrix J(F, 4, 4);
  J.at(0, 3) = Laurent::from_int(F, 1);
  J.at(1, 2) = Laurent::from_int(F, 1);
  J.at(2, 1) = Laurent::from_int(F, -1);
  J.at(3, 0) = Laurent::from_int(F, -1);
  return g.transpose() * J * g == J;
}

LMatrix GroupModel::ad(const LMatrix& X) const {
  const Fq& F = X.field();
  LMatrix A(F, dim, dim);
  for (int b = 0; b < dim; ++b) {
    auto c = coords(bracket(X, basis_element(F, b)));
    for (int i = 0; i < dim; ++i) A.at(i, b) = c[i];
  }
  return A;
}

KMat GroupModel::adk(const KMat& X) const {
  const Fq& F = *X.F;
  KMat A(F, dim);
  for (int b = 0; b < dim; ++b) {
    auto c = coords(bracket(X, basis_element_k(F, b)));
    for (int i = 0; i < dim; ++i) A.at(i, b) = c[i];
  }
  return A;
}

Laurent GroupModel::form(const LMatrix& X, const LMatrix& Y) const {
  Laurent tr(X.field());
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) tr += X.at(i, k) * Y.at(k, i);
  return tr;
}

bool GroupModel::in_mp(const LMatrix& X, const MPLattice& L) const {
  auto c = coords(X);
  for (int i = 0; i < rs.rank; ++i)
    if (!c[i].in_tk(L.toral_exp)) return false;
  for (int a = 0; a < rs.num_roots(); ++a)
    if (!c[rs.rank + a].in_tk(L.root_exp[a])) return false;
  return true;
}

KMat GroupModel::reduce(const LMatrix& X, const QVec& y) const {
  const Fq& F = X.field();
  auto c = coords(X);
  std::vector<Elt> r(dim, 0);
  for (int i = 0; i < rs.rank; ++i) r[i] = c[i].coeff(0);
  for (int a = 0; a < rs.num_roots(); ++a) {
    mpq_class v = rs.pair(a, y);
    if (!is_integer(v)) continue;
    r[rs.rank + a] = c[rs.rank + a].coeff(static_cast<int>(-v.get_num().get_si()));
  }
  return from_coords(F, r);
}

// ---------------------------------------------------------------- eigenvalues

namespace {

using LPoly = std::vector<Laurent>;  // coefficients low to high

LPoly poly_trim(LPoly f) {
  while (f.size() > 1 && f.back().is_exact_zero()) f.pop_back();
  return f;
}

// f(a + b*x) as a polynomial in x
LPoly taylor_shift(const LPoly& f, const Laurent& a, const Laurent& b) {
  const Fq& F = a.field();
  LPoly out = {Laurent(F)};
  LPoly lin = {a, b};
  for (auto it = f.rbegin(); it != f.rend(); ++it) {
    LPoly next(out.size() + 1, Laurent(F));
    for (size_t i = 0; i < out.size(); ++i) {
      next[i] += out[i] * lin[0];
      next[i + 1] += out[i] * lin[1];
    }
    next[0] += *it;
    out = poly_trim(next);
  }
  return out;
}

int min_coeff_valuation(const LPoly& f) {
  int v = kInfVal;
  for (const auto& c : f)
    if (!c.is_exact_zero()) v = std::min(v, c.valuation());
  return v;
}

std::vector<Elt> residual_roots(const LPoly& g) {
  const Fq& F = g[0].field();
  std::vector<Elt> out;
  for (int z = 0; z < F.q(); ++z) {
    Elt acc = 0;
    for (auto it = g.rbegin(); it != g.rend(); ++it) acc = F.add(F.mul(acc, static_cast<Elt>(z)), it->coeff(0));
    if (acc == 0) out.push_back(static_cast<Elt>(z));
  }
  return out;
}

// roots mu in O of g (coefficients in O, some unit) that are polynomials in t
void lift_roots(const LPoly& g, Elt mu0, const Laurent& prefix, int pos, int depth, std::vector<Laurent>& found) {
  const Fq& F = g[0].field();
  Laurent here = prefix + Laurent::monomial(F, mu0, pos);
  LPoly h = taylor_shift(g, Laurent::constant(F, mu0), Laurent::monomial(F, 1, 1));
  if (h[0].is_exact_zero()) {
    if (std::find(found.begin(), found.end(), here) == found.end()) found.push_back(here);
  }
  if (depth == 0) return;
  int w = min_coeff_valuation(h);
  if (w >= kInfVal) return;
  for (auto& c : h) c = c.shifted(-w);
  for (Elt nu0 : residual_roots(h)) lift_roots(h, nu0, here, pos + 1, depth - 1, found);
}

// exact synthetic division by (x - r); returns false when r is not a root
bool divide_root(LPoly& f, const Laurent& r) {
  const Fq& F = r.field();
  int d = static_cast<int>(f.size()) - 1;
  LPoly q(d, Laurent(F));
  Laurent carry(F);
  for (int i = d; i >= 1; --i) {
    carry = f[i] + carry * r;
    q[i - 1] = carry;
  }
  Laurent rem = f[0] + carry * r;
  if (!rem.is_exact_zero()) return false;
  f = q;
  return true;
}

}  // namespace

// roots of a monic polynomial that are Laurent polynomials in t, with multiplicity;
// throws UnsupportedCentralizer if the polynomial does not split that way
std::vector<Laurent> split_roots(LPoly f, int max_depth) {
  const Fq& F = f[0].field();
  std::vector<Laurent> roots;
  while (f.size() > 1 && f[0].is_exact_zero()) {
    roots.push_back(Laurent(F));
    f.erase(f.begin());
  }
  int d = static_cast<int>(f.size()) - 1;
  std::vector<Laurent> found;
  if (d > 0) {
    // candidate valuations from the Newton polygon vertices
    std::set<int> vals;
    for (int i = 0; i <= d; ++i)
      for (int j = i + 1; j <= d; ++j) {
        if (f[i].is_exact_zero() || f[j].is_exact_zero()) continue;
        int num = f[i].valuation() - f[j].valuation();
        if (num % (j - i) == 0) vals.insert(num / (j - i));
      }
    for (int v : vals) {
      LPoly g(f.size(), Laurent(F));
      for (int i = 0; i <= d; ++i) g[i] = f[i].shifted(v * i);
      int w = min_coeff_valuation(g);
      for (auto& c : g) c = c.shifted(-w);
      for (Elt mu0 : residual_roots(g)) {
        if (mu0 == 0) continue;
        std::vector<Laurent> mus;
        lift_roots(g, mu0, Laurent(F), 0, max_depth, mus);
        for (auto& mu : mus) {
          Laurent r = mu.shifted(v);
          if (std::find(found.begin(), found.end(), r) == found.end()) found.push_back(r);
        }
      }
    }
  }
  for (const auto& r : found)
    while (f.size() > 1 && divide_root(f, r)) roots.push_back(r);
  if (f.size() != 1) fail(Errc::UnsupportedCentralizer, "characteristic polynomial does not split over F_q[t, 1/t]");
  return roots;
}

namespace {

std::vector<Laurent> monic_charpoly(const LMatrix& X) { return X.charpoly(); }

bool is_diagonal(const LMatrix& X) {
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j < X.cols(); ++j)
      if (i != j && !X.at(i, j).is_exact_zero()) return false;
  return true;
}

}  // namespace

LMatrix split_cartan_form(const GroupModel& G, const LMatrix& gamma) {
  if (is_diagonal(gamma)) return gamma;
  const Fq& F = gamma.field();
  auto roots = split_roots(monic_charpoly(gamma), 24);
  auto key = [](const Laurent& x) {
    std::string s;
    x.append_key(s, x.size() ? x.lo() + x.size() : 0);
    return s;
  };
  std::sort(roots.begin(), roots.end(), [&](const Laurent& a, const Laurent& b) { return key(a) < key(b); });
  for (size_t i = 0; i + 1 < roots.size(); ++i)
    if (roots[i] == roots[i + 1]) fail(Errc::NotRegularSemisimple, "repeated eigenvalue");
  if (G.rs.type != GroupType::C2) return G.cartan_element(F, roots);
  Laurent a = roots[0];
  Laurent b(F);
  bool found = false;
  for (const auto& r : roots)
    if (r != a && r != -a) {
      b = r;
      found = true;
      break;
    }
  if (!found) fail(Errc::NotRegularSemisimple, "eigenvalues do not determine a regular element");
  return G.cartan_element(F, {a, b});
}

int discriminant_valuation(const GroupModel& G, const LMatrix& gamma) {
  LMatrix d = split_cartan_form(G, gamma);
  int v = 0;
  for (int a = 0; a < G.rs.num_roots(); ++a) {
    Laurent x = G.root_value(d, a);
    if (x.is_exact_zero()) fail(Errc::NotRegularSemisimple, "root vanishes on the element");
    v += x.valuation();
  }
  return v;
}

int discriminant_valuation_charpoly(const GroupModel& G, const LMatrix& gamma) {
  auto cp = G.ad(gamma).charpoly();
  int r = G.rs.rank;
  for (int i = 0; i < r; ++i)
    if (!cp[i].is_exact_zero()) fail(Errc::NotRegularSemisimple, "centralizer is larger than a torus");
  if (cp[r].is_exact_zero()) fail(Errc::NotRegularSemisimple, "centralizer is larger than a torus");
  return cp[r].valuation();
}

Depth depth(const GroupModel& G, const LMatrix& gamma) {
  (void)G;
  auto cp = monic_charpoly(gamma);
  int n = static_cast<int>(cp.size()) - 1;
  bool nilpotent = true;
  for (int i = 0; i < n; ++i) nilpotent = nilpotent && cp[i].is_exact_zero();
  if (nilpotent) return {true, 0};
  auto roots = split_roots(cp, 24);
  int m = kInfVal;
  for (const auto& r : roots)
    if (!r.is_exact_zero()) m = std::min(m, r.valuation());
  return {false, mpq_class(m)};
}

bool is_topologically_nilpotent(const GroupModel& G, const LMatrix& gamma) {
  (void)G;
  auto cp = monic_charpoly(gamma);
  int n = static_cast<int>(cp.size()) - 1;
  for (int i = 0; i < n; ++i)
    if (!cp[i].is_exact_zero() && cp[i].valuation() <= 0) return false;
  return true;
}

bool ad_powers_converge(const GroupModel& G, const LMatrix& gamma) {
  LMatrix A = G.ad(gamma);
  if (A.min_valuation() < 0) fail(Errc::InvalidArgument, "ad-power test needs an integral element");
  LMatrix P = LMatrix::identity(gamma.field(), G.dim);
  for (int k = 0; k < G.dim; ++k) P = P * A;
  return P.is_exact_zero() || P.min_valuation() >= 1;
}

bool is_nilpotent(const LMatrix& X) {
  auto cp = X.charpoly();
  for (size_t i = 0; i + 1 < cp.size(); ++i)
    if (!cp[i].is_exact_zero()) return false;
  return true;
}

bool is_nilpotent(const KMat& X) {
  KMat P = X;
  for (int k = 1; k < X.n; ++k) P = P * X;
  return P.is_zero();
}

// ---------------------------------------------------------------- element grammar

namespace {

// integer Laurent polynomial: exponent -> coefficient
using ZPoly = std::map<int, long>;

ZPoly zmul(const ZPoly& a, const ZPoly& b) {
  ZPoly r;
  for (auto [e1, c1] : a)
    for (auto [e2, c2] : b) r[e1 + e2] += c1 * c2;
  return r;
}

class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  std::vector<std::vector<ZPoly>> matrix() {
    std::vector<std::vector<ZPoly>> rows;
    expect('[');
    do {
      expect('[');
      std::vector<ZPoly> row;
      do row.push_back(sum());
      while (accept(','));
      expect(']');
      rows.push_back(row);
    } while (accept(','));
    expect(']');
    skip();
    if (pos_ != s_.size()) error("trailing characters");
    for (const auto& r : rows)
      if (r.size() != rows.size()) error("matrix is not square");
    return rows;
  }

 private:
  [[noreturn]] void error(const std::string& what) {
    fail(Errc::ParseError, what + " at position " + std::to_string(pos_) + " in '" + s_ + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) error(std::string("expected '") + c + "'");
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  long integer() {
    skip();
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) error("expected an integer");
    if (pos_ - start > 15) error("integer literal too large");
    return std::stol(s_.substr(start, pos_ - start));
  }
  ZPoly sum() {
    ZPoly acc;
    bool neg = false;
    if (accept('-'))
      neg = true;
    else
      accept('+');
    for (;;) {
      ZPoly t = product();
      for (auto [e, c] : t) acc[e] += neg ? -c : c;
      char c = peek();
      if (c == '+' || c == '-') {
        ++pos_;
        neg = (c == '-');
      } else {
        break;
      }
    }
    return acc;
  }
  ZPoly product() {
    ZPoly acc = power();
    for (;;) {
      char c = peek();
      if (c == '*') {
        ++pos_;
        acc = zmul(acc, power());
      } else if (c == 't' || c == '(' || std::isdigit(static_cast<unsigned char>(c))) {
        acc = zmul(acc, power());  // implicit multiplication, e.g. 4t
      } else {
        break;
      }
    }
    return acc;
  }
  ZPoly power() {
    ZPoly base = atom();
    if (!accept('^')) return base;
    bool paren = accept('(');
    bool neg = accept('-');
    long e = integer();
    if (paren) expect(')');
    if (neg) e = -e;
    if (base.size() == 1 && base.begin()->second == 1) return ZPoly{{static_cast<int>(base.begin()->first * e), 1}};
    if (e < 0) error("negative power of a non-monomial");
    ZPoly r{{0, 1}};
    for (long i = 0; i < e; ++i) r = zmul(r, base);
    return r;
  }
  ZPoly atom() {
    char c = peek();
    if (c == 't') {
      ++pos_;
      return {{1, 1}};
    }
    if (c == '(') {
      ++pos_;
      ZPoly r = sum();
      expect(')');
      return r;
    }
    if (c == '-') {
      ++pos_;
      ZPoly r = power();
      for (auto& [e, v] : r) v = -v;
      return r;
    }
    return {{0, integer()}};
  }

  std::string s_;
  size_t pos_ = 0;
};

}  // namespace

LMatrix parse_element(const std::string& expr, const Fq& F) {
  auto rows = ExprParser(expr).matrix();
  int n = static_cast<int>(rows.size());
  LMatrix m(F, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (auto [e, c] : rows[i][j]) m.at(i, j) += Laurent::monomial(F, F.from_int(c), e);
  return m;
}

LMatrix parse_lie_element(const GroupModel& G, const std::string& expr, const Fq& F) {
  G.check_characteristic(F.p());
  LMatrix m = parse_element(expr, F);
  if (m.rows() != G.n) fail(Errc::NotInLieAlgebra, "matrix size does not match " + group_name(G.rs.type));
  if (!G.in_algebra(m)) fail(Errc::NotInLieAlgebra, "'" + expr + "' does not satisfy the defining conditions of " + group_name(G.rs.type));
  return m;
}

}  // namespace asf
