#include "rootdata.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>

#include "exactnum.hpp"

namespace asf {

long floor_q(const mpq_class& x) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return f.get_si();
}

long ceil_q(const mpq_class& x) {
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return c.get_si();
}

bool is_integer(const mpq_class& x) { return mpz_divisible_p(x.get_num_mpz_t(), x.get_den_mpz_t()) != 0; }

IMat IMat::identity(int n) {
  IMat m;
  m.n = n;
  m.a.assign(n * n, 0);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IMat IMat::operator*(const IMat& o) const {
  IMat m;
  m.n = n;
  m.a.assign(n * n, 0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (at(i, k))
        for (int j = 0; j < n; ++j) m.at(i, j) += at(i, k) * o.at(k, j);
  return m;
}

IVec IMat::apply(const IVec& v) const {
  IVec r(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r[i] += at(i, j) * v[j];
  return r;
}

QVec IMat::apply(const QVec& v) const {
  QVec r(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (at(i, j)) r[i] += at(i, j) * v[j];
  return r;
}

IMat IMat::transpose() const {
  IMat m = *this;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.at(i, j) = at(j, i);
  return m;
}

GroupType parse_group(const std::string& name) {
  if (name == "sl2" || name == "SL2" || name == "A1") return GroupType::A1;
  if (name == "sl3" || name == "SL3" || name == "A2") return GroupType::A2;
  if (name == "sp4" || name == "Sp4" || name == "C2") return GroupType::C2;
  fail(Errc::UnsupportedGroup, "group '" + name + "' (supported: sl2, sl3, sp4)");
}

std::string group_name(GroupType t) {
  switch (t) {
    case GroupType::A1: return "sl2";
    case GroupType::A2: return "sl3";
    case GroupType::C2: return "sp4";
  }
  return "?";
}

namespace {

int dot(const IVec& a, const IVec& b) {
  int s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

RootSystem::RootSystem(GroupType t) : type(t) {
  auto e = [&](int i) {
    IVec v(ambient, 0);
    v[i] = 1;
    return v;
  };
  auto add = [](IVec a, const IVec& b, int s) {
    for (size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
    return a;
  };
  if (t == GroupType::A1 || t == GroupType::A2) {
    int n = (t == GroupType::A1) ? 2 : 3;
    label = (t == GroupType::A1) ? "A1" : "A2";
    ambient = n;
    rank = n - 1;
    coxeter = n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) {
          roots.push_back(add(e(i), e(j), -1));
          positive.push_back(i < j);
        }
    coroots = roots;
    for (int i = 0; i + 1 < n; ++i) {
      IVec s = add(e(i), e(i + 1), -1);
      simple.push_back(static_cast<int>(std::find(roots.begin(), roots.end(), s) - roots.begin()));
    }
    IVec th = add(e(0), e(n - 1), -1);
    theta = static_cast<int>(std::find(roots.begin(), roots.end(), th) - roots.begin());
    theta_coeffs.assign(rank, 1);
  } else {
    label = "C2";
    ambient = 2;
    rank = 2;
    coxeter = 4;
    for (int s1 : {1, -1})
      for (int s2 : {1, -1}) {
        IVec r = {s1, s2};
        roots.push_back(r);
        coroots.push_back(r);
        positive.push_back(s1 > 0);
      }
    for (int i = 0; i < 2; ++i)
      for (int s : {1, -1}) {
        IVec r(2, 0), c(2, 0);
        r[i] = 2 * s;
        c[i] = s;
        roots.push_back(r);
        coroots.push_back(c);
        positive.push_back(s > 0);
      }
    simple = {root_index({1, -1}), root_index({0, 2})};
    theta = root_index({2, 0});
    theta_coeffs = {2, 1};
  }

  // Weyl group by closure under simple reflections
  std::map<std::vector<int>, int> seen;
  weyl.push_back({IMat::identity(ambient), {}, 0});
  seen[weyl[0].m.a] = 0;
  for (size_t head = 0; head < weyl.size(); ++head)
    for (int i = 0; i < rank; ++i) {
      IMat m = weyl[head].m * reflection(simple[i]);
      if (seen.count(m.a)) continue;
      seen[m.a] = static_cast<int>(weyl.size());
      WeylElt w{m, weyl[head].word, weyl[head].length + 1};
      w.word.push_back(i + 1);
      weyl.push_back(w);
    }
  root_perm.resize(weyl.size());
  for (size_t w = 0; w < weyl.size(); ++w)
    for (const auto& r : roots) root_perm[w].push_back(root_index(weyl[w].m.apply(r)));

  rho_check.assign(ambient, 0);
  for (int a = 0; a < num_roots(); ++a)
    if (positive[a])
      for (int i = 0; i < ambient; ++i) rho_check[i] += mpq_class(coroots[a][i], 2);
  base_point = rho_check;
  for (auto& c : base_point) c /= coxeter;
}

const RootSystem& RootSystem::get(GroupType t) {
  static std::mutex mu;
  static std::map<GroupType, std::unique_ptr<RootSystem>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[t];
  if (!slot) slot.reset(new RootSystem(t));
  return *slot;
}

int RootSystem::root_index(const IVec& r) const {
  for (int a = 0; a < num_roots(); ++a)
    if (roots[a] == r) return a;
  return -1;
}

int RootSystem::weyl_index(const IMat& m) const {
  for (int w = 0; w < order_w(); ++w)
    if (weyl[w].m == m) return w;
  return -1;
}

int RootSystem::negative_of(int a) const {
  IVec r = roots[a];
  for (auto& c : r) c = -c;
  return root_index(r);
}

int RootSystem::height(int a) const {
  // coefficients in the simple roots; solve by peeling simple roots greedily
  IVec r = roots[a];
  int sign = positive[a] ? 1 : -1;
  if (!positive[a])
    for (auto& c : r) c = -c;
  int h = 0;
  while (std::any_of(r.begin(), r.end(), [](int c) { return c != 0; })) {
    bool moved = false;
    for (int s : simple) {
      IVec d = r;
      for (int i = 0; i < ambient; ++i) d[i] -= roots[s][i];
      int idx = root_index(d);
      bool zero = std::all_of(d.begin(), d.end(), [](int c) { return c == 0; });
      if (zero || (idx >= 0 && positive[idx])) {
        r = d;
        ++h;
        moved = true;
        break;
      }
    }
    if (!moved) fail(Errc::InvalidArgument, "height computation failed");
  }
  return sign * h;
}

mpq_class RootSystem::pair(int a, const QVec& y) const {
  mpq_class s = 0;
  for (int i = 0; i < ambient; ++i)
    if (roots[a][i]) s += roots[a][i] * y[i];
  return s;
}

int RootSystem::pair_coroot(int a, int b) const { return dot(roots[a], coroots[b]); }

IMat RootSystem::reflection(int a) const {
  // s(v) = v - <alpha, v> coroot, applied to coweight coordinates
  IMat m = IMat::identity(ambient);
  for (int i = 0; i < ambient; ++i)
    for (int j = 0; j < ambient; ++j) m.at(i, j) -= coroots[a][i] * roots[a][j];
  return m;
}

int RootSystem::weyl_inverse(int w) const { return weyl_index(weyl[w].m.transpose()); }

int RootSystem::weyl_mul(int w1, int w2) const { return weyl_index(weyl[w1].m * weyl[w2].m); }

std::vector<int> RootSystem::positive_by_height() const {
  std::vector<int> out;
  for (int a = 0; a < num_roots(); ++a)
    if (positive[a]) out.push_back(a);
  std::stable_sort(out.begin(), out.end(), [&](int a, int b) { return height(a) < height(b); });
  return out;
}

std::vector<QVec> RootSystem::alcove_vertices() const {
  // fundamental coweight omega_i / c_i, solved on the span of the coroots
  std::vector<QVec> out;
  for (int i = 0; i < rank; ++i) {
    QVec v(ambient, 0);
    if (type == GroupType::C2) {
      v = (i == 0) ? QVec{mpq_class(1, 2), 0} : QVec{mpq_class(1, 2), mpq_class(1, 2)};
    } else {
      int n = ambient;
      for (int k = 0; k < n; ++k) v[k] = (k <= i) ? mpq_class(n - i - 1, n) : mpq_class(-(i + 1), n);
    }
    out.push_back(v);
  }
  return out;
}

QVec RootSystem::named_point(const std::string& name) const {
  if (name == "o" || name == "0") return origin();
  if (name == "x") return base_point;
  if (name.size() == 2 && name[0] == 'v') {
    int i = name[1] - '1';
    auto vs = alcove_vertices();
    if (i >= 0 && i < static_cast<int>(vs.size())) return vs[i];
  }
  QVec y;
  std::stringstream ss(name);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      mpq_class c(tok);
      c.canonicalize();
      y.push_back(c);
    } catch (const std::exception&) {
      fail(Errc::ParseError, "apartment point '" + name + "'");
    }
  }
  if (static_cast<int>(y.size()) != ambient) fail(Errc::ParseError, "apartment point '" + name + "' has wrong dimension");
  if (type != GroupType::C2) {
    mpq_class s = 0;
    for (auto& c : y) s += c;
    if (s != 0) fail(Errc::ParseError, "apartment point must have coordinate sum zero");
  }
  for (auto& c : y)
    if (c.get_den() > denominator_bound())
      fail(Errc::InvalidArgument, "apartment point denominator exceeds " + std::to_string(denominator_bound()));
  return y;
}

bool RootSystem::in_closed_alcove(const QVec& y) const {
  for (int s : simple)
    if (pair(s, y) < 0) return false;
  return pair(theta, y) <= 1;
}

std::string point_str(const QVec& y) {
  std::string s = "(";
  for (size_t i = 0; i < y.size(); ++i) s += (i ? "," : "") + y[i].get_str();
  return s + ")";
}

// ---------------------------------------------------------------- affine Weyl group

QVec AffineWeylElt::act(const QVec& y) const {
  QVec r = A.apply(y);
  for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

AffineWeylElt simple_affine_reflection(const RootSystem& rs, int i) {
  AffineWeylElt w;
  if (i == 0) {
    // reflection in the wall <theta, y> = 1
    w.A = rs.reflection(rs.theta);
    w.b = rs.coroots[rs.theta];
  } else {
    w.A = rs.reflection(rs.simple[i - 1]);
    w.b = IVec(rs.ambient, 0);
  }
  w.word = {i};
  w.length = 1;
  return w;
}

AffineWeylElt affine_compose(const AffineWeylElt& u, const AffineWeylElt& v) {
  AffineWeylElt w;
  w.A = u.A * v.A;
  w.b = u.A.apply(v.b);
  for (size_t i = 0; i < w.b.size(); ++i) w.b[i] += u.b[i];
  w.word = u.word;
  w.word.insert(w.word.end(), v.word.begin(), v.word.end());
  return w;
}

int affine_length(const RootSystem& rs, const AffineWeylElt& w) {
  QVec wx = w.act(rs.base_point);
  int len = 0;
  for (int a = 0; a < rs.num_roots(); ++a)
    if (rs.positive[a]) len += static_cast<int>(std::labs(floor_q(rs.pair(a, wx))));
  return len;
}

namespace {

std::vector<int> affine_key(const AffineWeylElt& w) {
  std::vector<int> k = w.A.a;
  k.insert(k.end(), w.b.begin(), w.b.end());
  return k;
}

AffineWeylElt affine_identity(const RootSystem& rs) {
  AffineWeylElt w;
  w.A = IMat::identity(rs.ambient);
  w.b = IVec(rs.ambient, 0);
  return w;
}

}  // namespace

std::vector<AffineWeylElt> affine_weyl_ball(const RootSystem& rs, int L) {
  std::vector<AffineWeylElt> out = {affine_identity(rs)};
  std::set<std::vector<int>> seen = {affine_key(out[0])};
  for (size_t head = 0; head < out.size(); ++head) {
    if (out[head].length >= L) continue;
    for (int i = 0; i <= rs.rank; ++i) {
      AffineWeylElt w = affine_compose(out[head], simple_affine_reflection(rs, i));
      auto key = affine_key(w);
      if (seen.count(key)) continue;
      w.length = affine_length(rs, w);
      if (w.length != out[head].length + 1) continue;  // reached again later at its true length
      seen.insert(key);
      out.push_back(std::move(w));
    }
  }
  return out;
}

std::vector<long> affine_growth_by_words(const RootSystem& rs, int L) {
  std::map<std::vector<int>, int> shortest;
  std::vector<AffineWeylElt> frontier = {affine_identity(rs)};
  shortest[affine_key(frontier[0])] = 0;
  for (int len = 1; len <= L; ++len) {
    std::vector<AffineWeylElt> next;
    for (const auto& w : frontier)
      for (int i = 0; i <= rs.rank; ++i) {
        AffineWeylElt v = affine_compose(w, simple_affine_reflection(rs, i));
        next.push_back(v);
        auto key = affine_key(v);
        if (!shortest.count(key)) shortest[key] = len;
      }
    frontier = std::move(next);
  }
  std::vector<long> growth(L + 1, 0);
  for (const auto& [k, len] : shortest) ++growth[len];
  return growth;
}

// ---------------------------------------------------------------- Moy-Prasad

std::vector<AffineRoot> vanishing_affine_roots(const RootSystem& rs, const QVec& y) {
  std::vector<AffineRoot> out;
  for (int a = 0; a < rs.num_roots(); ++a) {
    mpq_class v = rs.pair(a, y);
    if (is_integer(v)) out.push_back({a, static_cast<int>(-v.get_num().get_si())});
  }
  return out;
}

MPLattice mp_lattice(const RootSystem& rs, const QVec& y, const mpq_class& r, bool strict) {
  MPLattice L;
  L.y = y;
  L.r = r;
  L.strict = strict;
  for (int a = 0; a < rs.num_roots(); ++a) {
    mpq_class need = r - rs.pair(a, y);
    L.root_exp.push_back(static_cast<int>(strict ? floor_q(need) + 1 : ceil_q(need)));
  }
  L.toral_exp = static_cast<int>(strict ? floor_q(r) + 1 : ceil_q(r));
  return L;
}

int mp_graded_dim(const RootSystem& rs, const QVec& y, const mpq_class& r) {
  int d = is_integer(r) ? rs.rank : 0;
  for (int a = 0; a < rs.num_roots(); ++a)
    if (is_integer(r - rs.pair(a, y))) ++d;
  return d;
}

// ---------------------------------------------------------------- reductive quotient

std::vector<int> reflection_subgroup(const RootSystem& rs, const std::vector<int>& roots) {
  std::vector<int> out = {0};
  std::set<int> seen = {0};
  for (size_t head = 0; head < out.size(); ++head)
    for (int a : roots) {
      int w = rs.weyl_index(rs.weyl[out[head]].m * rs.reflection(a));
      if (seen.insert(w).second) out.push_back(w);
    }
  std::sort(out.begin(), out.end());
  return out;
}

mpz_class ReductiveQuotient::order(long q) const { return eval_poly(order_poly, q); }

bool ReductiveQuotient::contains_root(int a) const {
  return std::find(roots.begin(), roots.end(), a) != roots.end();
}

ReductiveQuotient reductive_quotient(const RootSystem& rs, const QVec& y) {
  ReductiveQuotient R;
  R.y = y;
  R.rank = rs.rank;
  QVec xy = rs.base_point;
  for (int i = 0; i < rs.ambient; ++i) xy[i] -= y[i];
  for (int a = 0; a < rs.num_roots(); ++a)
    if (is_integer(rs.pair(a, y))) {
      R.roots.push_back(a);
      mpq_class s = rs.pair(a, xy);
      if (s == 0) fail(Errc::InvalidArgument, "base point is not generic for the root subsystem at " + point_str(y));
      if (s > 0) R.positive.push_back(a);
    }
  R.weyl = reflection_subgroup(rs, R.roots);
  for (int w : R.weyl) {
    int len = 0;
    for (int a : R.positive) {
      int wa = rs.root_perm[w][a];
      if (std::find(R.positive.begin(), R.positive.end(), wa) == R.positive.end()) ++len;
    }
    R.weyl_length.push_back(len);
  }
  // simple components by non-orthogonality
  std::vector<int> comp(R.roots.size(), -1);
  int nc = 0;
  for (size_t i = 0; i < R.roots.size(); ++i) {
    if (comp[i] >= 0) continue;
    comp[i] = nc;
    std::vector<size_t> stack = {i};
    while (!stack.empty()) {
      size_t u = stack.back();
      stack.pop_back();
      for (size_t v = 0; v < R.roots.size(); ++v)
        if (comp[v] < 0 && rs.pair_coroot(R.roots[u], R.roots[v]) != 0) {
          comp[v] = nc;
          stack.push_back(v);
        }
    }
    ++nc;
  }
  R.factors.assign(nc, {});
  for (size_t i = 0; i < R.roots.size(); ++i) R.factors[comp[i]].push_back(R.roots[i]);

  // (q-1)^rank * q^N * sum_{w in W_y} q^{l(w)}
  std::vector<long> poly = {1};
  auto mul = [](const std::vector<long>& a, const std::vector<long>& b) {
    std::vector<long> c(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
  };
  for (int i = 0; i < rs.rank; ++i) poly = mul(poly, {-1, 1});
  std::vector<long> qn(R.positive.size() + 1, 0);
  qn.back() = 1;
  poly = mul(poly, qn);
  int maxlen = *std::max_element(R.weyl_length.begin(), R.weyl_length.end());
  std::vector<long> pw(maxlen + 1, 0);
  for (int len : R.weyl_length) ++pw[len];
  R.order_poly = mul(poly, pw);
  return R;
}

std::vector<int> double_cosets(const RootSystem& rs, const std::vector<int>& Wa, const std::vector<int>& Wb) {
  std::vector<int> reps;
  std::vector<bool> covered(rs.order_w(), false);
  std::vector<int> order(rs.order_w());
  for (int w = 0; w < rs.order_w(); ++w) order[w] = w;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rs.weyl[a].length < rs.weyl[b].length; });
  for (int w : order) {
    if (covered[w]) continue;
    reps.push_back(w);
    for (int a : Wa)
      for (int b : Wb) covered[rs.weyl_mul(rs.weyl_mul(a, w), b)] = true;
  }
  return reps;
}

}  // namespace asf
