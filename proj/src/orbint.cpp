#include "orbint.hpp"

#include <map>
#include <sstream>

namespace asf {

std::string TestFunction::name() const {
  std::ostringstream os;
  if (averaged) os << "avg ";
  if (scale_half != 0) os << "q^(" << scale_half << "/2)*";
  switch (kind) {
    case TestKind::Zero: os << "0"; break;
    case TestKind::Lattice: os << "1[g_{" << y_name << ",>=" << level.get_str() << "}]"; break;
    case TestKind::Coset: {
      os << "1[" << y_name << ":(";
      for (size_t i = 0; i < ebar.a.size(); ++i) os << (i ? " " : "") << ebar.F->str(ebar.a[i]);
      os << ")+g_{>0}]";
      break;
    }
    case TestKind::Orbit: os << "1[" << y_name << ":" << label << "+g_{>0}]"; break;
    case TestKind::Closure: os << "1[" << y_name << ":closure(" << label << ")+g_{>0}]"; break;
  }
  return os.str();
}

TestFunction zero_function(const RootSystem& rs) {
  TestFunction f;
  f.kind = TestKind::Zero;
  f.y = rs.base_point;
  return f;
}

TestFunction lattice_indicator(const RootSystem& rs, const std::string& y_name, const mpq_class& level) {
  TestFunction f;
  f.kind = TestKind::Lattice;
  f.y_name = y_name;
  f.y = rs.named_point(y_name);
  f.level = level;
  return f;
}

TestFunction coset_indicator(const RootSystem& rs, const std::string& y_name, const KMat& ebar, int scale_half) {
  TestFunction f;
  f.kind = TestKind::Coset;
  f.y_name = y_name;
  f.y = rs.named_point(y_name);
  f.ebar = ebar;
  f.scale_half = scale_half;
  return f;
}

TestFunction orbit_indicator(const RootSystem& rs, const std::string& y_name, const std::string& label, int scale_half,
                             bool closure) {
  TestFunction f;
  f.kind = closure ? TestKind::Closure : TestKind::Orbit;
  f.y_name = y_name;
  f.y = rs.named_point(y_name);
  f.label = label;
  f.scale_half = scale_half;
  return f;
}

TestFunction dilated(const TestFunction& f) {
  if (f.kind == TestKind::Zero) return f;
  if (f.kind != TestKind::Lattice) fail(Errc::InvalidArgument, "dilation is supported for lattice indicators only");
  TestFunction g = f;
  g.level = f.level - 1;
  return g;
}

const char* route_name(Route r) { return r == Route::PointCount ? "point-count" : "direct"; }

namespace {

QValue qhalf(int q, long half) { return QValue::qpow_half(q, static_cast<int>(half)); }

// does the reduction R satisfy the class condition of f (level-0 kinds)
bool class_matches(const GroupModel& G, const ReductiveQuotient& Q, const TestFunction& f, const RationalClass& c,
                   const RationalClass& target) {
  if (c.label == "nonnil") return false;
  switch (f.kind) {
    case TestKind::Coset: return c == target;
    case TestKind::Orbit: return c.label == f.label;
    case TestKind::Closure: return label_leq(G, Q, c.label, f.label);
    default: return true;
  }
}

void check_function(const GroupModel& G, const ReductiveQuotient& Q, const TestFunction& f) {
  if (!G.rs.in_closed_alcove(f.y)) fail(Errc::InvalidArgument, "test function point lies outside the base alcove");
  if (f.kind == TestKind::Coset) {
    if (!f.ebar.F || f.ebar.n != G.n || !G.in_algebra(f.ebar)) fail(Errc::InvalidArgument, "coset representative is not in g(k)");
    auto c = G.coords(f.ebar);
    for (int a = 0; a < G.rs.num_roots(); ++a)
      if (c[G.rs.rank + a] && !Q.contains_root(a))
        fail(Errc::InvalidArgument, "coset representative is not in the reductive quotient at " + f.y_name);
    if (!is_nilpotent(f.ebar)) fail(Errc::InvalidArgument, "coset representative must be nilpotent");
  }
  if (f.kind == TestKind::Orbit || f.kind == TestKind::Closure) quotient_orbit_dim(G, Q, f.label);
}

// weighted class sum: Coset divides by the rational orbit size
mpq_class class_weight(const GroupModel& G, const ReductiveQuotient& Q, const TestFunction& f,
                       const std::map<std::string, std::pair<RationalClass, mpz_class>>& counts, int q) {
  RationalClass target;
  if (f.kind == TestKind::Coset) target = rational_class(G, Q, f.ebar);
  mpq_class s = 0;
  for (const auto& [key, entry] : counts)
    if (class_matches(G, Q, f, entry.first, target)) s += entry.second;
  if (f.kind == TestKind::Coset) s /= mpq_class(rational_orbit_size(G, Q, target, q));
  s.canonicalize();
  return s;
}

using ClassCounts = std::map<std::string, std::pair<RationalClass, mpz_class>>;

bool same_counts(const ClassCounts& a, const ClassCounts& b) {
  if (a.size() != b.size()) return false;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib)
    if (ia->first != ib->first || ia->second.second != ib->second.second) return false;
  return true;
}

}  // namespace

QValue evaluate(const GroupModel& G, const TestFunction& f, const LMatrix& X, int q) {
  QValue one = qhalf(q, f.scale_half), zero = QValue::integer(q, 0);
  if (f.kind == TestKind::Zero) return zero;
  if (f.kind == TestKind::Lattice) return G.in_mp(X, mp_lattice(G.rs, f.y, f.level, false)) ? one : zero;
  if (!G.in_mp(X, mp_lattice(G.rs, f.y, 0, false))) return zero;
  KMat R = G.reduce(X, f.y);
  if (f.kind == TestKind::Coset) {
    if (f.averaged) return averaged_value(G, f, X, q);
    return R == f.ebar ? one : zero;
  }
  auto Q = reductive_quotient(G.rs, f.y);
  auto c = rational_class(G, Q, R);
  return class_matches(G, Q, f, c, c) ? one : zero;
}

QValue averaged_value(const GroupModel& G, const TestFunction& f, const LMatrix& X, int q) {
  if (f.kind != TestKind::Coset) return evaluate(G, f, X, q);
  if (!G.in_mp(X, mp_lattice(G.rs, f.y, 0, false))) return QValue::integer(q, 0);
  auto Q = reductive_quotient(G.rs, f.y);
  auto target = rational_class(G, Q, f.ebar);
  if (!(rational_class(G, Q, G.reduce(X, f.y)) == target)) return QValue::integer(q, 0);
  return qhalf(q, f.scale_half) / QValue(q, mpq_class(rational_orbit_size(G, Q, target, q)));
}

QValue iwahori_torus_volume_ratio(const GroupModel& G, const Fq& F) {
  const auto& rs = G.rs;
  auto mp = mp_lattice(rs, rs.base_point, 0, true);
  std::vector<int> exps(G.dim);
  for (int i = 0; i < rs.rank; ++i) exps[i] = mp.toral_exp;
  for (int a = 0; a < rs.num_roots(); ++a) exps[rs.rank + a] = mp.root_exp[a];
  LMatrix gram(F, G.dim, G.dim);
  for (int i = 0; i < G.dim; ++i)
    for (int j = 0; j < G.dim; ++j) gram.at(i, j) = Laurent::from_int(F, G.gram[i][j]);
  OLattice L = OLattice::diagonal(F, exps);
  long e_g = lattice_index_exponent(L, dual_lattice(L, gram, 1));
  LMatrix tgram(F, rs.rank, rs.rank);
  for (int i = 0; i < rs.rank; ++i)
    for (int j = 0; j < rs.rank; ++j) tgram.at(i, j) = gram.at(i, j);
  OLattice T = OLattice::diagonal(F, std::vector<int>(rs.rank, 1));
  long e_t = lattice_index_exponent(T, dual_lattice(T, tgram, 1));
  // m(L) = [L^* : L]^{-1/2} = q^{(v det L^* - v det L)/2}
  return qhalf(F.q(), e_g - e_t);
}

QValue tangent_factor(const GroupModel& G, const LMatrix& gamma_diag) {
  const auto& rs = G.rs;
  const Fq& F = gamma_diag.field();
  int m = rs.num_roots();
  auto mp = mp_lattice(rs, rs.base_point, 0, true);
  LMatrix gB(F, m, m), gW(F, m, m);
  for (int a = 0; a < m; ++a) {
    Laurent av = G.root_value(gamma_diag, a);
    for (int b = 0; b < m; ++b) {
      gB.at(a, b) = Laurent::from_int(F, G.gram[rs.rank + a][rs.rank + b]);
      // omega(E_a, E_b) = B([gamma, E_a], E_b) = alpha_a(gamma) B(E_a, E_b)
      gW.at(a, b) = av * gB.at(a, b);
    }
  }
  OLattice L = OLattice::diagonal(F, mp.root_exp);
  // m_omega(L) / m_B(L) = q^{(v det L^*_omega - v det L^*_B)/2}
  return qhalf(F.q(), lattice_index_exponent(dual_lattice(L, gB, 1), dual_lattice(L, gW, 1)));
}

IntegralValue orbital_integral(const GroupModel& G, const LMatrix& gamma, const TestFunction& f, const Fq& F, Route route,
                               const IntegralOptions& opt) {
  const auto& rs = G.rs;
  int q = F.q();
  G.check_characteristic(F.p());
  IntegralValue out;
  out.route = route_name(route);
  if (f.kind == TestKind::Zero) {
    out.value = QValue::integer(q, 0);
    out.trace = "zero function";
    return out;
  }
  LMatrix d = split_cartan_form(G, gamma);
  int vD = discriminant_valuation(G, d);
  auto Q = reductive_quotient(rs, f.y);
  check_function(G, Q, f);
  bool by_class = f.kind != TestKind::Lattice;
  QValue scale = qhalf(q, f.scale_half);
  std::ostringstream tr;

  if (route == Route::PointCount) {
    FiberSpec fib{FiberKind::Parahoric, f.y, f.y_name, "", by_class ? mpq_class(0) : f.level};
    CountOptions co;
    co.max_budget = opt.max_budget;
    co.jobs = opt.jobs;
    mpq_class weight;
    if (!by_class) {
      auto rec = count_asf(G, d, F, fib, co);
      if (!rec.stabilized) fail(Errc::NotStabilized, "fiber count did not stabilize by window " + std::to_string(rec.L));
      weight = rec.total;
      tr << "count=" << rec.total.get_str() << " L=" << rec.L;
    } else {
      ClassCounts prev, cur;
      bool done = false;
      int L = 0;
      for (L = 0; L <= opt.max_budget && !done; ++L) {
        cur.clear();
        PointVisitor visit = [&](int, const KMat& R) {
          auto c = rational_class(G, Q, R);
          auto& slot = cur[c.key()];
          slot.first = c;
          slot.second += 1;
        };
        auto rec = count_at_budget(G, d, F, fib, L, co, &visit);
        done = L >= 2 && !rec.overflow && same_counts(prev, cur);
        prev = cur;
      }
      if (!done) fail(Errc::NotStabilized, "class counts did not stabilize by window " + std::to_string(opt.max_budget));
      weight = class_weight(G, Q, f, cur, q);
      tr << "classes:";
      for (const auto& [key, e] : cur) tr << ' ' << key << '=' << e.second.get_str();
      tr << " L=" << L - 1;
    }
    mpz_class tq = 1;
    for (int i = 0; i < rs.rank; ++i) tq *= q - 1;
    QValue factor = QValue(q, mpq_class(Q.order(q), tq)) * qhalf(q, -vD - Q.dim() + rs.rank);
    out.value = scale * QValue(q, weight) * factor;
    tr << " factor=" << factor.str();
  } else {
    ClassCounts prev, cur;
    mpz_class prev_total = -1;
    bool done = false;
    int L = 1;
    BruteCount bf;
    IVec zero(rs.ambient, 0);
    for (L = 1; L <= opt.max_window && !done; ++L) {
      cur.clear();
      PointFilter accept = [&](const LMatrix& X) {
        auto c = rational_class(G, Q, G.reduce(X, f.y));
        auto& slot = cur[c.key()];
        slot.first = c;
        slot.second += 1;
        return true;
      };
      bf = brute_force_count(G, d, F, f.y, L, zero, by_class ? mpq_class(0) : f.level, by_class ? &accept : nullptr);
      done = !bf.boundary_hit && bf.total == prev_total && same_counts(prev, cur);
      prev_total = bf.total;
      prev = cur;
    }
    if (!done) fail(Errc::NotStabilized, "coset enumeration did not stabilize by length " + std::to_string(opt.max_window));
    mpq_class weight = by_class ? class_weight(G, Q, f, cur, q) : mpq_class(bf.total);
    QValue vol = iwahori_torus_volume_ratio(G, F), tan = tangent_factor(G, d);
    out.value = scale * QValue(q, weight) * vol * tan;
    tr << "iwahori cosets=" << bf.total.get_str() << " length<=" << L - 1 << " vol=" << vol.str() << " tangent=" << tan.str();
  }
  out.trace = tr.str();
  return out;
}

IntegralValue stable_orbital_integral(const GroupModel& G, const LMatrix& gamma, const TestFunction& f, const Fq& F,
                                      const IntegralOptions& opt) {
  // split centralizer: H^1(F, T) is trivial, so the stable class is one rational class
  IntegralValue v = orbital_integral(G, gamma, f, F, Route::PointCount, opt);
  v.trace = "stable = ordinary (split centralizer); " + v.trace;
  return v;
}

std::pair<QValue, QValue> dilate(const GroupModel& G, const LMatrix& gamma, const TestFunction& f, const Fq& F,
                                 const IntegralOptions& opt) {
  int q = F.q();
  if (f.kind == TestKind::Zero) return {QValue::integer(q, 0), QValue::integer(q, 0)};
  LMatrix scaled = gamma.shifted(-1);
  QValue lhs = orbital_integral(G, scaled, dilated(f), F, Route::PointCount, opt).value;
  // the regular semisimple orbit has dimension |Phi|
  QValue rhs = qhalf(q, G.rs.num_roots()) * orbital_integral(G, gamma, f, F, Route::PointCount, opt).value;
  return {lhs, rhs};
}

Normalizations convert_normalization(const QValue& I, int vD, const ReductiveQuotient& Q, int q) {
  Normalizations n;
  n.self_dual = I;
  n.dk = qhalf(q, vD) * I;
  mpz_class tq = 1;
  for (int i = 0; i < Q.rank; ++i) tq *= q - 1;
  n.gkm = n.dk * QValue(q, mpq_class(tq, Q.order(q))) * qhalf(q, Q.dim() - Q.rank);
  return n;
}

QValue self_dual_from_gkm(const QValue& gkm, int vD, const ReductiveQuotient& Q, int q) {
  mpz_class tq = 1;
  for (int i = 0; i < Q.rank; ++i) tq *= q - 1;
  return gkm * QValue(q, mpq_class(Q.order(q), tq)) * qhalf(q, -(Q.dim() - Q.rank)) * qhalf(q, -vD);
}

std::string integral_csv_header() { return "gamma,f,q,value_num,value_den,route"; }

std::string integral_csv_row(const std::string& gamma, const TestFunction& f, int q, const IntegralValue& v) {
  std::ostringstream os;
  os << '"' << gamma << "\",\"" << f.name() << "\"," << q << ',';
  if (v.value.is_rational()) {
    mpq_class a = v.value.rational_part();
    os << a.get_num().get_str() << ',' << a.get_den().get_str();
  } else {
    // irrational values keep the exact a + b sqrt(q) form in the numerator column
    os << '"' << v.value.str() << "\",1";
  }
  os << ',' << v.route;
  return os.str();
}

}  // namespace asf
