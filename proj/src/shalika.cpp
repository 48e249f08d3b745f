#include "shalika.hpp"

#include <cmath>

#include "flagcount.hpp"
#include "json.hpp"
#include "springerdata.hpp"

namespace asf {

namespace {

using nlohmann::ordered_json;

ordered_json value_json(const QValue& v) {
  ordered_json j;
  j["value"] = v.str();
  if (v.is_rational()) {
    j["num"] = v.rational_part().get_num().get_str();
    j["den"] = v.rational_part().get_den().get_str();
  }
  return j;
}

QValue nil_int(const GroupModel& G, const NilpotentDatum& d, const TestFunction& f, const Fq& F) {
  return nilpotent_orbital_integral(G, d, f, F).total;
}

}  // namespace

std::vector<DegenerationRow> degeneration_table(const GroupModel& G, const Fq& F) {
  const auto& rs = G.rs;
  G.check_characteristic(F.p());
  QVec o = rs.origin();
  auto Q = reductive_quotient(rs, o);
  // g = prod x_a(t) lies in G_{o,>0}, so Ad(g) e stays in e + g_{o,>0}
  LMatrix g = LMatrix::identity(F, G.n);
  for (int a = 0; a < rs.num_roots(); ++a) g = g * G.root_subgroup(F, a, Laurent::monomial(F, 1, 1));
  LMatrix gi = g.inverse_monomial_det();
  auto above = mp_lattice(rs, o, 0, true);
  std::vector<DegenerationRow> rows;
  int last = -1;
  for (const auto& label : nilpotent_labels(rs.type)) {
    DegenerationRow r;
    r.label = label;
    r.x = o;
    r.ebar = standard_nilpotent(G, label, F);
    r.d = quotient_orbit_dim(G, Q, label);
    r.component_group = component_group(G, Q, label);
    LMatrix e(F, G.n, G.n);
    for (int i = 0; i < G.n; ++i)
      for (int j = 0; j < G.n; ++j) e.at(i, j) = Laurent::monomial(F, r.ebar.at(i, j), 0);
    r.witness = g * e * gi;
    auto jm = jm_cocharacter(G, r.ebar);
    if (classify_reduction(G, Q, r.ebar).label != label || jm.orbit_dim != r.d)
      fail(Errc::InvalidArgument, "degeneration row '" + label + "': representative has the wrong orbit");
    if (!is_nilpotent(r.witness) || !G.in_mp(r.witness - e, above) || !(G.reduce(r.witness, o) == r.ebar))
      fail(Errc::InvalidArgument, "degeneration row '" + label + "': witness is not in ebar + g_{o,>0}");
    if (last >= 0 && r.d > last) fail(Errc::InvalidArgument, "degeneration rows are not in decreasing dimension");
    last = r.d;
    rows.push_back(r);
  }
  if (rows.front().d != Q.dim() - rs.rank) fail(Errc::InvalidArgument, "regular row has the wrong dimension");
  return rows;
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::F: return "f";
    case Variant::FPrime: return "f'";
    case Variant::FStar: return "f*";
  }
  return "?";
}

TestFunction build_test_function(const GroupModel& G, const DegenerationRow& row, Variant v) {
  if (v == Variant::FStar) return orbit_indicator(G.rs, row.x_name, row.label, -row.d);
  TestFunction f = coset_indicator(G.rs, row.x_name, row.ebar, row.d);
  f.averaged = v == Variant::FPrime;
  return f;
}

GermTable germ_solve(const GroupModel& G, const LMatrix& gamma0, const Fq& F, const GermOptions& opt) {
  const auto& rs = G.rs;
  int q = F.q();
  if (!is_topologically_nilpotent(G, gamma0)) fail(Errc::InvalidArgument, "gamma_0 is not topologically nilpotent");
  auto rows = degeneration_table(G, F);
  int n = static_cast<int>(rows.size());
  std::vector<NilpotentDatum> data;
  std::vector<TestFunction> fs;
  for (const auto& r : rows) {
    data.push_back(nilpotent_datum(G, r.label, F));
    fs.push_back(build_test_function(G, r, Variant::F));
  }

  GermTable t;
  t.gamma0 = gamma0.str();
  t.q = q;
  QValue zero = QValue::integer(q, 0), one = QValue::integer(q, 1);
  t.unit_lower_triangular = true;
  for (int i = 0; i < n; ++i) {
    t.labels.push_back(rows[i].label);
    std::vector<QValue> row;
    for (int j = 0; j < n; ++j) {
      QValue v = nil_int(G, data[j], fs[i], F);
      if ((j > i && !v.is_zero()) || (j == i && v != one)) t.unit_lower_triangular = false;
      row.push_back(v);
    }
    t.matrix.push_back(row);
    t.rhs.push_back(orbital_integral(G, gamma0, fs[i], F, Route::PointCount, opt.integral).value);
  }
  // forward substitution
  for (int i = 0; i < n; ++i) {
    if (t.matrix[i][i].is_zero()) fail(Errc::SingularSystem, "zero pivot at orbit '" + rows[i].label + "'");
    QValue s = t.rhs[i];
    for (int j = 0; j < i; ++j) s = s - t.matrix[i][j] * t.germs[j];
    t.germs.push_back(s / t.matrix[i][i]);
  }

  auto predict = [&](const TestFunction& f) {
    QValue s = zero;
    for (int j = 0; j < n; ++j) s += t.germs[j] * nil_int(G, data[j], f, F);
    return s;
  };
  TestFunction big = lattice_indicator(rs, "x", -1);
  t.reconstruction_direct = orbital_integral(G, gamma0, big, F, Route::PointCount, opt.integral).value;
  t.reconstruction_predicted = predict(big);
  t.reconstruction_check = t.reconstruction_direct == t.reconstruction_predicted;
  if (opt.held_out) {
    TestFunction h = lattice_indicator(rs, "o", 0);
    t.held_out_direct = orbital_integral(G, gamma0, h, F, Route::PointCount, opt.integral).value;
    t.held_out_predicted = predict(h);
    t.held_out_check = t.held_out_direct == t.held_out_predicted;
  }
  return t;
}

std::string germ_json(const GermTable& t) {
  ordered_json j;
  j["gamma0"] = t.gamma0;
  j["q"] = t.q;
  j["orbits"] = ordered_json::array();
  for (size_t i = 0; i < t.labels.size(); ++i) {
    ordered_json o;
    o["label"] = t.labels[i];
    const QValue& g = t.germs[i];
    if (g.is_rational()) {
      o["Gamma_num"] = g.rational_part().get_num().get_str();
      o["Gamma_den"] = g.rational_part().get_den().get_str();
    }
    o["Gamma"] = g.str();
    j["orbits"].push_back(o);
  }
  j["unit_lower_triangular"] = t.unit_lower_triangular;
  j["reconstruction_check"] = t.reconstruction_check;
  j["reconstruction"] = {{"direct", t.reconstruction_direct.str()}, {"predicted", t.reconstruction_predicted.str()}};
  j["held_out_check"] = t.held_out_check;
  j["held_out"] = {{"direct", t.held_out_direct.str()}, {"predicted", t.held_out_predicted.str()}};
  return j.dump(2);
}

MainReport verify_main(const GroupModel& G, const std::string& gamma, const std::vector<int>& qs, const GermOptions& opt) {
  const auto& rs = G.rs;
  MainReport rep;
  rep.gamma = gamma;
  rep.weyl_order = rs.order_w();
  bool ok = true;
  for (int q : qs) {
    const Fq& F = Fq::of_order(q);
    LMatrix g = parse_lie_element(G, gamma, F);
    Depth dp = depth(G, g);
    if (dp.infinite || dp.value <= 1) fail(Errc::DepthTooSmall, "depth of " + gamma + " must exceed 1");
    LMatrix g0 = g.shifted(-1);
    MainQ m;
    m.q = q;
    m.value = orbital_integral(G, g, lattice_indicator(rs, "x", 0), F, Route::PointCount, opt.integral).value;
    m.residual = m.value.to_double() - rep.weyl_order;
    m.germs = germ_solve(G, g0, F, opt);
    ok = ok && m.germs.unit_lower_triangular && m.germs.reconstruction_check && (!opt.held_out || m.germs.held_out_check);

    auto rows = degeneration_table(G, F);
    int n = static_cast<int>(rows.size());
    TestFunction big = lattice_indicator(rs, "x", -1);
    QValue one = QValue::integer(q, 1);

    SubEstimate a1{"A1", {}, {}, false};
    auto reg = nilpotent_datum(G, rows[0].label, F);
    QValue v1 = nil_int(G, reg, big, F);
    a1.items.push_back("I_" + rows[0].label + "(1[g_{x,>=-1}])");
    a1.values.push_back(v1);
    a1.pass = v1 == QValue::integer(q, rep.weyl_order) * QValue::qpow_half(q, rows[0].d);

    SubEstimate a2{"A2", {}, {}, true};
    for (const auto& r : rows) {
      auto d = nilpotent_datum(G, r.label, F);
      QValue v = nil_int(G, d, big, F) * QValue::qpow_half(q, -r.d);
      a2.items.push_back("q^(-d/2) I_" + r.label + "(1[g_{x,>=-1}]) <= " + std::to_string(parabolic_index(G, d)));
      a2.values.push_back(v);
      a2.pass = a2.pass && v <= QValue::integer(q, parabolic_index(G, d));
    }

    SubEstimate a3{"A3", {}, {}, true}, a4{"A4", {}, {}, true};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const QValue& v = m.germs.matrix[i][j];
        std::string item = "I_" + rows[j].label + "(f_" + std::to_string(i + 1) + ")";
        if (i == j) {
          a3.items.push_back(item), a3.values.push_back(v);
          a3.pass = a3.pass && v == one;
        } else {
          a4.items.push_back(item), a4.values.push_back(v);
          if (j > i) a4.pass = a4.pass && v.is_zero();
        }
      }

    SubEstimate a5{"A5", {"I_gamma0(f_1)", "|I_gamma0(f_1) - 1| q^(1/2)"}, {}, true};
    a5.values.push_back(m.germs.rhs[0]);
    double r5 = std::fabs(m.germs.rhs[0].to_double() - 1) * std::sqrt(static_cast<double>(q));
    a5.values.push_back(QValue(q, mpq_class(std::lround(r5 * 1e6), 1000000)));

    SubEstimate a6{"A6", {}, {}, true};
    for (int i = 0; i < n; ++i) {
      a6.items.push_back("I_gamma0(f_" + std::to_string(i + 1) + ")");
      a6.values.push_back(m.germs.rhs[i]);
    }
    for (auto* s : {&a1, &a2, &a3, &a4, &a5, &a6}) {
      ok = ok && s->pass;
      m.estimates.push_back(*s);
    }
    rep.c = std::max(rep.c, std::fabs(m.residual) * std::sqrt(static_cast<double>(q)));
    rep.per_q.push_back(std::move(m));
  }
  // a single constant must cover every q; we require it to stay within |W|
  rep.pass = ok && rep.c <= rep.weyl_order;
  return rep;
}

std::string main_json(const MainReport& r) {
  ordered_json j;
  j["gamma"] = r.gamma;
  j["W"] = r.weyl_order;
  j["c"] = r.c;
  j["pass"] = r.pass;
  j["per_q"] = ordered_json::array();
  for (const auto& m : r.per_q) {
    ordered_json e;
    e["q"] = m.q;
    e["I_gamma"] = value_json(m.value);
    e["residual"] = m.residual;
    e["germs"] = ordered_json::parse(germ_json(m.germs));
    e["estimates"] = ordered_json::array();
    for (const auto& s : m.estimates) {
      ordered_json se;
      se["name"] = s.name;
      se["pass"] = s.pass;
      se["items"] = ordered_json::array();
      for (size_t i = 0; i < s.items.size(); ++i) se["items"].push_back({{"item", s.items[i]}, {"value", s.values[i].str()}});
      e["estimates"].push_back(se);
    }
    j["per_q"].push_back(e);
  }
  return j.dump(2);
}

}  // namespace asf
