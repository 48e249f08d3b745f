#include "springerdata.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace asf {

namespace {

std::vector<std::string> tokens(const std::string& label) {
  std::vector<std::string> out;
  std::stringstream ss(label);
  std::string tok;
  while (std::getline(ss, tok, '+')) out.push_back(tok);
  return out;
}

struct LocalSystem {
  std::string eta;
  int rho_dim;
};

// adjoint Springer correspondence of one simple factor
std::vector<LocalSystem> factor_springer(const std::string& type, const std::string& orbit) {
  if (type == "A2" && orbit == "min") return {{"1", 2}};
  if (type == "C2" && orbit == "subreg") return {{"1", 2}, {"sgn", 1}};
  return {{"1", 1}};
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string factor_type(const ReductiveQuotient& Q, int factor) {
  switch (Q.factors.at(factor).size()) {
    case 2: return "A1";
    case 6: return "A2";
    case 8: return "C2";
  }
  fail(Errc::UnsupportedWeylGroup, "unsupported simple factor with " + std::to_string(Q.factors[factor].size()) + " roots");
}

std::string weyl_group_name(const ReductiveQuotient& Q) {
  if (Q.factors.empty()) return "1";
  std::string s;
  for (size_t f = 0; f < Q.factors.size(); ++f) s += (f ? "x" : "") + factor_type(Q, static_cast<int>(f));
  return s;
}

int component_group(const GroupModel& G, const ReductiveQuotient& Q, const std::string& label) {
  (void)quotient_orbit_dim(G, Q, label);  // validates the label
  if (Q.factors.empty()) return 1;
  auto parts = tokens(label);
  int order = 1;
  for (size_t f = 0; f < parts.size(); ++f)
    if (factor_type(Q, static_cast<int>(f)) == "C2" && parts[f] == "subreg") order *= 2;
  return order;
}

std::vector<SpringerRow> springer_table(const GroupModel& G, const ReductiveQuotient& Q) {
  std::vector<SpringerRow> out;
  for (size_t f = 0; f < Q.factors.size(); ++f) (void)factor_type(Q, static_cast<int>(f));
  for (const auto& label : quotient_orbit_labels(G, Q)) {
    std::vector<std::pair<std::string, int>> acc = {{"", 1}};
    auto parts = tokens(label);
    for (size_t f = 0; f < Q.factors.size(); ++f) {
      std::vector<std::pair<std::string, int>> next;
      for (const auto& [eta, dim] : acc)
        for (const auto& ls : factor_springer(factor_type(Q, static_cast<int>(f)), parts[f]))
          next.push_back({eta + (f ? "+" : "") + ls.eta, dim * ls.rho_dim});
      acc = next;
    }
    if (Q.factors.empty()) acc = {{"1", 1}};
    for (const auto& [eta, dim] : acc) {
      SpringerRow r;
      r.label = label;
      r.component_group = component_group(G, Q, label);
      r.eta = eta;
      r.rho_dim = dim;
      r.centralizer_dim = Q.dim() - quotient_orbit_dim(G, Q, label);
      out.push_back(r);
    }
  }
  return out;
}

int springer_square_sum(const std::vector<SpringerRow>& table) {
  int s = 0;
  for (const auto& r : table) s += r.rho_dim * r.rho_dim;
  return s;
}

KMat orbit_witness(const GroupModel& G, const ReductiveQuotient& Q, const std::string& label, const Fq& F) {
  const auto& pos = Q.positive;
  KMat fallback;
  bool have = false;
  for (unsigned mask = 0; mask < (1u << pos.size()); ++mask) {
    std::vector<Elt> c(G.dim, 0);
    for (size_t i = 0; i < pos.size(); ++i)
      if (mask >> i & 1u) c[G.rs.rank + pos[i]] = 1;
    KMat X = G.from_coords(F, c);
    auto cls = classify_reduction(G, Q, X);
    if (cls.label != label) continue;
    if (cls.form_class == 0) return X;
    if (!have) fallback = X, have = true;
  }
  if (!have) fail(Errc::InvalidArgument, "no witness for orbit '" + label + "'");
  return fallback;
}

int centralizer_dim(const GroupModel& G, const ReductiveQuotient& Q, const KMat& X) {
  KMat A = G.adk(X);
  std::vector<int> basis;
  for (int i = 0; i < G.rs.rank; ++i) basis.push_back(i);
  for (int a : Q.roots) basis.push_back(G.rs.rank + a);
  std::vector<std::vector<Elt>> cols;
  for (int j : basis) {
    std::vector<Elt> v;
    for (int i = 0; i < G.dim; ++i) v.push_back(A.at(i, j));
    cols.push_back(v);
  }
  return static_cast<int>(basis.size()) - rank_k(*X.F, cols);
}

int springer_fiber_dim(const GroupModel& G, const ReductiveQuotient& Q, const std::string& label) {
  int z = Q.dim() - quotient_orbit_dim(G, Q, label);
  return (z - G.rs.rank) / 2;
}

TraceClass trace_class(const GroupModel& G, const ReductiveQuotient& Q, const KMat& eprime, const KMat& e) {
  auto a = rational_class(G, Q, eprime), b = rational_class(G, Q, e);
  if (a.label != b.label) fail(Errc::InvalidArgument, "points lie in different geometric orbits");
  int order = component_group(G, Q, a.label);
  if (order > 2) fail(Errc::UnsupportedComponentGroup, "component group of order " + std::to_string(order));
  TraceClass t;
  if (order == 2 && !(a == b)) t.cls = "s";
  return t;
}

int trace_value(const std::string& eta, const TraceClass& tau) {
  return eta.find("sgn") != std::string::npos && tau.cls == "s" ? -1 : 1;
}

SteinbergReport steinberg_check(const GroupModel& G, const std::string& gamma, const std::string& y_name,
                                const std::vector<int>& qs, const std::string& ebar, const CountOptions& opt) {
  const auto& rs = G.rs;
  SteinbergReport rep;
  rep.gamma = gamma;
  rep.y = y_name;
  FiberSpec fiber = parahoric_fiber(rs, y_name);
  auto Q = reductive_quotient(rs, fiber.y);
  auto table = springer_table(G, Q);
  rep.weyl_order = rs.order_w();
  rep.parahoric_expected_C = rs.order_w() / static_cast<int>(Q.weyl.size());
  if (!ebar.empty()) (void)quotient_orbit_dim(G, Q, ebar);

  std::vector<SpringerRow> rows;
  for (const auto& r : table)
    if (ebar.empty() || r.label == ebar) rows.push_back(r);
  rep.strata.resize(rows.size());

  CountOptions o = opt;
  o.collect_strata = true;
  for (int q : qs) {
    const Fq& F = Fq::of_order(q);
    LMatrix g = parse_lie_element(G, gamma, F);
    Depth dp = depth(G, g);
    if (!dp.infinite && dp.value <= 1)
      fail(Errc::DepthTooSmall, "depth " + dp.value.get_str() + " <= 1 for " + gamma);
    rep.dim_fiber = bezrukavnikov_dim(G, g);
    auto rec = count_asf(G, g, F, fiber, o);
    rep.parahoric.push_back({q, rec.total});
    mpz_class sum = 0;
    for (const auto& [label, c] : rec.strata) sum += c[0] + c[1];
    if (sum != rec.total) rep.strata_sum_ok = false;
    for (size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      int base = classify_reduction(G, Q, orbit_witness(G, Q, r.label, F)).form_class;
      mpz_class w = 0;
      auto it = rec.strata.find(r.label);
      if (it != rec.strata.end())
        for (int f = 0; f < 2; ++f) {
          TraceClass tau;
          if (f != base && r.component_group == 2) tau.cls = "s";
          w += it->second[f] * trace_value(r.eta, tau);
        }
      rep.strata[i].counts.push_back({q, w});
    }
  }

  bool ok = rep.strata_sum_ok;
  for (size_t i = 0; i < rows.size(); ++i) {
    auto& s = rep.strata[i];
    s.y = y_name, s.ebar = rows[i].label, s.eta = rows[i].eta;
    s.expected_d = rep.dim_fiber - springer_fiber_dim(G, Q, rows[i].label);
    s.expected_C = rep.parahoric_expected_C * rows[i].rho_dim;
    s.fit = fit_growth(s.counts);
    s.pass = s.fit.d == s.expected_d && std::fabs(s.fit.C - s.expected_C) <= 0.5;
    rep.component_total += s.fit.C * rows[i].rho_dim;
    ok = ok && s.pass;
  }
  rep.parahoric_fit = fit_growth(rep.parahoric);
  ok = ok && rep.parahoric_fit.d == rep.dim_fiber &&
       std::fabs(rep.parahoric_fit.C - rep.parahoric_expected_C) <= 0.5;
  if (ebar.empty()) ok = ok && std::lround(rep.component_total) == rep.weyl_order;
  rep.pass = ok;
  return rep;
}

std::string steinberg_csv_header() { return "y,ebar,eta,q,count_weighted,fit_d,fit_C"; }

std::vector<std::string> steinberg_csv_rows(const SteinbergReport& r) {
  std::vector<std::string> out;
  for (const auto& s : r.strata)
    for (const auto& [q, c] : s.counts)
      out.push_back(s.y + "," + s.ebar + "," + s.eta + "," + std::to_string(q) + "," + c.get_str() + "," +
                    s.fit.d.get_str() + "," + fmt_double(s.fit.C));
  return out;
}

}  // namespace asf
