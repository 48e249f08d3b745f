#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "acceptance.hpp"
#include "exactnum.hpp"
#include "flagcount.hpp"
#include "json.hpp"
#include "liemodel.hpp"
#include "orbint.hpp"
#include "rangarao.hpp"
#include "rootdata.hpp"
#include "shalika.hpp"
#include "springerdata.hpp"

namespace asf {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// default q schedule; the count modules accept extension fields
const std::vector<int> kSchedule = {3, 5, 7, 9, 11, 13};

std::string fmt(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

ordered_json value_json(const QValue& v) {
  ordered_json j;
  j["value"] = v.str();
  if (v.is_rational()) {
    j["num"] = v.rational_part().get_num().get_str();
    j["den"] = v.rational_part().get_den().get_str();
  }
  return j;
}

ordered_json fit_json(const FitResult& f) {
  ordered_json j;
  j["d"] = f.d.get_str();
  j["C"] = fmt(f.C, "%.6f");
  j["c"] = fmt(f.c, "%.6f");
  j["max_model_error"] = fmt(f.max_model_error, "%.6f");
  return j;
}

[[noreturn]] void bad_config(const std::string& what) { fail(Errc::InvalidArgument, "config: " + what); }

// rethrow a module error with the work unit that raised it
template <class Fn>
auto at_unit(const std::string& where, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(e.what()) + " [" + where + "]");
  }
}

struct Config {
  json raw;
  const GroupModel* G = nullptr;
  std::vector<int> qs;
  CountOptions count;
  IntegralOptions integral;

  std::string str(const char* key, const std::string& dflt = "") const {
    if (!raw.contains(key)) return dflt;
    if (!raw[key].is_string()) bad_config(std::string("'") + key + "' must be a string");
    return raw[key].get<std::string>();
  }
  bool flag(const char* key, bool dflt) const {
    if (!raw.contains(key)) return dflt;
    if (!raw[key].is_boolean()) bad_config(std::string("'") + key + "' must be a boolean");
    return raw[key].get<bool>();
  }
  // gamma may be one expression or a map from q to an expression
  std::string gamma(int q) const {
    if (!raw.contains("gamma")) bad_config("'gamma' is required");
    const json& g = raw["gamma"];
    if (g.is_string()) return g.get<std::string>();
    if (g.is_object() && g.contains(std::to_string(q)) && g[std::to_string(q)].is_string())
      return g[std::to_string(q)].get<std::string>();
    bad_config("'gamma' has no expression for q = " + std::to_string(q));
  }
  std::string gamma_label() const { return raw.contains("gamma") ? raw["gamma"].dump() : ""; }
  LMatrix element(int q, const Fq& F) const {
    std::string e = gamma(q);
    return at_unit("q=" + std::to_string(q) + ", element " + e, [&] { return parse_lie_element(*G, e, F); });
  }
};

int get_int(const json& j, const char* key, int dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number_integer()) bad_config(std::string("'") + key + "' must be an integer");
  return j[key].get<int>();
}

Config load(const std::string& text, bool needs_group, std::vector<int> default_qs = kSchedule) {
  Config c;
  try {
    c.raw = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::ParseError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!c.raw.is_object()) bad_config("top level must be an object");
  if (needs_group) {
    c.G = &GroupModel::get(parse_group(c.str("group")));
    if (!c.raw.contains("q")) {
      // default schedule, restricted to admissible characteristics
      for (int q : default_qs) {
        try {
          c.G->check_characteristic(Fq::of_order(q).p());
          c.qs.push_back(q);
        } catch (const Error&) {
        }
      }
    }
  }
  if (c.raw.contains("q")) {
    if (!c.raw["q"].is_array()) bad_config("'q' must be a list of prime powers");
    for (const auto& v : c.raw["q"]) {
      if (!v.is_number_integer()) bad_config("'q' must be a list of prime powers");
      c.qs.push_back(v.get<int>());
    }
    if (c.G)
      for (int q : c.qs) c.G->check_characteristic(Fq::of_order(q).p());
  }
  c.count.budget = get_int(c.raw, "budget", 0);
  c.count.max_budget = get_int(c.raw, "max_budget", c.count.max_budget);
  c.count.jobs = get_int(c.raw, "jobs", 1);
  if (c.count.jobs < 1 || c.count.budget < 0) bad_config("'jobs' must be positive and 'budget' non-negative");
  c.integral.max_budget = c.count.max_budget;
  c.integral.jobs = c.count.jobs;
  return c;
}

FiberSpec fiber_of(const Config& c) {
  const auto& rs = c.G->rs;
  if (!c.raw.contains("fiber")) return iwahori_fiber(rs);
  const json& f = c.raw["fiber"];
  std::string kind = f.value("kind", "iwahori");
  if (kind == "iwahori") return iwahori_fiber(rs);
  std::string y = f.value("y", "o");
  if (kind == "parahoric") return parahoric_fiber(rs, y);
  if (kind == "stratum") return stratum_fiber(rs, y, f.value("ebar", ""));
  bad_config("fiber kind '" + kind + "' is not iwahori, parahoric or stratum");
}

TestFunction function_of(const Config& c, const Fq& F) {
  const auto& rs = c.G->rs;
  if (!c.raw.contains("function")) return lattice_indicator(rs, "x", 0);
  const json& f = c.raw["function"];
  std::string kind = f.value("kind", "lattice");
  std::string y = f.value("y", "x");
  int scale = f.value("scale_half", 0);
  if (kind == "lattice") {
    std::string level = f.contains("level") ? (f["level"].is_string() ? f["level"].get<std::string>() : f["level"].dump())
                                            : "0";
    mpq_class r;
    try {
      r = mpq_class(level);
    } catch (const std::exception&) {
      bad_config("function level '" + level + "' is not a rational number");
    }
    r.canonicalize();
    TestFunction t = lattice_indicator(rs, y, r);
    t.scale_half = scale;
    return t;
  }
  std::string label = f.value("label", "");
  if (kind == "orbit" || kind == "closure") return orbit_indicator(rs, y, label, scale, kind == "closure");
  if (kind == "coset") {
    auto Q = reductive_quotient(rs, rs.named_point(y));
    KMat ebar = y == "o" ? standard_nilpotent(*c.G, label, F) : orbit_witness(*c.G, Q, label, F);
    TestFunction t = coset_indicator(rs, y, ebar, scale);
    t.averaged = f.value("averaged", false);
    return t;
  }
  bad_config("function kind '" + kind + "' is not lattice, coset, orbit or closure");
}

std::string unit(int q, const std::string& what) { return "q=" + std::to_string(q) + ", " + what; }

void finish(CommandResult& r, bool pass) {
  r.pass = pass;
  r.summary.push_back(pass ? "PASS" : "FAIL");
}

std::vector<CountRecord> run_counts(const Config& c, const FiberSpec& fiber) {
  std::vector<CountRecord> recs;
  for (int q : c.qs) {
    const Fq& F = Fq::of_order(q);
    LMatrix g = c.element(q, F);
    recs.push_back(at_unit(unit(q, "element " + c.gamma(q)), [&] { return count_asf(*c.G, g, F, fiber, c.count); }));
  }
  return recs;
}

ordered_json records_json(const std::vector<CountRecord>& recs) {
  ordered_json a = ordered_json::array();
  for (const auto& r : recs) {
    ordered_json e;
    e["q"] = r.q;
    e["gamma"] = r.gamma;
    e["L"] = r.L;
    e["count"] = r.total.get_str();
    e["stabilized"] = r.stabilized;
    a.push_back(e);
  }
  return a;
}

std::string records_csv(const std::vector<CountRecord>& recs) {
  std::string s = count_csv_header() + "\n";
  for (const auto& r : recs) s += count_csv_row(r) + "\n";
  return s;
}

ordered_json header(const std::string& command, const Config& c) {
  ordered_json j;
  j["command"] = command;
  if (c.G) j["group"] = group_name(c.G->rs.type);
  if (c.raw.contains("gamma")) j["gamma"] = c.raw["gamma"];
  j["q"] = c.qs;
  return j;
}

// ---------------------------------------------------------------- commands

CommandResult cmd_count(const Config& c) {
  CommandResult r;
  FiberSpec fiber = fiber_of(c);
  auto recs = run_counts(c, fiber);
  ordered_json j = header("count", c);
  j["fiber"] = fiber_kind_name(fiber.kind);
  j["records"] = records_json(recs);
  bool ok = true;
  for (const auto& rec : recs) {
    r.summary.push_back("q=" + std::to_string(rec.q) + ": count " + rec.total.get_str() + " at window " +
                        std::to_string(rec.L) + (rec.stabilized ? "" : " (did not stabilize)"));
    ok = ok && rec.stabilized;
  }
  j["pass"] = ok;
  r.artifact = j.dump(2);
  r.csv = records_csv(recs);
  finish(r, ok);
  return r;
}

// expected dimension is v(D(gamma)) / 2 for both Iwahori and parahoric fibers
mpq_class predicted_dim(const Config& c) {
  mpq_class d = -1;
  for (int q : c.qs) {
    const Fq& F = Fq::of_order(q);
    mpq_class dq = bezrukavnikov_dim(*c.G, c.element(q, F));
    if (d >= 0 && dq != d) fail(Errc::InvalidArgument, "discriminant valuation of gamma changes with q");
    d = dq;
  }
  return d;
}

CommandResult cmd_dim(const Config& c) {
  CommandResult r;
  FiberSpec fiber = fiber_of(c);
  auto recs = run_counts(c, fiber);
  std::vector<std::pair<int, mpz_class>> pts;
  for (const auto& rec : recs) pts.push_back({rec.q, rec.total});
  FitResult fit = at_unit("growth fit", [&] { return fit_growth(pts); });
  mpq_class d = predicted_dim(c);
  bool ok = fit.d == d;
  ordered_json j = header("dim", c);
  j["fiber"] = fiber_kind_name(fiber.kind);
  j["records"] = records_json(recs);
  j["fit"] = fit_json(fit);
  j["predicted_d"] = d.get_str();
  j["pass"] = ok;
  r.artifact = j.dump(2);
  r.csv = records_csv(recs);
  r.summary.push_back("fitted d = " + fit.d.get_str() + ", predicted v(D(gamma))/2 = " + d.get_str());
  if (!ok) r.summary.push_back("check failed: fitted dimension differs from half the discriminant valuation");
  finish(r, ok);
  return r;
}

CommandResult cmd_components(const Config& c) {
  CommandResult r;
  FiberSpec fiber = fiber_of(c);
  if (fiber.kind == FiberKind::Stratum) bad_config("components takes an iwahori or parahoric fiber");
  const auto& rs = c.G->rs;
  auto recs = run_counts(c, fiber);
  std::vector<std::pair<int, mpz_class>> pts;
  for (const auto& rec : recs) pts.push_back({rec.q, rec.total});
  FitResult fit = at_unit("growth fit", [&] { return fit_growth(pts); });
  mpq_class d = predicted_dim(c);
  int expected = rs.order_w();
  if (fiber.kind == FiberKind::Parahoric)
    expected /= static_cast<int>(reductive_quotient(rs, fiber.y).weyl.size());
  bool dim_ok = fit.d == d, c_ok = std::fabs(fit.C - expected) <= 0.5;
  ordered_json j = header("components", c);
  j["fiber"] = fiber_kind_name(fiber.kind);
  j["records"] = records_json(recs);
  j["fit"] = fit_json(fit);
  j["predicted_d"] = d.get_str();
  j["expected_C"] = expected;
  j["pass"] = dim_ok && c_ok;
  r.artifact = j.dump(2);
  r.csv = records_csv(recs);
  r.summary.push_back("(d, C) = (" + fit.d.get_str() + ", " + fmt(fit.C, "%.3g") + "), expected (" + d.get_str() + ", " +
                      std::to_string(expected) + ")");
  if (!dim_ok) r.summary.push_back("check failed: fitted dimension differs from half the discriminant valuation");
  if (!c_ok)
    r.summary.push_back("check failed: leading coefficient is not within 0.5 of the number of components " +
                        std::to_string(expected));
  finish(r, dim_ok && c_ok);
  return r;
}

CommandResult cmd_germs(const Config& c) {
  CommandResult r;
  GermOptions opt;
  opt.integral = c.integral;
  opt.held_out = c.flag("held_out", true);
  ordered_json j = header("germs", c);
  j["tables"] = ordered_json::array();
  bool ok = true;
  for (int q : c.qs) {
    const Fq& F = Fq::of_order(q);
    LMatrix g0 = c.element(q, F);
    GermTable t = at_unit(unit(q, "gamma0 " + c.gamma(q)), [&] { return germ_solve(*c.G, g0, F, opt); });
    bool okq = t.unit_lower_triangular && t.reconstruction_check && (!opt.held_out || t.held_out_check);
    std::string line = "q=" + std::to_string(q) + ": Gamma =";
    for (size_t i = 0; i < t.labels.size(); ++i) line += " " + t.labels[i] + ":" + t.germs[i].str();
    r.summary.push_back(line);
    if (!t.unit_lower_triangular) r.summary.push_back("check failed at q=" + std::to_string(q) + ": system matrix is not unit lower triangular");
    if (!t.reconstruction_check)
      r.summary.push_back("check failed at q=" + std::to_string(q) + ": germ expansion does not reconstruct I(1_{g_{x,>=-1}})");
    if (opt.held_out && !t.held_out_check)
      r.summary.push_back("check failed at q=" + std::to_string(q) + ": germ expansion misses held-out I(1_{g_{o,>=0}})");
    ok = ok && okq;
    j["tables"].push_back(ordered_json::parse(germ_json(t)));
  }
  j["pass"] = ok;
  r.artifact = j.dump(2);
  finish(r, ok);
  return r;
}

CommandResult cmd_nilint(const Config& c) {
  CommandResult r;
  std::string label = c.str("label", nilpotent_labels(c.G->rs.type).front());
  ordered_json j = header("nilint", c);
  j["label"] = label;
  j["values"] = ordered_json::array();
  r.csv = nilpotent_csv_header() + "\n";
  bool ok = true;
  for (int q : c.qs) {
    const Fq& F = Fq::of_order(q);
    TestFunction f = function_of(c, F);
    std::string where = unit(q, "orbit " + label + ", function " + f.name());
    auto d = at_unit(where, [&] { return nilpotent_datum(*c.G, label, F); });
    auto v = at_unit(where, [&] { return nilpotent_orbital_integral(*c.G, d, f, F); });
    ordered_json e;
    e["q"] = q;
    e["function"] = f.name();
    e["I"] = value_json(v.total);
    std::string line = "q=" + std::to_string(q) + ": I_" + label + "(" + f.name() + ") = " + v.total.str();
    // reference values: the Iwahori lattice and the orbit's own degeneration function
    if (f.kind == TestKind::Lattice && f.y_name == "x" && f.level == 0 && f.scale_half == 0) {
      int index = parabolic_index(*c.G, d);
      bool bound = v.total <= QValue::integer(q, index);
      bool exact = index != c.G->rs.order_w() || v.total == QValue::integer(q, index);
      e["bound_W_over_WP"] = index;
      e["check"] = bound && exact;
      if (index == c.G->rs.order_w()) line += ", expected |W| = " + std::to_string(index);
      else line += ", bound |W/W_P| = " + std::to_string(index);
      if (!bound) r.summary.push_back("check failed at q=" + std::to_string(q) + ": value exceeds |W/W_P|");
      if (!exact) r.summary.push_back("check failed at q=" + std::to_string(q) + ": Borel case should give |W| exactly");
      ok = ok && bound && exact;
    } else if (f.kind == TestKind::Coset && f.y_name == "o" && !f.averaged) {
      auto rows = degeneration_table(*c.G, F);
      for (const auto& row : rows)
        if (row.label == label && f.ebar == row.ebar && f.scale_half == row.d) {
          bool one = v.total == QValue::integer(q, 1);
          e["check"] = one;
          line += ", expected 1";
          if (!one) r.summary.push_back("check failed at q=" + std::to_string(q) + ": I_e(f_e) should be 1");
          ok = ok && one;
        }
    }
    r.summary.push_back(line);
    for (const auto& row : nilpotent_csv_rows(*c.G, d, f, q, v)) r.csv += row + "\n";
    j["values"].push_back(e);
  }
  j["pass"] = ok;
  r.artifact = j.dump(2);
  finish(r, ok);
  return r;
}

CommandResult cmd_steinberg(const Config& c) {
  CommandResult r;
  std::string y = c.str("y", "o"), ebar = c.str("ebar", "");
  auto rep = at_unit("element " + c.gamma_label() + " at y=" + y, [&] {
    if (c.raw["gamma"].is_object()) bad_config("steinberg takes a single gamma expression");
    return steinberg_check(*c.G, c.gamma(0), y, c.qs, ebar, c.count);
  });
  ordered_json j = header("steinberg", c);
  j["y"] = y;
  j["dim_fiber"] = rep.dim_fiber.get_str();
  j["strata"] = ordered_json::array();
  for (const auto& s : rep.strata) {
    ordered_json e;
    e["ebar"] = s.ebar;
    e["eta"] = s.eta;
    e["counts"] = ordered_json::array();
    for (const auto& [q, n] : s.counts) e["counts"].push_back({{"q", q}, {"count", n.get_str()}});
    e["fit"] = fit_json(s.fit);
    e["expected_d"] = s.expected_d.get_str();
    e["expected_C"] = s.expected_C;
    e["pass"] = s.pass;
    j["strata"].push_back(e);
    r.summary.push_back("stratum " + s.ebar + " (" + s.eta + "): (d, C) = (" + s.fit.d.get_str() + ", " +
                        fmt(s.fit.C, "%.3g") + "), expected (" + s.expected_d.get_str() + ", " +
                        std::to_string(s.expected_C) + ")");
    if (!s.pass) r.summary.push_back("check failed: stratum " + s.ebar + " fit differs from dim X - d_ebar and rho_dim |W|/|W_y|");
  }
  j["parahoric_fit"] = fit_json(rep.parahoric_fit);
  j["parahoric_expected_C"] = rep.parahoric_expected_C;
  j["strata_sum_ok"] = rep.strata_sum_ok;
  j["component_total"] = fmt(rep.component_total, "%.6f");
  j["W"] = rep.weyl_order;
  j["pass"] = rep.pass;
  r.artifact = j.dump(2);
  r.csv = steinberg_csv_header() + "\n";
  for (const auto& row : steinberg_csv_rows(rep)) r.csv += row + "\n";
  r.summary.push_back("parahoric fiber: C = " + fmt(rep.parahoric_fit.C, "%.3g") + ", expected |W|/|W_y| = " +
                      std::to_string(rep.parahoric_expected_C));
  if (!rep.strata_sum_ok) r.summary.push_back("check failed: strata do not add up to the parahoric count");
  if (ebar.empty())
    r.summary.push_back("components over all strata: " + fmt(rep.component_total, "%.3g") + ", |W| = " +
                        std::to_string(rep.weyl_order));
  finish(r, rep.pass);
  return r;
}

CommandResult cmd_main(const Config& c) {
  CommandResult r;
  GermOptions opt;
  opt.integral = c.integral;
  if (c.raw["gamma"].is_object()) bad_config("main takes a single gamma expression");
  auto rep = at_unit("element " + c.gamma(0), [&] { return verify_main(*c.G, c.gamma(0), c.qs, opt); });
  auto j = ordered_json::parse(main_json(rep));
  ordered_json out = header("main", c);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "gamma") out[it.key()] = it.value();
  r.artifact = out.dump(2);
  for (const auto& m : rep.per_q) {
    std::string line = "q=" + std::to_string(m.q) + ": I(1_Lie I) = " + m.value.str();
    for (const auto& s : m.estimates) line += " " + s.name + (s.pass ? ":ok" : ":failed");
    r.summary.push_back(line);
  }
  r.summary.push_back("c = max |I - |W|| q^(1/2) = " + fmt(rep.c) + ", |W| = " + std::to_string(rep.weyl_order));
  if (!rep.pass) r.summary.push_back("check failed: I(1_Lie I) is not |W| + O(q^(-1/2)) with c <= |W|, or a sub-estimate failed");
  finish(r, rep.pass);
  return r;
}

CommandResult cmd_verify(const Config& c) {
  CommandResult r;
  AcceptanceOptions opt;
  opt.slow = !c.flag("fast", false);
  opt.jobs = c.count.jobs;
  if (c.raw.contains("only")) {
    if (!c.raw["only"].is_array()) bad_config("'only' must be a list of criterion ids");
    for (const auto& v : c.raw["only"]) opt.only.push_back(v.get<int>());
  }
  auto results = run_acceptance(opt);
  ordered_json j;
  j["command"] = "verify";
  j["fast"] = !opt.slow;
  j["criteria"] = ordered_json::array();
  bool ok = !results.empty();
  for (const auto& cr : results) {
    j["criteria"].push_back({{"id", cr.id}, {"name", cr.name}, {"pass", cr.pass}, {"detail", cr.detail}});
    r.summary.push_back(criterion_line(cr));
    ok = ok && cr.pass;
  }
  j["pass"] = ok;
  r.artifact = j.dump(2);
  finish(r, ok);
  return r;
}

struct Entry {
  const char* name;
  bool needs_group;
  std::vector<int> default_qs;
  std::function<CommandResult(const Config&)> run;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r = {
      {"count", true, kSchedule, cmd_count},
      {"dim", true, kSchedule, cmd_dim},
      {"components", true, kSchedule, cmd_components},
      {"germs", true, {3, 5, 7}, cmd_germs},
      {"nilint", true, kSchedule, cmd_nilint},
      {"steinberg", true, kSchedule, cmd_steinberg},
      {"verify", false, {}, cmd_verify},
      {"main", true, {3, 5, 7}, cmd_main},
  };
  return r;
}

const Entry& lookup(const std::string& command) {
  for (const auto& e : registry())
    if (command == e.name) return e;
  fail(Errc::InvalidArgument, "unknown command '" + command + "'");
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& e : registry()) n.push_back(e.name);
    return n;
  }();
  return names;
}

CommandResult run_command(const std::string& command, const std::string& config_json) {
  const Entry& e = lookup(command);
  Config c = load(config_json, e.needs_group, e.default_qs);
  CommandResult r = e.run(c);
  r.command = command;
  return r;
}

std::string canonical_config(const std::string& command, const std::string& config_json) {
  lookup(command);
  json j;
  try {
    j = json::parse(config_json);
  } catch (const json::exception& e) {
    fail(Errc::ParseError, std::string("config is not valid JSON: ") + e.what());
  }
  if (j.is_object()) j.erase("jobs");
  return command + "\n" + j.dump();
}

std::string result_to_json(const CommandResult& r) {
  ordered_json j;
  j["command"] = r.command;
  j["pass"] = r.pass;
  j["summary"] = r.summary;
  j["artifact"] = ordered_json::parse(r.artifact);
  j["csv"] = r.csv;
  return j.dump(2);
}

CommandResult result_from_json(const std::string& text) {
  auto j = ordered_json::parse(text);
  CommandResult r;
  r.command = j.at("command").get<std::string>();
  r.pass = j.at("pass").get<bool>();
  r.summary = j.at("summary").get<std::vector<std::string>>();
  r.artifact = j.at("artifact").dump(2);
  r.csv = j.at("csv").get<std::string>();
  return r;
}

}  // namespace asf
