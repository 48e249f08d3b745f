#pragma once
// Orbital integrals of regular semisimple elements with split centralizer,
// normalized by the self-dual measure on the tangent space of the orbit
// (m(L) m(L^*) = 1 for the symplectic form B(gamma, [X, Y])).
//
// Two routes. The point-count route multiplies a parahoric (or stratified)
// fiber count by |G_{y,0}| / |T_0| * q^{(-v(D) - dim G_{y,0} + rank) / 2}. The
// direct route sums the measures of the Iwahori-coset pieces of the orbit that
// meet the support: brute-force coset enumeration times vol(I)/vol(T(O)) and
// the tangent-space factor, both read off dual lattices.

#include <string>
#include <utility>

#include "exactnum.hpp"
#include "flagcount.hpp"
#include "liemodel.hpp"
#include "rootdata.hpp"

namespace asf {

enum class TestKind {
  Zero,
  Lattice,  // 1 on g_{y,>=level}
  Coset,    // 1 on ebar + g_{y,>0}
  Orbit,    // 1 on the preimage of a geometric nilpotent orbit of g_{y,0}
  Closure,  // 1 on the preimage of its closure
};

// Every function carries an overall factor q^{scale_half/2}.
struct TestFunction {
  TestKind kind = TestKind::Lattice;
  std::string y_name = "x";
  QVec y;
  mpq_class level = 0;
  KMat ebar;
  std::string label;
  int scale_half = 0;
  bool averaged = false;  // coset only: replaced by its G_{y,>=0}-average
  std::string name() const;
};

TestFunction zero_function(const RootSystem& rs);
TestFunction lattice_indicator(const RootSystem& rs, const std::string& y_name, const mpq_class& level);
TestFunction coset_indicator(const RootSystem& rs, const std::string& y_name, const KMat& ebar, int scale_half = 0);
TestFunction orbit_indicator(const RootSystem& rs, const std::string& y_name, const std::string& label, int scale_half = 0,
                             bool closure = false);
// f_{t^{-1}}: X -> f(tX); lattice indicators and zero only
TestFunction dilated(const TestFunction& f);
// f(X) for X in g(F)
QValue evaluate(const GroupModel& G, const TestFunction& f, const LMatrix& X, int q);
// the G_{y,>=0}-average of f at X: a coset indicator is spread over the
// rational class of its representative, the other kinds are already invariant
QValue averaged_value(const GroupModel& G, const TestFunction& f, const LMatrix& X, int q);

enum class Route { PointCount, Direct };
const char* route_name(Route r);

struct IntegralValue {
  QValue value;
  std::string route;
  std::string trace;  // fiber counts, windows and factors that produced the value
};

struct IntegralOptions {
  int max_budget = 12;  // solver window limit
  int max_window = 7;   // brute-force length limit (direct route)
  int jobs = 1;
};

// gamma regular semisimple with split centralizer; for split centralizers the
// stable integral is the ordinary one
IntegralValue orbital_integral(const GroupModel& G, const LMatrix& gamma, const TestFunction& f, const Fq& F,
                               Route route = Route::PointCount, const IntegralOptions& opt = {});
IntegralValue stable_orbital_integral(const GroupModel& G, const LMatrix& gamma, const TestFunction& f, const Fq& F,
                                      const IntegralOptions& opt = {});

// (I_{t^{-1} gamma}(f_{t^{-1}}), q^{dim/2} I_gamma(f)); the two must agree
std::pair<QValue, QValue> dilate(const GroupModel& G, const LMatrix& gamma, const TestFunction& f, const Fq& F,
                                 const IntegralOptions& opt = {});

struct Normalizations {
  QValue self_dual;
  QValue dk;   // q^{v(D)/2} I
  QValue gkm;  // I^{DK} |T_0| / |G_{y,0}| q^{(dim G_{y,0} - dim T_0)/2}
};
Normalizations convert_normalization(const QValue& I, int vD, const ReductiveQuotient& Q, int q);
// inverse of the GKM conversion
QValue self_dual_from_gkm(const QValue& gkm, int vD, const ReductiveQuotient& Q, int q);

// vol(I) / vol(T(O)) and the tangent factor m_omega / m_B, from dual lattices
QValue iwahori_torus_volume_ratio(const GroupModel& G, const Fq& F);
QValue tangent_factor(const GroupModel& G, const LMatrix& gamma_diag);

std::string integral_csv_header();
std::string integral_csv_row(const std::string& gamma, const TestFunction& f, int q, const IntegralValue& v);

}  // namespace asf
