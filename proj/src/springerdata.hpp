#pragma once
// Springer correspondence data for the reductive quotients of sl2, sl3 and
// sp4 (adjoint component groups), the class in A(e) attached to a rational
// point of a geometric orbit, and the stratified growth checks: each stratum
// of the parahoric fiber grows like (|W|/|W_y|) dim rho_eta q^{dim X - d_e}.

#include <string>
#include <vector>

#include "exactnum.hpp"
#include "flagcount.hpp"
#include "liemodel.hpp"
#include "rootdata.hpp"

namespace asf {

// simple factor type read off its root count: "A1", "A2", "C2"
std::string factor_type(const ReductiveQuotient& Q, int factor);
// "1", "A1", "A1xA1", "A2", "C2"
std::string weyl_group_name(const ReductiveQuotient& Q);

// |A(e)| for the adjoint quotient: 2 exactly on a subregular C2 factor
int component_group(const GroupModel& G, const ReductiveQuotient& Q, const std::string& label);

struct SpringerRow {
  std::string label;
  int component_group = 1;
  std::string eta;  // "1" or "sgn"; joined with '+' over factors
  int rho_dim = 0;  // 0 off the image of the correspondence
  int centralizer_dim = 0;
};
// throws UnsupportedWeylGroup unless every factor is A1, A2 or C2
std::vector<SpringerRow> springer_table(const GroupModel& G, const ReductiveQuotient& Q);
// sum of rho_dim^2 over the table
int springer_square_sum(const std::vector<SpringerRow>& table);

// an element of g_{y,0}(F_q) in the named orbit, built from positive root
// vectors with coefficients 0 and 1, of rational form class 0 when possible
KMat orbit_witness(const GroupModel& G, const ReductiveQuotient& Q, const std::string& label, const Fq& F);
// dim of the centralizer of X in g_{y,0}
int centralizer_dim(const GroupModel& G, const ReductiveQuotient& Q, const KMat& X);
// (dim Z(e) - rank) / 2
int springer_fiber_dim(const GroupModel& G, const ReductiveQuotient& Q, const std::string& label);

// "1" when e' is G_{y,0}(F_q)-conjugate to e (or A(e) is trivial), "s" otherwise
struct TraceClass {
  std::string cls = "1";
};
TraceClass trace_class(const GroupModel& G, const ReductiveQuotient& Q, const KMat& eprime, const KMat& e);
// Tr(eta(tau)) for A(e) of order at most 2
int trace_value(const std::string& eta, const TraceClass& tau);

struct StratumFit {
  std::string y, ebar, eta;
  std::vector<std::pair<int, mpz_class>> counts;  // eta-weighted
  FitResult fit;
  mpq_class expected_d;
  int expected_C = 0;
  bool pass = false;
};

struct SteinbergReport {
  std::string gamma, y;
  mpq_class dim_fiber;  // dim X_gamma
  std::vector<StratumFit> strata;
  std::vector<std::pair<int, mpz_class>> parahoric;
  FitResult parahoric_fit;
  int parahoric_expected_C = 0;  // |W| / |W_y|
  bool strata_sum_ok = true;     // strata add up to the parahoric count at every q
  double component_total = 0;    // sum of fitted C * rho_dim over the strata
  int weyl_order = 0;
  bool pass = false;
};

// gamma is parsed at every q; ebar empty means every orbit of g_{y,0}.
// Throws DepthTooSmall unless depth(gamma) > 1.
SteinbergReport steinberg_check(const GroupModel& G, const std::string& gamma, const std::string& y_name,
                                const std::vector<int>& qs, const std::string& ebar = "",
                                const CountOptions& opt = {});

std::string steinberg_csv_header();
std::vector<std::string> steinberg_csv_rows(const SteinbergReport& r);

}  // namespace asf
