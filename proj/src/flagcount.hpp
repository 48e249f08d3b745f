#pragma once
// Point counts of affine Springer fibers in the Iwahori, parahoric and
// stratified settings, restricted to a fundamental domain for the lattice
// Lambda of cocharacters of the (split) centralizer, plus growth fits.
//
// Two routes are provided. The solver route parametrizes the domain
// U(F) n_w P_y / P_y (w minimal in W / W_y) by root coordinates and solves the
// membership conditions coordinate by coordinate in height order. The cell
// route enumerates Iwahori-Bruhat cells of bounded length point by point and
// is used as an independent oracle at small q.

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "exactnum.hpp"
#include "liemodel.hpp"
#include "rootdata.hpp"

namespace asf {

enum class FiberKind { Iwahori, Parahoric, Stratum };
const char* fiber_kind_name(FiberKind k);

struct FiberSpec {
  FiberKind kind = FiberKind::Iwahori;
  QVec y;               // base point for Iwahori
  std::string y_name;   // "x", "o", ...
  std::string ebar;     // nilpotent label in g_{y,0} (stratum only)
  mpq_class level = 0;  // count g with Ad(g^{-1}) gamma in g_{y,>=level}; strata need level 0
};

FiberSpec iwahori_fiber(const RootSystem& rs);
FiberSpec parahoric_fiber(const RootSystem& rs, const std::string& y_name);
FiberSpec stratum_fiber(const RootSystem& rs, const std::string& y_name, const std::string& ebar);

// ---------------------------------------------------------------- nilpotent strata of g_{y,0}

// Label of the orbit of R in the Lie algebra of the reductive quotient: one
// token per simple factor ("0", "min", "subreg", "reg"), joined with '+';
// "0" when the quotient is a torus; "nonnil" when R is not nilpotent.
// form_class separates the two rational forms of the sp4 subregular orbit
// (0: the quadratic invariant has square discriminant, 1: non-square).
struct NilpotentClass {
  std::string label;
  int form_class = 0;
};
NilpotentClass classify_reduction(const GroupModel& G, const ReductiveQuotient& Q, const KMat& R);
// Rational G_{y,0}(F_q)-orbit of a nilpotent: the geometric label plus one
// class index per simple factor, read off an explicit invariant in the
// factor's natural block (square class of det(v, Xv) for SL2 factors whose
// torus acts on root spaces by squares only, cube class of det(v, Xv, X^2 v)
// for regular sl3, square classes of <v, X^3 v> and <v, X v> for regular and
// minimal sp4, discriminant class for subregular sp4).
struct RationalClass {
  std::string label;
  std::vector<int> index;
  std::string key() const;
  bool operator==(const RationalClass& o) const { return label == o.label && index == o.index; }
};
RationalClass rational_class(const GroupModel& G, const ReductiveQuotient& Q, const KMat& R);
// |O(F_q)| for the rational orbit
mpz_class rational_orbit_size(const GroupModel& G, const ReductiveQuotient& Q, const RationalClass& c, int q);
// closure order on geometric labels (componentwise by dimension; linear per factor)
bool label_leq(const GroupModel& G, const ReductiveQuotient& Q, const std::string& a, const std::string& b);
// all nilpotent labels of g_{y,0}, largest orbits first
std::vector<std::string> quotient_orbit_labels(const GroupModel& G, const ReductiveQuotient& Q);
// dimension of the orbit named by a label
int quotient_orbit_dim(const GroupModel& G, const ReductiveQuotient& Q, const std::string& label);
// number of Borel subalgebras of g_{y,0}(F_q) containing R (brute force)
mpz_class borel_count(const GroupModel& G, const ReductiveQuotient& Q, const KMat& R);

// ---------------------------------------------------------------- solver route

struct CountOptions {
  int budget = 0;       // 0: raise the window until the count stabilizes
  int max_budget = 12;
  int jobs = 1;
  bool collect_strata = false;
};

struct CountRecord {
  GroupType group = GroupType::A1;
  std::string gamma;
  int q = 0;
  int L = 0;  // window: coordinates have exponents >= -L
  FiberSpec fiber;
  std::vector<std::pair<std::string, mpz_class>> per_cell;  // one entry per w
  mpz_class total;
  mpz_class previous_total;  // total at budget L-1
  bool overflow = false;     // a forced coordinate fell below the window
  bool stabilized = false;
  // stratum label -> counts by rational form class
  std::map<std::string, std::array<mpz_class, 2>> strata;
};

// Visit every point of the domain at window L; the callback receives the
// minimal coset representative w and the reduction of Ad(g^{-1}) gamma in g_{y,0}.
using PointVisitor = std::function<void(int w, const KMat& reduced)>;

// counts at a fixed window; gamma must be diagonal, regular and integral
CountRecord count_at_budget(const GroupModel& G, const LMatrix& gamma_diag, const Fq& F, const FiberSpec& fiber, int L,
                            const CountOptions& opt, const PointVisitor* visit = nullptr);
// full pipeline: diagonalize, check, count with stabilization
CountRecord count_asf(const GroupModel& G, const LMatrix& gamma, const Fq& F, const FiberSpec& fiber,
                      const CountOptions& opt = {});
std::string count_csv_header();
std::string count_csv_row(const CountRecord& r);

// dimension predicted for split centralizers: v(D(gamma)) / 2
mpq_class bezrukavnikov_dim(const GroupModel& G, const LMatrix& gamma);

// ---------------------------------------------------------------- cell route

std::vector<AffineWeylElt> enumerate_cells(const RootSystem& rs, int L);
// x_{i_1}(c_1) n_{i_1} ... x_{i_l}(c_l) n_{i_l} along the reduced word of w
LMatrix cell_point(const GroupModel& G, const Fq& F, const AffineWeylElt& w, const std::vector<Elt>& c);
// lambda (ambient coordinates) with g in U(F) t^lambda n_v I
IVec translation_part(const GroupModel& G, const LMatrix& g);
bool in_lambda_domain(const GroupModel& G, const LMatrix& g, const IVec& lambda0);
// canonical key of the coset gI (Hermite keys of the image of the standard lattice chain)
std::string iwahori_coset_key(const GroupModel& G, const LMatrix& g);

struct BruteCount {
  mpz_class total;
  std::vector<mpz_class> per_length;
  bool boundary_hit = false;  // some point of maximal length was counted
};
// I-cosets gI with length <= L, translation part lambda0, Ad(g^{-1}) gamma in
// g_{y,>=r}; accept (if given) filters on X = Ad(g^{-1}) gamma
using PointFilter = std::function<bool(const LMatrix& X)>;
BruteCount brute_force_count(const GroupModel& G, const LMatrix& gamma, const Fq& F, const QVec& y, int L,
                             const IVec& lambda0, const mpq_class& r = 0, const PointFilter* accept = nullptr);

// ---------------------------------------------------------------- growth fit

struct FitResult {
  mpq_class d;      // nearest half-integer to the log-log slope
  double slope = 0;
  double C = 0;     // leading coefficient with d fixed
  double c = 0;     // coefficient of the q^{-1/2} correction
  std::vector<int> qs;
  std::vector<double> normalized;  // count / q^d
  std::vector<double> residuals;   // count / q^d - C
  double max_model_error = 0;      // max |count/q^d - C - c q^{-1/2}| * q^{1/2}
};
// throws PoorFit when fewer than three points, a zero count, or the two-term
// model leaves an error above tolerance * q^{-1/2}
FitResult fit_growth(const std::vector<std::pair<int, mpz_class>>& counts, double tolerance = 0.5);

}  // namespace asf
