#pragma once
// Nilpotent orbital integrals by Ranga Rao's method. The integral over
// Ad(G)e splits over the double cosets W_y \ W / W_P; after conjugating the
// representative into (e, lambda) each piece is the integral of f against
// mu_odd * mu_even over the weight >= 2 space of lambda, in which Ad(P)e is
// open with null complement.
//
// Orbits are taken under the adjoint group, so an integral sums the rational
// classes of e that meet the weight >= 2 space (the stable integral).

#include <string>
#include <utility>
#include <vector>

#include "exactnum.hpp"
#include "liemodel.hpp"
#include "orbint.hpp"
#include "rootdata.hpp"

namespace asf {

struct NilpotentDatum {
  std::string label;
  KMat e;                    // constant coefficients
  std::vector<int> support;  // roots carrying e
  IVec lambda;               // Ad(lambda(z)) e = z^2 e
  int orbit_dim = 0;
  int weight(const RootSystem& rs, int a) const;
};

// orbit labels in decreasing dimension
std::vector<std::string> nilpotent_labels(GroupType t);
// sums of simple-type root vectors: reg, subreg, min, 0
KMat standard_nilpotent(const GroupModel& G, const std::string& label, const Fq& F);
// e must be a combination of root vectors on linearly independent roots
NilpotentDatum jm_cocharacter(const GroupModel& G, const KMat& e);
NilpotentDatum nilpotent_datum(const GroupModel& G, const std::string& label, const Fq& F);
// (Ad(n_w) e, w lambda)
NilpotentDatum conjugate_datum(const GroupModel& G, const NilpotentDatum& d, int w);

// sum of t^{exps_i} O E_{roots_i} over the weight >= 2 roots
struct WeightedLattice {
  IVec lambda;
  QVec y;
  std::vector<int> roots;
  std::vector<int> exps;
};
// ^lambda_{>=2} g_{y,>=r} (or > r when strict)
WeightedLattice weighted_lattice(const RootSystem& rs, const IVec& lambda, const QVec& y, const mpq_class& r, bool strict);

// mu_even(^lambda_{>=2} g_{y,>0}) = |G_{y,0}| / (|^lambda_{<0} g_{y,0}| |^lambda_{>=0} G_{y,0}|)
QValue mu_even_base(const GroupModel& G, const IVec& lambda, const QVec& y, int q);
QValue mu_even(const GroupModel& G, const WeightedLattice& region, int q);
// [ad(X)(^lambda_{-1} g_{y,>=0}) : ^lambda_1 g_{y,>0}]^{1/2} for X in ^lambda_2 g; 0 off the open orbit
QValue mu_odd(const GroupModel& G, const IVec& lambda, const QVec& y, const LMatrix& X);

struct NilpotentPart {
  int w = 0;  // double coset representative (W index)
  QValue value;
};
struct NilpotentIntegral {
  QValue total;
  std::vector<NilpotentPart> parts;
};

// f is averaged over G_{y,>=0} first, y being the point of f
NilpotentIntegral nilpotent_orbital_integral(const GroupModel& G, const NilpotentDatum& d, const TestFunction& f,
                                             const Fq& F);
// |W / W_P|
int parabolic_index(const GroupModel& G, const NilpotentDatum& d);
// (I_e(f_{t^{-1}}), q^{dim/2} I_e(f))
std::pair<QValue, QValue> nilpotent_dilate(const GroupModel& G, const NilpotentDatum& d, const TestFunction& f,
                                           const Fq& F);

// mu_odd(e) mu_even(ad(^lambda_{>=0} K) e) against
// [G_{y,>=0} : K ^lambda_{>=0}G_{y,>=0}] m_e(image of K in g/z(e)),
// K = g_{y,>=level}, or g_{y,>0} for level 0
struct AnchorSides {
  QValue lhs, rhs;
};
AnchorSides anchor_identity(const GroupModel& G, const NilpotentDatum& d, const QVec& y, const mpq_class& level,
                            const Fq& F);

std::string nilpotent_csv_header();
std::vector<std::string> nilpotent_csv_rows(const GroupModel& G, const NilpotentDatum& d, const TestFunction& f, int q,
                                            const NilpotentIntegral& v);

}  // namespace asf
