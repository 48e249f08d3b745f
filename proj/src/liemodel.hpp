#pragma once
// Matrix realizations of sl_2, sl_3 and sp_4 over F_q((t)) and over F_q:
// Chevalley coordinates, the trace form, adjoint action, Weyl and affine
// Weyl lifts, discriminant, depth and topological nilpotence.

#include <string>
#include <vector>

#include "exactnum.hpp"
#include "rootdata.hpp"

namespace asf {

// Dense matrix over F_q (residue-field computations).
struct KMat {
  const Fq* F = nullptr;
  int n = 0;
  std::vector<Elt> a;
  KMat() = default;
  KMat(const Fq& f, int size) : F(&f), n(size), a(size * size, 0) {}
  static KMat identity(const Fq& f, int size);
  Elt at(int i, int j) const { return a[i * n + j]; }
  Elt& at(int i, int j) { return a[i * n + j]; }
  KMat operator*(const KMat& o) const;
  KMat operator+(const KMat& o) const;
  KMat operator-(const KMat& o) const;
  KMat scaled(Elt c) const;
  bool operator==(const KMat& o) const { return a == o.a; }
  bool operator<(const KMat& o) const { return a < o.a; }
  bool is_zero() const;
  std::string key() const { return std::string(a.begin(), a.end()); }
};

// rank of a rectangular matrix over F_q given as rows
int rank_k(const Fq& F, std::vector<std::vector<Elt>> rows);

class GroupModel {
 public:
  static const GroupModel& get(GroupType t);
  const RootSystem& rs;
  int n = 0;    // matrix size
  int dim = 0;  // rank + |Phi|; Chevalley basis: H_1..H_r then E_alpha by root index
  std::vector<std::vector<int>> root_vec;   // n*n integer matrices
  std::vector<std::vector<int>> cartan_vec;  // H_i as n*n integer matrices
  std::vector<std::pair<int, int>> entry;   // designated entry of each root vector
  // owner root and sign of each off-diagonal position (i, j)
  std::vector<int> owner;
  std::vector<int> owner_sign;
  // trace form tr(XY) on the Chevalley basis
  std::vector<std::vector<long>> gram;

  bool in_algebra(const LMatrix& X) const;
  bool in_algebra(const KMat& X) const;
  // Chevalley coordinates (Cartan coordinates first)
  std::vector<Laurent> coords(const LMatrix& X) const;
  LMatrix from_coords(const Fq& F, const std::vector<Laurent>& c) const;
  std::vector<Elt> coords(const KMat& X) const;
  KMat from_coords(const Fq& F, const std::vector<Elt>& c) const;
  LMatrix basis_element(const Fq& F, int b) const;
  KMat basis_element_k(const Fq& F, int b) const;
  LMatrix root_element(const Fq& F, int a, const Laurent& c) const;
  // Cartan element with ambient coordinates (diag for sl_n, (a,b,-b,-a) for sp4)
  LMatrix cartan_element(const Fq& F, const std::vector<Laurent>& ambient) const;
  std::vector<Laurent> cartan_ambient(const LMatrix& X) const;
  // alpha(X) for a Cartan element X
  Laurent root_value(const LMatrix& X, int a) const;

  // group elements
  LMatrix root_subgroup(const Fq& F, int a, const Laurent& c) const;  // 1 + c E_a
  KMat root_subgroup_k(const Fq& F, int a, Elt c) const;
  LMatrix weyl_lift(const Fq& F, int w) const;   // product of simple n_alpha along the reduced word
  KMat weyl_lift_k(const Fq& F, int w) const;
  LMatrix affine_simple_lift(const Fq& F, int i) const;  // i = 0 is the affine reflection
  LMatrix torus_element(const Fq& F, const IVec& cocharacter) const;  // t^lambda
  // upper unitriangular element with designated coordinates c (positive roots by index)
  LMatrix unipotent(const Fq& F, const std::vector<Laurent>& c) const;
  // entry (i, k) of unipotent(c), for i < k
  Laurent unipotent_entry(const Fq& F, const std::vector<Laurent>& c, int i, int k) const;
  bool in_group(const LMatrix& g) const;

  // ad(X) on the Chevalley basis
  LMatrix ad(const LMatrix& X) const;
  KMat adk(const KMat& X) const;  // dim x dim over F_q (stored in a KMat of size dim)
  Laurent form(const LMatrix& X, const LMatrix& Y) const;

  // membership in g_{y,>=r} as described by the descriptor
  bool in_mp(const LMatrix& X, const MPLattice& L) const;
  // image in the Lie algebra of the reductive quotient at y, realized inside g(k);
  // X must lie in g_{y,>=0}
  KMat reduce(const LMatrix& X, const QVec& y) const;

  // characteristic guard: p > rank + 1 and p does not divide |W|
  void check_characteristic(int p) const;

 private:
  explicit GroupModel(GroupType t);
};

LMatrix conjugate(const LMatrix& g, const LMatrix& X);  // g X g^{-1}
LMatrix conjugate_inv(const LMatrix& g, const LMatrix& X);  // g^{-1} X g
KMat bracket(const KMat& X, const KMat& Y);
LMatrix bracket(const LMatrix& X, const LMatrix& Y);
KMat residue(const LMatrix& X);  // reduction mod t of an integral matrix

// v(D(gamma)) = sum over roots of v(alpha(gamma)); gamma is brought to diagonal
// form first when it is split semisimple but not diagonal
int discriminant_valuation(const GroupModel& G, const LMatrix& gamma);
// roots of a monic polynomial (coefficients low to high) that are Laurent
// polynomials of bounded length, with multiplicity
std::vector<Laurent> split_roots(std::vector<Laurent> f, int max_depth);
// diagonal form of a split regular semisimple element (sorted eigenvalues
// matched to the model); throws UnsupportedCentralizer if not split
LMatrix split_cartan_form(const GroupModel& G, const LMatrix& gamma);
// valuation of the discriminant read off the characteristic polynomial of ad(gamma)
int discriminant_valuation_charpoly(const GroupModel& G, const LMatrix& gamma);

struct Depth {
  bool infinite = false;
  mpq_class value;
};
Depth depth(const GroupModel& G, const LMatrix& gamma);
bool is_topologically_nilpotent(const GroupModel& G, const LMatrix& gamma);
bool ad_powers_converge(const GroupModel& G, const LMatrix& gamma);
bool is_nilpotent(const LMatrix& X);
bool is_nilpotent(const KMat& X);

// element grammar: [[e11,e12],[e21,e22]] with entries integer Laurent polynomials in t
LMatrix parse_element(const std::string& expr, const Fq& F);
LMatrix parse_lie_element(const GroupModel& G, const std::string& expr, const Fq& F);

}  // namespace asf
