#pragma once
// Root data for split types A1, A2, C2: roots and coroots in ambient
// coordinates, finite and affine Weyl groups, the apartment, Moy-Prasad
// descriptors and reductive quotients at rational points.
//
// Coweights live in Q^n (trace-zero vectors for type A); the pairing of a
// root with a coweight is the dot product.

#include <gmpxx.h>
#include <string>
#include <vector>

namespace asf {

using IVec = std::vector<int>;
using QVec = std::vector<mpq_class>;

long floor_q(const mpq_class& x);
long ceil_q(const mpq_class& x);
bool is_integer(const mpq_class& x);

struct IMat {
  int n = 0;
  std::vector<int> a;  // row major
  static IMat identity(int n);
  int at(int i, int j) const { return a[i * n + j]; }
  int& at(int i, int j) { return a[i * n + j]; }
  IMat operator*(const IMat& o) const;
  IVec apply(const IVec& v) const;
  QVec apply(const QVec& v) const;
  IMat transpose() const;
  bool operator==(const IMat& o) const { return n == o.n && a == o.a; }
  bool operator<(const IMat& o) const { return a < o.a; }
};

enum class GroupType { A1, A2, C2 };

GroupType parse_group(const std::string& name);  // "sl2", "sl3", "sp4" or "A1", ...
std::string group_name(GroupType t);              // "sl2", "sl3", "sp4"

struct WeylElt {
  IMat m;
  std::vector<int> word;  // simple reflection indices 1..rank
  int length = 0;
};

class RootSystem {
 public:
  static const RootSystem& get(GroupType t);

  GroupType type;
  std::string label;  // "A1", "A2", "C2"
  int ambient = 0;    // coordinate count
  int rank = 0;
  int coxeter = 0;
  std::vector<IVec> roots;
  std::vector<IVec> coroots;
  std::vector<bool> positive;
  std::vector<int> simple;  // simple root indices, in order alpha_1..alpha_r
  int theta = -1;           // highest root index
  std::vector<int> theta_coeffs;  // theta = sum c_i alpha_i
  std::vector<WeylElt> weyl;      // index 0 is the identity
  std::vector<std::vector<int>> root_perm;  // root_perm[w][a] = index of w(a)
  QVec rho_check;
  QVec base_point;  // x = rho_check / h, interior of the base alcove

  int num_roots() const { return static_cast<int>(roots.size()); }
  int order_w() const { return static_cast<int>(weyl.size()); }
  int root_index(const IVec& r) const;  // -1 if absent
  int weyl_index(const IMat& m) const;
  int negative_of(int a) const;
  int height(int a) const;
  mpq_class pair(int a, const QVec& y) const;
  int pair_coroot(int a, int b) const;  // <alpha_a, coroot_b>
  IMat reflection(int a) const;
  int weyl_inverse(int w) const;
  int weyl_mul(int w1, int w2) const;
  // positive roots ordered by height then index
  std::vector<int> positive_by_height() const;
  QVec origin() const { return QVec(ambient, 0); }
  // vertices of the base alcove other than the origin
  std::vector<QVec> alcove_vertices() const;
  // "o", "x", "v1", "v2", or explicit "a,b[,c]" rational coordinates
  QVec named_point(const std::string& name) const;
  bool in_closed_alcove(const QVec& y) const;
  int denominator_bound() const { return 2 * coxeter; }

 private:
  explicit RootSystem(GroupType t);
};

std::string point_str(const QVec& y);

// ---------------------------------------------------------------- affine Weyl group

struct AffineWeylElt {
  IMat A;
  IVec b;  // y -> A y + b
  std::vector<int> word;  // simple affine reflections, 0 is the affine one
  int length = 0;
  QVec act(const QVec& y) const;
};

AffineWeylElt simple_affine_reflection(const RootSystem& rs, int i);
AffineWeylElt affine_compose(const AffineWeylElt& u, const AffineWeylElt& v);
// number of affine root hyperplanes separating x and w(x)
int affine_length(const RootSystem& rs, const AffineWeylElt& w);
// all elements of length <= L, in breadth-first order, with reduced words
std::vector<AffineWeylElt> affine_weyl_ball(const RootSystem& rs, int L);
// growth series by plain word enumeration (independent of the ball search)
std::vector<long> affine_growth_by_words(const RootSystem& rs, int L);

// ---------------------------------------------------------------- Moy-Prasad

struct AffineRoot {
  int root;
  int offset;  // alpha = root + offset
  bool operator==(const AffineRoot& o) const { return root == o.root && offset == o.offset; }
};

std::vector<AffineRoot> vanishing_affine_roots(const RootSystem& rs, const QVec& y);

// g_{y,>=r} (or g_{y,>r} when strict): the root space of alpha contributes
// t^{k_alpha} O with k_alpha the least integer n with <alpha,y> + n >= r
// (> r when strict); the Cartan contributes t^{toral} O.
struct MPLattice {
  QVec y;
  mpq_class r;
  bool strict = false;
  std::vector<int> root_exp;
  int toral_exp = 0;
};

MPLattice mp_lattice(const RootSystem& rs, const QVec& y, const mpq_class& r, bool strict);
// dimension of the graded piece g_{y,r} = g_{y,>=r} / g_{y,>r}
int mp_graded_dim(const RootSystem& rs, const QVec& y, const mpq_class& r);

// ---------------------------------------------------------------- reductive quotient

struct ReductiveQuotient {
  QVec y;
  std::vector<int> roots;     // Phi_y
  std::vector<int> positive;  // positive system {alpha in Phi_y : <alpha, x - y> > 0}
  std::vector<int> weyl;      // W_y as indices into W
  std::vector<int> weyl_length;  // length of each W_y element for the positive system
  std::vector<std::vector<int>> factors;  // simple components of Phi_y (root indices)
  std::vector<long> order_poly;  // |G_{y,0}(F_q)| as polynomial in q, low to high
  int rank = 0;
  int dim() const { return rank + static_cast<int>(roots.size()); }
  mpz_class order(long q) const;
  bool contains_root(int a) const;
};

ReductiveQuotient reductive_quotient(const RootSystem& rs, const QVec& y);

// subgroup of W generated by the reflections in the given roots
std::vector<int> reflection_subgroup(const RootSystem& rs, const std::vector<int>& roots);
// minimal-length representatives of Wa \ W / Wb (W indices)
std::vector<int> double_cosets(const RootSystem& rs, const std::vector<int>& Wa, const std::vector<int>& Wb);

}  // namespace asf
