#pragma once
// Exact arithmetic substrate: finite fields, truncated Laurent series over
// them, matrices of such series, O-lattices and exact values in Q(q^{1/2}).

#include <array>
#include <cstdint>
#include <gmpxx.h>
#include <stdexcept>
#include <string>
#include <vector>

namespace asf {

enum class Errc {
  InsufficientPrecision,
  RankDeficient,
  DegenerateForm,
  NotRegularSemisimple,
  UnsupportedCentralizer,
  NotStabilized,
  PoorFit,
  UnsupportedGroup,
  ParseError,
  NotInLieAlgebra,
  BadCharacteristic,
  NotNilpotent,
  NonStandardForm,
  RegionNotMeasurable,
  NotInvariant,
  TruncationUnstable,
  SingularSystem,
  DepthTooSmall,
  UnsupportedWeylGroup,
  UnsupportedComponentGroup,
  InvalidArgument,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

// ---------------------------------------------------------------- F_q

using Elt = std::uint16_t;

struct FieldSpec {
  int p = 0;
  int m = 1;
  std::vector<int> modulus;  // monic, coefficients low to high, size m+1
};

// Elements are integers 0..q-1 read as base-p digit vectors (polynomials in
// the class of x modulo the fixed modulus). Tables make every op a lookup.
class Fq {
 public:
  static const Fq& get(int p, int m);
  static const Fq& of_order(int q);

  int p() const { return spec_.p; }
  int m() const { return spec_.m; }
  int q() const { return q_; }
  const FieldSpec& spec() const { return spec_; }
  bool prime() const { return spec_.m == 1; }

  Elt add(Elt a, Elt b) const { return add_[a * q_ + b]; }
  Elt sub(Elt a, Elt b) const { return add_[a * q_ + neg_[b]]; }
  Elt mul(Elt a, Elt b) const { return mul_[a * q_ + b]; }
  Elt neg(Elt a) const { return neg_[a]; }
  Elt inv(Elt a) const;
  Elt from_int(long v) const;
  Elt primitive() const { return primitive_; }
  bool is_square(Elt a) const { return square_[a] != 0; }
  // F_p-basis 1, x, ..., x^{m-1}
  std::vector<Elt> prime_basis() const;
  std::string str(Elt a) const;

 private:
  Fq(int p, int m);
  FieldSpec spec_;
  int q_ = 0;
  std::vector<Elt> add_, mul_, neg_, inv_;
  std::vector<char> square_;
  Elt primitive_ = 1;
};

bool is_prime(long n);
// Fixed irreducible (Conway) polynomial for F_{p^m}; m == 1 gives x.
std::vector<int> conway_modulus(int p, int m);
bool is_irreducible(int p, const std::vector<int>& poly);

// ---------------------------------------------------------------- Laurent

constexpr int kExact = 1 << 28;  // precision marker for exactly known series
constexpr int kInfVal = 1 << 29;  // valuation of the exact zero
constexpr int kCap = 64;          // stored coefficient span

// Element of F_q((t)) known modulo t^prec. Stored coefficients occupy
// exponents lo..lo+n-1 with c[0] != 0 and c[n-1] != 0; every exponent below
// lo and every exponent in [lo+n, prec) is zero. Exponents >= prec are unknown.
class Laurent {
 public:
  Laurent() = default;
  explicit Laurent(const Fq& F) : F_(&F) {}
  static Laurent constant(const Fq& F, Elt c);
  static Laurent monomial(const Fq& F, Elt c, int e);
  static Laurent from_int(const Fq& F, long v) { return constant(F, F.from_int(v)); }
  static Laurent zero_mod(const Fq& F, int prec);

  const Fq& field() const { return *F_; }
  bool has_field() const { return F_ != nullptr; }
  int lo() const { return lo_; }
  int size() const { return n_; }
  int prec() const { return prec_; }
  bool exact() const { return prec_ >= kExact; }
  bool is_exact_zero() const { return n_ == 0 && exact(); }
  // zero as far as known (no nonzero stored coefficient)
  bool looks_zero() const { return n_ == 0; }
  Elt coeff(int e) const;
  // lowest exponent that could be nonzero: lo if nonzero, else prec
  int vlb() const { return n_ > 0 ? lo_ : prec_; }
  // exact valuation; throws InsufficientPrecision if all known coefficients vanish
  int valuation() const;
  // x in t^k O ?  throws when undecidable inside the window
  bool in_tk(int k) const;
  Elt leading() const { return n_ > 0 ? c_[0] : 0; }

  Laurent truncated(int prec) const;
  Laurent shifted(int k) const;  // times t^k
  Laurent scaled(Elt a) const;
  // part with exponents < k (exact polynomial unless prec < k)
  Laurent below(int k) const;
  // part with exponents >= k
  Laurent from(int k) const;
  // 1/x known modulo t^prec (absolute)
  Laurent inverse(int prec) const;

  Laurent operator+(const Laurent& o) const;
  Laurent operator-(const Laurent& o) const;
  Laurent operator-() const;
  Laurent operator*(const Laurent& o) const;
  Laurent& operator+=(const Laurent& o) { return *this = *this + o; }
  Laurent& operator-=(const Laurent& o) { return *this = *this - o; }
  Laurent& operator*=(const Laurent& o) { return *this = *this * o; }
  bool operator==(const Laurent& o) const;
  bool operator!=(const Laurent& o) const { return !(*this == o); }
  // equality of known coefficients below min(prec, o.prec)
  bool agrees_with(const Laurent& o) const;

  void set_coeff(int e, Elt v);
  std::string str() const;
  // canonical token for hashing: coefficients below k (requires prec >= k)
  void append_key(std::string& out, int k) const;

 private:
  void normalize();
  const Fq* F_ = nullptr;
  int lo_ = 0;
  int n_ = 0;
  int prec_ = kExact;
  std::array<Elt, kCap> c_{};
};

// ---------------------------------------------------------------- matrices

class LMatrix {
 public:
  LMatrix() = default;
  LMatrix(const Fq& F, int rows, int cols);
  static LMatrix identity(const Fq& F, int n);
  static LMatrix from_ints(const Fq& F, const std::vector<std::vector<long>>& rows);

  int rows() const { return r_; }
  int cols() const { return c_; }
  const Fq& field() const { return *F_; }
  Laurent& at(int i, int j) { return a_[i * c_ + j]; }
  const Laurent& at(int i, int j) const { return a_[i * c_ + j]; }

  LMatrix operator*(const LMatrix& o) const;
  LMatrix operator+(const LMatrix& o) const;
  LMatrix operator-(const LMatrix& o) const;
  LMatrix scaled(const Laurent& s) const;
  LMatrix shifted(int k) const;
  LMatrix transpose() const;
  LMatrix truncated(int prec) const;
  bool operator==(const LMatrix& o) const;
  bool operator!=(const LMatrix& o) const { return !(*this == o); }
  // min valuation over entries (kInfVal for the zero matrix)
  int min_valuation() const;
  bool is_exact_zero() const;
  std::string str() const;

  // determinant by cofactor expansion; exact on exact input, small sizes only
  Laurent det() const;
  // classical adjugate, exact on exact input
  LMatrix adjugate() const;
  // inverse when the determinant is an exact monomial c*t^k (group elements)
  LMatrix inverse_monomial_det() const;
  // coefficients of det(x*I - M), low to high (Berkowitz, division free)
  std::vector<Laurent> charpoly() const;

 private:
  const Fq* F_ = nullptr;
  int r_ = 0, c_ = 0;
  std::vector<Laurent> a_;
};

// ---------------------------------------------------------------- Q(q^{1/2})

// Exact value a + b*sqrt(q) with rational a, b. When q is a perfect square
// the irrational part is folded into a, so the representation is canonical.
class QValue {
 public:
  QValue() = default;
  QValue(int q, mpq_class a, mpq_class b = 0);
  static QValue integer(int q, long v) { return QValue(q, mpq_class(v)); }
  // q^{half/2}
  static QValue qpow_half(int q, int half);
  static QValue qpow(int q, int e) { return qpow_half(q, 2 * e); }

  int q() const { return q_; }
  const mpq_class& rational_part() const { return a_; }
  const mpq_class& sqrt_part() const { return b_; }
  bool is_rational() const { return b_ == 0; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }
  double to_double() const;
  std::string str() const;

  QValue operator+(const QValue& o) const;
  QValue operator-(const QValue& o) const;
  QValue operator-() const;
  QValue operator*(const QValue& o) const;
  QValue operator/(const QValue& o) const;
  QValue& operator+=(const QValue& o) { return *this = *this + o; }
  QValue& operator*=(const QValue& o) { return *this = *this * o; }
  bool operator==(const QValue& o) const;
  bool operator!=(const QValue& o) const { return !(*this == o); }
  bool operator<(const QValue& o) const;
  bool operator<=(const QValue& o) const { return *this < o || *this == o; }

 private:
  void fold();
  int q_ = 0;
  mpq_class a_ = 0, b_ = 0;
};

// evaluate an integer polynomial (coefficients low to high) at q
mpz_class eval_poly(const std::vector<long>& coeffs, long q);

// ---------------------------------------------------------------- lattices

using LVector = std::vector<Laurent>;

// Full-rank O-lattice in F^n, stored by its canonical (Hermite) basis:
// upper triangular, diagonal exactly t^{d_i}, entry (i,j) for i<j reduced
// to exponents < d_i.
class OLattice {
 public:
  OLattice() = default;
  // lattice spanned by the given generators (any number >= n)
  static OLattice span(const Fq& F, int n, const std::vector<LVector>& gens);
  // diagonal lattice with basis t^{e_i} e_i
  static OLattice diagonal(const Fq& F, const std::vector<int>& exps);

  int dim() const { return n_; }
  const std::vector<int>& diag_exponents() const { return d_; }
  long det_valuation() const;
  const LMatrix& basis() const { return B_; }
  bool contains(const LVector& v) const;
  bool operator==(const OLattice& o) const;
  std::string key() const;

 private:
  int n_ = 0;
  std::vector<int> d_;
  LMatrix B_;
};

// Hermite basis of the span; the working precision is doubled until every
// step is certified. Throws RankDeficient when the span is not full rank.
LMatrix hermite_basis(const Fq& F, int n, std::vector<LVector> gens, int* det_val = nullptr);

// [A:B] := [Lambda:B]/[Lambda:A] = q^{v(det B) - v(det A)}; returns the exponent
long lattice_index_exponent(const OLattice& A, const OLattice& B);
QValue lattice_index(const OLattice& A, const OLattice& B);

// {Y : form(X, Y) in t^shift O for all X in L}, form given by its Gram matrix
// on the ambient basis (form(X,Y) = X^T G Y).
OLattice dual_lattice(const OLattice& L, const LMatrix& gram, int shift = 1);

// valuations of the nonzero elementary divisors of a matrix over O of known
// rank (Smith form by minimal-valuation pivoting at doubling precision)
std::vector<int> elementary_divisor_valuations(const LMatrix& M, int rank);

}  // namespace asf
