#include "exactnum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace asf {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::InsufficientPrecision: return "InsufficientPrecision";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::DegenerateForm: return "DegenerateForm";
    case Errc::NotRegularSemisimple: return "NotRegularSemisimple";
    case Errc::UnsupportedCentralizer: return "UnsupportedCentralizer";
    case Errc::NotStabilized: return "NotStabilized";
    case Errc::PoorFit: return "PoorFit";
    case Errc::UnsupportedGroup: return "UnsupportedGroup";
    case Errc::ParseError: return "ParseError";
    case Errc::NotInLieAlgebra: return "NotInLieAlgebra";
    case Errc::BadCharacteristic: return "BadCharacteristic";
    case Errc::NotNilpotent: return "NotNilpotent";
    case Errc::NonStandardForm: return "NonStandardForm";
    case Errc::RegionNotMeasurable: return "RegionNotMeasurable";
    case Errc::NotInvariant: return "NotInvariant";
    case Errc::TruncationUnstable: return "TruncationUnstable";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::DepthTooSmall: return "DepthTooSmall";
    case Errc::UnsupportedWeylGroup: return "UnsupportedWeylGroup";
    case Errc::UnsupportedComponentGroup: return "UnsupportedComponentGroup";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

void fail(Errc code, const std::string& what) {
  throw Error(code, std::string(errc_name(code)) + ": " + what);
}

// ---------------------------------------------------------------- F_q

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

namespace {

using Poly = std::vector<int>;  // coefficients mod p, low to high

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mod(Poly a, const Poly& m, int p) {
  trim(a);
  int dm = static_cast<int>(m.size()) - 1;
  long lead_inv = 1;
  for (long k = 1; k < p; ++k)
    if ((k * m.back()) % p == 1) lead_inv = k;
  while (static_cast<int>(a.size()) - 1 >= dm) {
    int shift = static_cast<int>(a.size()) - 1 - dm;
    long c = (a.back() * lead_inv) % p;
    for (int i = 0; i <= dm; ++i) a[shift + i] = static_cast<int>(((a[shift + i] - c * m[i]) % p + p) % p);
    trim(a);
  }
  return a;
}

}  // namespace

bool is_irreducible(int p, const std::vector<int>& poly) {
  Poly f = poly;
  trim(f);
  int d = static_cast<int>(f.size()) - 1;
  if (d <= 0) return false;
  if (d == 1) return true;
  // trial division by every monic polynomial of degree <= d/2
  for (int k = 1; k <= d / 2; ++k) {
    long count = 1;
    for (int i = 0; i < k; ++i) count *= p;
    for (long idx = 0; idx < count; ++idx) {
      Poly g(k + 1);
      long v = idx;
      for (int i = 0; i < k; ++i) {
        g[i] = static_cast<int>(v % p);
        v /= p;
      }
      g[k] = 1;
      if (poly_mod(f, g, p).empty()) return false;
    }
  }
  return true;
}

std::vector<int> conway_modulus(int p, int m) {
  if (m == 1) return {0, 1};
  static const std::map<std::pair<int, int>, std::vector<int>> table = {
      {{2, 2}, {1, 1, 1}},    {{3, 2}, {2, 2, 1}},       {{5, 2}, {2, 4, 1}},
      {{7, 2}, {3, 6, 1}},    {{11, 2}, {2, 7, 1}},      {{13, 2}, {2, 12, 1}},
      {{2, 3}, {1, 1, 0, 1}}, {{3, 3}, {1, 2, 0, 1}},    {{2, 4}, {1, 1, 0, 0, 1}},
  };
  auto it = table.find({p, m});
  if (it == table.end())
    fail(Errc::InvalidArgument, "no fixed modulus for F_" + std::to_string(p) + "^" + std::to_string(m));
  return it->second;
}

Fq::Fq(int p, int m) {
  if (!is_prime(p)) fail(Errc::InvalidArgument, "characteristic " + std::to_string(p) + " is not prime");
  spec_.p = p;
  spec_.m = m;
  spec_.modulus = conway_modulus(p, m);
  if (!is_irreducible(p, spec_.modulus)) fail(Errc::InvalidArgument, "field modulus is reducible");
  q_ = 1;
  for (int i = 0; i < m; ++i) q_ *= p;
  if (q_ > 256) fail(Errc::InvalidArgument, "field order above 256 is not supported");

  auto digits = [&](int a) {
    Poly d(m);
    for (int i = 0; i < m; ++i) {
      d[i] = a % p;
      a /= p;
    }
    return d;
  };
  auto pack = [&](const Poly& d) {
    int a = 0;
    for (int i = static_cast<int>(d.size()) - 1; i >= 0; --i) a = a * p + d[i];
    return static_cast<Elt>(a);
  };
  add_.resize(q_ * q_);
  mul_.resize(q_ * q_);
  neg_.resize(q_);
  inv_.assign(q_, 0);
  square_.assign(q_, 0);
  for (int a = 0; a < q_; ++a) {
    Poly da = digits(a);
    Poly n(m);
    for (int i = 0; i < m; ++i) n[i] = (p - da[i]) % p;
    neg_[a] = pack(n);
    for (int b = 0; b < q_; ++b) {
      Poly db = digits(b);
      Poly s(m);
      for (int i = 0; i < m; ++i) s[i] = (da[i] + db[i]) % p;
      add_[a * q_ + b] = pack(s);
      Poly pr(2 * m, 0);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) pr[i + j] = (pr[i + j] + da[i] * db[j]) % p;
      Poly r = poly_mod(pr, spec_.modulus, p);
      r.resize(m, 0);
      mul_[a * q_ + b] = pack(r);
    }
  }
  for (int a = 1; a < q_; ++a)
    for (int b = 1; b < q_; ++b)
      if (mul_[a * q_ + b] == 1) inv_[a] = static_cast<Elt>(b);
  for (int a = 0; a < q_; ++a) square_[mul_[a * q_ + a]] = 1;
  // smallest element of multiplicative order q-1
  for (int g = 1; g < q_; ++g) {
    int order = 1;
    Elt x = static_cast<Elt>(g);
    while (x != 1) {
      x = mul_[x * q_ + g];
      ++order;
    }
    if (order == q_ - 1) {
      primitive_ = static_cast<Elt>(g);
      break;
    }
  }
}

const Fq& Fq::get(int p, int m) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<Fq>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{p, m}];
  if (!slot) slot.reset(new Fq(p, m));
  return *slot;
}

const Fq& Fq::of_order(int q) {
  if (q < 2) fail(Errc::InvalidArgument, "field order must be at least 2");
  int p = 2;
  while (q % p != 0) ++p;
  int m = 0, r = q;
  while (r % p == 0) {
    r /= p;
    ++m;
  }
  if (r != 1) fail(Errc::InvalidArgument, std::to_string(q) + " is not a prime power");
  return get(p, m);
}

Elt Fq::inv(Elt a) const {
  if (a == 0) fail(Errc::InvalidArgument, "inverse of zero in F_q");
  return inv_[a];
}

Elt Fq::from_int(long v) const {
  long r = ((v % spec_.p) + spec_.p) % spec_.p;
  return static_cast<Elt>(r);  // prime-field elements are the digits 0..p-1
}

std::vector<Elt> Fq::prime_basis() const {
  std::vector<Elt> out;
  int b = 1;
  for (int i = 0; i < spec_.m; ++i) {
    out.push_back(static_cast<Elt>(b));
    b *= spec_.p;
  }
  return out;
}

std::string Fq::str(Elt a) const {
  if (spec_.m == 1) return std::to_string(a);
  std::string s;
  int v = a;
  for (int i = 0; i < spec_.m; ++i) {
    int d = v % spec_.p;
    v /= spec_.p;
    if (d == 0) continue;
    if (!s.empty()) s += "+";
    if (i == 0)
      s += std::to_string(d);
    else
      s += (d == 1 ? "" : std::to_string(d)) + "a" + (i > 1 ? "^" + std::to_string(i) : "");
  }
  return s.empty() ? "0" : s;
}

// ---------------------------------------------------------------- Laurent

namespace {

long clamp_prec(long p) { return p >= kExact ? kExact : p; }

// Precision of a product term: a known mod t^{pa}, b known mod t^{pb}.
long product_prec(const Laurent& a, const Laurent& b) {
  if (a.is_exact_zero() || b.is_exact_zero()) return kExact;
  long pa = a.exact() ? kExact : static_cast<long>(a.prec()) + b.vlb();
  long pb = b.exact() ? kExact : static_cast<long>(b.prec()) + a.vlb();
  return clamp_prec(std::min(pa, pb));
}

}  // namespace

Laurent Laurent::constant(const Fq& F, Elt c) { return monomial(F, c, 0); }

Laurent Laurent::monomial(const Fq& F, Elt c, int e) {
  Laurent r(F);
  if (c != 0) {
    r.lo_ = e;
    r.n_ = 1;
    r.c_[0] = c;
  }
  return r;
}

Laurent Laurent::zero_mod(const Fq& F, int prec) {
  Laurent r(F);
  r.prec_ = std::min(prec, kExact);
  return r;
}

void Laurent::normalize() {
  if (!exact() && n_ > 0 && lo_ + n_ > prec_) n_ = std::max(0, prec_ - lo_);
  int first = 0;
  while (first < n_ && c_[first] == 0) ++first;
  if (first == n_) {
    n_ = 0;
    lo_ = 0;
    return;
  }
  if (first > 0) {
    for (int i = first; i < n_; ++i) c_[i - first] = c_[i];
    n_ -= first;
    lo_ += first;
  }
  while (n_ > 0 && c_[n_ - 1] == 0) --n_;
  for (int i = n_; i < kCap; ++i) c_[i] = 0;
}

Elt Laurent::coeff(int e) const {
  if (e >= prec_) fail(Errc::InsufficientPrecision, "coefficient of t^" + std::to_string(e) + " is outside the known window");
  if (n_ == 0 || e < lo_ || e >= lo_ + n_) return 0;
  return c_[e - lo_];
}

void Laurent::set_coeff(int e, Elt v) {
  if (e >= prec_) return;
  if (n_ == 0) {
    if (v == 0) return;
    lo_ = e;
    n_ = 1;
    c_[0] = v;
    return;
  }
  int lo = std::min(lo_, e);
  int hi = std::max(lo_ + n_, e + 1);
  if (hi - lo > kCap) {
    // keep the low end; the known window shrinks
    hi = lo + kCap;
    prec_ = std::min(prec_, hi);
    if (e >= hi) {
      normalize();
      return;
    }
  }
  std::array<Elt, kCap> buf{};
  for (int i = 0; i < n_; ++i)
    if (lo_ + i < hi) buf[lo_ + i - lo] = c_[i];
  buf[e - lo] = v;
  c_ = buf;
  lo_ = lo;
  n_ = hi - lo;
  normalize();
}

int Laurent::valuation() const {
  if (n_ > 0) return lo_;
  if (exact()) return kInfVal;
  fail(Errc::InsufficientPrecision, "valuation undecidable: zero modulo t^" + std::to_string(prec_));
}

bool Laurent::in_tk(int k) const {
  if (n_ > 0) return lo_ >= k;
  if (prec_ >= k) return true;
  fail(Errc::InsufficientPrecision, "membership in t^" + std::to_string(k) + "O undecidable");
}

Laurent Laurent::truncated(int prec) const {
  Laurent r = *this;
  r.prec_ = std::min(prec_, prec);
  r.normalize();
  return r;
}

Laurent Laurent::shifted(int k) const {
  Laurent r = *this;
  if (n_ > 0) r.lo_ += k;
  if (!exact()) r.prec_ = prec_ + k;
  return r;
}

Laurent Laurent::scaled(Elt a) const {
  Laurent r = *this;
  if (a == 0) {
    r.n_ = 0;
    r.lo_ = 0;
    r.prec_ = kExact;
    return r;
  }
  for (int i = 0; i < n_; ++i) r.c_[i] = F_->mul(c_[i], a);
  return r;
}

Laurent Laurent::below(int k) const {
  if (prec_ < k) fail(Errc::InsufficientPrecision, "part below t^" + std::to_string(k) + " is not fully known");
  Laurent r = *this;
  r.prec_ = kExact;
  if (n_ > 0 && lo_ + n_ > k) r.n_ = std::max(0, k - lo_);
  r.normalize();
  return r;
}

Laurent Laurent::from(int k) const {
  Laurent r(*F_);
  r.prec_ = prec_;
  if (n_ == 0) return r;
  int start = std::max(k, lo_);
  for (int e = start; e < lo_ + n_; ++e) r.set_coeff(e, c_[e - lo_]);
  return r;
}

Laurent Laurent::inverse(int prec) const {
  if (n_ == 0) {
    if (exact()) fail(Errc::InvalidArgument, "inverse of zero series");
    fail(Errc::InsufficientPrecision, "inverse of a series with undecided valuation");
  }
  int v = lo_;
  long avail = exact() ? kExact : static_cast<long>(prec_) - 2L * v;
  long target = std::min<long>(prec, avail);
  Laurent r(*F_);
  r.prec_ = static_cast<int>(clamp_prec(target));
  if (r.exact()) {
    // exact inverse exists only for monomials
    if (n_ != 1) fail(Errc::InvalidArgument, "exact inverse of a non-monomial series");
    return monomial(*F_, F_->inv(c_[0]), -v);
  }
  int terms = static_cast<int>(target - (-v));  // exponents -v .. target-1
  if (terms <= 0) return r;
  if (terms > kCap) {
    terms = kCap;
    r.prec_ = -v + kCap;
  }
  Elt inv0 = F_->inv(c_[0]);
  std::array<Elt, kCap> out{};
  for (int i = 0; i < terms; ++i) {
    Elt s = (i == 0) ? 1 : 0;
    for (int j = 1; j <= i && j < n_; ++j) s = F_->sub(s, F_->mul(c_[j], out[i - j]));
    out[i] = F_->mul(s, inv0);
  }
  r.lo_ = -v;
  r.n_ = terms;
  r.c_ = out;
  r.normalize();
  return r;
}

Laurent Laurent::operator+(const Laurent& o) const {
  const Fq* F = F_ ? F_ : o.F_;
  Laurent r(*F);
  r.prec_ = std::min(prec_, o.prec_);
  if (n_ == 0 && o.n_ == 0) return r;
  int lo = n_ == 0 ? o.lo_ : (o.n_ == 0 ? lo_ : std::min(lo_, o.lo_));
  int hi = std::max(n_ ? lo_ + n_ : lo, o.n_ ? o.lo_ + o.n_ : lo);
  hi = std::min<long>(hi, r.prec_);
  if (hi - lo > kCap) {
    hi = lo + kCap;
    r.prec_ = std::min(r.prec_, hi);
  }
  r.lo_ = lo;
  r.n_ = std::max(0, hi - lo);
  for (int e = lo; e < hi; ++e) {
    Elt a = (n_ && e >= lo_ && e < lo_ + n_) ? c_[e - lo_] : 0;
    Elt b = (o.n_ && e >= o.lo_ && e < o.lo_ + o.n_) ? o.c_[e - o.lo_] : 0;
    r.c_[e - lo] = F->add(a, b);
  }
  r.normalize();
  return r;
}

Laurent Laurent::operator-() const {
  Laurent r = *this;
  for (int i = 0; i < n_; ++i) r.c_[i] = F_->neg(c_[i]);
  return r;
}

Laurent Laurent::operator-(const Laurent& o) const { return *this + (-o); }

Laurent Laurent::operator*(const Laurent& o) const {
  const Fq* F = F_ ? F_ : o.F_;
  Laurent r(*F);
  r.prec_ = static_cast<int>(product_prec(*this, o));
  if (n_ == 0 || o.n_ == 0) return r;
  int lo = lo_ + o.lo_;
  long hi = std::min<long>(static_cast<long>(lo) + n_ + o.n_ - 1, r.prec_);
  if (hi - lo > kCap) {
    hi = lo + kCap;
    r.prec_ = static_cast<int>(std::min<long>(r.prec_, hi));
  }
  int len = static_cast<int>(hi - lo);
  if (len <= 0) return r;
  r.lo_ = lo;
  r.n_ = len;
  if (F->prime()) {
    const long p = F->p();
    for (int k = 0; k < len; ++k) {
      long s = 0;
      int jmin = std::max(0, k - (o.n_ - 1));
      int jmax = std::min(k, n_ - 1);
      for (int j = jmin; j <= jmax; ++j) s += static_cast<long>(c_[j]) * o.c_[k - j];
      r.c_[k] = static_cast<Elt>(s % p);
    }
  } else {
    for (int k = 0; k < len; ++k) {
      Elt s = 0;
      int jmin = std::max(0, k - (o.n_ - 1));
      int jmax = std::min(k, n_ - 1);
      for (int j = jmin; j <= jmax; ++j) s = F->add(s, F->mul(c_[j], o.c_[k - j]));
      r.c_[k] = s;
    }
  }
  r.normalize();
  return r;
}

bool Laurent::operator==(const Laurent& o) const {
  if (prec_ != o.prec_ || n_ != o.n_) return false;
  if (n_ == 0) return true;
  if (lo_ != o.lo_) return false;
  for (int i = 0; i < n_; ++i)
    if (c_[i] != o.c_[i]) return false;
  return true;
}

bool Laurent::agrees_with(const Laurent& o) const {
  int p = std::min(prec_, o.prec_);
  return truncated(p) == o.truncated(p);
}

std::string Laurent::str() const {
  std::ostringstream os;
  if (n_ == 0) {
    os << "0";
  } else {
    bool first = true;
    for (int i = 0; i < n_; ++i) {
      if (c_[i] == 0) continue;
      if (!first) os << " + ";
      first = false;
      int e = lo_ + i;
      std::string c = F_->str(c_[i]);
      if (e == 0) {
        os << c;
      } else {
        if (c != "1") os << c << "*";
        os << "t";
        if (e != 1) os << "^" << e;
      }
    }
  }
  if (!exact()) os << " + O(t^" << prec_ << ")";
  return os.str();
}

void Laurent::append_key(std::string& out, int k) const {
  if (prec_ < k) fail(Errc::InsufficientPrecision, "key needs coefficients below t^" + std::to_string(k));
  out += '[';
  for (int i = 0; i < n_ && lo_ + i < k; ++i) {
    if (c_[i] == 0) continue;
    out += std::to_string(lo_ + i);
    out += ':';
    out += std::to_string(c_[i]);
    out += ',';
  }
  out += ']';
}

// ---------------------------------------------------------------- matrices

LMatrix::LMatrix(const Fq& F, int rows, int cols) : F_(&F), r_(rows), c_(cols), a_(rows * cols, Laurent(F)) {}

LMatrix LMatrix::identity(const Fq& F, int n) {
  LMatrix m(F, n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = Laurent::constant(F, 1);
  return m;
}

LMatrix LMatrix::from_ints(const Fq& F, const std::vector<std::vector<long>>& rows) {
  int r = static_cast<int>(rows.size());
  int c = r ? static_cast<int>(rows[0].size()) : 0;
  LMatrix m(F, r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m.at(i, j) = Laurent::from_int(F, rows[i][j]);
  return m;
}

LMatrix LMatrix::operator*(const LMatrix& o) const {
  if (c_ != o.r_) fail(Errc::InvalidArgument, "matrix shape mismatch in product");
  LMatrix m(*F_, r_, o.c_);
  for (int i = 0; i < r_; ++i)
    for (int k = 0; k < c_; ++k) {
      const Laurent& a = at(i, k);
      if (a.is_exact_zero()) continue;
      for (int j = 0; j < o.c_; ++j) {
        const Laurent& b = o.at(k, j);
        if (b.is_exact_zero()) continue;
        m.at(i, j) += a * b;
      }
    }
  return m;
}

LMatrix LMatrix::operator+(const LMatrix& o) const {
  LMatrix m = *this;
  for (size_t i = 0; i < a_.size(); ++i) m.a_[i] += o.a_[i];
  return m;
}

LMatrix LMatrix::operator-(const LMatrix& o) const {
  LMatrix m = *this;
  for (size_t i = 0; i < a_.size(); ++i) m.a_[i] -= o.a_[i];
  return m;
}

LMatrix LMatrix::scaled(const Laurent& s) const {
  LMatrix m = *this;
  for (auto& x : m.a_) x = x * s;
  return m;
}

LMatrix LMatrix::shifted(int k) const {
  LMatrix m = *this;
  for (auto& x : m.a_) x = x.shifted(k);
  return m;
}

LMatrix LMatrix::transpose() const {
  LMatrix m(*F_, c_, r_);
  for (int i = 0; i < r_; ++i)
    for (int j = 0; j < c_; ++j) m.at(j, i) = at(i, j);
  return m;
}

LMatrix LMatrix::truncated(int prec) const {
  LMatrix m = *this;
  for (auto& x : m.a_) x = x.truncated(prec);
  return m;
}

bool LMatrix::operator==(const LMatrix& o) const {
  return r_ == o.r_ && c_ == o.c_ && a_ == o.a_;
}

int LMatrix::min_valuation() const {
  int v = kInfVal;
  for (const auto& x : a_) v = std::min(v, x.valuation());
  return v;
}

bool LMatrix::is_exact_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](const Laurent& x) { return x.is_exact_zero(); });
}

std::string LMatrix::str() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < r_; ++i) {
    os << (i ? ", [" : "[");
    for (int j = 0; j < c_; ++j) os << (j ? ", " : "") << at(i, j).str();
    os << "]";
  }
  os << "]";
  return os.str();
}

std::vector<Laurent> LMatrix::charpoly() const {
  if (r_ != c_) fail(Errc::InvalidArgument, "charpoly of a non-square matrix");
  const Fq& F = *F_;
  int n = r_;
  // coefficients high to low while building
  std::vector<Laurent> vect = {Laurent::constant(F, 1), -at(0, 0)};
  for (int r = 1; r < n; ++r) {
    std::vector<Laurent> Q(r + 2, Laurent(F));
    Q[0] = Laurent::constant(F, 1);
    Q[1] = -at(r, r);
    // column C = A[0:r, r], iterate A_r^i C
    std::vector<Laurent> col(r, Laurent(F));
    for (int i = 0; i < r; ++i) col[i] = at(i, r);
    for (int i = 2; i <= r + 1; ++i) {
      Laurent s(F);
      for (int j = 0; j < r; ++j) s += at(r, j) * col[j];
      Q[i] = -s;
      std::vector<Laurent> next(r, Laurent(F));
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) next[a] += at(a, b) * col[b];
      col = std::move(next);
    }
    std::vector<Laurent> out(r + 2, Laurent(F));
    for (int i = 0; i < r + 2; ++i)
      for (int j = 0; j <= std::min(i, r); ++j) out[i] += Q[i - j] * vect[j];
    vect = std::move(out);
  }
  std::reverse(vect.begin(), vect.end());
  return vect;
}

Laurent LMatrix::det() const {
  auto cp = charpoly();
  return (r_ % 2 == 0) ? cp[0] : -cp[0];
}

LMatrix LMatrix::adjugate() const {
  int n = r_;
  auto cp = charpoly();  // x^n + c_{n-1} x^{n-1} + ... + c_0
  // adj = (-1)^{n+1} (A^{n-1} + c_{n-1} A^{n-2} + ... + c_1 I), Horner form
  LMatrix acc = identity(*F_, n);
  for (int k = n - 1; k >= 1; --k) {
    LMatrix next = (*this) * acc;
    for (int i = 0; i < n; ++i) next.at(i, i) += cp[k];
    acc = next;
  }
  if (n == 1) return identity(*F_, 1);
  if (n % 2 == 0) acc = acc.scaled(Laurent::from_int(*F_, -1));
  return acc;
}

LMatrix LMatrix::inverse_monomial_det() const {
  Laurent d = det();
  if (!d.exact() || d.size() != 1)
    fail(Errc::InvalidArgument, "inverse requires a monomial determinant, got " + d.str());
  return adjugate().scaled(d.inverse(kExact));
}

// ---------------------------------------------------------------- Q(q^{1/2})

namespace {

long perfect_sqrt(long q) {
  long s = static_cast<long>(std::llround(std::sqrt(static_cast<double>(q))));
  for (long c = std::max(0L, s - 1); c <= s + 1; ++c)
    if (c * c == q) return c;
  return -1;
}

int sign_of(const mpq_class& x, const mpq_class& y, int q) {
  // sign of x + y*sqrt(q)
  int sx = sgn(x), sy = sgn(y);
  if (sx >= 0 && sy >= 0) return (sx || sy) ? 1 : 0;
  if (sx <= 0 && sy <= 0) return -1;
  mpq_class lhs = x * x, rhs = y * y * q;
  int cmp = ::cmp(lhs, rhs);
  if (cmp == 0) return 0;
  return (cmp > 0) ? sx : sy;
}

}  // namespace

QValue::QValue(int q, mpq_class a, mpq_class b) : q_(q), a_(std::move(a)), b_(std::move(b)) {
  a_.canonicalize();
  b_.canonicalize();
  fold();
}

void QValue::fold() {
  if (b_ == 0) return;
  long s = perfect_sqrt(q_);
  if (s >= 0) {
    a_ += b_ * s;
    b_ = 0;
  }
}

QValue QValue::qpow_half(int q, int half) {
  int e = half >= 0 ? half / 2 : -((-half + 1) / 2);  // floor(half/2)
  bool odd = (half - 2 * e) != 0;
  mpz_class base = q, pw = 1;
  mpz_pow_ui(pw.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(std::abs(e)));
  mpq_class mag = (e >= 0) ? mpq_class(pw) : mpq_class(1) / mpq_class(pw);
  if (!odd) return QValue(q, mag);
  return QValue(q, 0, mag);
}

double QValue::to_double() const { return a_.get_d() + b_.get_d() * std::sqrt(static_cast<double>(q_)); }

std::string QValue::str() const {
  if (b_ == 0) return a_.get_str();
  std::string s;
  if (a_ != 0) s = a_.get_str() + " + ";
  return s + b_.get_str() + "*sqrt(" + std::to_string(q_) + ")";
}

QValue QValue::operator+(const QValue& o) const { return QValue(q_ ? q_ : o.q_, a_ + o.a_, b_ + o.b_); }
QValue QValue::operator-(const QValue& o) const { return QValue(q_ ? q_ : o.q_, a_ - o.a_, b_ - o.b_); }
QValue QValue::operator-() const { return QValue(q_, -a_, -b_); }

QValue QValue::operator*(const QValue& o) const {
  int q = q_ ? q_ : o.q_;
  return QValue(q, a_ * o.a_ + b_ * o.b_ * q, a_ * o.b_ + b_ * o.a_);
}

QValue QValue::operator/(const QValue& o) const {
  int q = q_ ? q_ : o.q_;
  mpq_class den = o.a_ * o.a_ - o.b_ * o.b_ * q;
  if (den == 0) fail(Errc::InvalidArgument, "division by zero in Q(sqrt q)");
  QValue conj(q, o.a_ / den, -o.b_ / den);
  return *this * conj;
}

bool QValue::operator==(const QValue& o) const { return a_ == o.a_ && b_ == o.b_; }

bool QValue::operator<(const QValue& o) const {
  int q = q_ ? q_ : o.q_;
  return sign_of(a_ - o.a_, b_ - o.b_, q) < 0;
}

mpz_class eval_poly(const std::vector<long>& coeffs, long q) {
  mpz_class acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * q + *it;
  return acc;
}

// ---------------------------------------------------------------- lattices

namespace {

// One elimination pass at working precision W; throws InsufficientPrecision
// when some decision is not certified at this precision.
LMatrix hermite_pass(const Fq& F, int n, std::vector<LVector> pool, int W, std::vector<int>& d) {
  for (auto& g : pool)
    for (auto& x : g) x = x.truncated(W);
  LMatrix B(F, n, n);
  d.assign(n, 0);
  std::vector<LVector> basis(n);
  for (int row = n - 1; row >= 0; --row) {
    int best = -1, best_v = kInfVal;
    bool all_exact_zero = true;
    int undecided_lb = kInfVal;
    for (size_t g = 0; g < pool.size(); ++g) {
      const Laurent& x = pool[g][row];
      if (x.is_exact_zero()) continue;
      all_exact_zero = false;
      if (x.looks_zero()) {
        undecided_lb = std::min(undecided_lb, x.prec());
        continue;
      }
      if (x.lo() < best_v) {
        best_v = x.lo();
        best = static_cast<int>(g);
      }
    }
    if (all_exact_zero) fail(Errc::RankDeficient, "generators do not span a full-rank lattice");
    if (best < 0 || undecided_lb <= best_v)
      fail(Errc::InsufficientPrecision, "pivot valuation undecided in lattice basis");
    LVector piv = pool[best];
    pool.erase(pool.begin() + best);
    // scale the pivot so its diagonal entry is exactly t^{best_v}
    Laurent unit = piv[row].shifted(-best_v);
    Laurent uinv = unit.inverse(W - best_v + 1);
    for (int i = 0; i <= row; ++i) piv[i] = (piv[i] * uinv).truncated(W);
    piv[row] = Laurent::monomial(F, 1, best_v);
    for (int i = row + 1; i < n; ++i) piv[i] = Laurent(F);
    for (auto& g : pool) {
      if (g[row].is_exact_zero()) continue;
      Laurent f = g[row].shifted(-best_v);  // multiple of the pivot, in O
      for (int i = 0; i < row; ++i) g[i] = (g[i] - f * piv[i]).truncated(W);
      g[row] = Laurent(F);
    }
    basis[row] = std::move(piv);
    d[row] = best_v;
  }
  // reduce above-diagonal entries: entry (i, j) modulo t^{d_i}
  for (int j = 0; j < n; ++j) {
    LVector& b = basis[j];
    for (int i = j - 1; i >= 0; --i) {
      Laurent high = b[i].from(d[i]).shifted(-d[i]);
      if (!high.looks_zero() || !high.exact()) {
        for (int k = 0; k < i; ++k) b[k] = (b[k] - high * basis[i][k]).truncated(W);
      }
      b[i] = b[i].below(d[i]);
    }
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) B.at(i, j) = basis[j][i];
  return B;
}

}  // namespace

LMatrix hermite_basis(const Fq& F, int n, std::vector<LVector> gens, int* det_val) {
  int top = 0, bottom = 0;
  for (const auto& g : gens) {
    if (static_cast<int>(g.size()) != n) fail(Errc::InvalidArgument, "generator dimension mismatch");
    for (const auto& x : g)
      if (!x.looks_zero()) {
        top = std::max(top, x.lo() + x.size());
        bottom = std::min(bottom, x.lo());
      }
  }
  int W = top + 8;
  for (int attempt = 0; attempt < 6; ++attempt) {
    try {
      std::vector<int> d;
      LMatrix B = hermite_pass(F, n, gens, W, d);
      if (det_val) {
        long s = 0;
        for (int v : d) s += v;
        *det_val = static_cast<int>(s);
      }
      return B;
    } catch (const Error& e) {
      if (e.code() != Errc::InsufficientPrecision) throw;
      W = bottom + 2 * (W - bottom);
    }
  }
  fail(Errc::InsufficientPrecision, "lattice basis did not certify within the precision schedule");
}

OLattice OLattice::span(const Fq& F, int n, const std::vector<LVector>& gens) {
  OLattice L;
  L.n_ = n;
  L.B_ = hermite_basis(F, n, gens);
  L.d_.resize(n);
  for (int i = 0; i < n; ++i) L.d_[i] = L.B_.at(i, i).lo();
  return L;
}

OLattice OLattice::diagonal(const Fq& F, const std::vector<int>& exps) {
  int n = static_cast<int>(exps.size());
  OLattice L;
  L.n_ = n;
  L.d_ = exps;
  L.B_ = LMatrix(F, n, n);
  for (int i = 0; i < n; ++i) L.B_.at(i, i) = Laurent::monomial(F, 1, exps[i]);
  return L;
}

long OLattice::det_valuation() const {
  long s = 0;
  for (int v : d_) s += v;
  return s;
}

bool OLattice::contains(const LVector& v) const {
  LVector r = v;
  for (int j = n_ - 1; j >= 0; --j) {
    if (r[j].is_exact_zero()) continue;
    if (!r[j].in_tk(d_[j])) return false;
    Laurent c = r[j].shifted(-d_[j]);
    for (int i = 0; i < j; ++i) r[i] -= c * B_.at(i, j);
    r[j] = Laurent(B_.field());
  }
  return true;
}

bool OLattice::operator==(const OLattice& o) const { return d_ == o.d_ && B_ == o.B_; }

std::string OLattice::key() const {
  std::string k;
  for (int j = 0; j < n_; ++j) {
    k += std::to_string(d_[j]);
    k += '|';
    for (int i = 0; i < j; ++i) B_.at(i, j).append_key(k, d_[i]);
    k += ';';
  }
  return k;
}

long lattice_index_exponent(const OLattice& A, const OLattice& B) {
  if (A.dim() != B.dim()) fail(Errc::InvalidArgument, "lattices live in different spaces");
  return B.det_valuation() - A.det_valuation();
}

QValue lattice_index(const OLattice& A, const OLattice& B) {
  int q = A.basis().field().q();
  return QValue::qpow(q, static_cast<int>(lattice_index_exponent(A, B)));
}

OLattice dual_lattice(const OLattice& L, const LMatrix& gram, int shift) {
  const Fq& F = gram.field();
  int n = L.dim();
  // dual = t^shift * (B^T G)^{-1} O^n = t^{shift - v(det)} adj(B^T G) O^n
  LMatrix M = L.basis().transpose() * gram;
  Laurent det = M.det();
  if (det.is_exact_zero()) fail(Errc::DegenerateForm, "form is degenerate on the lattice");
  int v = det.valuation();
  LMatrix adj = M.adjugate();
  std::vector<LVector> gens(n, LVector(n, Laurent(F)));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) gens[j][i] = adj.at(i, j).shifted(shift - v);
  return OLattice::span(F, n, gens);
}

}  // namespace asf

namespace asf {

namespace {

// one Smith pass at absolute precision W; throws InsufficientPrecision when a
// pivot cannot be certified
std::vector<int> smith_pass(const LMatrix& M, int rank, int W) {
  const Fq& F = M.field();
  int R = M.rows(), C = M.cols();
  std::vector<std::vector<Laurent>> a(R, std::vector<Laurent>(C));
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j) a[i][j] = M.at(i, j).exact() ? M.at(i, j) : M.at(i, j).truncated(W);
  std::vector<int> rows(R), cols(C), out;
  for (int i = 0; i < R; ++i) rows[i] = i;
  for (int j = 0; j < C; ++j) cols[j] = j;
  while (static_cast<int>(out.size()) < rank) {
    int bi = -1, bj = -1, best = kInfVal, unknown = kInfVal;
    for (int i : rows)
      for (int j : cols) {
        const Laurent& x = a[i][j];
        if (!x.looks_zero()) {
          if (x.lo() < best) best = x.lo(), bi = i, bj = j;
        } else if (!x.exact()) {
          unknown = std::min(unknown, x.prec());
        }
      }
    // a hidden entry could still have smaller valuation than the pivot
    if (bi < 0 || unknown <= best) fail(Errc::InsufficientPrecision, "elementary divisor not certified");
    out.push_back(best);
    Laurent inv = a[bi][bj].inverse(W);
    for (int i : rows) {
      if (i == bi || a[i][bj].is_exact_zero()) continue;
      Laurent c = a[i][bj] * inv;
      for (int j : cols) a[i][j] -= c * a[bi][j];
    }
    rows.erase(std::find(rows.begin(), rows.end(), bi));
    cols.erase(std::find(cols.begin(), cols.end(), bj));
  }
  return out;
}

}  // namespace

std::vector<int> elementary_divisor_valuations(const LMatrix& M, int rank) {
  int bottom = 0, top = 0;
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j)
      if (!M.at(i, j).looks_zero()) {
        bottom = std::min(bottom, M.at(i, j).lo());
        top = std::max(top, M.at(i, j).lo() + M.at(i, j).size());
      }
  int W = top + 8;
  for (int attempt = 0; attempt < 5; ++attempt) {
    try {
      auto v = smith_pass(M, rank, W);
      std::sort(v.begin(), v.end());
      return v;
    } catch (const Error& e) {
      if (e.code() != Errc::InsufficientPrecision) throw;
      W = bottom + 2 * (W - bottom);
    }
  }
  fail(Errc::InsufficientPrecision, "elementary divisors did not certify within the precision schedule");
}

}  // namespace asf
