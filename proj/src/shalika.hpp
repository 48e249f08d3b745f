#pragma once
// Degeneration tables, the test functions f_i, f_i' and f_i*, the triangular
// system for the Shalika germs of a topologically nilpotent gamma_0, and the
// main estimate I_gamma(1_{Lie I}) = |W| + O(q^{-1/2}) with its sub-estimates.
//
// Every nilpotent orbit of the supported types degenerates from the
// hyperspecial vertex o: x_i = o and ebar_i is the standard representative
// read in g_{o,0} = g(k). Germs are taken with cutoff r = 0.

#include <string>
#include <vector>

#include "exactnum.hpp"
#include "liemodel.hpp"
#include "orbint.hpp"
#include "rangarao.hpp"
#include "rootdata.hpp"

namespace asf {

struct DegenerationRow {
  std::string label;
  std::string x_name = "o";
  QVec x;
  KMat ebar;  // in g_{x,0}
  int d = 0;  // dim of the G_{x,0}-orbit of ebar
  int component_group = 1;
  LMatrix witness;  // an element of Ad(G) e in ebar + g_{x,>0}
};

// rows in decreasing orbit dimension; witnesses are checked before returning
std::vector<DegenerationRow> degeneration_table(const GroupModel& G, const Fq& F);

enum class Variant { F, FPrime, FStar };
const char* variant_name(Variant v);
// f_i = q^{d/2} 1[ebar + g_{x,>0}], f_i' its G_{x,>=0}-average, and
// f_i* = q^{-d/2} 1[preimage of the geometric orbit]
TestFunction build_test_function(const GroupModel& G, const DegenerationRow& row, Variant v);

struct GermOptions {
  IntegralOptions integral;
  bool held_out = true;  // also predict I(1_{g_{o,>=0}})
};

struct GermTable {
  std::string gamma0;
  int q = 0;
  std::vector<std::string> labels;
  std::vector<std::vector<QValue>> matrix;  // I_{e_j}(f_i)
  std::vector<QValue> rhs;                  // I_{gamma_0}(f_i)
  std::vector<QValue> germs;                // Gamma_{e_j}(gamma_0)
  bool unit_lower_triangular = false;
  QValue reconstruction_direct, reconstruction_predicted;  // at 1_{g_{x,>=-1}}
  bool reconstruction_check = false;
  QValue held_out_direct, held_out_predicted;  // at 1_{g_{o,>=0}}
  bool held_out_check = false;
};

// gamma_0 topologically nilpotent, regular semisimple, split centralizer.
// Throws SingularSystem on a zero pivot.
GermTable germ_solve(const GroupModel& G, const LMatrix& gamma0, const Fq& F, const GermOptions& opt = {});
// {gamma0, q, orbits: [{label, Gamma_num, Gamma_den}], reconstruction_check}
std::string germ_json(const GermTable& t);

struct SubEstimate {
  std::string name;  // "A1" .. "A6"
  std::vector<std::string> items;
  std::vector<QValue> values;
  bool pass = false;
};

struct MainQ {
  int q = 0;
  QValue value;    // I_gamma(1_{Lie I})
  double residual = 0;  // value - |W|
  GermTable germs;
  std::vector<SubEstimate> estimates;
};

struct MainReport {
  std::string gamma;
  int weyl_order = 0;
  std::vector<MainQ> per_q;
  double c = 0;  // max |value - |W|| q^{1/2}
  bool pass = false;
};

// gamma = t gamma_0 with depth > 1, parsed at each q; throws DepthTooSmall
MainReport verify_main(const GroupModel& G, const std::string& gamma, const std::vector<int>& qs,
                       const GermOptions& opt = {});
std::string main_json(const MainReport& r);

}  // namespace asf
