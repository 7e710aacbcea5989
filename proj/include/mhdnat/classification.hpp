#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mhdnat/state_function.hpp"
#include "mhdnat/symmetry.hpp"

namespace mhdnat {

// Exact rational with 64-bit numerator and positive denominator; overflow throws.
class Rational {
 public:
  Rational(std::int64_t num = 0, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a) { return Rational(-a.num_, a.den_); }
  friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

 private:
  std::int64_t num_;
  std::int64_t den_;
};

using CVec = std::array<double, 3>;
using CVecExact = std::array<Rational, 3>;

// V = (h + 4p h_p + 5 rho h_rho, p h_p + rho h_rho, h_p).
CVec class_vector(const StateFunction& h, double p, double rho);

// 2 c1 V1 - 4 c2 V2 - c3 V3.
double classifying_residual(const StateFunction& h, const CVec& c, double p, double rho);

// Sum of the magnitudes of the terms in the residual; the scale against which
// floating-point cancellation is judged.
double residual_scale(const StateFunction& h, const CVec& c, double p, double rho);

// Numerical rank of the sample matrix of V (rows normalized, singular values
// below rel_threshold * largest count as zero). Needs at least 3 samples.
int rank_V(const StateFunction& h, const std::vector<std::array<double, 2>>& samples, double rel_threshold = 1e-9);

struct SampleBox {
  Interval p{0.1, 10.0};
  Interval rho{0.1, 10.0};
  int count = 1000;
};

// Uniform (p, rho) samples from an independent substream of the seed.
std::vector<std::array<double, 2>> sample_points(const SampleBox& box, std::uint64_t seed, std::uint64_t stream);

// Coefficients of c_t t d_t + c_1 xi1 d_xi1 + ... as nine affine slots
// (t, xi1, xi2, xi3, gamma1, gamma2, gamma3, p, rho); slot k holds
// constant + linear * (its own variable).
struct Operator {
  struct Affine {
    Rational constant, linear;
    bool operator==(const Affine&) const = default;
  };
  std::array<Affine, 9> slot;

  bool operator==(const Operator& o) const { return slot == o.slot; }
  Operator operator+(const Operator& o) const;
  Operator operator*(const Rational& s) const;
  std::string str() const;
};

Operator operator_Y(const CVecExact& c);  // general extension operator with constants c
Operator operator_Y1();
Operator operator_Y2();
Operator operator_Y3();
bool operator_identity_holds(const CVecExact& c);

// Instantiation of a classification row. f is an expression in z (the
// row's similarity argument); h is used only by the generic row 9.
struct RowTemplate {
  int row = 1;
  Rational k{1};
  std::string f;
  std::string h;
};

struct Table1Row {
  int index = 0;
  std::string label;
  StateFunction h;
  std::string constraint_text;
  std::string extension_text;
  std::vector<CVec> extension;             // c vectors spanning the admitted constants
  std::vector<CVecExact> extension_exact;  // same, exact; empty after equivalence maps
  std::vector<CVecExact> constraints;      // exact linear forms a with a . c = 0
  int expected_rank = 3;
  std::function<CVec(double p, double rho)> closed_form_v;  // hand-derived V for this row
  SampleBox box;
};

// Defaults: k = 1 for rows 2 and 4, k = 2 for row 5; f = z + z^2 (rows 5, 7),
// z (row 6), 1 + z^2 (row 8, z = p); h = p^2 + rho^3 for row 9.
RowTemplate default_template(int row);
Table1Row make_row(const RowTemplate& tpl);

// Image of a row under the compressible equivalence: h via apply_equiv_h,
// c -> (c1, c2, s c3 - (4 c2 - 8 c1) kappa) with s = alpha^-8 beta^4.
Table1Row transform_row(const Table1Row& row, const CompressibleEquivalence& tr);

struct RowReport {
  int row = 0;
  std::string label;
  std::string constraint;
  std::string extension;
  int trials = 0;
  int samples = 0;
  double worst_residual = 0.0;        // admitted c, relative to residual_scale
  double worst_abs_residual = 0.0;    // admitted c, absolute
  std::optional<double> negative_min; // smallest max-residual over violating c
  double closed_form_deviation = 0.0; // |V_jet - V_closed| / max(1, |V|)
  bool constraints_consistent = true;
  bool operator_identity = true;
  int expected_rank = 0;
  int rank = 0;
  double min_singular = 0.0;          // row 9: relative smallest singular value of the weighted V matrix
  bool passed = false;
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
};

struct ClassifyOptions {
  double tolerance = 1e-10;
  double negative_threshold = 1e-2;
  double rank_threshold = 1e-9;
  double closed_form_tolerance = 1e-10;
};

RowReport verify_table_row(const Table1Row& row, int trials, std::uint64_t seed, const ClassifyOptions& opt = {});

// Which case of the rank analysis a rank belongs to ('a' .. 'd').
char rank_case(int rank);

}  // namespace mhdnat
