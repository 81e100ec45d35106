#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace etale {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Malformed input: bad documents, bad arguments, inconsistent dimensions.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public InputError {
public:
  using InputError::InputError;
};

/// Raised by solve_field when the Jacobian is too close to singular to
/// define the vector field.
class NearSingularJacobian : public std::runtime_error {
public:
  NearSingularJacobian(double det_abs, double cond)
      : std::runtime_error("near-singular Jacobian"), det_abs(det_abs), cond(cond) {}
  double det_abs;
  double cond;
};

/// Exponent vector of one term. Ordered lexicographically.
class Monomial {
public:
  Monomial() = default;
  explicit Monomial(std::size_t n) : exps_(n, 0) {}
  explicit Monomial(std::vector<int> exps);

  static Monomial unit(std::size_t n, std::size_t var);

  std::size_t dim() const { return exps_.size(); }
  int operator[](std::size_t j) const { return exps_[j]; }
  const std::vector<int>& exponents() const { return exps_; }
  int degree() const;

  Monomial operator*(const Monomial& other) const;

  auto operator<=>(const Monomial&) const = default;
  bool operator==(const Monomial&) const = default;

private:
  std::vector<int> exps_;
};

/// Sparse polynomial in n variables with complex coefficients.
///
/// Terms with an exactly-zero coefficient are never stored. Results of
/// arithmetic additionally drop terms whose magnitude falls below
/// kPruneFloor so repeated composition does not accumulate denormals.
class Polynomial {
public:
  static constexpr double kPruneFloor = 1e-300;

  Polynomial() = default;
  explicit Polynomial(std::size_t n) : n_(n) {}

  static Polynomial constant(std::size_t n, Complex c);
  static Polynomial variable(std::size_t n, std::size_t var);
  static Polynomial term(Complex c, Monomial m);

  std::size_t dim() const { return n_; }
  const std::map<Monomial, Complex>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  /// Degree in a single variable.
  int degree_in(std::size_t var) const;
  Complex coefficient(const Monomial& m) const;

  /// Adds c to the coefficient of m. Exact zeros are removed.
  void add_term(const Monomial& m, Complex c);

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(Complex s) const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial pow(int k) const;

  /// Formal partial derivative with respect to variable var.
  Polynomial derivative(std::size_t var) const;

  /// Substitutes subs[j] for variable j. All subs must share one dimension.
  Polynomial compose(const std::vector<Polynomial>& subs) const;
  /// Upper bound on degree(compose(subs)) without expanding.
  int compose_degree_bound(const std::vector<Polynomial>& subs) const;

  Complex eval(const CVec& y) const;

  bool operator==(const Polynomial& o) const { return n_ == o.n_ && terms_ == o.terms_; }

private:
  void prune();

  std::size_t n_ = 0;
  std::map<Monomial, Complex> terms_;
};

/// Point evaluation of a Jacobian with its LU-derived determinant.
struct JacobianSample {
  CVec point;
  CMat matrix;
  Complex determinant;
  double condition_estimate = 0.0;
};

/// Values of a polynomial system together with the sum of absolute term
/// magnitudes per component (an a-priori rounding-error scale).
struct MapValue {
  CVec value;
  double magnitude = 0.0;
};

/// Square polynomial system y -> (Phi_1(y), ..., Phi_n(y)) with its formal
/// Jacobian cached at construction. Immutable.
class PolyMap {
public:
  PolyMap() = default;
  explicit PolyMap(std::vector<Polynomial> components);

  static PolyMap identity(std::size_t n);

  std::size_t dim() const { return components_.size(); }
  const std::vector<Polynomial>& components() const { return components_; }
  const Polynomial& component(std::size_t i) const { return components_[i]; }
  const Polynomial& jacobian_entry(std::size_t i, std::size_t j) const {
    return jacobian_[i * dim() + j];
  }
  int degree() const;
  /// Upper bound on the total degree of det Phi'(y).
  int det_degree_bound() const;

  CVec eval(const CVec& y) const;
  MapValue eval_with_magnitude(const CVec& y) const;
  CMat jacobian_matrix(const CVec& y) const;

  bool operator==(const PolyMap& o) const { return components_ == o.components_; }

private:
  // Flat term tables so the tracker's inner loop does not walk std::map.
  struct CompiledPoly {
    std::vector<Complex> coeffs;
    std::vector<int> exps;  // coeffs.size() * n, row-major
  };
  static CompiledPoly compile(const Polynomial& p);
  void powers(const CVec& y, std::vector<Complex>& table) const;
  Complex eval_compiled(const CompiledPoly& p, const std::vector<Complex>& table,
                        double* magnitude) const;

  std::vector<Polynomial> components_;
  std::vector<Polynomial> jacobian_;
  std::vector<CompiledPoly> compiled_components_;
  std::vector<CompiledPoly> compiled_jacobian_;
  int max_var_degree_ = 0;
};

CVec eval_map(const PolyMap& map, const CVec& y);

JacobianSample jacobian_at(const PolyMap& map, const CVec& y);

/// Solves Phi'(y) v = x. Throws NearSingularJacobian when
/// |det| <= singular_floor or the condition estimate exceeds cond_ceiling.
CVec solve_field(const PolyMap& map, const CVec& y, const CVec& x,
                 double singular_floor = 1e-12, double cond_ceiling = 1e12);

/// Non-throwing variant used inside the tracker.
std::optional<CVec> try_solve_field(const PolyMap& map, const CVec& y, const CVec& x,
                                    double singular_floor, double cond_ceiling);

struct KellerOptions {
  int samples = 64;
  double sample_box = 1.0;
  double det_rtol = 1e-9;
  double singular_floor = 1e-12;
};

struct KellerVerdict {
  enum class Kind { ConstantDet, NonConstantDet, SingularSomewhere };
  Kind kind = Kind::ConstantDet;
  Complex value;                  // common determinant for ConstantDet
  std::vector<CVec> witnesses;    // one (singular) or two (non-constant) points
  std::vector<Complex> witness_dets;
  int det_degree_bound = 0;
  // Probability that a non-constant determinant agrees on every sample,
  // with values closer than det_rtol counted as equal.
  double failure_bound_log10 = 0.0;
  double failure_bound = 0.0;
};

std::string_view to_string(KellerVerdict::Kind k);

KellerVerdict keller_check(const PolyMap& map, int samples, std::uint64_t seed,
                           const KellerOptions& opts = {});

bool is_odd(const PolyMap& map);

}  // namespace etale
