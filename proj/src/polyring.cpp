#include "etale/polyring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "etale/random.hpp"

namespace etale {

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::vector<int> exps) : exps_(std::move(exps)) {
  for (int e : exps_) {
    if (e < 0) throw InputError("negative exponent");
  }
}

Monomial Monomial::unit(std::size_t n, std::size_t var) {
  Monomial m(n);
  m.exps_.at(var) = 1;
  return m;
}

int Monomial::degree() const { return std::accumulate(exps_.begin(), exps_.end(), 0); }

Monomial Monomial::operator*(const Monomial& other) const {
  if (dim() != other.dim()) throw DimensionError("monomial dimension mismatch");
  Monomial out(*this);
  for (std::size_t j = 0; j < exps_.size(); ++j) out.exps_[j] += other.exps_[j];
  return out;
}

// -------------------------------------------------------------- Polynomial

Polynomial Polynomial::constant(std::size_t n, Complex c) {
  Polynomial p(n);
  p.add_term(Monomial(n), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t n, std::size_t var) {
  Polynomial p(n);
  p.add_term(Monomial::unit(n, var), 1.0);
  return p;
}

Polynomial Polynomial::term(Complex c, Monomial m) {
  Polynomial p(m.dim());
  p.add_term(m, c);
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

int Polynomial::degree_in(std::size_t var) const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m[var]);
  return d;
}

Complex Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Complex{} : it->second;
}

void Polynomial::add_term(const Monomial& m, Complex c) {
  if (m.dim() != n_) throw DimensionError("term dimension does not match polynomial");
  if (c == Complex{}) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex{}) terms_.erase(it);
  }
}

void Polynomial::prune() {
  std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) < kPruneFloor; });
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial out(*this);
  out += o;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.n_ != n_) throw DimensionError("polynomial dimension mismatch");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  prune();
  return *this;
}

Polynomial Polynomial::operator-() const {
  Polynomial out(*this);
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator*(Complex s) const {
  Polynomial out(n_);
  if (s == Complex{}) return out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, c * s);
  out.prune();
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (o.n_ != n_) throw DimensionError("polynomial dimension mismatch");
  Polynomial out(n_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) out.add_term(ma * mb, ca * cb);
  }
  out.prune();
  return out;
}

Polynomial Polynomial::pow(int k) const {
  if (k < 0) throw InputError("negative polynomial power");
  Polynomial result = constant(n_, 1.0);
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

Polynomial Polynomial::derivative(std::size_t var) const {
  if (var >= n_) throw DimensionError("derivative variable out of range");
  Polynomial out(n_);
  for (const auto& [m, c] : terms_) {
    const int e = m[var];
    if (e == 0) continue;
    std::vector<int> exps = m.exponents();
    exps[var] = e - 1;
    out.add_term(Monomial(std::move(exps)), c * static_cast<double>(e));
  }
  return out;
}

int Polynomial::compose_degree_bound(const std::vector<Polynomial>& subs) const {
  if (subs.size() != n_) throw DimensionError("composition needs one substitute per variable");
  int bound = 0;
  for (const auto& [m, c] : terms_) {
    int d = 0;
    for (std::size_t j = 0; j < n_; ++j) d += m[j] * subs[j].degree();
    bound = std::max(bound, d);
  }
  return bound;
}

Polynomial Polynomial::compose(const std::vector<Polynomial>& subs) const {
  if (subs.size() != n_) throw DimensionError("composition needs one substitute per variable");
  if (n_ == 0) return *this;
  const std::size_t m_dim = subs.front().dim();
  for (const auto& s : subs) {
    if (s.dim() != m_dim) throw DimensionError("substitutes have mixed dimensions");
  }
  // powers[j][k] = subs[j]^k, filled lazily up to the largest exponent used.
  std::vector<std::vector<Polynomial>> powers(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    const int top = degree_in(j);
    powers[j].reserve(static_cast<std::size_t>(top) + 1);
    powers[j].push_back(constant(m_dim, 1.0));
    for (int k = 1; k <= top; ++k) powers[j].push_back(powers[j].back() * subs[j]);
  }
  Polynomial out(m_dim);
  for (const auto& [m, c] : terms_) {
    Polynomial prod = constant(m_dim, c);
    for (std::size_t j = 0; j < n_; ++j) {
      if (m[j] > 0) prod = prod * powers[j][static_cast<std::size_t>(m[j])];
    }
    out += prod;
  }
  return out;
}

Complex Polynomial::eval(const CVec& y) const {
  if (static_cast<std::size_t>(y.size()) != n_) throw DimensionError("evaluation point has wrong dimension");
  Complex acc{};
  for (const auto& [m, c] : terms_) {
    Complex t = c;
    for (std::size_t j = 0; j < n_; ++j) {
      for (int k = 0; k < m[j]; ++k) t *= y[static_cast<Eigen::Index>(j)];
    }
    acc += t;
  }
  return acc;
}

// ----------------------------------------------------------------- PolyMap

PolyMap::PolyMap(std::vector<Polynomial> components) : components_(std::move(components)) {
  const std::size_t n = components_.size();
  for (const auto& p : components_) {
    if (p.dim() != n) {
      throw DimensionError("map is not square: " + std::to_string(n) + " components in " +
                           std::to_string(p.dim()) + " variables");
    }
  }
  jacobian_.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) jacobian_.push_back(components_[i].derivative(j));
  }
  for (const auto& p : components_) {
    compiled_components_.push_back(compile(p));
    for (std::size_t j = 0; j < n; ++j) max_var_degree_ = std::max(max_var_degree_, p.degree_in(j));
  }
  for (const auto& p : jacobian_) compiled_jacobian_.push_back(compile(p));
}

PolyMap PolyMap::identity(std::size_t n) {
  std::vector<Polynomial> comps;
  for (std::size_t i = 0; i < n; ++i) comps.push_back(Polynomial::variable(n, i));
  return PolyMap(std::move(comps));
}

int PolyMap::degree() const {
  int d = 0;
  for (const auto& p : components_) d = std::max(d, p.degree());
  return d;
}

int PolyMap::det_degree_bound() const {
  int bound = 0;
  for (std::size_t i = 0; i < dim(); ++i) {
    int row = 0;
    for (std::size_t j = 0; j < dim(); ++j) row = std::max(row, jacobian_entry(i, j).degree());
    bound += row;
  }
  return bound;
}

PolyMap::CompiledPoly PolyMap::compile(const Polynomial& p) {
  CompiledPoly out;
  for (const auto& [m, c] : p.terms()) {
    out.coeffs.push_back(c);
    out.exps.insert(out.exps.end(), m.exponents().begin(), m.exponents().end());
  }
  return out;
}

// table[j * (D + 1) + k] = y_j^k by repeated multiplication, so that
// (-y)^k == (-1)^k y^k holds bit for bit.
void PolyMap::powers(const CVec& y, std::vector<Complex>& table) const {
  const std::size_t n = dim();
  const std::size_t stride = static_cast<std::size_t>(max_var_degree_) + 1;
  table.assign(n * stride, Complex{});
  for (std::size_t j = 0; j < n; ++j) {
    Complex* row = table.data() + j * stride;
    row[0] = 1.0;
    for (std::size_t k = 1; k < stride; ++k) row[k] = row[k - 1] * y[static_cast<Eigen::Index>(j)];
  }
}

Complex PolyMap::eval_compiled(const CompiledPoly& p, const std::vector<Complex>& table,
                               double* magnitude) const {
  const std::size_t n = dim();
  const std::size_t stride = static_cast<std::size_t>(max_var_degree_) + 1;
  Complex acc{};
  double mag = 0.0;
  for (std::size_t t = 0; t < p.coeffs.size(); ++t) {
    Complex term = p.coeffs[t];
    const int* e = p.exps.data() + t * n;
    for (std::size_t j = 0; j < n; ++j) {
      if (e[j] != 0) term *= table[j * stride + static_cast<std::size_t>(e[j])];
    }
    acc += term;
    if (magnitude) mag += std::abs(term.real()) + std::abs(term.imag());
  }
  if (magnitude) *magnitude = mag;
  return acc;
}

CVec PolyMap::eval(const CVec& y) const { return eval_with_magnitude(y).value; }

MapValue PolyMap::eval_with_magnitude(const CVec& y) const {
  if (static_cast<std::size_t>(y.size()) != dim()) throw DimensionError("evaluation point has wrong dimension");
  std::vector<Complex> table;
  powers(y, table);
  MapValue out{CVec(y.size()), 0.0};
  for (std::size_t i = 0; i < dim(); ++i) {
    double mag = 0.0;
    out.value[static_cast<Eigen::Index>(i)] = eval_compiled(compiled_components_[i], table, &mag);
    out.magnitude = std::max(out.magnitude, mag);
  }
  return out;
}

CMat PolyMap::jacobian_matrix(const CVec& y) const {
  if (static_cast<std::size_t>(y.size()) != dim()) throw DimensionError("evaluation point has wrong dimension");
  std::vector<Complex> table;
  powers(y, table);
  const auto n = static_cast<Eigen::Index>(dim());
  CMat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = eval_compiled(compiled_jacobian_[static_cast<std::size_t>(i * n + j)], table, nullptr);
    }
  }
  return m;
}

// ------------------------------------------------------------- operations

CVec eval_map(const PolyMap& map, const CVec& y) { return map.eval(y); }

namespace {

struct Factored {
  Eigen::PartialPivLU<CMat> lu;
  Complex det;
  double cond;
};

Factored factor(const CMat& m) {
  Factored f{Eigen::PartialPivLU<CMat>(m), Complex{}, 0.0};
  f.det = f.lu.determinant();
  if (f.det == Complex{} || !std::isfinite(std::abs(f.det))) {
    f.cond = std::numeric_limits<double>::infinity();
  } else {
    const double rc = f.lu.rcond();
    f.cond = rc > 0.0 ? std::max(1.0, 1.0 / rc) : std::numeric_limits<double>::infinity();
  }
  return f;
}

}  // namespace

JacobianSample jacobian_at(const PolyMap& map, const CVec& y) {
  JacobianSample s;
  s.point = y;
  s.matrix = map.jacobian_matrix(y);
  const Factored f = factor(s.matrix);
  s.determinant = f.det;
  s.condition_estimate = f.cond;
  return s;
}

std::optional<CVec> try_solve_field(const PolyMap& map, const CVec& y, const CVec& x,
                                    double singular_floor, double cond_ceiling) {
  if (x.size() != y.size()) throw DimensionError("direction has wrong dimension");
  const Factored f = factor(map.jacobian_matrix(y));
  if (!(std::abs(f.det) > singular_floor) || !(f.cond <= cond_ceiling)) return std::nullopt;
  return CVec(f.lu.solve(x));
}

CVec solve_field(const PolyMap& map, const CVec& y, const CVec& x, double singular_floor,
                 double cond_ceiling) {
  if (x.size() != y.size()) throw DimensionError("direction has wrong dimension");
  const Factored f = factor(map.jacobian_matrix(y));
  if (!(std::abs(f.det) > singular_floor) || !(f.cond <= cond_ceiling)) {
    throw NearSingularJacobian(std::abs(f.det), f.cond);
  }
  return f.lu.solve(x);
}

std::string_view to_string(KellerVerdict::Kind k) {
  switch (k) {
    case KellerVerdict::Kind::ConstantDet: return "ConstantDet";
    case KellerVerdict::Kind::NonConstantDet: return "NonConstantDet";
    case KellerVerdict::Kind::SingularSomewhere: return "SingularSomewhere";
  }
  return "?";
}

KellerVerdict keller_check(const PolyMap& map, int samples, std::uint64_t seed,
                           const KellerOptions& opts) {
  if (samples < 2) throw InputError("keller_check needs at least 2 samples");
  KellerVerdict v;
  v.det_degree_bound = map.det_degree_bound();

  // Two sampled values closer than det_rtol are indistinguishable, so the
  // effective sample set has about 1/det_rtol elements; Schwartz-Zippel then
  // bounds each coincidence by degree * det_rtol.
  const double per_sample = std::min(1.0, std::max(1, v.det_degree_bound) * opts.det_rtol);
  v.failure_bound_log10 = (samples - 1) * std::log10(per_sample);
  v.failure_bound = std::pow(10.0, v.failure_bound_log10);

  Rng rng(seed);
  std::vector<CVec> points;
  std::vector<Complex> dets;
  for (int k = 0; k < samples; ++k) {
    CVec y = rng.box(map.dim(), opts.sample_box);
    const JacobianSample js = jacobian_at(map, y);
    if (!(std::abs(js.determinant) > opts.singular_floor)) {
      v.kind = KellerVerdict::Kind::SingularSomewhere;
      v.witnesses = {y};
      v.witness_dets = {js.determinant};
      return v;
    }
    points.push_back(std::move(y));
    dets.push_back(js.determinant);
  }
  const Complex ref = dets.front();
  for (std::size_t k = 1; k < dets.size(); ++k) {
    const double scale = std::max(std::abs(ref), std::abs(dets[k]));
    if (std::abs(dets[k] - ref) > opts.det_rtol * scale) {
      v.kind = KellerVerdict::Kind::NonConstantDet;
      v.witnesses = {points.front(), points[k]};
      v.witness_dets = {ref, dets[k]};
      return v;
    }
  }
  v.kind = KellerVerdict::Kind::ConstantDet;
  v.value = ref;
  return v;
}

bool is_odd(const PolyMap& map) {
  for (const auto& p : map.components()) {
    for (const auto& [m, c] : p.terms()) {
      if (m.degree() % 2 == 0) return false;
    }
  }
  return true;
}

}  // namespace etale
