#include "etale/mapgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "etale/map_io.hpp"
#include "etale/random.hpp"
#include "pinchuk_data.hpp"

namespace etale {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int permutation_sign(const std::vector<std::size_t>& perm) {
  std::vector<bool> seen(perm.size(), false);
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = perm[j]) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

}  // namespace

void validate(const AutomorphismRecipe& recipe) {
  const std::size_t n = recipe.n;
  if (n == 0) throw InputError("recipe dimension must be positive");
  for (const auto& step : recipe.steps) {
    std::visit(Overloaded{
                   [n](const Shear& s) {
                     if (s.target >= n) throw InputError("shear target out of range");
                     if (s.p.dim() != n) throw DimensionError("shear polynomial has wrong dimension");
                     if (s.p.degree_in(s.target) != 0) {
                       throw InputError("shear polynomial involves its own target variable");
                     }
                   },
                   [n](const DiagonalScale& s) {
                     if (s.factors.size() != n) throw DimensionError("scale needs n factors");
                     for (auto f : s.factors) {
                       if (f == Complex{}) throw InputError("scale factor must be nonzero");
                     }
                   },
                   [n](const Permutation& p) {
                     if (p.perm.size() != n) throw DimensionError("permutation needs n entries");
                     std::vector<bool> hit(n, false);
                     for (auto k : p.perm) {
                       if (k >= n || hit[k]) throw InputError("permutation is not a bijection");
                       hit[k] = true;
                     }
                   },
               },
               step);
  }
}

Complex recipe_determinant(const AutomorphismRecipe& recipe) {
  Complex det = 1.0;
  for (const auto& step : recipe.steps) {
    if (const auto* s = std::get_if<DiagonalScale>(&step)) {
      for (auto f : s->factors) det *= f;
    } else if (const auto* p = std::get_if<Permutation>(&step)) {
      det *= static_cast<double>(permutation_sign(p->perm));
    }
  }
  return det;
}

PolyMap realize(const AutomorphismRecipe& recipe, int max_degree) {
  validate(recipe);
  const std::size_t n = recipe.n;
  std::vector<Polynomial> comps;
  for (std::size_t i = 0; i < n; ++i) comps.push_back(Polynomial::variable(n, i));

  for (const auto& step : recipe.steps) {
    if (const auto* s = std::get_if<Shear>(&step)) {
      const int bound = s->p.compose_degree_bound(comps);
      if (bound > max_degree) {
        throw DegreeOverflow("composition degree " + std::to_string(bound) + " exceeds max_degree " +
                             std::to_string(max_degree));
      }
      comps[s->target] += s->p.compose(comps);
    } else if (const auto* d = std::get_if<DiagonalScale>(&step)) {
      for (std::size_t j = 0; j < n; ++j) comps[j] = comps[j] * d->factors[j];
    } else if (const auto* p = std::get_if<Permutation>(&step)) {
      std::vector<Polynomial> next;
      for (std::size_t j = 0; j < n; ++j) next.push_back(comps[p->perm[j]]);
      comps = std::move(next);
    }
  }
  return PolyMap(std::move(comps));
}

AutomorphismRecipe analytic_inverse(const AutomorphismRecipe& recipe) {
  validate(recipe);
  AutomorphismRecipe inv{recipe.n, {}};
  for (auto it = recipe.steps.rbegin(); it != recipe.steps.rend(); ++it) {
    std::visit(Overloaded{
                   [&](const Shear& s) { inv.steps.emplace_back(Shear{s.target, -s.p}); },
                   [&](const DiagonalScale& s) {
                     DiagonalScale r;
                     for (auto f : s.factors) r.factors.push_back(1.0 / f);
                     inv.steps.emplace_back(std::move(r));
                   },
                   [&](const Permutation& p) {
                     Permutation r{std::vector<std::size_t>(p.perm.size())};
                     for (std::size_t j = 0; j < p.perm.size(); ++j) r.perm[p.perm[j]] = j;
                     inv.steps.emplace_back(std::move(r));
                   },
               },
               *it);
  }
  return inv;
}

CVec apply_recipe(const AutomorphismRecipe& recipe, const CVec& y) {
  if (static_cast<std::size_t>(y.size()) != recipe.n) throw DimensionError("point has wrong dimension");
  CVec z = y;
  for (const auto& step : recipe.steps) {
    if (const auto* s = std::get_if<Shear>(&step)) {
      z[static_cast<Eigen::Index>(s->target)] += s->p.eval(z);
    } else if (const auto* d = std::get_if<DiagonalScale>(&step)) {
      for (std::size_t j = 0; j < recipe.n; ++j) z[static_cast<Eigen::Index>(j)] *= d->factors[j];
    } else if (const auto* p = std::get_if<Permutation>(&step)) {
      CVec next(z.size());
      for (std::size_t j = 0; j < recipe.n; ++j) {
        next[static_cast<Eigen::Index>(j)] = z[static_cast<Eigen::Index>(p->perm[j])];
      }
      z = next;
    }
  }
  return z;
}

PolyMap druzkowski(const CMat& a) {
  if (a.rows() != a.cols()) throw DimensionError("Druzkowski matrix must be square");
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<Polynomial> comps;
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial linear(n);
    for (std::size_t j = 0; j < n; ++j) {
      linear.add_term(Monomial::unit(n, j), a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    comps.push_back(Polynomial::variable(n, i) + linear.pow(3));
  }
  return PolyMap(std::move(comps));
}

PolyMap direct_product(const PolyMap& first, const PolyMap& second) {
  const std::size_t n1 = first.dim();
  const std::size_t n = n1 + second.dim();
  auto embed = [n](const Polynomial& p, std::size_t offset) {
    Polynomial out(n);
    for (const auto& [m, c] : p.terms()) {
      std::vector<int> exps(n, 0);
      std::copy(m.exponents().begin(), m.exponents().end(), exps.begin() + static_cast<std::ptrdiff_t>(offset));
      out.add_term(Monomial(std::move(exps)), c);
    }
    return out;
  };
  std::vector<Polynomial> comps;
  for (const auto& p : first.components()) comps.push_back(embed(p, 0));
  for (const auto& p : second.components()) comps.push_back(embed(p, n1));
  return PolyMap(std::move(comps));
}

std::string_view pinchuk_document() { return kPinchukDocument; }

PolyMap named_example(std::string_view name) {
  constexpr std::string_view identity_prefix = "identity_";
  if (name.starts_with(identity_prefix)) {
    const auto digits = name.substr(identity_prefix.size());
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || n == 0) {
      throw InputError("bad identity dimension in '" + std::string(name) + "'");
    }
    return PolyMap::identity(n);
  }
  if (name == "square_1d") return PolyMap({Polynomial::variable(1, 0).pow(2)});
  if (name == "cube_1d") return PolyMap({Polynomial::variable(1, 0).pow(3)});
  if (name == "triangular_odd_n2") {
    CMat a = CMat::Zero(2, 2);
    a(0, 1) = 1.0;
    return druzkowski(a);
  }
  if (name == "pinchuk") return parse_map(pinchuk_document());
  throw InputError("unknown example '" + std::string(name) + "'");
}

// ----------------------------------------------------------- random family

AutomorphismRecipe random_recipe(std::uint64_t seed, const RecipeFamily& family) {
  Rng rng(seed);
  for (;;) {
    AutomorphismRecipe r;
    r.n = static_cast<std::size_t>(rng.integer(static_cast<int>(family.min_n), static_cast<int>(family.max_n)));
    const int steps = rng.integer(1, family.max_steps);
    for (int s = 0; s < steps; ++s) {
      const double kind = rng.uniform();
      if (kind < 0.6) {
        Shear sh{static_cast<std::size_t>(rng.integer(0, static_cast<int>(r.n) - 1)), Polynomial(r.n)};
        const int nterms = rng.integer(1, 3);
        for (int k = 0; k < nterms; ++k) {
          const int deg = rng.integer(1, family.max_shear_degree);
          std::vector<int> exps(r.n, 0);
          for (int d = 0; d < deg; ++d) {
            std::size_t var = static_cast<std::size_t>(rng.integer(0, static_cast<int>(r.n) - 2));
            if (var >= sh.target) ++var;
            ++exps[var];
          }
          const double mag = rng.uniform(0.2, 1.0) * std::pow(family.scale, 1 - deg) / nterms;
          const double arg = rng.uniform(0.0, 2.0 * std::numbers::pi);
          sh.p.add_term(Monomial(std::move(exps)), std::polar(mag, arg));
        }
        r.steps.emplace_back(std::move(sh));
      } else if (kind < 0.8) {
        DiagonalScale d;
        for (std::size_t j = 0; j < r.n; ++j) {
          d.factors.push_back(std::polar(rng.uniform(0.5, 2.0), rng.uniform(0.0, 2.0 * std::numbers::pi)));
        }
        r.steps.emplace_back(std::move(d));
      } else {
        Permutation p{std::vector<std::size_t>(r.n)};
        for (std::size_t j = 0; j < r.n; ++j) p.perm[j] = j;
        for (std::size_t j = r.n - 1; j > 0; --j) {
          std::swap(p.perm[j], p.perm[static_cast<std::size_t>(rng.integer(0, static_cast<int>(j)))]);
        }
        r.steps.emplace_back(std::move(p));
      }
    }
    try {
      realize(r, family.max_total_degree);
      return r;
    } catch (const DegreeOverflow&) {
      // resample
    }
  }
}

// -------------------------------------------------------------------- JSON

json recipe_to_json(const AutomorphismRecipe& recipe) {
  json steps = json::array();
  for (const auto& step : recipe.steps) {
    std::visit(Overloaded{
                   [&](const Shear& s) {
                     steps.push_back({{"shear", {{"i", s.target}, {"p", polynomial_to_json(s.p)}}}});
                   },
                   [&](const DiagonalScale& s) {
                     json f = json::array();
                     for (auto c : s.factors) f.push_back(complex_to_json(c));
                     steps.push_back({{"scale", f}});
                   },
                   [&](const Permutation& p) { steps.push_back({{"perm", p.perm}}); },
               },
               step);
  }
  return {{"n", recipe.n}, {"steps", steps}};
}

AutomorphismRecipe recipe_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("steps")) {
    throw InputError("recipe document needs \"n\" and \"steps\"");
  }
  if (!doc.at("n").is_number_integer() || doc.at("n").get<long long>() < 1) {
    throw InputError("\"n\" must be a positive integer");
  }
  AutomorphismRecipe r;
  r.n = doc.at("n").get<std::size_t>();
  for (const auto& s : doc.at("steps")) {
    if (s.contains("shear")) {
      const json& sh = s.at("shear");
      if (!sh.contains("i") || !sh.at("i").is_number_unsigned()) throw InputError("shear needs index \"i\"");
      r.steps.emplace_back(Shear{sh.at("i").get<std::size_t>(), polynomial_from_json(sh.at("p"), r.n)});
    } else if (s.contains("scale")) {
      DiagonalScale d;
      for (const auto& c : s.at("scale")) d.factors.push_back(complex_from_json(c));
      r.steps.emplace_back(std::move(d));
    } else if (s.contains("perm")) {
      Permutation p;
      for (const auto& k : s.at("perm")) {
        if (!k.is_number_unsigned()) throw InputError("permutation entries must be non-negative integers");
        p.perm.push_back(k.get<std::size_t>());
      }
      r.steps.emplace_back(std::move(p));
    } else {
      throw InputError("unknown recipe step");
    }
  }
  validate(r);
  return r;
}

AutomorphismRecipe load_recipe(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open recipe file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return recipe_from_json(json::parse(buf.str()));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed recipe document: ") + e.what());
  }
}

}  // namespace etale
