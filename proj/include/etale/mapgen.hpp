#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "etale/polyring.hpp"
#include "json.hpp"

namespace etale {

class DegreeOverflow : public InputError {
public:
  using InputError::InputError;
};

/// y_target += p(y), where p does not involve y_target.
struct Shear {
  std::size_t target = 0;
  Polynomial p;
};

/// y_j *= factors[j].
struct DiagonalScale {
  std::vector<Complex> factors;
};

/// y'_j = y_{perm[j]}.
struct Permutation {
  std::vector<std::size_t> perm;
};

using ElementaryStep = std::variant<Shear, DiagonalScale, Permutation>;

/// Steps are applied left to right: realize({a, b}) = b o a.
struct AutomorphismRecipe {
  std::size_t n = 0;
  std::vector<ElementaryStep> steps;
};

/// Throws InputError when a step is malformed for dimension n.
void validate(const AutomorphismRecipe& recipe);

/// Jacobian determinant of realize(recipe): product of scale factors and
/// permutation signs.
Complex recipe_determinant(const AutomorphismRecipe& recipe);

PolyMap realize(const AutomorphismRecipe& recipe, int max_degree = 64);

AutomorphismRecipe analytic_inverse(const AutomorphismRecipe& recipe);

/// Evaluates the recipe step by step without expanding it.
CVec apply_recipe(const AutomorphismRecipe& recipe, const CVec& y);

/// x + ((A x)_1^3, ..., (A x)_n^3).
PolyMap druzkowski(const CMat& a);

/// Phi x Psi acting on disjoint variable blocks.
PolyMap direct_product(const PolyMap& first, const PolyMap& second);

/// identity_<n>, square_1d, cube_1d, triangular_odd_n2, pinchuk.
PolyMap named_example(std::string_view name);

/// The coefficient document the pinchuk fixture is built from.
std::string_view pinchuk_document();

struct RecipeFamily {
  std::size_t min_n = 2;
  std::size_t max_n = 4;
  int max_steps = 6;
  int max_shear_degree = 4;
  // Cap on the realized degree; keeps expanded maps small enough to track.
  int max_total_degree = 16;
  // Shear monomials of degree k get coefficients of size ~ scale^(1-k), so
  // each step moves points of norm ~scale by a comparable amount.
  double scale = 10.0;
};

/// Random tame automorphism with Phi(0) = 0. Deterministic in seed.
AutomorphismRecipe random_recipe(std::uint64_t seed, const RecipeFamily& family = {});

nlohmann::json recipe_to_json(const AutomorphismRecipe& recipe);
AutomorphismRecipe recipe_from_json(const nlohmann::json& doc);
AutomorphismRecipe load_recipe(const std::string& path);

}  // namespace etale
