#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mvlab/fields.hpp"
#include "mvlab/measure.hpp"

namespace mvlab {

/// f(t,x,u,mu) = lambda_f |u|^{p-2} u + phi(t,x) * hbar(mu),
/// hbar(mu) = (1/N) sum_i min(||xi_i||, h_cap).
struct DriftF {
  int p = 4;
  double lambda_f = 1.0;
  SpaceTimeField phi;
  double h_cap = 1.0;
};

/// g(t,x,u,mu) = psi_g(t,x) (c0 + c1 tanh(u) + c2 hbar_1(mu)),
/// hbar_1(mu) = (1/N) sum_i min(||xi_i||, 1).
struct DriftG {
  SpaceTimeField psi_g;
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Truncated noise: mode k acts through sigma_{1,k}(t,x) + kappa(x) sigma_{2,k}(t,u(x),mu)
/// with sigma_{2,k}(t,s,mu) = beta_k sqrt(mu(||.||^2)) + gamma_k s.
struct NoiseSigma {
  std::vector<SpaceTimeField> sigma1;
  SpaceTimeField kappa;
  std::vector<double> beta;
  std::vector<double> gamma;

  std::size_t modes() const noexcept { return sigma1.size(); }
  /// L_{sigma,k} = max(beta_k, gamma_k)
  double mode_lipschitz(std::size_t k) const { return std::max(beta.at(k), gamma.at(k)); }
};

struct CoefficientSet {
  DriftF f;
  DriftG g;
  NoiseSigma sigma;

  /// Structural checks only (p even, sizes, nonnegative beta/gamma). Whether
  /// the inequalities hold is the job of verify_conditions.
  void validate() const;
  bool measure_dependent() const noexcept;
};

// Pointwise kernels.
double f_value(const DriftF& f, double t, const Point& x, double u, const EmpiricalMeasure& mu);
double g_value(const DriftG& g, double t, const Point& x, double u, const EmpiricalMeasure& mu);
double sigma2_value(const NoiseSigma& s, std::size_t k, double u, const EmpiricalMeasure& mu);

GridFunction eval_f(const DriftF& f, double t, const GridFunction& u, const EmpiricalMeasure& mu);
GridFunction eval_g(const DriftG& g, double t, const GridFunction& u, const EmpiricalMeasure& mu);
/// sum_k (sigma_{1,k}(t) + kappa sigma_{2,k}(t,u,mu)) theta_k
GridFunction apply_sigma(const NoiseSigma& s, double t, const GridFunction& u, const EmpiricalMeasure& mu,
                         std::span<const double> theta);
/// Hilbert-Schmidt norm squared of sigma(t,u,mu): l2 -> H.
double hs_norm_sq(const NoiseSigma& s, double t, const GridFunction& u, const EmpiricalMeasure& mu);
/// M_{sigma,T} = 2 sup_t ||sigma_1(t)||^2 + 8 ||kappa||^2 ||beta||^2 + 4 ||kappa||_inf^2 ||gamma||^2
double hs_bound_constant(const NoiseSigma& s, const SpatialGrid& grid, double horizon);
/// L_sigma = 2 sum_k L_{sigma,k}^2 (||kappa||_inf^2 + ||kappa||^2)
double sigma_lipschitz_constant(const NoiseSigma& s, const SpatialGrid& grid);

/// Coefficients pre-sampled on a grid for time stepping. Every field factors
/// as (time factor) x (spatial profile), so profiles are sampled once.
class DiscreteCoefficients {
 public:
  DiscreteCoefficients(CoefficientSet set, const SpatialGrid& grid);

  const CoefficientSet& set() const noexcept { return set_; }
  const SpatialGrid& grid() const noexcept { return grid_; }
  std::size_t modes() const noexcept { return set_.sigma.modes(); }

  /// Writes f and g at (t, u, mu) into the given outputs.
  void drifts(double t, const GridFunction& u, const EmpiricalMeasure& mu, GridFunction& f_out,
              GridFunction& g_out) const;
  /// out += sigma(t, u, mu) theta
  void add_sigma(double t, const GridFunction& u, const EmpiricalMeasure& mu, std::span<const double> theta,
                 GridFunction& out) const;

 private:
  struct Profile {
    std::vector<double> values;
    bool scales_with_time = false;
    bool zero = true;
    double factor(double t) const noexcept { return scales_with_time ? 1.0 + t : 1.0; }
  };
  Profile sample(const SpaceTimeField& field) const;

  CoefficientSet set_;
  SpatialGrid grid_;
  Profile phi_;
  Profile psi_g_;
  Profile kappa_;
  std::vector<Profile> sigma1_;
};

/// Constants of the structural conditions for the built-in families.
struct StructuralConstants {
  double p = 0.0;
  double lambda1 = 0.0;  ///< coercivity
  double lambda2 = 0.0;  ///< local Lipschitz in u
  double lambda3 = 0.0;  ///< growth
  double lambda4 = 0.0;  ///< strong dissipativity
  std::vector<double> mode_lipschitz;
  double hs_bound = 0.0;
  double sigma_lipschitz = 0.0;
};

/// psi-weights at a point (t, x).
struct PsiWeights {
  double psi1 = 0.0, psi2 = 0.0, psi3 = 0.0, psi4 = 0.0, psi5 = 0.0, psi_g = 0.0;
};

StructuralConstants structural_constants(const CoefficientSet& c, const SpatialGrid& grid, double horizon);
PsiWeights psi_weights(const CoefficientSet& c, double t, const Point& x);

struct ConditionCheck {
  std::string id;      ///< e.g. "f-coercivity"
  std::string clause;  ///< "Sigma1", "Sigma2", "Sigma3", "strong-dissipativity"
  std::string inequality;
  double worst_slack = 0.0;  ///< min over draws of (rhs - lhs) / max(1, |lhs|, |rhs|)
  int draws = 0;
  bool passed = true;
};

struct ConditionReport {
  std::vector<ConditionCheck> checks;
  bool all_passed() const noexcept;
  /// Checks that failed, formatted "clause:id".
  std::vector<std::string> violations() const;
};

inline constexpr double kConditionSlackTolerance = 1e-9;

/// Randomized audit of every structural inequality on `sample_budget` draws of
/// (t, x, u, mu). Deterministic in `seed`.
ConditionReport verify_conditions(const CoefficientSet& c, const SpatialGrid& grid, double horizon,
                                  int sample_budget, std::uint64_t seed, bool strong_dissipativity = true);

}  // namespace mvlab
