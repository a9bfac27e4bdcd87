#pragma once

#include <Eigen/Core>
#include <vector>

#include "emperor/model.hpp"
#include "emperor/momentindex.hpp"

namespace emperor {

/// Raw univariate moments (m_0, m_1, ..., m_n) of a finite positive measure.
struct MomentSequence {
  std::vector<double> values;
};

/// Degree-k multivariate moments stacked in the canonical monomial order:
/// values[i] = m_{alpha} for alpha = basis.indices[i].
struct MomentVector {
  int degree = 0;
  MonomialBasis basis;
  Eigen::VectorXd values;
};

/// Raw moment E[X^n] of N(mu, sigma^2):
///   m_n = sum_{k=0}^{floor(n/2)} C(n, 2k) (2k-1)!! sigma^{2k} mu^{n-2k},
/// with the convention (-1)!! = 1 so the k = 0 term is mu^n.
double gaussian_raw_moment(double mu, double sigma, int n);

/// Raw moment of a univariate mixture: sum_j pi_j E[Z_j^n].
double univariate_gmm_moment(const UnivariateGMM& gmm, int n);

/// Exact k-th moment of the pushforward of `gmm` along the unit direction
/// `theta`: the slice is itself the univariate mixture
/// sum_j pi_j N(theta' mu_j, theta' Sigma_j theta).
double sliced_gmm_moment(const MultivariateGMM& gmm,
                         const Eigen::Ref<const Eigen::VectorXd>& theta, int k);

/// Exact mixed moment E[X^alpha] of a multivariate mixture. Per component the
/// mean is shifted out (binomial expansion) and the zero-mean part evaluated
/// by Isserlis' theorem as a sum over pair partitions; odd central degrees
/// vanish. The pair-partition enumeration grows factorially, so degrees above
/// `degree_cap` are rejected.
double multivariate_gmm_moment(const MultivariateGMM& gmm, const MultiIndex& alpha,
                               int degree_cap = 6);

/// All degree-k moments of `gmm` stacked in canonical order.
MomentVector multivariate_moment_vector(const MultivariateGMM& gmm, int k,
                                        int degree_cap = 6);

/// Monte Carlo moment (1/N) sum_i x_i^alpha.
double empirical_moment(const PointSet& points, const MultiIndex& alpha);

struct HankelReport {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
};

/// Builds the Hankel matrix H_n = (m_{i+j})_{i,j=0..n} and reports its
/// smallest eigenvalue. The PSD flag uses the relative threshold
/// min_eig >= -1e-10 * ||H_n|| to absorb floating-point noise on exactly
/// singular matrices. Needs at least 2n+1 moments.
HankelReport hankel_psd_check(const MomentSequence& moments, int n);

/// Moments 0..n of a univariate mixture, for feeding the Hankel check.
MomentSequence univariate_moment_sequence(const UnivariateGMM& gmm, int n);

/// Partial sum sum_{k=1}^{terms} m_{2k}^{-1/(2k)} of Carleman's series,
/// where even_moments[k-1] = m_{2k}. Divergence of the full series certifies
/// determinacy; a finite partial sum is a diagnostic only and proves nothing,
/// so this returns the raw value and makes no claim.
double carleman_partial_sum(const std::vector<double>& even_moments, int terms);

}  // namespace emperor
