#pragma once

#include <Eigen/Core>

#include "dtks/geometry.hpp"

namespace dtks {

// Hypothesis family: exponential lifetime, uniform truncation age, coupled
// by the product copula (independence) or the one-parameter FGM copula.
enum class Copula { product, fgm };

// Vectors and matrices indexed by the free parameters: (theta) under the
// product copula, (theta, vartheta) under FGM. Fixed capacity, no heap.
using ParamVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 2, 1>;
using ParamMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 2, 2>;

inline int param_dim(Copula c) { return c == Copula::fgm ? 2 : 1; }

struct ParamBounds {
    double eps_theta = 1e-6;     // theta in (eps_theta, 1/eps_theta)
    double eps_vartheta = 1e-6;  // vartheta in (eps_vartheta - 1, 1 - eps_vartheta)
};

struct ModelParams {
    Copula copula = Copula::product;
    double theta = 1.0;
    double vartheta = 0.0;  // fixed 0 under the product copula
};

bool valid(const ModelParams& p, const ParamBounds& b = {});
void require_valid(const ModelParams& p, const ParamBounds& b = {});

// Joint density of (X,T) on [0,inf) x [0,G]; zero outside.
double density(const ModelParams& p, const StudyWindow& w, const Point& pt);

// Selection probability P((X,T) in D). Closed form; throws if the evaluated
// value leaves (0,1), which signals parameter/window misuse.
double alpha(const ModelParams& p, const StudyWindow& w);

// Analytic gradient of alpha. alpha is affine in vartheta, so the second
// FGM coordinate is exact and independent of vartheta.
ParamVector alpha_grad(const ModelParams& p, const StudyWindow& w);

// Score contribution of a single observation; the zero vector off D.
// Signs follow the estimating-equation conventions of the two families
// (they differ by an overall sign in the theta coordinate, which neither
// root finding nor any psi*psi^T moment can see).
ParamVector score(const ModelParams& p, const StudyWindow& w, const Point& pt);

// Same score with alpha and its gradient precomputed; use this inside sums
// and quadratures.
class ScoreFunction {
  public:
    ScoreFunction(const ModelParams& p, const StudyWindow& w);
    ParamVector operator()(const Point& pt) const;

  private:
    ModelParams params_;
    StudyWindow window_;
    double ratio_theta_ = 0.0;     // d(alpha)/d(theta) / alpha
    double ratio_vartheta_ = 0.0;  // d(alpha)/d(vartheta) / alpha
};

// E(psi psi^T), symmetric positive definite. Product copula: closed form.
// FGM: adaptive quadrature over D. Throws if not positive definite.
ParamMatrix fisher_info(const ModelParams& p, const StudyWindow& w);

// Influence function of the Z-estimator, phi = -(E d-score)^{-1} psi,
// assembled on demand from score and fisher_info.
ParamVector influence(const ModelParams& p, const StudyWindow& w, const Point& pt);

// Kendall rank correlation of the FGM copula.
double kendall_tau(double vartheta);

}  // namespace dtks
