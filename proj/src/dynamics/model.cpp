#include <algorithm>
#include <cmath>
#include <random>

#include "skorohull/dynamics.hpp"
#include "skorohull/errors.hpp"

namespace skorohull::dynamics {
namespace {

void check_x0(int dim, const Vector& x0) {
  require(dim >= 1, "model dimension must be >= 1");
  if (x0.size() != dim) throw DimensionMismatch(dim, x0.size());
  require(x0.allFinite(), "x0 must be finite");
}

double operator_norm(const Matrix& a) {
  if (a.size() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()[0];
}

double reciprocal_condition(const Matrix& a) {
  if (!a.allFinite()) return 0.0;
  if (a.size() == 1) return a(0, 0) != 0.0 ? 1.0 : 0.0;
  if (a.isDiagonal(0.0)) {
    const Vector d = a.diagonal().cwiseAbs();
    const double hi = d.maxCoeff();
    return hi > 0.0 ? d.minCoeff() / hi : 0.0;
  }
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  return s[0] > 0.0 ? s[s.size() - 1] / s[0] : 0.0;
}

}  // namespace

SdeModel ornstein_uhlenbeck(int dim, double theta, double s, Vector x0) {
  check_x0(dim, x0);
  require(theta >= 0.0, "OU theta must be >= 0");
  require(s > 0.0, "diffusion scale must be > 0");
  SdeModel model;
  model.name = "ou";
  model.dim = dim;
  model.drift = [theta](const Vector& x) -> Vector { return -theta * x; };
  model.diffusion = [s, dim](const Vector&) -> Matrix {
    return s * Matrix::Identity(dim, dim);
  };
  model.x0 = std::move(x0);
  model.lip_drift = theta;
  model.lip_diffusion = 0.0;
  model.constant_diffusion = true;
  return model;
}

SdeModel brownian(int dim, double s, Vector x0) {
  SdeModel model = ornstein_uhlenbeck(dim, 0.0, s, std::move(x0));
  model.name = "brownian";
  model.drift = [dim](const Vector&) -> Vector { return Vector::Zero(dim); };
  return model;
}

SdeModel tanh_drift(int dim, double s, Vector x0) {
  SdeModel model = ornstein_uhlenbeck(dim, 0.0, s, std::move(x0));
  model.name = "tanh";
  model.drift = [](const Vector& x) -> Vector {
    return -x.array().tanh().matrix();
  };
  model.lip_drift = 1.0;
  return model;
}

SdeModel state_dependent_sigma(int dim, double theta, double s0, double s1,
                               Vector x0) {
  check_x0(dim, x0);
  require(theta >= 0.0, "theta must be >= 0");
  require(s0 > std::abs(s1), "state-dependent sigma requires s0 > |s1|");
  SdeModel model;
  model.name = "state_sigma";
  model.dim = dim;
  model.drift = [theta](const Vector& x) -> Vector { return -theta * x; };
  model.diffusion = [s0, s1](const Vector& x) -> Matrix {
    return (s0 + s1 * x.array().tanh()).matrix().asDiagonal();
  };
  model.x0 = std::move(x0);
  model.lip_drift = theta;
  model.lip_diffusion = std::abs(s1);
  model.constant_diffusion = s1 == 0.0;
  return model;
}

Matrix checked_diffusion(const SdeModel& model, const Vector& x) {
  Matrix sigma = model.diffusion(x);
  if (sigma.rows() != model.dim || sigma.cols() != model.dim) {
    throw DimensionMismatch(model.dim, sigma.rows());
  }
  if (reciprocal_condition(sigma) < 1e-12) {
    throw SingularMatrix("diffusion matrix is singular at the evaluated point");
  }
  return sigma;
}

std::pair<double, double> lipschitz_ratios(const SdeModel& model,
                                           const Vector& lo, const Vector& hi,
                                           int pairs, std::uint64_t seed) {
  if (lo.size() != model.dim) throw DimensionMismatch(model.dim, lo.size());
  if (hi.size() != model.dim) throw DimensionMismatch(model.dim, hi.size());
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&] {
    Vector v(model.dim);
    for (int k = 0; k < model.dim; ++k) v[k] = lo[k] + (hi[k] - lo[k]) * unit(gen);
    return v;
  };
  double drift_ratio = 0.0;
  double diffusion_ratio = 0.0;
  for (int p = 0; p < pairs; ++p) {
    const Vector u = draw();
    const Vector v = draw();
    const double dist = (u - v).norm();
    if (dist == 0.0) continue;
    const double db = (model.drift(u) - model.drift(v)).norm();
    const double ds = operator_norm(model.diffusion(u) - model.diffusion(v));
    auto ratio = [dist](double diff, double lip) {
      if (lip == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      return diff / (lip * dist);
    };
    drift_ratio = std::max(drift_ratio, ratio(db, model.lip_drift));
    diffusion_ratio = std::max(diffusion_ratio, ratio(ds, model.lip_diffusion));
  }
  return {drift_ratio, diffusion_ratio};
}

}  // namespace skorohull::dynamics
