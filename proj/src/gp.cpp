// Copyright 2026 The coragp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "coragp/gp.hpp"

#include <cmath>
#include <sstream>

#include "coragp/error.hpp"

namespace coragp::gp {

void KernelParams::validate() const {
  require(signal_std > 0.0 && std::isfinite(signal_std), "kernel: signal_std must be positive");
  require(inv_lengthscales.size() > 0, "kernel: at least one inverse lengthscale is required");
  for (Eigen::Index j = 0; j < inv_lengthscales.size(); ++j) {
    require(inv_lengthscales[j] > 0.0 && std::isfinite(inv_lengthscales[j]),
            "kernel: inverse lengthscales must be positive");
  }
  require(noise_std >= 0.0 && std::isfinite(noise_std), "kernel: noise_std must be nonnegative");
}

double kernel_eval(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b,
                   const KernelParams& params) {
  require(a.size() == b.size() && a.size() == params.dim(),
          "kernel_eval: dimension mismatch between points and lengthscales");
  const double quad = ((a - b).cwiseProduct(params.inv_lengthscales)).squaredNorm();
  return params.signal_std * params.signal_std * std::exp(-0.5 * quad);
}

void kernel_vector(const Matrix& inputs_by_column, const Eigen::Ref<const Vector>& p,
                   const KernelParams& params, Eigen::Ref<Vector> out) {
  require(p.size() == inputs_by_column.rows() && p.size() == params.dim(),
          "kernel_vector: dimension mismatch");
  require(out.size() == inputs_by_column.cols(), "kernel_vector: output size mismatch");
  const Vector scaled_p = p.cwiseProduct(params.inv_lengthscales);
  // Accumulate the scaled squared distance one input dimension at a time so
  // the exp below runs over a contiguous array.
  out.setZero();
  for (Eigen::Index d = 0; d < inputs_by_column.rows(); ++d) {
    const double l = params.inv_lengthscales[d];
    out.array() += (inputs_by_column.row(d).transpose().array() * l - scaled_p[d]).square();
  }
  out = (params.signal_std * params.signal_std) * (-0.5 * out.array()).exp();
}

Model Model::fit(const Matrix& inputs, const Matrix& targets, const KernelParams& params) {
  params.validate();
  require(inputs.rows() >= 1, "fit: at least one training point is required");
  require(inputs.cols() == params.dim(), "fit: input dimension does not match lengthscales");
  require(targets.rows() == inputs.rows(), "fit: inputs and targets have different row counts");
  require(targets.cols() >= 1, "fit: at least one output dimension is required");

  Model model;
  model.inputs_ = inputs.transpose();
  model.targets_ = targets;
  model.params_ = params;

  const Eigen::Index count = inputs.rows();
  Matrix gram(count, count);
  Vector column(count);
  for (Eigen::Index b = 0; b < count; ++b) {
    gp::kernel_vector(model.inputs_, model.inputs_.col(b), params, column);
    gram.col(b) = column;
  }
  gram.diagonal().array() += params.noise_std * params.noise_std;

  model.factor_.compute(gram);
  if (model.factor_.info() != Eigen::Success) {
    throw FactorizationError(
        "fit: Gram matrix K(P,P) + noise^2 I is not positive definite "
        "(duplicate training inputs with zero noise?)");
  }
  // LLT only rejects non-positive pivots; a pivot that is pure round-off
  // means the matrix is singular for practical purposes.
  const double max_diag = gram.diagonal().maxCoeff();
  const double min_pivot = model.factor_.matrixLLT().diagonal().array().square().minCoeff();
  if (min_pivot <= 1e-13 * max_diag) {
    std::ostringstream msg;
    msg << "fit: Gram matrix K(P,P) + noise^2 I is numerically singular (smallest pivot "
        << min_pivot << "; duplicate training inputs with zero noise?)";
    throw FactorizationError(msg.str());
  }
  model.weights_ = model.factor_.solve(targets);
  return model;
}

void Model::kernel_vector(const Eigen::Ref<const Vector>& p, Eigen::Ref<Vector> out) const {
  gp::kernel_vector(inputs_, p, params_, out);
}

Vector Model::kernel_vector(const Eigen::Ref<const Vector>& p) const {
  Vector out(size());
  gp::kernel_vector(inputs_, p, params_, out);
  return out;
}

void Model::mean_from_kernel(const Eigen::Ref<const Vector>& kvec, Eigen::Ref<Vector> out) const {
  require(kvec.size() == size(), "mean_from_kernel: kernel vector size mismatch");
  require(out.size() == outputs(), "mean_from_kernel: output size mismatch");
  out.noalias() = weights_.transpose() * kvec;
}

double Model::variance_from_kernel(const Eigen::Ref<const Vector>& kvec) const {
  require(kvec.size() == size(), "variance_from_kernel: kernel vector size mismatch");
  const Vector v = factor_.matrixL().solve(kvec);
  const double var = params_.signal_std * params_.signal_std - v.squaredNorm();
  if (var < 0.0) {
    warnings_->fetch_add(1, std::memory_order_relaxed);
    return 0.0;
  }
  return var;
}

Prediction Model::predict(const Eigen::Ref<const Vector>& p, bool with_variance) const {
  const Vector kvec = kernel_vector(p);
  Prediction out;
  out.mean.resize(outputs());
  mean_from_kernel(kvec, out.mean);
  if (with_variance) {
    // Shared hyperparameters: one variance for every output.
    out.std = Vector::Constant(outputs(), std::sqrt(variance_from_kernel(kvec)));
  }
  return out;
}

Vector Model::solve(const Eigen::Ref<const Vector>& v) const {
  require(v.size() == size(), "solve: size mismatch");
  return factor_.solve(v);
}

}  // namespace coragp::gp
