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

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <atomic>
#include <memory>

namespace coragp::gp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Hyperparameters of the ARD squared-exponential kernel
///
///   k(a, b) = signal_std^2 * exp(-1/2 * sum_j l_j^2 (a_j - b_j)^2)
///
/// Note that l_j multiplies the squared distance, i.e. it is an inverse
/// lengthscale.
struct KernelParams {
  double signal_std = 1.0;
  Vector inv_lengthscales = Vector::Ones(2);
  double noise_std = 0.1;

  Eigen::Index dim() const { return inv_lengthscales.size(); }
  // Throws ContractViolation unless signal_std > 0, all l_j > 0, noise >= 0.
  void validate() const;
};

double kernel_eval(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b,
                   const KernelParams& params);

/// Kernel vector k(P, p) for training inputs stored column-wise (D x M).
void kernel_vector(const Matrix& inputs_by_column, const Eigen::Ref<const Vector>& p,
                   const KernelParams& params, Eigen::Ref<Vector> out);

struct Prediction {
  Vector mean;
  Vector std;  // empty when variance was not requested
};

/// Exact GP posterior for one agent's data set, zero prior mean.
///
/// All outputs share the kernel, so a single Cholesky factor of
/// K(P, P) + noise^2 I serves every output dimension. The factor and the
/// weight matrix (K + noise^2 I)^-1 Y are computed once in fit(); after that
/// the model is immutable (the numerical warning counter is the only mutable
/// member and is atomic).
class Model {
 public:
  /// inputs: M x D (one training point per row); targets: M x m.
  static Model fit(const Matrix& inputs, const Matrix& targets, const KernelParams& params);

  Eigen::Index size() const { return inputs_.cols(); }
  Eigen::Index dim() const { return inputs_.rows(); }
  Eigen::Index outputs() const { return weights_.cols(); }
  const KernelParams& params() const { return params_; }
  const Matrix& inputs_by_column() const { return inputs_; }
  const Matrix& targets() const { return targets_; }

  void kernel_vector(const Eigen::Ref<const Vector>& p, Eigen::Ref<Vector> out) const;
  Vector kernel_vector(const Eigen::Ref<const Vector>& p) const;

  /// Posterior mean from an already computed kernel vector. O(M m).
  void mean_from_kernel(const Eigen::Ref<const Vector>& kvec, Eigen::Ref<Vector> out) const;

  /// Posterior variance from an already computed kernel vector. O(M^2).
  /// Negative round-off is clamped to zero and counted.
  double variance_from_kernel(const Eigen::Ref<const Vector>& kvec) const;

  Prediction predict(const Eigen::Ref<const Vector>& p, bool with_variance) const;

  /// (K + noise^2 I)^-1 v through the cached factor.
  Vector solve(const Eigen::Ref<const Vector>& v) const;

  long numerical_warnings() const { return warnings_->load(std::memory_order_relaxed); }

 private:
  Model() = default;

  Matrix inputs_;   // D x M
  Matrix targets_;  // M x m
  KernelParams params_;
  Eigen::LLT<Matrix> factor_;
  Matrix weights_;  // M x m
  std::unique_ptr<std::atomic<long>> warnings_ = std::make_unique<std::atomic<long>>(0);
};

}  // namespace coragp::gp
