// svr.hpp — linear support vector regression.
//
// Minimizes  1/2 w'w + C * sum_d max(0, |y_d - w'x_d| - eps)^2  by
// deterministic full-batch gradient descent with backtracking step control.
// The intercept is an appended constant-1 feature and is regularized with
// the rest, so the objective is exactly the formula above over the
// augmented vector.

#ifndef NEWSCRED_SVR_HPP
#define NEWSCRED_SVR_HPP

#include <span>
#include <string>
#include <vector>

#include "newscred/util.hpp"

namespace newscred {

struct SvrSettings {
  double C = 1.0;
  double epsilon = 0.1;
  double tol = 1e-8;      // relative objective-improvement stop
  int max_iters = 10000;
  bool standardize = true;  // per-dim z-scoring fit on the training set
};

struct SvrExample {
  FeatureMap features;
  double target = 0;
};

struct SvrModel {
  std::string role;
  std::vector<std::string> registry;  // dimension names, sorted
  std::vector<double> weights;        // one per registry dimension
  double bias = 0;
  std::vector<double> feat_mean;   // standardization; identity when off
  std::vector<double> feat_scale;
  double C = 1.0;
  double epsilon = 0.1;
  bool clamp_output = true;  // rating roles clamp predictions to [1,5]

  /// Dims absent from the map read as 0; dims outside the registry are
  /// ignored (the registry defines the feature space for this role).
  double predict(const FeatureMap& features) const;

  /// Unclamped prediction.
  double predict_raw(const FeatureMap& features) const;

  /// Dense interface; `features` must match the registry exactly.
  /// Throws std::runtime_error on a length mismatch.
  double predict_dense(std::span<const double> features) const;

  std::vector<double> to_dense(const FeatureMap& features) const;
};

struct SvrTrainResult {
  SvrModel model;
  std::vector<double> objective;  // accepted objective value per iteration
  int iterations = 0;
  bool converged = false;
};

/// The registry fixes the feature space; example dims outside it are
/// ignored. Throws when examples is empty or any value is non-finite.
SvrTrainResult svr_train_detailed(const std::string& role,
                                  const std::vector<SvrExample>& examples,
                                  const std::vector<std::string>& registry,
                                  const SvrSettings& settings);

SvrModel svr_train(const std::string& role,
                   const std::vector<SvrExample>& examples,
                   const std::vector<std::string>& registry,
                   const SvrSettings& settings);

}  // namespace newscred

#endif  // NEWSCRED_SVR_HPP
