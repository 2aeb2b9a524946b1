#include "newscred/svr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace newscred {

namespace {

double objective(const std::vector<std::vector<double>>& x,
                 const std::vector<double>& y, const std::vector<double>& w,
                 double c, double eps) {
  double obj = 0;
  for (double wi : w) obj += 0.5 * wi * wi;
  for (std::size_t d = 0; d < x.size(); ++d) {
    double pred = 0;
    for (std::size_t i = 0; i < w.size(); ++i) pred += w[i] * x[d][i];
    const double slack = std::abs(y[d] - pred) - eps;
    if (slack > 0) obj += c * slack * slack;
  }
  return obj;
}

std::vector<double> gradient(const std::vector<std::vector<double>>& x,
                             const std::vector<double>& y,
                             const std::vector<double>& w, double c,
                             double eps) {
  std::vector<double> g = w;  // d/dw of the ridge term
  for (std::size_t d = 0; d < x.size(); ++d) {
    double pred = 0;
    for (std::size_t i = 0; i < w.size(); ++i) pred += w[i] * x[d][i];
    const double residual = y[d] - pred;
    const double slack = std::abs(residual) - eps;
    if (slack <= 0) continue;  // inside the tube (and at the kink): 0
    const double sign = residual >= 0 ? 1.0 : -1.0;
    const double coef = -2.0 * c * slack * sign;
    for (std::size_t i = 0; i < w.size(); ++i) g[i] += coef * x[d][i];
  }
  return g;
}

}  // namespace

std::vector<double> SvrModel::to_dense(const FeatureMap& features) const {
  std::vector<double> dense(registry.size(), 0.0);
  for (std::size_t i = 0; i < registry.size(); ++i) {
    auto it = features.find(registry[i]);
    if (it != features.end()) dense[i] = it->second;
  }
  return dense;
}

double SvrModel::predict_dense(std::span<const double> features) const {
  if (features.size() != registry.size()) {
    throw std::runtime_error("svr: registry mismatch (" +
                             std::to_string(features.size()) + " vs " +
                             std::to_string(registry.size()) + " dims)");
  }
  double out = bias;
  for (std::size_t i = 0; i < registry.size(); ++i) {
    const double z = (features[i] - feat_mean[i]) / feat_scale[i];
    out += weights[i] * z;
  }
  if (clamp_output) out = clamp_rating(out);
  return out;
}

double SvrModel::predict(const FeatureMap& features) const {
  return predict_dense(to_dense(features));
}

double SvrModel::predict_raw(const FeatureMap& features) const {
  const auto dense = to_dense(features);
  double out = bias;
  for (std::size_t i = 0; i < registry.size(); ++i) {
    const double z = (dense[i] - feat_mean[i]) / feat_scale[i];
    out += weights[i] * z;
  }
  return out;
}

SvrTrainResult svr_train_detailed(const std::string& role,
                                  const std::vector<SvrExample>& examples,
                                  const std::vector<std::string>& registry,
                                  const SvrSettings& settings) {
  if (examples.empty()) {
    throw std::runtime_error("svr: no training examples for role " + role);
  }
  if (settings.C <= 0) throw std::runtime_error("svr: C must be > 0");
  if (settings.epsilon < 0) throw std::runtime_error("svr: epsilon must be >= 0");

  const std::size_t dims = registry.size();
  SvrModel model;
  model.role = role;
  model.registry = registry;
  model.C = settings.C;
  model.epsilon = settings.epsilon;
  model.feat_mean.assign(dims, 0.0);
  model.feat_scale.assign(dims, 1.0);

  // Dense training matrix in registry order.
  std::vector<std::vector<double>> raw;
  std::vector<double> y;
  raw.reserve(examples.size());
  for (const auto& ex : examples) {
    if (!std::isfinite(ex.target)) {
      throw std::runtime_error("svr: non-finite target for role " + role);
    }
    raw.push_back(model.to_dense(ex.features));
    for (double v : raw.back()) {
      if (!std::isfinite(v)) {
        throw std::runtime_error("svr: non-finite feature for role " + role);
      }
    }
    y.push_back(ex.target);
  }

  if (settings.standardize && dims > 0) {
    const double n = static_cast<double>(raw.size());
    for (std::size_t i = 0; i < dims; ++i) {
      double mean = 0;
      for (const auto& row : raw) mean += row[i];
      mean /= n;
      double var = 0;
      for (const auto& row : raw) var += (row[i] - mean) * (row[i] - mean);
      var /= n;
      const double sd = std::sqrt(var);
      model.feat_mean[i] = mean;
      model.feat_scale[i] = sd > 0 ? sd : 1.0;
    }
  }

  // Standardize and append the constant-1 intercept column.
  std::vector<std::vector<double>> x;
  x.reserve(raw.size());
  for (const auto& row : raw) {
    std::vector<double> z(dims + 1, 1.0);
    for (std::size_t i = 0; i < dims; ++i) {
      z[i] = (row[i] - model.feat_mean[i]) / model.feat_scale[i];
    }
    x.push_back(std::move(z));
  }

  std::vector<double> w(dims + 1, 0.0);
  SvrTrainResult result;
  double obj = objective(x, y, w, settings.C, settings.epsilon);
  result.objective.push_back(obj);

  double step = 1.0;
  for (int iter = 0; iter < settings.max_iters; ++iter) {
    const auto g = gradient(x, y, w, settings.C, settings.epsilon);
    double gnorm2 = 0;
    for (double gi : g) gnorm2 += gi * gi;
    if (gnorm2 == 0) {
      result.converged = true;
      break;
    }

    // Backtracking: halve the step until the objective decreases.
    double new_obj = obj;
    std::vector<double> cand(w.size());
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      for (std::size_t i = 0; i < w.size(); ++i) cand[i] = w[i] - step * g[i];
      new_obj = objective(x, y, cand, settings.C, settings.epsilon);
      if (new_obj < obj) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.converged = true;
      break;
    }
    w = cand;
    result.iterations = iter + 1;
    result.objective.push_back(new_obj);
    const double improvement = obj - new_obj;
    obj = new_obj;
    step *= 2.0;  // let the step grow back after successful moves
    if (improvement < settings.tol * std::max(1.0, std::abs(obj))) {
      result.converged = true;
      break;
    }
  }

  model.weights.assign(w.begin(), w.begin() + dims);
  model.bias = w[dims];
  result.model = std::move(model);
  return result;
}

SvrModel svr_train(const std::string& role,
                   const std::vector<SvrExample>& examples,
                   const std::vector<std::string>& registry,
                   const SvrSettings& settings) {
  return svr_train_detailed(role, examples, registry, settings).model;
}

}  // namespace newscred
