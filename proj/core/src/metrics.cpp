#include "newscred/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace newscred {

double mse(std::span<const double> predictions, std::span<const double> truth) {
  if (predictions.size() != truth.size()) {
    throw std::runtime_error("mse: length mismatch");
  }
  if (predictions.empty()) throw std::runtime_error("mse: empty input");
  double sum = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - truth[i];
    sum += d * d;
  }
  return sum / static_cast<double>(predictions.size());
}

namespace {

double dcg(std::span<const double> rel) {
  double out = 0;
  for (std::size_t i = 0; i < rel.size(); ++i) {
    if (i == 0) {
      out += rel[i];
    } else {
      out += rel[i] / std::log2(static_cast<double>(i + 1));
    }
  }
  return out;
}

}  // namespace

double ndcg(std::span<const double> ranked, std::vector<double> ideal) {
  if (ranked.empty()) throw std::runtime_error("ndcg: empty input");
  if (ranked.size() != ideal.size()) {
    throw std::runtime_error("ndcg: ranked/ideal length mismatch");
  }
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  {
    std::vector<double> check(ranked.begin(), ranked.end());
    std::sort(check.begin(), check.end(), std::greater<>());
    if (check != ideal) {
      throw std::runtime_error("ndcg: ideal is not a reordering of ranked");
    }
  }
  const double idcg = dcg(ideal);
  if (idcg == 0) {
    std::cerr << "ndcg: all relevances zero, defining NDCG = 1\n";
    return 1.0;
  }
  return dcg(ranked) / idcg;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  // Continued fraction converges fastest for x < (a+1)/(a+b+2); otherwise
  // use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
  if (x > (a + 1) / (a + b + 2)) {
    return 1.0 - incomplete_beta(b, a, 1.0 - x);
  }
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log(1.0 - x);
  // Lentz's algorithm for the continued fraction.
  const double tiny = 1e-300;
  double f = 1.0, c = 1.0, d = 0.0;
  for (int i = 0; i <= 400; ++i) {
    double numerator;
    if (i == 0) {
      numerator = 1.0;
    } else if (i % 2 == 0) {
      const int m = i / 2;
      numerator = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
    } else {
      const int m = (i - 1) / 2;
      numerator =
          -(a + m) * (a + b + m) * x / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
    }
    d = 1.0 + numerator * d;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    c = 1.0 + numerator / c;
    if (std::abs(c) < tiny) c = tiny;
    const double ratio = c * d;
    f *= ratio;
    if (std::abs(1.0 - ratio) < 1e-15) break;
  }
  return std::exp(log_front) * (f - 1.0) / a;
}

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::runtime_error("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw std::runtime_error("pearson: need at least 3 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) {
    throw std::runtime_error("pearson: zero variance");
  }
  PearsonResult result;
  result.n = n;
  result.r = sxy / std::sqrt(sxx * syy);
  // Clamp rounding spill before the t-transform.
  result.r = std::clamp(result.r, -1.0, 1.0);
  const double nu = static_cast<double>(n - 2);
  const double one_minus_r2 = 1.0 - result.r * result.r;
  if (one_minus_r2 <= 0) {
    result.p_value = 0;
    return result;
  }
  const double t = result.r * std::sqrt(nu / one_minus_r2);
  // Two-sided: P(|T| > t) = I_{nu/(nu+t^2)}(nu/2, 1/2).
  result.p_value = incomplete_beta(nu / 2.0, 0.5, nu / (nu + t * t));
  return result;
}

DisagreementStats disagreement_stats(const CommunityGraph& graph,
                                     std::size_t min_reviews) {
  DisagreementStats stats;
  std::map<std::string, double> article_mean;
  for (const auto& c : graph.cliques()) {
    if (c.review_ids.size() < min_reviews || c.review_ids.empty()) continue;
    double mean = 0;
    for (const auto& rid : c.review_ids) {
      mean += graph.reviews().at(rid).rating;
    }
    mean /= static_cast<double>(c.review_ids.size());
    article_mean[c.article_id] = mean;
    double var = 0;
    for (const auto& rid : c.review_ids) {
      const double d = graph.reviews().at(rid).rating - mean;
      var += d * d;
    }
    var /= static_cast<double>(c.review_ids.size());
    stats.article_stddev[c.article_id] = std::sqrt(var);
  }

  std::map<std::string, std::pair<double, std::size_t>> accum;
  for (const auto& [key, review] : graph.reviews()) {
    auto it = article_mean.find(review.article_id);
    if (it == article_mean.end()) continue;  // below the review threshold
    auto& [sum, count] = accum[review.user_id];
    sum += std::abs(review.rating - it->second);
    ++count;
  }
  for (const auto& [user_id, pair] : accum) {
    stats.user_mad[user_id] = pair.first / static_cast<double>(pair.second);
  }
  return stats;
}

}  // namespace newscred
