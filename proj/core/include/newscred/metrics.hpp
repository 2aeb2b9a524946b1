// metrics.hpp — evaluation metrics and community disagreement statistics.

#ifndef NEWSCRED_METRICS_HPP
#define NEWSCRED_METRICS_HPP

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "newscred/corpus.hpp"

namespace newscred {

/// Mean squared error. Throws on empty or mismatched lengths.
double mse(std::span<const double> predictions, std::span<const double> truth);

/// Normalized discounted cumulative gain with the plain-gain discount
///   DCG_p = rel_1 + sum_{i>=2} rel_i / log2(i).
/// `ranked` holds relevances in the order produced by the ranker; `ideal`
/// must be the same multiset (it is sorted descending internally). When all
/// relevances are zero the value is defined as 1.0 (warning on stderr).
double ndcg(std::span<const double> ranked, std::vector<double> ideal);

struct PearsonResult {
  double r = 0;
  double p_value = 1;
  std::size_t n = 0;
};

/// Sample Pearson correlation with a two-sided p-value from the
/// t-transform t = r*sqrt((n-2)/(1-r^2)) against Student-t with n-2
/// degrees of freedom. Requires length >= 3 and nonzero variances.
PearsonResult pearson(std::span<const double> x, std::span<const double> y);

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

struct DisagreementStats {
  /// Population standard deviation of review ratings, per qualifying
  /// article (>= min_reviews reviews).
  std::map<std::string, double> article_stddev;
  /// Mean absolute deviation of the user's rating from the article mean,
  /// over the qualifying articles the user reviewed.
  std::map<std::string, double> user_mad;
};

DisagreementStats disagreement_stats(const CommunityGraph& graph,
                                     std::size_t min_reviews = 3);

}  // namespace newscred

#endif  // NEWSCRED_METRICS_HPP
