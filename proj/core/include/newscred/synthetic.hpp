// synthetic.hpp — synthetic community generator with recorded ground truth.
//
// Ratings drive the texts: article and review bodies carry hedge-marker and
// topic-vocabulary frequencies that encode their rating, so the style and
// topic regressors have learnable signal, and per-user Gaussian noise with
// configurable spread gives the joint model something to weigh.

#ifndef NEWSCRED_SYNTHETIC_HPP
#define NEWSCRED_SYNTHETIC_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "newscred/corpus.hpp"

namespace newscred {

struct GeneratorConfig {
  std::size_t n_sources = 5;
  std::size_t n_users = 20;
  std::size_t n_articles = 200;
  std::size_t reviews_per_article = 3;
  double user_noise_min = 0.0;   // per-user rating noise sigma, spread
  double user_noise_max = 0.0;   // geometrically from min to max
  double source_noise = 0.1;     // source rating noise around article mean
  double article_spread = 0.6;   // article rating spread around source center
  double style_noise = 0.0;      // jitter on the hedge-marker fraction
  double topic_noise = 0.0;      // jitter on the topic-mixture proportion
  std::size_t vocab_per_topic = 20;
  std::size_t article_tokens = 80;
  std::size_t review_tokens = 60;
  double politics_prob = 0.3;       // chance an article is tagged politics
  double politics_noise_mult = 1.0; // extra reviewer noise on politics
};

struct SyntheticTruth {
  std::uint64_t seed = 0;
  GeneratorConfig config;
  std::map<std::string, double> user_sigma;     // the hidden noise levels
  std::map<std::string, double> source_center;  // quality center per source
};

/// Deterministic under the seed. Throws on inconsistent configuration
/// (reviews demanded with no users, more reviewers than users, ...).
std::pair<CommunityGraph, SyntheticTruth> generate_synthetic(
    const GeneratorConfig& config, std::uint64_t seed);

void write_truth(const SyntheticTruth& truth, const std::string& path);
SyntheticTruth load_truth(const std::string& path);

}  // namespace newscred

#endif  // NEWSCRED_SYNTHETIC_HPP
