// evaluate.hpp — hypothesis suite and the blind k-fold evaluation protocol.

#ifndef NEWSCRED_EVALUATE_HPP
#define NEWSCRED_EVALUATE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "newscred/ccrf.hpp"
#include "newscred/corpus.hpp"
#include "newscred/lda.hpp"
#include "newscred/lexicon.hpp"
#include "newscred/metrics.hpp"
#include "newscred/roles.hpp"

namespace newscred {

struct HypothesisSettings {
  std::string politics_tag = "politics";
  std::size_t min_reviews = 3;
};

struct HypothesisRow {
  std::string name;
  bool ok = false;
  PearsonResult result;
  std::string error;  // set when the test could not run
};

/// Pearson tests over the community ground truth:
///   - political association vs article rating disagreement
///   - user expertise vs user disagreement
///   - user expertise vs ratings received
///   - source trustworthiness vs mean credibility of its articles
///   - user expertise vs the user's own rating error
/// Failures (missing data, zero variance) are reported per row.
std::vector<HypothesisRow> hypothesis_suite(
    const CommunityGraph& graph, const HypothesisSettings& settings = {});

struct EvalSettings {
  std::uint64_t seed = 0;
  std::size_t folds = 10;
  std::size_t min_reviews = 3;
  LdaParams lda;
  bool lda_articles_only = false;  // default trains on articles and reviews
  FeatureSettings features;
  RoleSettings roles;
  CcrfSettings ccrf;
  std::size_t jobs = 1;
  std::size_t ndcg_cutoff = 0;  // 0 = full list
};

struct MetricsReport {
  std::uint64_t seed = 0;
  std::size_t folds = 0;
  std::vector<double> fold_mse;             // CCRF per fold
  std::vector<double> fold_mse_aggregated;  // unweighted predictor average
  double mean_mse = 0;
  double mean_mse_aggregated = 0;
  std::optional<double> ndcg_users;
  std::optional<double> ndcg_sources;
  std::vector<HypothesisRow> hypotheses;
  long hidden_rating_reads = 0;  // must stay 0: blind-fold audit
  std::vector<std::pair<std::string, double>> user_ranking;
  std::vector<std::pair<std::string, double>> source_ranking;
  std::vector<std::pair<std::string, std::string>> config_echo;
};

/// Tokenized documents for topic-model training: every article (title plus
/// truncated body) and, unless articles_only, every review.
std::vector<TokenizedDoc> lda_corpus(const CommunityGraph& graph,
                                     const FeatureSettings& features,
                                     bool articles_only);

/// The full protocol: filter to min_reviews, split the rated articles into
/// folds, per fold train role models and the CCRF on the other folds and
/// score the blind fold (ids and texts only — rating reads are counted and
/// must be zero), then train on everything for the rankings and their NDCG
/// against member levels / source ratings.
MetricsReport cross_validate(const CommunityGraph& graph,
                             const Lexicon& lexicon,
                             const EvalSettings& settings);

void write_report(const MetricsReport& report, const std::string& path);

}  // namespace newscred

#endif  // NEWSCRED_EVALUATE_HPP
