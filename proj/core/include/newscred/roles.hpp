// roles.hpp — feature pipeline and the four regression-model families:
// language, topic, per-source and per-user, with background pooling for
// sparse entities.

#ifndef NEWSCRED_ROLES_HPP
#define NEWSCRED_ROLES_HPP

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "newscred/corpus.hpp"
#include "newscred/lda.hpp"
#include "newscred/lexicon.hpp"
#include "newscred/svr.hpp"
#include "newscred/view.hpp"

namespace newscred {

struct FeatureSettings {
  std::size_t truncate_chars = 1000;  // article bodies only; titles untouched
  bool title_only = false;            // drop the body entirely
  double delta = 0.01;                // latent-topic contribution threshold
};

/// Stateless feature extraction over a fixed lexicon, topic model and
/// explicit-tag registry. Safe to share across threads.
class FeaturePipeline {
 public:
  FeaturePipeline(const Lexicon& lexicon, const LdaModel* topics,
                  std::vector<std::string> tag_registry,
                  FeatureSettings settings);

  /// Title plus (unless title_only) the truncated body.
  std::string article_text(const Article& article) const;

  FeatureMap article_style(const Article& article) const;   // style:*
  FeatureMap article_topic(const Article& article) const;   // tag:*, topic:*
  FeatureMap review_style(const Review& review) const;
  FeatureMap review_topic(const Review& review) const;
  FeatureMap review_features(const Review& review) const;   // style + topic
  FeatureMap source_features(const Source& source) const;   // one-hot meta
  FeatureMap user_engagement(const User& user) const;

  std::vector<std::string> style_registry() const;
  std::vector<std::string> topic_registry() const;
  std::vector<std::string> review_registry() const;  // style + topic
  std::vector<std::string> source_registry(const CommunityGraph& g) const;

  const FeatureSettings& settings() const { return settings_; }
  const std::vector<std::string>& tags() const { return tag_registry_; }
  const LdaModel* topics() const { return topics_; }
  const Lexicon& lexicon() const { return *lexicon_; }

 private:
  const Lexicon* lexicon_;
  const LdaModel* topics_;  // may be null: no latent dims
  std::vector<std::string> tag_registry_;
  FeatureSettings settings_;
};

/// Union of all explicit tags over the graph's articles, lowercased.
std::vector<std::string> collect_tags(const CommunityGraph& graph);

struct RoleSettings {
  SvrSettings svr;
  std::size_t pooling_threshold = 5;  // entities below it pool into background
  bool source_article_features = false;  // append per-article examples to
                                         // per-source models
};

struct RoleModels {
  SvrModel language;
  SvrModel topic;
  std::map<std::string, SvrModel> per_source;
  std::map<std::string, SvrModel> per_user;
  SvrModel background_source;
  SvrModel background_user;

  bool has_source_model(const std::string& id) const {
    return per_source.count(id) > 0;
  }
  bool has_user_model(const std::string& id) const {
    return per_user.count(id) > 0;
  }
};

/// Trains all role models from the training articles visible in the view.
///  - language: per-article style features -> article ground rating
///  - topic:    per-article topic features -> article ground rating
///  - per-source (>= threshold train articles): source meta features ->
///    source ground rating; optionally plus its articles as examples
///  - per-user (>= threshold train reviews): per-review style+topic
///    features -> the user-assigned rating
/// Entities below the threshold contribute their examples to the matching
/// background model. Throws when no training reviews exist at all.
RoleModels train_role_models(const TrainView& view, const FeaturePipeline& pipeline,
                             const std::vector<std::string>& train_articles,
                             const RoleSettings& settings);

void save_roles(const RoleModels& roles, const std::string& path);
RoleModels load_roles(const std::string& path);

}  // namespace newscred

#endif  // NEWSCRED_ROLES_HPP
