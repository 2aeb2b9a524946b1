#include "newscred/roles.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "newscred/text.hpp"

namespace newscred {

namespace {

std::string lower_copy(const std::string& s) {
  std::string out = s;
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

FeatureMap prefixed(const FeatureMap& features, const std::string& prefix) {
  FeatureMap out;
  for (const auto& [name, value] : features) out[prefix + name] = value;
  return out;
}

void merge_into(FeatureMap& target, const FeatureMap& extra) {
  for (const auto& [name, value] : extra) target[name] = value;
}

double mean_or(const std::vector<double>& values, double fallback) {
  if (values.empty()) return fallback;
  double sum = 0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

/// Constant-prediction fallback used when a background pool is empty:
/// zero weights over the role registry and the mean target as bias.
SvrModel constant_model(const std::string& role,
                        const std::vector<std::string>& registry,
                        double bias, const SvrSettings& settings) {
  SvrModel m;
  m.role = role;
  m.registry = registry;
  m.weights.assign(registry.size(), 0.0);
  m.feat_mean.assign(registry.size(), 0.0);
  m.feat_scale.assign(registry.size(), 1.0);
  m.bias = bias;
  m.C = settings.C;
  m.epsilon = settings.epsilon;
  return m;
}

}  // namespace

FeaturePipeline::FeaturePipeline(const Lexicon& lexicon, const LdaModel* topics,
                                 std::vector<std::string> tag_registry,
                                 FeatureSettings settings)
    : lexicon_(&lexicon),
      topics_(topics),
      tag_registry_(std::move(tag_registry)),
      settings_(settings) {}

std::string FeaturePipeline::article_text(const Article& article) const {
  if (settings_.title_only) return article.title;
  std::string text = article.title;
  if (!text.empty()) text += ' ';
  text += truncate_text(article.text, settings_.truncate_chars);
  return text;
}

FeatureMap FeaturePipeline::article_style(const Article& article) const {
  return prefixed(style_features(article_text(article), *lexicon_).dims,
                  "style:");
}

FeatureMap FeaturePipeline::article_topic(const Article& article) const {
  if (!topics_) return {};
  return topic_features(tokenize(article_text(article)), tag_registry_,
                        *topics_, settings_.delta);
}

FeatureMap FeaturePipeline::review_style(const Review& review) const {
  return prefixed(style_features(review.text, *lexicon_).dims, "style:");
}

FeatureMap FeaturePipeline::review_topic(const Review& review) const {
  if (!topics_) return {};
  return topic_features(tokenize(review.text), tag_registry_, *topics_,
                        settings_.delta);
}

FeatureMap FeaturePipeline::review_features(const Review& review) const {
  FeatureMap out = review_style(review);
  merge_into(out, review_topic(review));
  return out;
}

FeatureMap FeaturePipeline::source_features(const Source& source) const {
  FeatureMap out;
  if (!source.media.empty()) out["media:" + lower_copy(source.media)] = 1.0;
  if (!source.format.empty()) out["format:" + lower_copy(source.format)] = 1.0;
  if (!source.scope.empty()) out["scope:" + lower_copy(source.scope)] = 1.0;
  if (!source.viewpoint.empty()) {
    out["viewpoint:" + lower_copy(source.viewpoint)] = 1.0;
  }
  for (const auto& t : source.top_topics) {
    out["top_topic:" + lower_copy(t)] = 1.0;
  }
  for (const auto& t : source.expertise_topics) {
    out["expertise_topic:" + lower_copy(t)] = 1.0;
  }
  return out;
}

FeatureMap FeaturePipeline::user_engagement(const User& user) const {
  return FeatureMap{{"engage:answers", static_cast<double>(user.answers)},
                    {"engage:ratings_given",
                     static_cast<double>(user.ratings_given)},
                    {"engage:comments", static_cast<double>(user.comments)},
                    {"engage:ratings_received",
                     static_cast<double>(user.ratings_received)},
                    {"engage:num_raters",
                     static_cast<double>(user.num_raters)}};
}

std::vector<std::string> FeaturePipeline::style_registry() const {
  std::vector<std::string> out;
  for (const auto& name : lexicon_->category_names()) {
    out.push_back("style:" + name);
  }
  return out;
}

std::vector<std::string> FeaturePipeline::topic_registry() const {
  std::vector<std::string> out;
  for (const auto& tag : tag_registry_) out.push_back("tag:" + tag);
  if (topics_) {
    for (int k = 0; k < topics_->n_topics(); ++k) {
      out.push_back("topic:" + std::to_string(k));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> FeaturePipeline::review_registry() const {
  std::vector<std::string> out = style_registry();
  const auto topics = topic_registry();
  out.insert(out.end(), topics.begin(), topics.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> FeaturePipeline::source_registry(
    const CommunityGraph& g) const {
  std::set<std::string> dims;
  for (const auto& [id, s] : g.sources()) {
    for (const auto& [name, value] : source_features(s)) dims.insert(name);
  }
  return {dims.begin(), dims.end()};
}

std::vector<std::string> collect_tags(const CommunityGraph& graph) {
  std::set<std::string> tags;
  for (const auto& [id, a] : graph.articles()) {
    for (const auto& t : a.explicit_tags) tags.insert(lower_copy(t));
  }
  return {tags.begin(), tags.end()};
}

RoleModels train_role_models(const TrainView& view, const FeaturePipeline& pipeline,
                             const std::vector<std::string>& train_articles,
                             const RoleSettings& settings) {
  const CommunityGraph& graph = view.graph();
  if (train_articles.empty()) {
    throw std::runtime_error("train_role_models: empty training set");
  }

  std::vector<SvrExample> language_examples;
  std::vector<SvrExample> topic_examples;
  std::map<std::string, std::vector<SvrExample>> user_examples;
  std::map<std::string, std::vector<std::string>> source_articles;
  std::vector<double> all_review_targets;

  for (const auto& article_id : train_articles) {
    const auto ait = graph.articles().find(article_id);
    if (ait == graph.articles().end()) {
      throw std::runtime_error("train_role_models: unknown article " +
                               article_id);
    }
    const Article& article = ait->second;
    const auto rating = view.article_rating(article_id);
    if (rating) {
      language_examples.push_back({pipeline.article_style(article), *rating});
      topic_examples.push_back({pipeline.article_topic(article), *rating});
      source_articles[article.source_id].push_back(article_id);
    }
    for (const auto& review_id : graph.clique_of(article_id).review_ids) {
      const Review& review = graph.reviews().at(review_id);
      const auto review_rating = view.review_rating(review);
      if (!review_rating) continue;
      user_examples[review.user_id].push_back(
          {pipeline.review_features(review), *review_rating});
      all_review_targets.push_back(*review_rating);
    }
  }

  if (all_review_targets.empty()) {
    throw std::runtime_error("train_role_models: no training reviews");
  }
  if (language_examples.empty()) {
    throw std::runtime_error("train_role_models: no rated training articles");
  }

  RoleModels roles;
  roles.language = svr_train("language", language_examples,
                             pipeline.style_registry(), settings.svr);
  roles.topic = svr_train("topic", topic_examples, pipeline.topic_registry(),
                          settings.svr);

  // Per-user models; sparse users pool into the background.
  const auto review_registry = pipeline.review_registry();
  std::vector<SvrExample> pooled_user_examples;
  for (auto& [user_id, examples] : user_examples) {
    if (examples.size() >= settings.pooling_threshold) {
      roles.per_user[user_id] = svr_train("user:" + user_id, examples,
                                          review_registry, settings.svr);
    } else {
      pooled_user_examples.insert(pooled_user_examples.end(), examples.begin(),
                                  examples.end());
    }
  }
  if (!pooled_user_examples.empty()) {
    roles.background_user = svr_train("background-user", pooled_user_examples,
                                      review_registry, settings.svr);
  } else {
    roles.background_user =
        constant_model("background-user", review_registry,
                       mean_or(all_review_targets, 3.0), settings.svr);
  }

  // Per-source models need the source's own community rating as target.
  std::vector<std::string> source_registry = pipeline.source_registry(graph);
  if (settings.source_article_features) {
    std::set<std::string> dims(source_registry.begin(), source_registry.end());
    for (const auto& name : pipeline.review_registry()) dims.insert(name);
    source_registry.assign(dims.begin(), dims.end());
  }
  std::vector<SvrExample> pooled_source_examples;
  std::vector<double> source_targets;
  for (const auto& [source_id, articles] : source_articles) {
    const Source& source = graph.sources().at(source_id);
    if (!source.ground_rating) continue;
    source_targets.push_back(*source.ground_rating);
    std::vector<SvrExample> examples;
    examples.push_back({pipeline.source_features(source), *source.ground_rating});
    if (settings.source_article_features) {
      for (const auto& article_id : articles) {
        const Article& article = graph.articles().at(article_id);
        const auto rating = view.article_rating(article_id);
        if (!rating) continue;
        FeatureMap features = pipeline.source_features(source);
        merge_into(features, pipeline.article_style(article));
        merge_into(features, pipeline.article_topic(article));
        examples.push_back({std::move(features), *rating});
      }
    }
    if (articles.size() >= settings.pooling_threshold) {
      roles.per_source[source_id] = svr_train("source:" + source_id, examples,
                                              source_registry, settings.svr);
    } else {
      pooled_source_examples.insert(pooled_source_examples.end(),
                                    examples.begin(), examples.end());
    }
  }
  if (!pooled_source_examples.empty()) {
    roles.background_source =
        svr_train("background-source", pooled_source_examples, source_registry,
                  settings.svr);
  } else {
    roles.background_source = constant_model(
        "background-source", source_registry,
        mean_or(source_targets, mean_or(all_review_targets, 3.0)),
        settings.svr);
  }
  return roles;
}

namespace {

void write_model(std::ofstream& out, const SvrModel& m) {
  out << "model\n";
  out << "role " << m.role << '\n';
  out << "C " << fmt_full(m.C) << " epsilon " << fmt_full(m.epsilon)
      << " clamp " << (m.clamp_output ? 1 : 0) << '\n';
  out << "dims " << m.registry.size() << '\n';
  for (std::size_t i = 0; i < m.registry.size(); ++i) {
    out << m.registry[i] << '\n';
    out << fmt_full(m.weights[i]) << ' ' << fmt_full(m.feat_mean[i]) << ' '
        << fmt_full(m.feat_scale[i]) << '\n';
  }
  out << "bias " << fmt_full(m.bias) << '\n';
}

SvrModel read_model(std::istream& in, const std::string& path) {
  const auto fail = [&](const std::string& msg) -> std::runtime_error {
    return std::runtime_error(path + ": " + msg);
  };
  std::string line;
  if (!std::getline(in, line) || line != "model") throw fail("expected 'model'");
  SvrModel m;
  if (!std::getline(in, line) || line.rfind("role ", 0) != 0) {
    throw fail("expected 'role'");
  }
  m.role = line.substr(5);
  if (!std::getline(in, line)) throw fail("truncated model");
  {
    std::istringstream ss(line);
    std::string c_tag, eps_tag, clamp_tag;
    int clamp = 1;
    if (!(ss >> c_tag >> m.C >> eps_tag >> m.epsilon >> clamp_tag >> clamp) ||
        c_tag != "C" || eps_tag != "epsilon" || clamp_tag != "clamp") {
      throw fail("bad model settings line");
    }
    m.clamp_output = clamp != 0;
  }
  if (!std::getline(in, line) || line.rfind("dims ", 0) != 0) {
    throw fail("expected 'dims'");
  }
  const std::size_t dims = std::stoul(line.substr(5));
  m.registry.resize(dims);
  m.weights.resize(dims);
  m.feat_mean.resize(dims);
  m.feat_scale.resize(dims);
  for (std::size_t i = 0; i < dims; ++i) {
    if (!std::getline(in, m.registry[i])) throw fail("truncated registry");
    if (!std::getline(in, line)) throw fail("truncated weights");
    std::istringstream ss(line);
    if (!(ss >> m.weights[i] >> m.feat_mean[i] >> m.feat_scale[i])) {
      throw fail("bad weight line for dim " + m.registry[i]);
    }
  }
  if (!std::getline(in, line) || line.rfind("bias ", 0) != 0) {
    throw fail("expected 'bias'");
  }
  m.bias = parse_double(line.substr(5));
  return m;
}

}  // namespace

void save_roles(const RoleModels& roles, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write role models: " + path);
  out << "newscred-roles v1\n";
  out << "models " << (4 + roles.per_source.size() + roles.per_user.size())
      << '\n';
  write_model(out, roles.language);
  write_model(out, roles.topic);
  write_model(out, roles.background_source);
  write_model(out, roles.background_user);
  for (const auto& [id, m] : roles.per_source) write_model(out, m);
  for (const auto& [id, m] : roles.per_user) write_model(out, m);
}

RoleModels load_roles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open role models: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "newscred-roles v1") {
    throw std::runtime_error(path + ": bad role model header");
  }
  if (!std::getline(in, line) || line.rfind("models ", 0) != 0) {
    throw std::runtime_error(path + ": expected model count");
  }
  const std::size_t count = std::stoul(line.substr(7));
  RoleModels roles;
  for (std::size_t i = 0; i < count; ++i) {
    SvrModel m = read_model(in, path);
    if (m.role == "language") {
      roles.language = std::move(m);
    } else if (m.role == "topic") {
      roles.topic = std::move(m);
    } else if (m.role == "background-source") {
      roles.background_source = std::move(m);
    } else if (m.role == "background-user") {
      roles.background_user = std::move(m);
    } else if (m.role.rfind("source:", 0) == 0) {
      const std::string id = m.role.substr(7);
      roles.per_source[id] = std::move(m);
    } else if (m.role.rfind("user:", 0) == 0) {
      const std::string id = m.role.substr(5);
      roles.per_user[id] = std::move(m);
    } else {
      throw std::runtime_error(path + ": unknown role '" + m.role + "'");
    }
  }
  return roles;
}

}  // namespace newscred
