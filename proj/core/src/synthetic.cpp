#include "newscred/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "newscred/rng.hpp"
#include "newscred/util.hpp"

using nlohmann::json;

namespace newscred {

namespace {

// Hedging markers; these are entries of the shipped hedges lexicon, so the
// style features of generated text pick them up directly.
const char* kMarkers[] = {"may", "perhaps", "possibly", "likely",
                          "apparently"};
constexpr std::size_t kMarkerCount = 5;

const char* kMedia[] = {"newspaper", "blog", "radio", "magazine",
                        "online", "tv", "wire"};
const char* kFormats[] = {"news report", "opinion", "editorial",
                          "investigative report", "research"};
const char* kScopes[] = {"local", "state", "regional", "national",
                         "international"};
const char* kViewpoints[] = {"far-left", "left", "center", "right", "neutral"};

std::string zero_padded(const char* prefix, std::size_t value,
                        int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, width, value);
  return buf;
}

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

/// Marker fraction encoding a rating: 0 at rating 5, 0.5 at rating 1.
double marker_fraction(double rating) { return 0.5 * (5.0 - rating) / 4.0; }

std::string synth_text(Rng& rng, double rating, double theta_alpha,
                       std::size_t tokens, double style_noise,
                       std::size_t vocab_per_topic) {
  const std::size_t style_len = tokens / 2;
  const std::size_t topic_len = tokens - style_len;

  const double p =
      std::clamp(marker_fraction(rating) + style_noise * rng.normal(), 0.0, 0.9);
  const std::size_t n_markers =
      static_cast<std::size_t>(std::lround(p * static_cast<double>(style_len)));
  const std::size_t n_alpha = static_cast<std::size_t>(
      std::lround(clip01(theta_alpha) * static_cast<double>(topic_len)));

  std::vector<std::string> words;
  words.reserve(tokens);
  for (std::size_t i = 0; i < style_len; ++i) {
    if (i < n_markers) {
      words.push_back(kMarkers[i % kMarkerCount]);
    } else {
      words.push_back(zero_padded("filler", i % 10, 2));
    }
  }
  for (std::size_t i = 0; i < topic_len; ++i) {
    if (i < n_alpha) {
      words.push_back(zero_padded("alpha", rng.below(vocab_per_topic), 2));
    } else {
      words.push_back(zero_padded("beta", rng.below(vocab_per_topic), 2));
    }
  }
  rng.shuffle(words);

  std::string text;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) text += ' ';
    text += words[i];
  }
  return text;
}

}  // namespace

std::pair<CommunityGraph, SyntheticTruth> generate_synthetic(
    const GeneratorConfig& config, std::uint64_t seed) {
  if (config.n_articles > 0 && config.n_sources == 0) {
    throw std::runtime_error("synthetic: articles need at least one source");
  }
  if (config.reviews_per_article > 0 && config.n_articles > 0 &&
      config.n_users == 0) {
    throw std::runtime_error("synthetic: reviews need at least one user");
  }
  if (config.reviews_per_article > config.n_users && config.n_articles > 0 &&
      config.reviews_per_article > 0) {
    throw std::runtime_error(
        "synthetic: reviews_per_article exceeds the number of users");
  }
  if (config.vocab_per_topic == 0 &&
      (config.article_tokens > 0 || config.review_tokens > 0)) {
    throw std::runtime_error("synthetic: vocab_per_topic must be > 0");
  }
  if (config.user_noise_min < 0 || config.user_noise_max < config.user_noise_min) {
    throw std::runtime_error("synthetic: bad user noise range");
  }

  Rng rng(seed);
  SyntheticTruth truth;
  truth.seed = seed;
  truth.config = config;

  std::vector<Source> sources;
  std::vector<double> centers(config.n_sources, 3.0);
  for (std::size_t i = 0; i < config.n_sources; ++i) {
    Source s;
    s.id = zero_padded("s", i + 1, 2);
    s.name = "synthetic source " + std::to_string(i + 1);
    s.media = kMedia[i % 7];
    s.format = kFormats[i % 5];
    s.scope = kScopes[i % 5];
    s.viewpoint = kViewpoints[i % 5];
    if (config.n_sources > 1) {
      centers[i] = 1.8 + (4.4 - 1.8) * static_cast<double>(i) /
                             static_cast<double>(config.n_sources - 1);
    }
    s.top_topics = {centers[i] >= 3.0 ? "alpha" : "beta"};
    if (i % 2 == 0) s.expertise_topics = {"alpha"};
    truth.source_center[s.id] = centers[i];
    sources.push_back(std::move(s));
  }

  std::vector<User> users;
  std::vector<double> sigma(config.n_users, config.user_noise_min);
  for (std::size_t i = 0; i < config.n_users; ++i) {
    User u;
    u.id = zero_padded("u", i + 1, 2);
    const double span = config.user_noise_max - config.user_noise_min;
    if (config.n_users > 1 && span > 0) {
      if (config.user_noise_min > 0) {
        const double ratio = config.user_noise_max / config.user_noise_min;
        sigma[i] = config.user_noise_min *
                   std::pow(ratio, static_cast<double>(i) /
                                       static_cast<double>(config.n_users - 1));
      } else {
        sigma[i] = config.user_noise_min +
                   span * static_cast<double>(i) /
                       static_cast<double>(config.n_users - 1);
      }
    }
    double level = 3.0;
    if (span > 0) {
      level = 1.0 + 4.0 * (config.user_noise_max - sigma[i]) / span;
    }
    u.member_level = clamp_rating(level);
    u.ratings_received =
        static_cast<long>(std::lround(level * 20.0 + rng.uniform(0.0, 10.0)));
    u.answers = static_cast<long>(rng.below(50));
    u.comments = static_cast<long>(rng.below(100));
    u.num_raters = static_cast<long>(rng.below(30)) + 1;
    truth.user_sigma[u.id] = sigma[i];
    users.push_back(std::move(u));
  }

  std::vector<Article> articles;
  std::vector<std::vector<double>> ratings_by_source(config.n_sources);
  std::vector<std::size_t> article_source(config.n_articles, 0);
  std::vector<double> article_rating(config.n_articles, 3.0);
  std::vector<bool> article_politics(config.n_articles, false);
  for (std::size_t i = 0; i < config.n_articles; ++i) {
    Article a;
    a.id = zero_padded("d", i + 1, 4);
    // Deal the first pass round-robin so every source publishes, then mix.
    const std::size_t src = i < config.n_sources
                                ? i
                                : static_cast<std::size_t>(
                                      rng.below(config.n_sources));
    article_source[i] = src;
    a.source_id = sources[src].id;
    const double y =
        clamp_rating(rng.normal(centers[src], config.article_spread));
    article_rating[i] = y;
    a.ground_rating = y;
    ratings_by_source[src].push_back(y);

    const double theta_alpha =
        clip01((y - 1.0) / 4.0 + config.topic_noise * rng.normal());
    a.explicit_tags.insert(theta_alpha >= 0.5 ? "alpha" : "beta");
    if (rng.uniform() < config.politics_prob) {
      a.explicit_tags.insert("politics");
      article_politics[i] = true;
    }
    a.title = "story " + a.id;
    a.text = synth_text(rng, y, theta_alpha, config.article_tokens,
                        config.style_noise, config.vocab_per_topic);
    articles.push_back(std::move(a));
  }

  std::vector<Review> reviews;
  std::vector<long> given(config.n_users, 0);
  std::vector<std::size_t> reviewer_pool(config.n_users);
  for (std::size_t i = 0; i < config.n_users; ++i) reviewer_pool[i] = i;
  for (std::size_t i = 0; i < config.n_articles; ++i) {
    rng.shuffle(reviewer_pool);
    for (std::size_t k = 0; k < config.reviews_per_article; ++k) {
      const std::size_t uidx = reviewer_pool[k];
      const double mult =
          article_politics[i] ? config.politics_noise_mult : 1.0;
      const double rating = clamp_rating(
          article_rating[i] + rng.normal() * sigma[uidx] * mult);
      Review r;
      r.article_id = articles[i].id;
      r.user_id = users[uidx].id;
      r.rating = rating;
      const double theta_alpha =
          clip01((rating - 1.0) / 4.0 + config.topic_noise * rng.normal());
      r.text = synth_text(rng, rating, theta_alpha, config.review_tokens,
                          config.style_noise, config.vocab_per_topic);
      reviews.push_back(std::move(r));
      ++given[uidx];
    }
  }
  for (std::size_t i = 0; i < config.n_users; ++i) {
    users[i].ratings_given = given[i];
  }

  for (std::size_t i = 0; i < config.n_sources; ++i) {
    double base = centers[i];
    if (!ratings_by_source[i].empty()) {
      double sum = 0;
      for (double v : ratings_by_source[i]) sum += v;
      base = sum / static_cast<double>(ratings_by_source[i].size());
    }
    sources[i].ground_rating =
        clamp_rating(base + rng.normal() * config.source_noise);
  }

  CommunityGraph graph =
      CommunityGraph::build(std::move(sources), std::move(users),
                            std::move(articles), std::move(reviews));
  return {std::move(graph), std::move(truth)};
}

void write_truth(const SyntheticTruth& truth, const std::string& path) {
  json j;
  j["seed"] = truth.seed;
  j["user_sigma"] = truth.user_sigma;
  j["source_center"] = truth.source_center;
  j["config"] = {
      {"n_sources", truth.config.n_sources},
      {"n_users", truth.config.n_users},
      {"n_articles", truth.config.n_articles},
      {"reviews_per_article", truth.config.reviews_per_article},
      {"user_noise_min", truth.config.user_noise_min},
      {"user_noise_max", truth.config.user_noise_max},
      {"source_noise", truth.config.source_noise},
      {"article_spread", truth.config.article_spread},
      {"style_noise", truth.config.style_noise},
      {"topic_noise", truth.config.topic_noise},
      {"vocab_per_topic", truth.config.vocab_per_topic},
      {"article_tokens", truth.config.article_tokens},
      {"review_tokens", truth.config.review_tokens},
      {"politics_prob", truth.config.politics_prob},
      {"politics_noise_mult", truth.config.politics_noise_mult},
  };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write truth file: " + path);
  out << j.dump(2) << '\n';
}

SyntheticTruth load_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open truth file: " + path);
  json j;
  in >> j;
  SyntheticTruth truth;
  truth.seed = j.at("seed").get<std::uint64_t>();
  truth.user_sigma =
      j.at("user_sigma").get<std::map<std::string, double>>();
  truth.source_center =
      j.at("source_center").get<std::map<std::string, double>>();
  const auto& c = j.at("config");
  truth.config.n_sources = c.at("n_sources").get<std::size_t>();
  truth.config.n_users = c.at("n_users").get<std::size_t>();
  truth.config.n_articles = c.at("n_articles").get<std::size_t>();
  truth.config.reviews_per_article =
      c.at("reviews_per_article").get<std::size_t>();
  truth.config.user_noise_min = c.at("user_noise_min").get<double>();
  truth.config.user_noise_max = c.at("user_noise_max").get<double>();
  truth.config.source_noise = c.at("source_noise").get<double>();
  truth.config.article_spread = c.at("article_spread").get<double>();
  truth.config.style_noise = c.at("style_noise").get<double>();
  truth.config.topic_noise = c.at("topic_noise").get<double>();
  truth.config.vocab_per_topic = c.at("vocab_per_topic").get<std::size_t>();
  truth.config.article_tokens = c.at("article_tokens").get<std::size_t>();
  truth.config.review_tokens = c.at("review_tokens").get<std::size_t>();
  truth.config.politics_prob = c.at("politics_prob").get<double>();
  truth.config.politics_noise_mult =
      c.at("politics_noise_mult").get<double>();
  return truth;
}

}  // namespace newscred
