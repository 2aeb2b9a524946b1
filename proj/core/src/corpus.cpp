#include "newscred/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "newscred/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace newscred {

namespace {

constexpr char kReviewKeySep = '\x1f';

[[noreturn]] void fail_at(const std::string& file, std::size_t line,
                          const std::string& message) {
  throw std::runtime_error(file + ":" + std::to_string(line) + ": " + message);
}

void check_rating_range(double value, const std::string& what,
                        const std::string& file, std::size_t line) {
  if (!(value >= 1.0 && value <= 5.0)) {
    fail_at(file, line, what + " out of [1,5]: " + std::to_string(value));
  }
}

std::string get_string(const json& j, const char* field,
                       const std::string& file, std::size_t line) {
  if (!j.contains(field) || !j[field].is_string()) {
    fail_at(file, line, std::string("missing or non-string field '") + field +
                            "'");
  }
  return j[field].get<std::string>();
}

long get_count(const json& j, const char* field, const std::string& file,
               std::size_t line) {
  if (!j.contains(field) || !j[field].is_number_integer()) {
    fail_at(file, line, std::string("missing or non-integer field '") + field +
                            "'");
  }
  const long v = j[field].get<long>();
  if (v < 0) fail_at(file, line, std::string(field) + " must be >= 0");
  return v;
}

double get_number(const json& j, const char* field, const std::string& file,
                  std::size_t line) {
  if (!j.contains(field) || !j[field].is_number()) {
    fail_at(file, line, std::string("missing or non-numeric field '") + field +
                            "'");
  }
  return j[field].get<double>();
}

std::optional<double> get_optional_number(const json& j, const char* field,
                                          const std::string& file,
                                          std::size_t line) {
  if (!j.contains(field) || j[field].is_null()) return std::nullopt;
  if (!j[field].is_number()) {
    fail_at(file, line, std::string("field '") + field + "' must be numeric");
  }
  return j[field].get<double>();
}

std::set<std::string> get_string_set(const json& j, const char* field,
                                     const std::string& file,
                                     std::size_t line) {
  if (!j.contains(field)) return {};
  if (!j[field].is_array()) {
    fail_at(file, line, std::string("field '") + field + "' must be an array");
  }
  std::set<std::string> out;
  for (const auto& item : j[field]) {
    if (!item.is_string()) {
      fail_at(file, line,
              std::string("field '") + field + "' must hold strings");
    }
    out.insert(item.get<std::string>());
  }
  return out;
}

template <typename Fn>
void for_each_json_line(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail_at(path, lineno, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) fail_at(path, lineno, "record must be a JSON object");
    fn(j, lineno);
  }
}

}  // namespace

std::string review_key(const std::string& article_id,
                       const std::string& user_id) {
  return article_id + kReviewKeySep + user_id;
}

Edge make_edge(NodeRef a, NodeRef b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

const Clique& CommunityGraph::clique_of(const std::string& article_id) const {
  auto it = std::lower_bound(
      cliques_.begin(), cliques_.end(), article_id,
      [](const Clique& c, const std::string& id) { return c.article_id < id; });
  if (it == cliques_.end() || it->article_id != article_id) {
    throw std::runtime_error("no clique for article: " + article_id);
  }
  return *it;
}

CommunityGraph CommunityGraph::build(std::vector<Source> sources,
                                     std::vector<User> users,
                                     std::vector<Article> articles,
                                     std::vector<Review> reviews) {
  CommunityGraph g;
  for (auto& s : sources) {
    if (s.id.empty()) throw std::runtime_error("source with empty id");
    if (s.ground_rating && !(*s.ground_rating >= 1.0 && *s.ground_rating <= 5.0)) {
      throw std::runtime_error("source rating out of [1,5]: " + s.id);
    }
    const std::string id = s.id;
    if (!g.sources_.emplace(id, std::move(s)).second) {
      throw std::runtime_error("duplicate source id: " + id);
    }
  }
  for (auto& u : users) {
    if (u.id.empty()) throw std::runtime_error("user with empty id");
    if (u.answers < 0 || u.ratings_given < 0 || u.comments < 0 ||
        u.ratings_received < 0 || u.num_raters < 0) {
      throw std::runtime_error("negative count for user: " + u.id);
    }
    if (u.member_level && !(*u.member_level >= 1.0 && *u.member_level <= 5.0)) {
      throw std::runtime_error("member_level out of [1,5] for user: " + u.id);
    }
    const std::string id = u.id;
    if (!g.users_.emplace(id, std::move(u)).second) {
      throw std::runtime_error("duplicate user id: " + id);
    }
  }
  for (auto& a : articles) {
    if (a.id.empty()) throw std::runtime_error("article with empty id");
    if (!g.sources_.count(a.source_id)) {
      throw std::runtime_error("article " + a.id + " references unknown source " +
                               a.source_id);
    }
    if (a.ground_rating && !(*a.ground_rating >= 1.0 && *a.ground_rating <= 5.0)) {
      throw std::runtime_error("article rating out of [1,5]: " + a.id);
    }
    const std::string id = a.id;
    if (!g.articles_.emplace(id, std::move(a)).second) {
      throw std::runtime_error("duplicate article id: " + id);
    }
  }
  for (auto& r : reviews) {
    if (!g.articles_.count(r.article_id)) {
      throw std::runtime_error("review references unknown article " +
                               r.article_id);
    }
    if (!g.users_.count(r.user_id)) {
      throw std::runtime_error("review references unknown user " + r.user_id);
    }
    if (!(r.rating >= 1.0 && r.rating <= 5.0)) {
      throw std::runtime_error("review rating out of [1,5]: " +
                               review_key(r.article_id, r.user_id));
    }
    const std::string key = review_key(r.article_id, r.user_id);
    if (!g.reviews_.emplace(key, std::move(r)).second) {
      throw std::runtime_error("duplicate review for article/user pair: " +
                               key);
    }
  }

  // One clique per article, reviewers sorted by user id.
  for (const auto& [aid, article] : g.articles_) {
    Clique c;
    c.article_id = aid;
    c.source_id = article.source_id;
    g.cliques_.push_back(std::move(c));
  }
  for (const auto& [key, review] : g.reviews_) {
    auto it = std::lower_bound(g.cliques_.begin(), g.cliques_.end(),
                               review.article_id,
                               [](const Clique& c, const std::string& id) {
                                 return c.article_id < id;
                               });
    it->user_ids.push_back(review.user_id);
    it->review_ids.push_back(key);
  }
  for (auto& c : g.cliques_) {
    // reviews_ is keyed by article+user, so user_ids arrive already sorted
    // and distinct; keep an explicit sort as a guard for future callers.
    std::vector<std::size_t> order(c.user_ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return c.user_ids[a] < c.user_ids[b];
    });
    Clique sorted;
    sorted.article_id = c.article_id;
    sorted.source_id = c.source_id;
    for (std::size_t i : order) {
      sorted.user_ids.push_back(c.user_ids[i]);
      sorted.review_ids.push_back(c.review_ids[i]);
    }
    c = std::move(sorted);
  }

  g.edges_ = build_edges(g);
  return g;
}

std::set<Edge> build_edges(const CommunityGraph& graph) {
  std::set<Edge> edges;
  const auto source_node = [](const std::string& id) {
    return NodeRef{NodeKind::Source, id};
  };
  const auto user_node = [](const std::string& id) {
    return NodeRef{NodeKind::User, id};
  };
  const auto article_node = [](const std::string& id) {
    return NodeRef{NodeKind::Article, id};
  };
  const auto review_node = [](const std::string& key) {
    return NodeRef{NodeKind::Review, key};
  };

  for (const auto& c : graph.cliques()) {
    const auto a = article_node(c.article_id);
    const auto s = source_node(c.source_id);
    // 1. article -- its source
    edges.insert(make_edge(s, a));
    const std::size_t n = c.user_ids.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto u = user_node(c.user_ids[i]);
      const auto r = review_node(c.review_ids[i]);
      // 2. article -- each of its reviews
      edges.insert(make_edge(a, r));
      // 3. user -- own review
      edges.insert(make_edge(u, r));
      // 4. user -- article they rated
      edges.insert(make_edge(u, a));
      // 5. source -- users who rated its articles
      edges.insert(make_edge(s, u));
      // 6. source -- reviews of its articles
      edges.insert(make_edge(s, r));
      // 7. within the article: users and all their reviews inter-connect
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto v = user_node(c.user_ids[j]);
        const auto rv = review_node(c.review_ids[j]);
        edges.insert(make_edge(u, v));
        edges.insert(make_edge(u, rv));
        edges.insert(make_edge(v, r));
      }
    }
  }
  return edges;
}

CommunityGraph filter_min_reviews(const CommunityGraph& graph, std::size_t k) {
  std::vector<Source> sources;
  for (const auto& [id, s] : graph.sources()) sources.push_back(s);
  std::vector<User> users;
  for (const auto& [id, u] : graph.users()) users.push_back(u);

  std::set<std::string> keep;
  for (const auto& c : graph.cliques()) {
    if (c.review_ids.size() >= k) keep.insert(c.article_id);
  }
  std::vector<Article> articles;
  for (const auto& [id, a] : graph.articles()) {
    if (keep.count(id)) articles.push_back(a);
  }
  std::vector<Review> reviews;
  for (const auto& [key, r] : graph.reviews()) {
    if (keep.count(r.article_id)) reviews.push_back(r);
  }
  return CommunityGraph::build(std::move(sources), std::move(users),
                               std::move(articles), std::move(reviews));
}

FoldPlan make_folds(const CommunityGraph& graph, std::size_t n_folds,
                    std::uint64_t seed) {
  if (n_folds == 0) throw std::runtime_error("make_folds: n_folds must be > 0");
  std::vector<std::string> eligible;
  for (const auto& [id, a] : graph.articles()) {
    if (a.ground_rating) eligible.push_back(id);
  }
  if (eligible.size() < n_folds) {
    throw std::runtime_error("make_folds: only " +
                             std::to_string(eligible.size()) +
                             " rated articles for " + std::to_string(n_folds) +
                             " folds");
  }
  Rng rng(seed);
  rng.shuffle(eligible);
  FoldPlan plan;
  plan.seed = seed;
  plan.folds.assign(n_folds, {});
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    plan.folds[i % n_folds].push_back(eligible[i]);
  }
  for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
  return plan;
}

GraphStats graph_stats(const CommunityGraph& graph) {
  GraphStats s;
  s.sources = graph.sources().size();
  s.users = graph.users().size();
  s.articles = graph.articles().size();
  s.reviews = graph.reviews().size();
  s.nodes = s.sources + s.users + s.articles + s.reviews;
  s.edges = graph.edges().size();
  s.cliques = graph.cliques().size();
  return s;
}

CorpusPaths corpus_paths(const std::string& dir) {
  const fs::path base(dir);
  return CorpusPaths{(base / "sources.jsonl").string(),
                     (base / "users.jsonl").string(),
                     (base / "articles.jsonl").string(),
                     (base / "reviews.jsonl").string()};
}

CommunityGraph load_corpus(const CorpusPaths& paths) {
  std::vector<Source> sources;
  for_each_json_line(paths.sources, [&](const json& j, std::size_t line) {
    Source s;
    s.id = get_string(j, "id", paths.sources, line);
    s.name = get_string(j, "name", paths.sources, line);
    s.media = get_string(j, "media", paths.sources, line);
    s.format = get_string(j, "format", paths.sources, line);
    s.scope = get_string(j, "scope", paths.sources, line);
    s.viewpoint = get_string(j, "viewpoint", paths.sources, line);
    s.top_topics = get_string_set(j, "top_topics", paths.sources, line);
    s.expertise_topics =
        get_string_set(j, "expertise_topics", paths.sources, line);
    s.ground_rating =
        get_optional_number(j, "ground_rating", paths.sources, line);
    if (s.ground_rating) {
      check_rating_range(*s.ground_rating, "ground_rating", paths.sources,
                         line);
    }
    sources.push_back(std::move(s));
  });

  std::vector<User> users;
  for_each_json_line(paths.users, [&](const json& j, std::size_t line) {
    User u;
    u.id = get_string(j, "id", paths.users, line);
    u.answers = get_count(j, "answers", paths.users, line);
    u.ratings_given = get_count(j, "ratings_given", paths.users, line);
    u.comments = get_count(j, "comments", paths.users, line);
    u.ratings_received = get_count(j, "ratings_received", paths.users, line);
    u.num_raters = get_count(j, "num_raters", paths.users, line);
    u.disagreement_raw =
        get_optional_number(j, "disagreement", paths.users, line);
    u.member_level = get_optional_number(j, "member_level", paths.users, line);
    if (u.member_level) {
      check_rating_range(*u.member_level, "member_level", paths.users, line);
    }
    users.push_back(std::move(u));
  });

  std::vector<Article> articles;
  for_each_json_line(paths.articles, [&](const json& j, std::size_t line) {
    Article a;
    a.id = get_string(j, "id", paths.articles, line);
    a.source_id = get_string(j, "source_id", paths.articles, line);
    a.title = get_string(j, "title", paths.articles, line);
    a.text = get_string(j, "text", paths.articles, line);
    a.explicit_tags = get_string_set(j, "explicit_tags", paths.articles, line);
    a.ground_rating =
        get_optional_number(j, "ground_rating", paths.articles, line);
    if (a.ground_rating) {
      check_rating_range(*a.ground_rating, "ground_rating", paths.articles,
                         line);
    }
    articles.push_back(std::move(a));
  });

  std::vector<Review> reviews;
  for_each_json_line(paths.reviews, [&](const json& j, std::size_t line) {
    Review r;
    r.article_id = get_string(j, "article_id", paths.reviews, line);
    r.user_id = get_string(j, "user_id", paths.reviews, line);
    r.text = get_string(j, "text", paths.reviews, line);
    r.rating = get_number(j, "rating", paths.reviews, line);
    check_rating_range(r.rating, "rating", paths.reviews, line);
    reviews.push_back(std::move(r));
  });

  try {
    return CommunityGraph::build(std::move(sources), std::move(users),
                                 std::move(articles), std::move(reviews));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(std::string("corpus validation: ") + e.what());
  }
}

void save_corpus(const CommunityGraph& graph, const std::string& dir) {
  fs::create_directories(dir);
  const CorpusPaths paths = corpus_paths(dir);

  {
    std::ofstream out(paths.sources);
    for (const auto& [id, s] : graph.sources()) {
      json j{{"id", s.id},     {"name", s.name},       {"media", s.media},
             {"format", s.format}, {"scope", s.scope}, {"viewpoint", s.viewpoint},
             {"top_topics", s.top_topics},
             {"expertise_topics", s.expertise_topics}};
      if (s.ground_rating) j["ground_rating"] = *s.ground_rating;
      out << j.dump() << '\n';
    }
  }
  {
    std::ofstream out(paths.users);
    for (const auto& [id, u] : graph.users()) {
      json j{{"id", u.id},
             {"answers", u.answers},
             {"ratings_given", u.ratings_given},
             {"comments", u.comments},
             {"ratings_received", u.ratings_received},
             {"num_raters", u.num_raters}};
      if (u.disagreement_raw) j["disagreement"] = *u.disagreement_raw;
      if (u.member_level) j["member_level"] = *u.member_level;
      out << j.dump() << '\n';
    }
  }
  {
    std::ofstream out(paths.articles);
    for (const auto& [id, a] : graph.articles()) {
      json j{{"id", a.id},
             {"source_id", a.source_id},
             {"title", a.title},
             {"text", a.text},
             {"explicit_tags", a.explicit_tags}};
      if (a.ground_rating) j["ground_rating"] = *a.ground_rating;
      out << j.dump() << '\n';
    }
  }
  {
    std::ofstream out(paths.reviews);
    for (const auto& [key, r] : graph.reviews()) {
      json j{{"article_id", r.article_id},
             {"user_id", r.user_id},
             {"text", r.text},
             {"rating", r.rating}};
      out << j.dump() << '\n';
    }
  }
}

}  // namespace newscred
