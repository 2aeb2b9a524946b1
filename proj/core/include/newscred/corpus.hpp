// corpus.hpp — the news-community data model.
//
// A community is sources publishing articles, users reviewing them, and the
// clique graph wiring them together. One clique per article: the article, its
// source, its reviewers and their reviews. The graph is immutable once built
// and safe to share read-only across threads.

#ifndef NEWSCRED_CORPUS_HPP
#define NEWSCRED_CORPUS_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace newscred {

struct Source {
  std::string id;
  std::string name;
  std::string media;      // newspaper|blog|radio|magazine|online|tv|wire
  std::string format;
  std::string scope;      // local|state|regional|national|international
  std::string viewpoint;  // far-left|left|center|right|neutral
  std::set<std::string> top_topics;
  std::set<std::string> expertise_topics;
  std::optional<double> ground_rating;  // community trust rating in [1,5]

  bool operator==(const Source&) const = default;
};

struct User {
  std::string id;
  long answers = 0;
  long ratings_given = 0;
  long comments = 0;
  long ratings_received = 0;
  std::optional<double> disagreement_raw;
  long num_raters = 0;
  std::optional<double> member_level;  // expertise proxy in [1,5]

  bool operator==(const User&) const = default;
};

struct Article {
  std::string id;
  std::string source_id;
  std::string title;
  std::string text;
  std::set<std::string> explicit_tags;
  std::optional<double> ground_rating;  // credibility in [1,5]

  bool operator==(const Article&) const = default;
};

struct Review {
  std::string article_id;
  std::string user_id;
  std::string text;
  double rating = 0;  // user-assigned rating in [1,5]

  bool operator==(const Review&) const = default;
};

/// Reviews are keyed by (article, user); the pair is unique by construction.
std::string review_key(const std::string& article_id,
                       const std::string& user_id);

enum class NodeKind : int { Source = 0, User = 1, Article = 2, Review = 3 };

struct NodeRef {
  NodeKind kind;
  std::string id;  // review nodes use review_key()

  auto operator<=>(const NodeRef&) const = default;
};

/// Undirected edge stored with endpoints in canonical (sorted) order.
using Edge = std::pair<NodeRef, NodeRef>;

Edge make_edge(NodeRef a, NodeRef b);

struct Clique {
  std::string article_id;
  std::string source_id;
  std::vector<std::string> user_ids;    // sorted, distinct
  std::vector<std::string> review_ids;  // aligned with user_ids

  bool operator==(const Clique&) const = default;
};

class CommunityGraph {
 public:
  CommunityGraph() = default;

  /// Validates referential integrity, rating ranges and id uniqueness,
  /// then builds cliques and edges. Throws std::runtime_error on violations.
  static CommunityGraph build(std::vector<Source> sources,
                              std::vector<User> users,
                              std::vector<Article> articles,
                              std::vector<Review> reviews);

  const std::map<std::string, Source>& sources() const { return sources_; }
  const std::map<std::string, User>& users() const { return users_; }
  const std::map<std::string, Article>& articles() const { return articles_; }
  const std::map<std::string, Review>& reviews() const { return reviews_; }
  const std::vector<Clique>& cliques() const { return cliques_; }
  const std::set<Edge>& edges() const { return edges_; }

  const Clique& clique_of(const std::string& article_id) const;

  bool operator==(const CommunityGraph&) const = default;

 private:
  std::map<std::string, Source> sources_;
  std::map<std::string, User> users_;
  std::map<std::string, Article> articles_;
  std::map<std::string, Review> reviews_;  // key = review_key()
  std::vector<Clique> cliques_;            // sorted by article id
  std::set<Edge> edges_;
};

struct CorpusPaths {
  std::string sources;
  std::string users;
  std::string articles;
  std::string reviews;
};

/// Standard file names inside a corpus directory.
CorpusPaths corpus_paths(const std::string& dir);

/// Loads the four JSON-Lines files. Parse errors name file and line.
CommunityGraph load_corpus(const CorpusPaths& paths);

/// Writes the four JSON-Lines files into dir (created if missing).
/// load_corpus(corpus_paths(dir)) round-trips exactly.
void save_corpus(const CommunityGraph& graph, const std::string& dir);

/// Applies the seven interaction rules to the populated cliques.
std::set<Edge> build_edges(const CommunityGraph& graph);

/// Keeps articles whose clique has at least k reviews; their reviews,
/// cliques and edges are rebuilt. Sources and users are always retained.
CommunityGraph filter_min_reviews(const CommunityGraph& graph, std::size_t k);

struct FoldPlan {
  std::vector<std::vector<std::string>> folds;  // disjoint article-id sets
  std::uint64_t seed = 0;
};

/// Partitions the rated articles into n_folds near-equal folds (sizes differ
/// by at most one), deterministically under the seed. Throws when fewer
/// rated articles than folds exist.
FoldPlan make_folds(const CommunityGraph& graph, std::size_t n_folds,
                    std::uint64_t seed);

struct GraphStats {
  std::size_t sources = 0;
  std::size_t users = 0;
  std::size_t articles = 0;
  std::size_t reviews = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t cliques = 0;
};

GraphStats graph_stats(const CommunityGraph& graph);

}  // namespace newscred

#endif  // NEWSCRED_CORPUS_HPP
