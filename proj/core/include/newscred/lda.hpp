// lda.hpp — latent Dirichlet allocation with collapsed Gibbs sampling,
// plus the combined explicit-tag / latent-topic feature vector.

#ifndef NEWSCRED_LDA_HPP
#define NEWSCRED_LDA_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "newscred/corpus.hpp"
#include "newscred/util.hpp"

namespace newscred {

struct TokenizedDoc {
  std::string key;
  std::vector<std::string> tokens;
};

struct LdaParams {
  int n_topics = 300;
  double rho = -1.0;   // doc-topic Dirichlet prior; < 0 means 50 / n_topics
  double zeta = 0.01;  // topic-word Dirichlet prior
  int iterations = 200;
  std::uint64_t seed = 0;

  double effective_rho() const {
    return rho > 0 ? rho : 50.0 / static_cast<double>(n_topics);
  }
};

/// Collapsed-Gibbs LDA state. Count tables are exposed so they can be
/// audited against the assignments at any time.
class LdaModel {
 public:
  int n_topics() const { return k_; }
  int vocab_size() const { return static_cast<int>(vocab_.size()); }
  double rho() const { return rho_; }
  double zeta() const { return zeta_; }
  std::uint64_t seed() const { return seed_; }
  int iterations() const { return iters_; }

  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::vector<std::string>& doc_keys() const { return doc_keys_; }
  const std::vector<std::vector<int>>& docs() const { return docs_; }
  const std::vector<std::vector<int>>& assignments() const { return z_; }
  const std::vector<std::vector<long>>& doc_topic_counts() const {
    return doc_topic_;
  }
  const std::vector<std::vector<long>>& topic_word_counts() const {
    return topic_word_;
  }
  const std::vector<long>& topic_totals() const { return topic_total_; }

  /// Doc-topic distribution rows (smoothed final counts); each row sums to 1.
  const std::vector<std::vector<double>>& theta() const { return theta_; }
  /// Topic-word distribution rows (smoothed final counts); each row sums to 1.
  const std::vector<std::vector<double>>& phi() const { return phi_; }

  int word_index(const std::string& word) const;

  /// Gibbs conditional P(z = k | w, rest) for resampling a token of word w
  /// in document d. The caller must have removed that token from the count
  /// tables first. The returned vector is normalized.
  std::vector<double> conditional(int doc, int word) const;

  /// Probability of word w under topic k from the smoothed final counts.
  double phi_at(int topic, int word) const { return phi_[topic][word]; }

  /// Recomputes every count table from the assignments and throws if any
  /// entry disagrees with the incrementally maintained tables.
  void audit_counts() const;

  /// Test/support constructor: builds a state from documents and explicit
  /// assignments, deriving all count tables.
  static LdaModel from_assignments(const std::vector<TokenizedDoc>& docs,
                                   int n_topics, double rho, double zeta,
                                   const std::vector<std::vector<int>>& z);

  friend LdaModel train_lda(const std::vector<TokenizedDoc>& docs,
                            const LdaParams& params);
  friend LdaModel load_lda(const std::string& path);

 private:
  void finalize_distributions();

  int k_ = 0;
  double rho_ = 0, zeta_ = 0;
  std::uint64_t seed_ = 0;
  int iters_ = 0;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> word_index_;
  std::vector<std::string> doc_keys_;
  std::vector<std::vector<int>> docs_;  // token word-ids per doc
  std::vector<std::vector<int>> z_;     // topic assignment per token
  std::vector<std::vector<long>> doc_topic_;   // n(d,k)
  std::vector<std::vector<long>> topic_word_;  // n(k,w)
  std::vector<long> topic_total_;              // n(k)
  std::vector<std::vector<double>> theta_;
  std::vector<std::vector<double>> phi_;
};

/// Runs `iterations` full Gibbs sweeps over all tokens and freezes Theta/Phi
/// from the final smoothed counts. Deterministic under a fixed seed.
/// Throws on an empty corpus, empty vocabulary, or iterations < 1.
LdaModel train_lda(const std::vector<TokenizedDoc>& docs,
                   const LdaParams& params);

void save_lda(const LdaModel& model, const std::string& path);
LdaModel load_lda(const std::string& path);

/// Combined topic feature vector for one token stream.
///   - "tag:<t>"   += 1 for every token equal to explicit tag t
///   - "topic:<k>" += phi_k(w) for every token w with phi_k(w) > delta
/// Tags are matched lowercase against lowercase tokens.
FeatureMap topic_features(const std::vector<std::string>& tokens,
                          const std::vector<std::string>& explicit_tags,
                          const LdaModel& model, double delta);

/// Rel(a,b): fraction of articles tagged `a` that are also tagged `b`.
/// Throws when no article carries tag `a`. Tags compare lowercased.
double topic_association(const CommunityGraph& graph, const std::string& tag_a,
                         const std::string& tag_b);

/// Mean of Rel(t, tag) over the article's tags; nullopt for untagged articles.
std::optional<double> article_association(const CommunityGraph& graph,
                                          const Article& article,
                                          const std::string& tag);

}  // namespace newscred

#endif  // NEWSCRED_LDA_HPP
