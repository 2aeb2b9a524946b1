#include "newscred/lda.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "newscred/rng.hpp"
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

}  // namespace

int LdaModel::word_index(const std::string& word) const {
  auto it = word_index_.find(word);
  return it == word_index_.end() ? -1 : it->second;
}

std::vector<double> LdaModel::conditional(int doc, int word) const {
  std::vector<double> p(static_cast<std::size_t>(k_));
  const auto& nd = doc_topic_[doc];
  long nd_total = 0;
  for (long c : nd) nd_total += c;
  const double v = static_cast<double>(vocab_.size());
  double sum = 0;
  for (int k = 0; k < k_; ++k) {
    const double doc_part = (static_cast<double>(nd[k]) + rho_) /
                            (static_cast<double>(nd_total) + k_ * rho_);
    const double word_part =
        (static_cast<double>(topic_word_[k][word]) + zeta_) /
        (static_cast<double>(topic_total_[k]) + v * zeta_);
    p[k] = doc_part * word_part;
    sum += p[k];
  }
  for (auto& x : p) x /= sum;
  return p;
}

void LdaModel::audit_counts() const {
  std::vector<std::vector<long>> nd(docs_.size(),
                                    std::vector<long>(k_, 0));
  std::vector<std::vector<long>> nw(
      k_, std::vector<long>(vocab_.size(), 0));
  std::vector<long> nt(k_, 0);
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      const int k = z_[d][i];
      const int w = docs_[d][i];
      ++nd[d][k];
      ++nw[k][w];
      ++nt[k];
    }
  }
  if (nd != doc_topic_ || nw != topic_word_ || nt != topic_total_) {
    throw std::runtime_error("lda: count tables inconsistent with assignments");
  }
}

void LdaModel::finalize_distributions() {
  const double v = static_cast<double>(vocab_.size());
  theta_.assign(docs_.size(), std::vector<double>(k_, 0));
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    long total = 0;
    for (long c : doc_topic_[d]) total += c;
    for (int k = 0; k < k_; ++k) {
      theta_[d][k] = (static_cast<double>(doc_topic_[d][k]) + rho_) /
                     (static_cast<double>(total) + k_ * rho_);
    }
  }
  phi_.assign(k_, std::vector<double>(vocab_.size(), 0));
  for (int k = 0; k < k_; ++k) {
    for (std::size_t w = 0; w < vocab_.size(); ++w) {
      phi_[k][w] = (static_cast<double>(topic_word_[k][w]) + zeta_) /
                   (static_cast<double>(topic_total_[k]) + v * zeta_);
    }
  }
}

LdaModel LdaModel::from_assignments(const std::vector<TokenizedDoc>& docs,
                                    int n_topics, double rho, double zeta,
                                    const std::vector<std::vector<int>>& z) {
  LdaModel m;
  m.k_ = n_topics;
  m.rho_ = rho;
  m.zeta_ = zeta;

  std::set<std::string> words;
  for (const auto& d : docs) {
    for (const auto& t : d.tokens) words.insert(t);
  }
  m.vocab_.assign(words.begin(), words.end());
  for (std::size_t i = 0; i < m.vocab_.size(); ++i) {
    m.word_index_[m.vocab_[i]] = static_cast<int>(i);
  }
  for (const auto& d : docs) {
    m.doc_keys_.push_back(d.key);
    std::vector<int> ids;
    ids.reserve(d.tokens.size());
    for (const auto& t : d.tokens) ids.push_back(m.word_index_.at(t));
    m.docs_.push_back(std::move(ids));
  }
  m.z_ = z;
  m.doc_topic_.assign(m.docs_.size(), std::vector<long>(n_topics, 0));
  m.topic_word_.assign(n_topics, std::vector<long>(m.vocab_.size(), 0));
  m.topic_total_.assign(n_topics, 0);
  for (std::size_t d = 0; d < m.docs_.size(); ++d) {
    if (m.z_[d].size() != m.docs_[d].size()) {
      throw std::runtime_error("lda: assignment/document length mismatch");
    }
    for (std::size_t i = 0; i < m.docs_[d].size(); ++i) {
      const int k = m.z_[d][i];
      if (k < 0 || k >= n_topics) {
        throw std::runtime_error("lda: assignment out of range");
      }
      ++m.doc_topic_[d][k];
      ++m.topic_word_[k][m.docs_[d][i]];
      ++m.topic_total_[k];
    }
  }
  m.finalize_distributions();
  return m;
}

LdaModel train_lda(const std::vector<TokenizedDoc>& docs,
                   const LdaParams& params) {
  if (docs.empty()) throw std::runtime_error("lda: empty corpus");
  if (params.n_topics < 1) throw std::runtime_error("lda: n_topics must be >= 1");
  if (params.iterations < 1) {
    throw std::runtime_error("lda: iterations must be >= 1");
  }

  Rng rng(params.seed);
  const int k = params.n_topics;

  // Random initial assignment, then derive the tables.
  std::vector<std::vector<int>> z;
  z.reserve(docs.size());
  std::size_t total_tokens = 0;
  for (const auto& d : docs) {
    std::vector<int> zd(d.tokens.size());
    for (auto& t : zd) t = static_cast<int>(rng.below(k));
    total_tokens += zd.size();
    z.push_back(std::move(zd));
  }
  if (total_tokens == 0) throw std::runtime_error("lda: empty vocabulary");

  LdaModel m = LdaModel::from_assignments(docs, k, params.effective_rho(),
                                          params.zeta, z);
  m.seed_ = params.seed;
  m.iters_ = params.iterations;

  const double v = static_cast<double>(m.vocab_.size());
  std::vector<double> p(static_cast<std::size_t>(k));
  for (int iter = 0; iter < params.iterations; ++iter) {
    for (std::size_t d = 0; d < m.docs_.size(); ++d) {
      auto& nd = m.doc_topic_[d];
      for (std::size_t i = 0; i < m.docs_[d].size(); ++i) {
        const int w = m.docs_[d][i];
        const int old_k = m.z_[d][i];
        --nd[old_k];
        --m.topic_word_[old_k][w];
        --m.topic_total_[old_k];

        // Unnormalized Gibbs conditional; the doc-length denominator is
        // constant over k and cancels in the draw.
        double sum = 0;
        for (int t = 0; t < k; ++t) {
          const double doc_part = static_cast<double>(nd[t]) + m.rho_;
          const double word_part =
              (static_cast<double>(m.topic_word_[t][w]) + m.zeta_) /
              (static_cast<double>(m.topic_total_[t]) + v * m.zeta_);
          p[t] = doc_part * word_part;
          sum += p[t];
        }
        double u = rng.uniform() * sum;
        int new_k = k - 1;
        for (int t = 0; t < k; ++t) {
          u -= p[t];
          if (u < 0) {
            new_k = t;
            break;
          }
        }
        m.z_[d][i] = new_k;
        ++nd[new_k];
        ++m.topic_word_[new_k][w];
        ++m.topic_total_[new_k];
      }
    }
  }
  m.finalize_distributions();
  return m;
}

void save_lda(const LdaModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write lda model: " + path);
  out << "newscred-lda v1\n";
  out << model.n_topics() << ' ' << model.vocab_size() << ' '
      << fmt_full(model.rho()) << ' ' << fmt_full(model.zeta()) << ' '
      << model.seed() << ' ' << model.iterations() << '\n';
  for (const auto& w : model.vocab()) out << w << '\n';
  for (const auto& row : model.phi()) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ' ';
      out << fmt_full(row[i]);
    }
    out << '\n';
  }
  out << model.doc_keys().size() << '\n';
  // Doc keys may contain any byte except newline, so each key gets its own
  // line followed by its theta row.
  for (std::size_t d = 0; d < model.doc_keys().size(); ++d) {
    out << model.doc_keys()[d] << '\n';
    const auto& row = model.theta()[d];
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ' ';
      out << fmt_full(row[i]);
    }
    out << '\n';
  }
}

namespace {

std::vector<double> parse_row(const std::string& line, std::size_t expected,
                              const std::string& path) {
  std::istringstream ss(line);
  std::vector<double> row(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    if (!(ss >> row[i])) {
      throw std::runtime_error("truncated numeric row in " + path);
    }
  }
  return row;
}

}  // namespace

LdaModel load_lda(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lda model: " + path);
  std::string line;
  std::getline(in, line);
  if (line != "newscred-lda v1") {
    throw std::runtime_error("bad lda model header in " + path);
  }
  LdaModel m;
  int vocab_size = 0;
  if (!std::getline(in, line)) {
    throw std::runtime_error("truncated lda model: " + path);
  }
  {
    std::istringstream ss(line);
    if (!(ss >> m.k_ >> vocab_size >> m.rho_ >> m.zeta_ >> m.seed_ >>
          m.iters_) ||
        m.k_ < 1 || vocab_size < 0) {
      throw std::runtime_error("bad lda model dimensions in " + path);
    }
  }
  m.vocab_.resize(vocab_size);
  for (int i = 0; i < vocab_size; ++i) {
    if (!std::getline(in, m.vocab_[i])) {
      throw std::runtime_error("truncated lda vocabulary in " + path);
    }
    m.word_index_[m.vocab_[i]] = i;
  }
  m.phi_.assign(m.k_, std::vector<double>(vocab_size, 0));
  for (int t = 0; t < m.k_; ++t) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("truncated phi rows in " + path);
    }
    m.phi_[t] = parse_row(line, vocab_size, path);
  }
  if (!std::getline(in, line)) {
    throw std::runtime_error("truncated lda model: " + path);
  }
  const std::size_t n_docs = std::stoul(line);
  m.doc_keys_.resize(n_docs);
  m.theta_.assign(n_docs, {});
  for (std::size_t d = 0; d < n_docs; ++d) {
    if (!std::getline(in, m.doc_keys_[d]) || !std::getline(in, line)) {
      throw std::runtime_error("truncated theta rows in " + path);
    }
    m.theta_[d] = parse_row(line, m.k_, path);
  }
  return m;
}

FeatureMap topic_features(const std::vector<std::string>& tokens,
                          const std::vector<std::string>& explicit_tags,
                          const LdaModel& model, double delta) {
  FeatureMap out;
  std::set<std::string> tags;
  for (const auto& t : explicit_tags) tags.insert(lower_copy(t));
  for (const auto& token : tokens) {
    if (tags.count(token)) out["tag:" + token] += 1.0;
    const int w = model.word_index(token);
    if (w < 0) continue;
    for (int k = 0; k < model.n_topics(); ++k) {
      const double p = model.phi_at(k, w);
      if (p > delta) out["topic:" + std::to_string(k)] += p;
    }
  }
  return out;
}

double topic_association(const CommunityGraph& graph, const std::string& tag_a,
                         const std::string& tag_b) {
  const std::string a = lower_copy(tag_a);
  const std::string b = lower_copy(tag_b);
  std::size_t with_a = 0, with_both = 0;
  for (const auto& [id, article] : graph.articles()) {
    bool has_a = false, has_b = false;
    for (const auto& t : article.explicit_tags) {
      const std::string lt = lower_copy(t);
      if (lt == a) has_a = true;
      if (lt == b) has_b = true;
    }
    if (has_a) {
      ++with_a;
      if (has_b) ++with_both;
    }
  }
  if (with_a == 0) {
    throw std::runtime_error("topic_association: no article tagged '" + tag_a +
                             "'");
  }
  return static_cast<double>(with_both) / static_cast<double>(with_a);
}

std::optional<double> article_association(const CommunityGraph& graph,
                                          const Article& article,
                                          const std::string& tag) {
  if (article.explicit_tags.empty()) return std::nullopt;
  double sum = 0;
  std::size_t n = 0;
  for (const auto& t : article.explicit_tags) {
    sum += topic_association(graph, t, tag);
    ++n;
  }
  return sum / static_cast<double>(n);
}

}  // namespace newscred
