// view.hpp — rating access guard for blind-fold evaluation.
//
// Training code reads article and review ratings only through a TrainView.
// Ratings belonging to hidden (test-fold) articles are never returned, and
// every attempted read of one is counted, so a run can prove that the
// held-out fold was used by id and text only.

#ifndef NEWSCRED_VIEW_HPP
#define NEWSCRED_VIEW_HPP

#include <atomic>
#include <optional>
#include <set>
#include <string>

#include "newscred/corpus.hpp"

namespace newscred {

class TrainView {
 public:
  explicit TrainView(const CommunityGraph& graph,
                     std::set<std::string> hidden_articles = {})
      : graph_(&graph), hidden_(std::move(hidden_articles)) {}

  const CommunityGraph& graph() const { return *graph_; }

  bool is_hidden(const std::string& article_id) const {
    return hidden_.count(article_id) > 0;
  }

  /// Ground rating of an article, or nullopt when the article is hidden
  /// (the attempted read is counted) or unrated.
  std::optional<double> article_rating(const std::string& article_id) const {
    if (is_hidden(article_id)) {
      ++hidden_reads_;
      return std::nullopt;
    }
    const auto it = graph_->articles().find(article_id);
    if (it == graph_->articles().end()) return std::nullopt;
    return it->second.ground_rating;
  }

  /// User-assigned rating of a review, guarded the same way.
  std::optional<double> review_rating(const Review& review) const {
    if (is_hidden(review.article_id)) {
      ++hidden_reads_;
      return std::nullopt;
    }
    return review.rating;
  }

  long hidden_reads() const { return hidden_reads_.load(); }

 private:
  const CommunityGraph* graph_;
  std::set<std::string> hidden_;
  mutable std::atomic<long> hidden_reads_{0};
};

}  // namespace newscred

#endif  // NEWSCRED_VIEW_HPP
