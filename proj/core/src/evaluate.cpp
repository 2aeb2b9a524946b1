#include "newscred/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <set>
#include <stdexcept>

#include "newscred/text.hpp"
#include "newscred/util.hpp"

namespace newscred {

namespace {

HypothesisRow run_pearson(const std::string& name,
                          const std::vector<double>& x,
                          const std::vector<double>& y) {
  HypothesisRow row;
  row.name = name;
  try {
    row.result = pearson(x, y);
    row.ok = true;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<HypothesisRow> hypothesis_suite(
    const CommunityGraph& graph, const HypothesisSettings& settings) {
  std::vector<HypothesisRow> rows;
  const auto stats = disagreement_stats(graph, settings.min_reviews);

  // Political association vs disagreement over qualifying articles.
  {
    std::vector<double> assoc, spread;
    bool have_politics = true;
    try {
      topic_association(graph, settings.politics_tag, settings.politics_tag);
    } catch (const std::exception&) {
      have_politics = false;
    }
    if (have_politics) {
      for (const auto& [article_id, sd] : stats.article_stddev) {
        const Article& article = graph.articles().at(article_id);
        const auto a =
            article_association(graph, article, settings.politics_tag);
        if (!a) continue;
        assoc.push_back(*a);
        spread.push_back(sd);
      }
    }
    HypothesisRow row =
        run_pearson("politics_association_vs_disagreement", assoc, spread);
    if (!have_politics) {
      row.ok = false;
      row.error = "tag '" + settings.politics_tag + "' absent from corpus";
    }
    rows.push_back(std::move(row));
  }

  // User expertise vs the user's disagreement with the community.
  {
    std::vector<double> level, mad;
    for (const auto& [user_id, value] : stats.user_mad) {
      const User& user = graph.users().at(user_id);
      if (!user.member_level) continue;
      level.push_back(*user.member_level);
      mad.push_back(value);
    }
    rows.push_back(run_pearson("expertise_vs_disagreement", level, mad));
  }

  // User expertise vs feedback received from the community.
  {
    std::vector<double> level, received;
    for (const auto& [id, user] : graph.users()) {
      if (!user.member_level) continue;
      level.push_back(*user.member_level);
      received.push_back(static_cast<double>(user.ratings_received));
    }
    rows.push_back(run_pearson("expertise_vs_ratings_received", level, received));
  }

  // Source trustworthiness vs mean credibility of its articles.
  {
    std::map<std::string, std::pair<double, std::size_t>> by_source;
    for (const auto& [id, article] : graph.articles()) {
      if (!article.ground_rating) continue;
      auto& [sum, count] = by_source[article.source_id];
      sum += *article.ground_rating;
      ++count;
    }
    std::vector<double> trust, credibility;
    for (const auto& [source_id, pair] : by_source) {
      const Source& source = graph.sources().at(source_id);
      if (!source.ground_rating) continue;
      trust.push_back(*source.ground_rating);
      credibility.push_back(pair.first / static_cast<double>(pair.second));
    }
    rows.push_back(run_pearson("source_trust_vs_article_credibility", trust,
                               credibility));
  }

  // User expertise vs the user's own error in judging credibility.
  {
    std::map<std::string, std::pair<double, std::size_t>> error_by_user;
    for (const auto& [key, review] : graph.reviews()) {
      if (!stats.article_stddev.count(review.article_id)) continue;
      const Article& article = graph.articles().at(review.article_id);
      if (!article.ground_rating) continue;
      const double err = review.rating - *article.ground_rating;
      auto& [sum, count] = error_by_user[review.user_id];
      sum += err * err;
      ++count;
    }
    std::vector<double> level, error;
    for (const auto& [user_id, pair] : error_by_user) {
      const User& user = graph.users().at(user_id);
      if (!user.member_level) continue;
      level.push_back(*user.member_level);
      error.push_back(pair.first / static_cast<double>(pair.second));
    }
    rows.push_back(run_pearson("expertise_vs_rating_error", level, error));
  }

  return rows;
}

std::vector<TokenizedDoc> lda_corpus(const CommunityGraph& graph,
                                     const FeatureSettings& features,
                                     bool articles_only) {
  std::vector<TokenizedDoc> docs;
  for (const auto& [id, article] : graph.articles()) {
    std::string text = article.title;
    if (!features.title_only) {
      if (!text.empty()) text += ' ';
      text += truncate_text(article.text, features.truncate_chars);
    }
    docs.push_back({"article:" + id, tokenize(text)});
  }
  if (!articles_only) {
    for (const auto& [key, review] : graph.reviews()) {
      docs.push_back({"review:" + key, tokenize(review.text)});
    }
  }
  return docs;
}

namespace {

struct FoldOutcome {
  double mse_ccrf = 0;
  double mse_aggregated = 0;
  long hidden_reads = 0;
};

FoldOutcome run_fold(const CommunityGraph& graph,
                     const FeaturePipeline& pipeline,
                     const std::vector<std::vector<std::string>>& folds,
                     std::size_t fold_index, const EvalSettings& settings) {
  std::set<std::string> hidden(folds[fold_index].begin(),
                               folds[fold_index].end());
  TrainView view(graph, hidden);

  std::vector<std::string> train_articles;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (f == fold_index) continue;
    train_articles.insert(train_articles.end(), folds[f].begin(),
                          folds[f].end());
  }

  const RoleModels roles =
      train_role_models(view, pipeline, train_articles, settings.roles);
  const DesignMatrix train_design = assemble_design(
      view, roles, pipeline, train_articles, /*allow_gamma_only=*/false,
      /*with_targets=*/true);
  const CcrfModel model = train_ccrf(train_design, settings.ccrf);

  const DesignMatrix test_design = assemble_design(
      view, roles, pipeline, folds[fold_index], /*allow_gamma_only=*/false,
      /*with_targets=*/false);
  const auto predictions = infer(gaussian_form(test_design, model.lambda));
  const std::vector<double> ones(test_design.cols(), 1.0);
  const auto aggregated = infer(gaussian_form(test_design, ones));

  // Scoring reads ground truth directly from the graph; only the training
  // and assembly path above is audited.
  std::vector<double> truth;
  truth.reserve(test_design.article_ids.size());
  for (const auto& id : test_design.article_ids) {
    truth.push_back(*graph.articles().at(id).ground_rating);
  }

  FoldOutcome outcome;
  outcome.mse_ccrf = mse(predictions, truth);
  outcome.mse_aggregated = mse(aggregated, truth);
  outcome.hidden_reads = view.hidden_reads();
  return outcome;
}

/// NDCG of a model ranking against ground-truth relevance, at optional
/// cutoff. Entities without a relevance value are skipped.
std::optional<double> ranking_ndcg(
    const std::vector<std::pair<std::string, double>>& ranking,
    const std::map<std::string, double>& relevance, std::size_t cutoff) {
  std::vector<double> ranked;
  for (const auto& [id, score] : ranking) {
    auto it = relevance.find(id);
    if (it != relevance.end()) ranked.push_back(it->second);
  }
  if (ranked.empty()) return std::nullopt;
  std::vector<double> ideal = ranked;
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const std::size_t p =
      cutoff == 0 ? ranked.size() : std::min(cutoff, ranked.size());
  const auto dcg_at = [&](const std::vector<double>& rel) {
    double out = 0;
    for (std::size_t i = 0; i < p; ++i) {
      out += i == 0 ? rel[i] : rel[i] / std::log2(static_cast<double>(i + 1));
    }
    return out;
  };
  const double idcg = dcg_at(ideal);
  if (idcg == 0) return 1.0;
  return dcg_at(ranked) / idcg;
}

}  // namespace

MetricsReport cross_validate(const CommunityGraph& raw_graph,
                             const Lexicon& lexicon,
                             const EvalSettings& settings) {
  const CommunityGraph graph =
      filter_min_reviews(raw_graph, settings.min_reviews);
  const FoldPlan plan = make_folds(graph, settings.folds, settings.seed);

  LdaParams lda_params = settings.lda;
  const auto docs =
      lda_corpus(graph, settings.features, settings.lda_articles_only);
  const LdaModel lda = train_lda(docs, lda_params);
  const FeaturePipeline pipeline(lexicon, &lda, collect_tags(graph),
                                 settings.features);

  MetricsReport report;
  report.seed = settings.seed;
  report.folds = settings.folds;
  report.fold_mse.resize(plan.folds.size());
  report.fold_mse_aggregated.resize(plan.folds.size());

  const std::size_t jobs = std::max<std::size_t>(1, settings.jobs);
  std::size_t next = 0;
  while (next < plan.folds.size()) {
    const std::size_t batch = std::min(jobs, plan.folds.size() - next);
    std::vector<std::future<FoldOutcome>> futures;
    for (std::size_t i = 0; i < batch; ++i) {
      const std::size_t fold = next + i;
      if (batch == 1) {
        futures.push_back(std::async(std::launch::deferred, run_fold,
                                     std::cref(graph), std::cref(pipeline),
                                     std::cref(plan.folds), fold,
                                     std::cref(settings)));
      } else {
        futures.push_back(std::async(std::launch::async, run_fold,
                                     std::cref(graph), std::cref(pipeline),
                                     std::cref(plan.folds), fold,
                                     std::cref(settings)));
      }
    }
    for (std::size_t i = 0; i < batch; ++i) {
      const FoldOutcome outcome = futures[i].get();
      report.fold_mse[next + i] = outcome.mse_ccrf;
      report.fold_mse_aggregated[next + i] = outcome.mse_aggregated;
      report.hidden_rating_reads += outcome.hidden_reads;
    }
    next += batch;
  }

  double sum = 0, sum_agg = 0;
  for (std::size_t f = 0; f < report.fold_mse.size(); ++f) {
    sum += report.fold_mse[f];
    sum_agg += report.fold_mse_aggregated[f];
  }
  report.mean_mse = sum / static_cast<double>(report.fold_mse.size());
  report.mean_mse_aggregated =
      sum_agg / static_cast<double>(report.fold_mse.size());

  // Rankings come from a model trained on all eligible articles.
  std::vector<std::string> all_articles;
  for (const auto& fold : plan.folds) {
    all_articles.insert(all_articles.end(), fold.begin(), fold.end());
  }
  std::sort(all_articles.begin(), all_articles.end());
  TrainView full_view(graph);
  const RoleModels roles =
      train_role_models(full_view, pipeline, all_articles, settings.roles);
  const DesignMatrix design =
      assemble_design(full_view, roles, pipeline, all_articles,
                      /*allow_gamma_only=*/false, /*with_targets=*/true);
  const CcrfModel model = train_ccrf(design, settings.ccrf);
  report.user_ranking = rank_users(model);
  report.source_ranking = rank_sources(model);

  std::map<std::string, double> user_relevance;
  for (const auto& [id, user] : graph.users()) {
    if (user.member_level) user_relevance[id] = *user.member_level;
  }
  std::map<std::string, double> source_relevance;
  for (const auto& [id, source] : graph.sources()) {
    if (source.ground_rating) source_relevance[id] = *source.ground_rating;
  }
  report.ndcg_users =
      ranking_ndcg(report.user_ranking, user_relevance, settings.ndcg_cutoff);
  report.ndcg_sources = ranking_ndcg(report.source_ranking, source_relevance,
                                     settings.ndcg_cutoff);

  HypothesisSettings hypo;
  hypo.min_reviews = settings.min_reviews;
  report.hypotheses = hypothesis_suite(graph, hypo);

  report.config_echo = {
      {"seed", std::to_string(settings.seed)},
      {"folds", std::to_string(settings.folds)},
      {"min_reviews", std::to_string(settings.min_reviews)},
      {"k_topics", std::to_string(settings.lda.n_topics)},
      {"gibbs_iters", std::to_string(settings.lda.iterations)},
      {"rho", fmt_sig6(settings.lda.effective_rho())},
      {"zeta", fmt_sig6(settings.lda.zeta)},
      {"delta", fmt_sig6(settings.features.delta)},
      {"truncate_chars", std::to_string(settings.features.truncate_chars)},
      {"title_only", settings.features.title_only ? "true" : "false"},
      {"svr_c", fmt_sig6(settings.roles.svr.C)},
      {"svr_epsilon", fmt_sig6(settings.roles.svr.epsilon)},
      {"pooling_threshold", std::to_string(settings.roles.pooling_threshold)},
      {"eta", fmt_sig6(settings.ccrf.eta)},
      {"max_iters", std::to_string(settings.ccrf.max_iters)},
      {"reg_log_lambda", fmt_sig6(settings.ccrf.reg_log_lambda)},
      {"jobs", std::to_string(settings.jobs)},
  };
  return report;
}

void write_report(const MetricsReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << "newscred-report v1\n";
  out << "[config]\n";
  for (const auto& [key, value] : report.config_echo) {
    out << key << " = " << value << '\n';
  }
  out << "[mse]\n";
  for (std::size_t f = 0; f < report.fold_mse.size(); ++f) {
    out << "fold_" << (f + 1) << " = " << fmt_sig6(report.fold_mse[f]) << '\n';
  }
  out << "mean = " << fmt_sig6(report.mean_mse) << '\n';
  for (std::size_t f = 0; f < report.fold_mse_aggregated.size(); ++f) {
    out << "aggregated_fold_" << (f + 1) << " = "
        << fmt_sig6(report.fold_mse_aggregated[f]) << '\n';
  }
  out << "aggregated_mean = " << fmt_sig6(report.mean_mse_aggregated) << '\n';
  out << "[ndcg]\n";
  out << "users = "
      << (report.ndcg_users ? fmt_sig6(*report.ndcg_users) : "n/a") << '\n';
  out << "sources = "
      << (report.ndcg_sources ? fmt_sig6(*report.ndcg_sources) : "n/a")
      << '\n';
  out << "[hypotheses]\n";
  for (const auto& row : report.hypotheses) {
    out << row.name << " = ";
    if (row.ok) {
      out << "r=" << fmt_sig6(row.result.r)
          << " p=" << fmt_sig6(row.result.p_value) << " n=" << row.result.n;
    } else {
      out << "error: " << row.error;
    }
    out << '\n';
  }
  out << "[protocol]\n";
  out << "hidden_rating_reads = " << report.hidden_rating_reads << '\n';
}

}  // namespace newscred
