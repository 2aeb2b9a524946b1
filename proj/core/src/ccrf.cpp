#include "newscred/ccrf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace newscred {

namespace {

constexpr double kTwoPi = 6.2831853071795864769;

}  // namespace

std::string column_label(const CcrfColumn& column) {
  switch (column.kind) {
    case CcrfColumn::Kind::User:
      return "user:" + column.id;
    case CcrfColumn::Kind::Source:
      return "source:" + column.id;
    case CcrfColumn::Kind::BackgroundUser:
      return "background-user";
    case CcrfColumn::Kind::BackgroundSource:
      return "background-source";
    case CcrfColumn::Kind::Language:
      return "language";
    case CcrfColumn::Kind::Topic:
      return "topic";
  }
  return "?";
}

std::vector<double> GaussianForm::sigma_diag() const {
  std::vector<double> out(q_diag.size());
  for (std::size_t j = 0; j < q_diag.size(); ++j) out[j] = 1.0 / (2.0 * q_diag[j]);
  return out;
}

std::vector<double> GaussianForm::mean() const {
  std::vector<double> out(q_diag.size());
  for (std::size_t j = 0; j < q_diag.size(); ++j) {
    out[j] = b[j] / (2.0 * q_diag[j]);
  }
  return out;
}

GaussianForm gaussian_form(const DesignMatrix& design,
                           std::span<const double> lambda) {
  if (lambda.size() != design.cols()) {
    throw std::runtime_error("ccrf: lambda size mismatch");
  }
  for (double l : lambda) {
    if (!(l > 0)) throw std::runtime_error("ccrf: lambda must be > 0");
  }
  if (design.rows() == 0) {
    throw std::runtime_error("ccrf: empty design matrix");
  }
  GaussianForm form;
  form.lambda.assign(lambda.begin(), lambda.end());
  form.q_diag.assign(design.rows(), 0.0);
  form.b.assign(design.rows(), 0.0);
  form.c = 0;
  for (std::size_t j = 0; j < design.rows(); ++j) {
    for (std::size_t k = 0; k < design.cols(); ++k) {
      if (!design.D[j][k]) continue;
      const double x = design.X[j][k];
      form.q_diag[j] += lambda[k];
      form.b[j] += 2.0 * lambda[k] * x;
      form.c += lambda[k] * x * x;
    }
    if (!(form.q_diag[j] > 0)) {
      throw std::runtime_error("ccrf: row " + std::to_string(j) +
                               " has no active column");
    }
  }
  return form;
}

std::vector<double> infer(const GaussianForm& form) { return form.mean(); }

double log_density(const GaussianForm& form, std::span<const double> y) {
  if (y.size() != form.q_diag.size()) {
    throw std::runtime_error("ccrf: target length mismatch");
  }
  const auto mu = form.mean();
  double logp = 0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double sigma = 1.0 / (2.0 * form.q_diag[j]);
    const double d = y[j] - mu[j];
    logp += -0.5 * std::log(kTwoPi * sigma) - 0.5 * d * d / sigma;
  }
  return logp;
}

std::vector<double> grad_log_lambda(const GaussianForm& form,
                                    const DesignMatrix& design,
                                    std::span<const double> y) {
  if (y.size() != design.rows()) {
    throw std::runtime_error("ccrf: target length mismatch");
  }
  const auto mu = form.mean();
  const auto sigma = form.sigma_diag();
  std::vector<double> grad(design.cols(), 0.0);
  for (std::size_t k = 0; k < design.cols(); ++k) {
    double g = 0;
    for (std::size_t j = 0; j < design.rows(); ++j) {
      if (!design.D[j][k]) continue;
      const double x = design.X[j][k];
      g += -y[j] * y[j] + 2.0 * y[j] * x - 2.0 * mu[j] * x + mu[j] * mu[j] +
           sigma[j];
    }
    grad[k] = form.lambda[k] * g;
  }
  return grad;
}

CcrfModel train_ccrf(const DesignMatrix& design, const CcrfSettings& settings) {
  if (design.y.size() != design.rows()) {
    throw std::runtime_error("ccrf: training requires targets for every row");
  }
  CcrfModel model;
  model.columns = design.columns;
  const std::size_t m = design.cols();
  std::vector<double> log_lambda(m, 0.0);
  const double log_ceiling = std::log(settings.lambda_ceiling);

  const auto lambda_of = [&](const std::vector<double>& ll) {
    std::vector<double> lambda(ll.size());
    for (std::size_t k = 0; k < ll.size(); ++k) lambda[k] = std::exp(ll[k]);
    return lambda;
  };
  const auto penalized_objective = [&](const std::vector<double>& ll) {
    const auto lambda = lambda_of(ll);
    const auto form = gaussian_form(design, lambda);
    double obj = log_density(form, design.y);
    if (settings.reg_log_lambda > 0) {
      for (double v : ll) obj -= 0.5 * settings.reg_log_lambda * v * v;
    }
    return obj;
  };

  double obj = penalized_objective(log_lambda);
  if (!std::isfinite(obj)) {
    throw std::runtime_error("ccrf: non-finite objective at iteration 0");
  }
  model.objective.push_back(obj);

  double step = settings.eta;
  for (int iter = 0; iter < settings.max_iters; ++iter) {
    const auto lambda = lambda_of(log_lambda);
    const auto form = gaussian_form(design, lambda);
    auto grad = grad_log_lambda(form, design, design.y);
    if (settings.reg_log_lambda > 0) {
      for (std::size_t k = 0; k < m; ++k) {
        grad[k] -= settings.reg_log_lambda * log_lambda[k];
      }
    }

    std::vector<double> cand(m);
    bool accepted = false;
    double new_obj = obj;
    for (int halvings = 0; halvings < 60; ++halvings) {
      for (std::size_t k = 0; k < m; ++k) {
        cand[k] = std::min(log_lambda[k] + step * grad[k], log_ceiling);
      }
      new_obj = penalized_objective(cand);
      if (!std::isfinite(new_obj)) {
        throw std::runtime_error("ccrf: non-finite objective at iteration " +
                                 std::to_string(iter + 1));
      }
      if (new_obj > obj) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no ascent direction left at any step size

    for (std::size_t k = 0; k < m; ++k) {
      if (cand[k] >= log_ceiling && !model.ceiling_hit) {
        model.ceiling_hit = true;
        std::cerr << "ccrf: lambda ceiling " << settings.lambda_ceiling
                  << " reached for column " << column_label(design.columns[k])
                  << "\n";
      }
    }
    log_lambda = cand;
    const double improvement = new_obj - obj;
    obj = new_obj;
    model.objective.push_back(obj);
    step *= 2.0;
    if (improvement < settings.tol * std::max(1.0, std::abs(obj))) break;
  }

  model.lambda = lambda_of(log_lambda);
  return model;
}

DesignMatrix assemble_design(const TrainView& view, const RoleModels& roles,
                             const FeaturePipeline& pipeline,
                             const std::vector<std::string>& articles,
                             bool allow_gamma_only, bool with_targets) {
  if (articles.empty()) {
    throw std::runtime_error("ccrf: empty article set");
  }
  const CommunityGraph& graph = view.graph();

  DesignMatrix design;
  for (const auto& [id, m] : roles.per_user) {
    design.columns.push_back({CcrfColumn::Kind::User, id});
  }
  design.columns.push_back({CcrfColumn::Kind::BackgroundUser, ""});
  for (const auto& [id, m] : roles.per_source) {
    design.columns.push_back({CcrfColumn::Kind::Source, id});
  }
  design.columns.push_back({CcrfColumn::Kind::BackgroundSource, ""});
  design.columns.push_back({CcrfColumn::Kind::Language, ""});
  design.columns.push_back({CcrfColumn::Kind::Topic, ""});

  std::map<std::string, std::size_t> user_col;
  std::map<std::string, std::size_t> source_col;
  std::size_t bg_user_col = 0, bg_source_col = 0, lang_col = 0, topic_col = 0;
  for (std::size_t k = 0; k < design.columns.size(); ++k) {
    const auto& col = design.columns[k];
    switch (col.kind) {
      case CcrfColumn::Kind::User: user_col[col.id] = k; break;
      case CcrfColumn::Kind::Source: source_col[col.id] = k; break;
      case CcrfColumn::Kind::BackgroundUser: bg_user_col = k; break;
      case CcrfColumn::Kind::BackgroundSource: bg_source_col = k; break;
      case CcrfColumn::Kind::Language: lang_col = k; break;
      case CcrfColumn::Kind::Topic: topic_col = k; break;
    }
  }

  std::vector<std::string> sorted_articles = articles;
  std::sort(sorted_articles.begin(), sorted_articles.end());

  const std::size_t m = design.columns.size();
  for (const auto& article_id : sorted_articles) {
    const auto ait = graph.articles().find(article_id);
    if (ait == graph.articles().end()) {
      throw std::runtime_error("ccrf: unknown article " + article_id);
    }
    const Article& article = ait->second;
    const Clique& clique = graph.clique_of(article_id);
    if (clique.review_ids.empty() && !allow_gamma_only) {
      throw std::runtime_error("ccrf: article " + article_id +
                               " has no reviews");
    }

    std::vector<double> x(m, 0.0);
    std::vector<std::uint8_t> d(m, 0);

    // Reviewer columns. Pooled reviewers share the background column; its
    // entry is the mean background prediction over those reviewers.
    double bg_sum = 0;
    std::size_t bg_count = 0;
    for (std::size_t i = 0; i < clique.user_ids.size(); ++i) {
      const Review& review = graph.reviews().at(clique.review_ids[i]);
      const auto features = pipeline.review_features(review);
      const auto uit = user_col.find(clique.user_ids[i]);
      if (uit != user_col.end()) {
        x[uit->second] = roles.per_user.at(clique.user_ids[i]).predict(features);
        d[uit->second] = 1;
      } else {
        bg_sum += roles.background_user.predict(features);
        ++bg_count;
      }
    }
    if (bg_count > 0) {
      x[bg_user_col] = bg_sum / static_cast<double>(bg_count);
      d[bg_user_col] = 1;
    }

    // Source column or the background source.
    const Source& source = graph.sources().at(article.source_id);
    const auto source_feats = pipeline.source_features(source);
    const auto sit = source_col.find(article.source_id);
    if (sit != source_col.end()) {
      x[sit->second] = roles.per_source.at(article.source_id).predict(source_feats);
      d[sit->second] = 1;
    } else {
      x[bg_source_col] = roles.background_source.predict(source_feats);
      d[bg_source_col] = 1;
    }

    // Gamma columns are active for every row.
    x[lang_col] = roles.language.predict(pipeline.article_style(article));
    d[lang_col] = 1;
    x[topic_col] = roles.topic.predict(pipeline.article_topic(article));
    d[topic_col] = 1;

    design.article_ids.push_back(article_id);
    design.X.push_back(std::move(x));
    design.D.push_back(std::move(d));
    if (with_targets) {
      const auto rating = view.article_rating(article_id);
      if (!rating) {
        throw std::runtime_error("ccrf: training article without rating: " +
                                 article_id);
      }
      design.y.push_back(*rating);
    }
  }
  return design;
}

std::pair<DesignMatrix, GaussianForm> assemble(
    const TrainView& view, const RoleModels& roles,
    const FeaturePipeline& pipeline, const std::vector<std::string>& articles,
    std::span<const double> lambda, bool allow_gamma_only, bool with_targets) {
  DesignMatrix design = assemble_design(view, roles, pipeline, articles,
                                        allow_gamma_only, with_targets);
  GaussianForm form = gaussian_form(design, lambda);
  return {std::move(design), std::move(form)};
}

namespace {

std::vector<std::pair<std::string, double>> rank_columns(
    const CcrfModel& model, CcrfColumn::Kind kind) {
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t k = 0; k < model.columns.size(); ++k) {
    if (model.columns[k].kind == kind) {
      out.emplace_back(model.columns[k].id, model.lambda[k]);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

}  // namespace

std::vector<std::pair<std::string, double>> rank_users(const CcrfModel& model) {
  return rank_columns(model, CcrfColumn::Kind::User);
}

std::vector<std::pair<std::string, double>> rank_sources(
    const CcrfModel& model) {
  return rank_columns(model, CcrfColumn::Kind::Source);
}

void save_ccrf(const CcrfModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write ccrf model: " + path);
  out << "newscred-ccrf v1\n";
  out << "columns " << model.columns.size() << '\n';
  for (std::size_t k = 0; k < model.columns.size(); ++k) {
    out << column_label(model.columns[k]) << '\n';
    out << fmt_full(model.lambda[k]) << '\n';
  }
  out << "iterations " << model.objective.size() << '\n';
  for (double v : model.objective) out << fmt_full(v) << '\n';
}

CcrfModel load_ccrf(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ccrf model: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "newscred-ccrf v1") {
    throw std::runtime_error(path + ": bad ccrf model header");
  }
  if (!std::getline(in, line) || line.rfind("columns ", 0) != 0) {
    throw std::runtime_error(path + ": expected column count");
  }
  const std::size_t m = std::stoul(line.substr(8));
  CcrfModel model;
  for (std::size_t k = 0; k < m; ++k) {
    if (!std::getline(in, line)) throw std::runtime_error(path + ": truncated");
    CcrfColumn col;
    if (line == "background-user") {
      col.kind = CcrfColumn::Kind::BackgroundUser;
    } else if (line == "background-source") {
      col.kind = CcrfColumn::Kind::BackgroundSource;
    } else if (line == "language") {
      col.kind = CcrfColumn::Kind::Language;
    } else if (line == "topic") {
      col.kind = CcrfColumn::Kind::Topic;
    } else if (line.rfind("user:", 0) == 0) {
      col.kind = CcrfColumn::Kind::User;
      col.id = line.substr(5);
    } else if (line.rfind("source:", 0) == 0) {
      col.kind = CcrfColumn::Kind::Source;
      col.id = line.substr(7);
    } else {
      throw std::runtime_error(path + ": unknown column '" + line + "'");
    }
    model.columns.push_back(std::move(col));
    if (!std::getline(in, line)) throw std::runtime_error(path + ": truncated");
    model.lambda.push_back(parse_double(line));
  }
  if (std::getline(in, line) && line.rfind("iterations ", 0) == 0) {
    const std::size_t iters = std::stoul(line.substr(11));
    for (std::size_t i = 0; i < iters && std::getline(in, line); ++i) {
      model.objective.push_back(parse_double(line));
    }
  }
  return model;
}

void write_ranking_csv(
    const std::vector<std::pair<std::string, double>>& ranking,
    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write ranking: " + path);
  out << "rank,id,score\n";
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    out << (i + 1) << ',' << ranking[i].first << ','
        << fmt_sig6(ranking[i].second) << '\n';
  }
}

}  // namespace newscred
