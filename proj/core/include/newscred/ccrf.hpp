// ccrf.hpp — continuous conditional random field over article ratings.
//
// Each article's clique contributes a quadratic energy
//   -sum_k lambda_k * active(k, j) * (y_j - pred_k(j))^2
// over the active predictors: the reviewers' user models (or the background
// user column), the source model (or background source), and the language
// and topic models. Collecting terms gives a diagonal Gaussian
//   P(y|X) ~ N(mu, Sigma),  Q_jj = sum_k lambda_k D[j,k],
//   b_j = 2 sum_k lambda_k X[j,k],  Sigma_jj = 1/(2 Q_jj),  mu_j = b_j/(2 Q_jj).
// lambda is learned by gradient ascent on the log-likelihood in log-space,
// which keeps every weight strictly positive. The per-column activity mask
// enters the derivative exactly (D_k = diag of column k); with D_k = I the
// expression reduces to the dense-activity special case.

#ifndef NEWSCRED_CCRF_HPP
#define NEWSCRED_CCRF_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "newscred/roles.hpp"
#include "newscred/view.hpp"

namespace newscred {

struct CcrfColumn {
  enum class Kind : int {
    User = 0,
    Source = 1,
    BackgroundUser = 2,
    BackgroundSource = 3,
    Language = 4,
    Topic = 5,
  };
  Kind kind = Kind::Language;
  std::string id;  // set for User/Source columns

  bool operator==(const CcrfColumn&) const = default;
};

std::string column_label(const CcrfColumn& column);

struct DesignMatrix {
  std::vector<CcrfColumn> columns;            // m
  std::vector<std::string> article_ids;       // n
  std::vector<std::vector<double>> X;         // n x m, zero where inactive
  std::vector<std::vector<std::uint8_t>> D;   // n x m activity mask
  std::vector<double> y;                      // targets; empty at test time

  std::size_t rows() const { return article_ids.size(); }
  std::size_t cols() const { return columns.size(); }
};

struct GaussianForm {
  std::vector<double> lambda;  // the weights the form was built with
  std::vector<double> q_diag;  // Q_jj = sum_k lambda_k D[j,k]
  std::vector<double> b;       // b_j = 2 sum_k lambda_k X[j,k]
  double c = 0;                // sum_j sum_k lambda_k X[j,k]^2

  std::vector<double> sigma_diag() const;  // 1 / (2 Q_jj)
  std::vector<double> mean() const;        // b_j / (2 Q_jj)
};

/// Builds Q, b, c for the given positive weights. Throws when any
/// lambda_k <= 0 or when some row has no active column.
GaussianForm gaussian_form(const DesignMatrix& design,
                           std::span<const double> lambda);

/// Closed-form MAP/mean prediction: mu_j = b_j / (2 Q_jj), which equals the
/// lambda-weighted average of the active predictions in row j.
std::vector<double> infer(const GaussianForm& form);

/// Exact diagonal-Gaussian log density of y under the form.
double log_density(const GaussianForm& form, std::span<const double> y);

/// Gradient of log_density with respect to log lambda_k:
///   lambda_k * (-y'D_k y + 2 y'X_k - 2 mu'X_k + mu'D_k mu + Tr(Sigma D_k))
std::vector<double> grad_log_lambda(const GaussianForm& form,
                                    const DesignMatrix& design,
                                    std::span<const double> y);

struct CcrfSettings {
  double eta = 1e-3;             // learning rate in log-lambda space
  int max_iters = 500;
  double reg_log_lambda = 1e-3;  // L2 penalty on log lambda; 0 disables
  double lambda_ceiling = 1e6;
  double tol = 1e-10;            // relative objective-improvement stop
};

struct CcrfModel {
  std::vector<CcrfColumn> columns;
  std::vector<double> lambda;
  std::vector<double> objective;  // penalized log-likelihood per iteration
  bool ceiling_hit = false;
};

/// Maximum-likelihood training of lambda (all ones at iteration zero) by
/// backtracking gradient ascent in log space. Throws on non-finite
/// objectives, reporting the iteration index.
CcrfModel train_ccrf(const DesignMatrix& design, const CcrfSettings& settings);

/// Builds the design matrix for the given articles. Per row the active
/// columns are: one column per reviewer with a dedicated user model, the
/// background-user column when any reviewer is pooled (its entry is the
/// mean background prediction over those reviewers), the source column or
/// background-source, and both gamma columns. Set with_targets to read
/// ground ratings through the view (training only).
DesignMatrix assemble_design(const TrainView& view, const RoleModels& roles,
                             const FeaturePipeline& pipeline,
                             const std::vector<std::string>& articles,
                             bool allow_gamma_only = false,
                             bool with_targets = false);

/// Convenience wrapper: design plus the Gaussian form for given lambda.
std::pair<DesignMatrix, GaussianForm> assemble(
    const TrainView& view, const RoleModels& roles,
    const FeaturePipeline& pipeline, const std::vector<std::string>& articles,
    std::span<const double> lambda, bool allow_gamma_only = false,
    bool with_targets = false);

/// (user id, alpha) sorted by descending alpha, ties broken by id.
/// Background columns are not users and are excluded.
std::vector<std::pair<std::string, double>> rank_users(const CcrfModel& model);

/// (source id, beta), same ordering rules.
std::vector<std::pair<std::string, double>> rank_sources(
    const CcrfModel& model);

void save_ccrf(const CcrfModel& model, const std::string& path);
CcrfModel load_ccrf(const std::string& path);

/// Writes "rank,id,score" CSV rows.
void write_ranking_csv(
    const std::vector<std::pair<std::string, double>>& ranking,
    const std::string& path);

}  // namespace newscred

#endif  // NEWSCRED_CCRF_HPP
