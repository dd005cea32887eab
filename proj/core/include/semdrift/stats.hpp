#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semdrift/indices.hpp"

namespace semdrift::stats {

// Column 0 is the intercept.
struct Design {
  Eigen::MatrixXd X;
  std::vector<std::string> terms;
};

// Intercept plus one column per predictor vector.
Design make_design(std::span<const std::vector<double>> predictors,
                   std::vector<std::string> names);

struct Coefficient {
  std::string term;
  double b = 0;
  double se = 0;
  double t = 0;
  double p = 1;
};

struct OlsFit {
  std::vector<Coefficient> coefficients;
  Eigen::VectorXd beta;
  Eigen::MatrixXd xtx_inv;
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;
  int n = 0;
  int k = 0;  // non-intercept terms
  double rss = 0;
  double tss = 0;
  double r2 = 0;
  double adj_r2 = 0;
  double f = 0;
  double f_p = 1;
  int df1 = 0;
  int df2 = 0;
  double sigma = 0;  // residual standard error
  double bic = 0;    // Gaussian ML likelihood, k + 2 parameters
  bool perfect_fit = false;  // residuals numerically zero
  bool constant_y = false;
};

// Least squares with classical SEs and two-sided t p-values. Needs n > #cols.
// Throws NumericError on a rank-deficient design, reporting the condition
// number.
OlsFit ols_fit(const Eigen::VectorXd& y, const Design& design);

struct DurbinWatson {
  double statistic = 0;
  double p = 1;
  bool perfect_fit = false;  // all residuals zero; statistic and p are NaN
};

// d = sum (e_t - e_{t-1})^2 / sum e_t^2. p is the share of `permutations`
// seeded random reorderings of the residuals whose d is <= the observed d
// (one-sided, positive autocorrelation). Needs >= 3 residuals.
DurbinWatson durbin_watson(std::span<const double> residuals,
                           std::uint64_t seed = 0, int permutations = 10000);

double durbin_watson_statistic(std::span<const double> residuals);

// Lag-1 autocorrelation sum e_t e_{t-1} / sum e_t^2.
double lag1_autocorrelation(std::span<const double> residuals);

struct GlsOptions {
  double tolerance = 1e-6;
  int max_iterations = 50;
};

struct GlsFit {
  std::vector<Coefficient> coefficients;
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;  // on the original scale, y - X beta
  double rho = 0;
  int iterations = 0;
  bool converged = false;
  double rse = 0;  // sqrt(transformed RSS / df)
  int df = 0;
  double bic = 0;
};

// Prais-Winsten transform for a fixed rho, then OLS. rho in (-1, 1).
GlsFit prais_winsten(const Eigen::VectorXd& y, const Design& design, double rho);

// Feasible GLS with AR(1) errors: rho from the lag-1 autocorrelation of the
// current residuals, iterated until |delta rho| < tolerance or max_iterations.
// Throws NumericError if |rho| >= 1 at any step.
GlsFit gls_ar1_fit(const Eigen::VectorXd& y, const Design& design,
                   const GlsOptions& options = {});

struct StdBeta {
  std::string term;
  double beta = 0;
  double se = 0;  // HC3
  double ci_lo = 0;
  double ci_hi = 0;
};

// Standardizes y and every non-intercept column (mean 0, sample SD 1), refits,
// and returns HC3 sandwich SEs with beta +/- 1.96 SE intervals, one entry per
// non-intercept term. Throws NumericError on zero variance or a leverage of 1.
std::vector<StdBeta> hc3_standardized(const Eigen::VectorXd& y,
                                      const Design& design);

enum class TrendModel { kLinear, kQuadratic };
enum class Estimator { kOls, kGlsAr1 };

std::string_view model_name(TrendModel m);
std::string_view estimator_name(Estimator e);
TrendModel parse_model(std::string_view name);

struct TrendOptions {
  std::uint64_t seed = 0;
  int dw_permutations = 10000;
  double gls_threshold = 0.05;  // switch to GLS when dw.p < threshold
  bool allow_gls = true;
  GlsOptions gls;
};

struct TrendFit {
  TrendModel model = TrendModel::kLinear;
  Estimator estimator = Estimator::kOls;
  double center = 0;  // year subtracted before squaring
  int n = 0;
  std::vector<Coefficient> coefficients;  // from the estimator used
  double f = 0;  // overall F, from OLS
  double f_p = 1;
  int df1 = 0;
  int df2 = 0;
  double r2 = 0;
  double adj_r2 = 0;
  DurbinWatson dw;
  std::optional<double> rho;  // GLS only
  double rse = 0;
  double bic = 0;
  std::vector<StdBeta> std_betas;  // NaN-filled when y has no variance
};

// Regresses the series on year centered at (first + last) / 2, adding the
// squared centered year for the quadratic model. Uses OLS unless the
// Durbin-Watson p falls below the threshold, then GLS-AR1. Throws Error when
// there are fewer than k + 2 points.
TrendFit fit_trend(const IndexSeries& series, TrendModel model,
                   const TrendOptions& options = {});

// One row per coefficient.
struct RegressionRow {
  std::string index;
  std::string term_concept;
  std::string corpus;
  TrendFit fit;
};

// index,concept,corpus,model,term,B,SE,t,p,F,df1,df2,adj_r2,estimator,
// dw_stat,dw_p,rho,bic,beta,beta_se,ci_lo,ci_hi
void write_regression_csv(std::ostream& out, std::span<const RegressionRow> rows);
const std::vector<std::string>& regression_columns();

}  // namespace semdrift::stats
