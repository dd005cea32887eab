#include "semdrift/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "semdrift/common.hpp"
#include "semdrift/csv.hpp"
#include "semdrift/random.hpp"

namespace semdrift::stats {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kZ975 = 1.96;

double two_sided_t_p(double t, int df) {
  if (std::isnan(t)) return kNaN;
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(df);
  return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))),
                    0.0, 1.0);
}

double f_upper_p(double f, int df1, int df2) {
  if (std::isnan(f)) return kNaN;
  if (std::isinf(f)) return 0.0;
  if (f <= 0) return 1.0;
  boost::math::fisher_f dist(df1, df2);
  return std::clamp(boost::math::cdf(boost::math::complement(dist, f)), 0.0, 1.0);
}

double t_stat(double b, double se) {
  if (se > 0) return b / se;
  if (b == 0) return 0.0;
  return b > 0 ? std::numeric_limits<double>::infinity()
               : -std::numeric_limits<double>::infinity();
}

void require_rank(const Eigen::MatrixXd& X) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() == X.cols()) return;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  const auto& s = svd.singularValues();
  const double cond = s(s.size() - 1) > 0 ? s(0) / s(s.size() - 1)
                                          : std::numeric_limits<double>::infinity();
  throw NumericError("singular design matrix (rank " + std::to_string(qr.rank()) +
                     " of " + std::to_string(X.cols()) +
                     ", condition number " + csv::format_double(cond) + ")");
}

struct LsSolution {
  Eigen::VectorXd beta;
  Eigen::MatrixXd xtx_inv;
};

LsSolution least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  require_rank(X);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  const auto p = X.cols();
  Eigen::MatrixXd R = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  Eigen::VectorXd qty = (qr.householderQ().transpose() * y).head(p);
  LsSolution s;
  s.beta = R.triangularView<Eigen::Upper>().solve(qty);
  Eigen::MatrixXd rinv = R.triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(p, p));
  s.xtx_inv = rinv * rinv.transpose();
  return s;
}

std::vector<Coefficient> coefficient_table(const Design& d, const Eigen::VectorXd& beta,
                                           const Eigen::MatrixXd& cov, int df) {
  std::vector<Coefficient> out;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    Coefficient c;
    c.term = d.terms[static_cast<std::size_t>(j)];
    c.b = beta(j);
    c.se = std::sqrt(std::max(0.0, cov(j, j)));
    c.t = t_stat(c.b, c.se);
    c.p = two_sided_t_p(c.t, df);
    out.push_back(c);
  }
  return out;
}

double gaussian_loglik(double rss, int n) {
  const double s2 = rss / n;
  return -0.5 * n * (std::log(2 * std::numbers::pi) + std::log(s2) + 1.0);
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

Design make_design(std::span<const std::vector<double>> predictors,
                   std::vector<std::string> names) {
  if (names.size() != predictors.size()) {
    throw std::invalid_argument("one name per predictor required");
  }
  const std::size_t n = predictors.empty() ? 0 : predictors.front().size();
  Design d;
  d.X.resize(static_cast<Eigen::Index>(n),
             static_cast<Eigen::Index>(predictors.size() + 1));
  d.X.col(0).setOnes();
  for (std::size_t j = 0; j < predictors.size(); ++j) {
    if (predictors[j].size() != n) {
      throw std::invalid_argument("predictors differ in length");
    }
    for (std::size_t i = 0; i < n; ++i) {
      d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) =
          predictors[j][i];
    }
  }
  d.terms.push_back("(Intercept)");
  for (auto& nm : names) d.terms.push_back(std::move(nm));
  return d;
}

OlsFit ols_fit(const Eigen::VectorXd& y, const Design& design) {
  const auto& X = design.X;
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  if (y.size() != n) throw std::invalid_argument("y and design differ in length");
  if (p < 1 || design.terms.size() != static_cast<std::size_t>(p)) {
    throw std::invalid_argument("design needs an intercept and term names");
  }
  if (n <= p) {
    throw NumericError("OLS needs more observations (" + std::to_string(n) +
                       ") than coefficients (" + std::to_string(p) + ")");
  }

  OlsFit f;
  f.n = n;
  f.k = p - 1;
  f.df1 = f.k;
  f.df2 = n - p;

  const bool constant = (y.array() == y(0)).all();
  auto ls = least_squares(X, y);
  f.xtx_inv = ls.xtx_inv;
  if (constant) {
    // Exact solution: intercept = y, slopes 0, no residual.
    f.constant_y = true;
    ls.beta.setZero();
    ls.beta(0) = y(0);
  }
  f.beta = ls.beta;
  f.fitted = X * f.beta;
  f.residuals = y - f.fitted;
  if (constant) f.residuals.setZero();

  f.rss = f.residuals.squaredNorm();
  const double ybar = y.mean();
  f.tss = constant ? 0.0 : (y.array() - ybar).square().sum();
  f.perfect_fit = f.rss <= 1e-24 * std::max(y.squaredNorm(), 1e-300);

  const double s2 = f.rss / f.df2;
  f.sigma = std::sqrt(s2);
  f.coefficients = coefficient_table(design, f.beta, s2 * f.xtx_inv, f.df2);

  if (constant) {
    f.r2 = 0;
    f.f = 0;
    f.f_p = 1;
  } else {
    f.r2 = 1.0 - f.rss / f.tss;
    if (f.k > 0) {
      const double num = (f.tss - f.rss) / f.k;
      const double den = f.rss / f.df2;
      f.f = den > 0 ? num / den : std::numeric_limits<double>::infinity();
      f.f_p = f_upper_p(f.f, f.df1, f.df2);
    }
  }
  f.adj_r2 = 1.0 - (1.0 - f.r2) * (n - 1) / static_cast<double>(f.df2);
  f.bic = f.rss > 0 ? -2.0 * gaussian_loglik(f.rss, n) + (p + 1) * std::log(n)
                    : -std::numeric_limits<double>::infinity();
  return f;
}

double durbin_watson_statistic(std::span<const double> e) {
  double num = 0, den = 0;
  for (std::size_t t = 0; t < e.size(); ++t) {
    den += e[t] * e[t];
    if (t > 0) num += (e[t] - e[t - 1]) * (e[t] - e[t - 1]);
  }
  return num / den;
}

DurbinWatson durbin_watson(std::span<const double> residuals, std::uint64_t seed,
                           int permutations) {
  if (residuals.size() < 3) {
    throw std::invalid_argument("Durbin-Watson needs at least 3 residuals");
  }
  DurbinWatson out;
  if (std::all_of(residuals.begin(), residuals.end(),
                  [](double v) { return v == 0.0; })) {
    out.perfect_fit = true;
    out.statistic = kNaN;
    out.p = kNaN;
    return out;
  }
  out.statistic = durbin_watson_statistic(residuals);
  if (permutations < 1) {
    out.p = kNaN;
    return out;
  }
  Rng rng(seed);
  std::vector<double> e(residuals.begin(), residuals.end());
  int at_or_below = 0;
  for (int i = 0; i < permutations; ++i) {
    partial_shuffle(e, e.size(), rng);
    if (durbin_watson_statistic(e) <= out.statistic) ++at_or_below;
  }
  out.p = static_cast<double>(at_or_below) / permutations;
  return out;
}

double lag1_autocorrelation(std::span<const double> e) {
  double num = 0, den = 0;
  for (std::size_t t = 0; t < e.size(); ++t) {
    den += e[t] * e[t];
    if (t > 0) num += e[t] * e[t - 1];
  }
  return den > 0 ? num / den : 0.0;
}

GlsFit prais_winsten(const Eigen::VectorXd& y, const Design& design, double rho) {
  if (!(std::fabs(rho) < 1.0)) {
    throw NumericError("non-stationary AR(1) estimate, rho = " +
                       csv::format_double(rho));
  }
  const auto& X = design.X;
  const Eigen::Index n = X.rows();
  const int p = static_cast<int>(X.cols());
  if (n <= p) throw NumericError("GLS needs more observations than coefficients");

  const double head = std::sqrt(1.0 - rho * rho);
  Eigen::VectorXd ys(n);
  Eigen::MatrixXd Xs(n, X.cols());
  ys(0) = head * y(0);
  Xs.row(0) = head * X.row(0);
  for (Eigen::Index t = 1; t < n; ++t) {
    ys(t) = y(t) - rho * y(t - 1);
    Xs.row(t) = X.row(t) - rho * X.row(t - 1);
  }
  const auto ls = least_squares(Xs, ys);
  const Eigen::VectorXd u = ys - Xs * ls.beta;
  const double rss = u.squaredNorm();

  GlsFit g;
  g.beta = ls.beta;
  g.rho = rho;
  g.df = static_cast<int>(n) - p;
  g.rse = std::sqrt(rss / g.df);
  g.coefficients = coefficient_table(design, g.beta, (rss / g.df) * ls.xtx_inv, g.df);
  g.residuals = y - X * g.beta;
  // Exact AR(1) Gaussian likelihood: transformed-residual likelihood plus the
  // Jacobian of the first-row scaling. Parameters: p coefficients, sigma, rho.
  const double ll = gaussian_loglik(rss, static_cast<int>(n)) +
                    0.5 * std::log(1.0 - rho * rho);
  g.bic = -2.0 * ll + (p + 2) * std::log(static_cast<double>(n));
  return g;
}

GlsFit gls_ar1_fit(const Eigen::VectorXd& y, const Design& design,
                   const GlsOptions& options) {
  const auto ols = ols_fit(y, design);
  double rho = lag1_autocorrelation(to_std(ols.residuals));
  GlsFit g = prais_winsten(y, design, rho);
  for (int it = 1; it <= options.max_iterations; ++it) {
    g.iterations = it;
    const double next = lag1_autocorrelation(to_std(g.residuals));
    if (!(std::fabs(next) < 1.0)) {
      throw NumericError("non-stationary AR(1) estimate, rho = " +
                         csv::format_double(next));
    }
    const bool done = std::fabs(next - rho) < options.tolerance;
    rho = next;
    g = prais_winsten(y, design, rho);
    g.iterations = it;
    if (done) {
      g.converged = true;
      break;
    }
  }
  return g;
}

std::vector<StdBeta> hc3_standardized(const Eigen::VectorXd& y,
                                      const Design& design) {
  const auto& X = design.X;
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (n <= p) throw NumericError("HC3 needs n > k + 1");

  auto standardize = [n](const Eigen::VectorXd& v, const std::string& what) {
    const double m = v.mean();
    const double sd = std::sqrt((v.array() - m).square().sum() / (n - 1));
    if (!(sd > 0)) throw NumericError("zero variance in " + what);
    return Eigen::VectorXd((v.array() - m) / sd);
  };

  const Eigen::VectorXd ys = standardize(y, "outcome");
  Eigen::MatrixXd Xs(n, p);
  Xs.col(0).setOnes();
  for (Eigen::Index j = 1; j < p; ++j) {
    Xs.col(j) = standardize(X.col(j), design.terms[static_cast<std::size_t>(j)]);
  }
  const auto ls = least_squares(Xs, ys);
  const Eigen::VectorXd e = ys - Xs * ls.beta;

  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = Xs.row(i).transpose();
    const double h = xi.dot(ls.xtx_inv * xi);
    if (h >= 1.0 - 1e-10) {
      throw NumericError("leverage of observation " + std::to_string(i) +
                         " is 1; HC3 undefined");
    }
    const double w = e(i) / (1.0 - h);
    meat += (w * w) * xi * xi.transpose();
  }
  const Eigen::MatrixXd cov = ls.xtx_inv * meat * ls.xtx_inv;

  std::vector<StdBeta> out;
  for (Eigen::Index j = 1; j < p; ++j) {
    StdBeta b;
    b.term = design.terms[static_cast<std::size_t>(j)];
    b.beta = ls.beta(j);
    b.se = std::sqrt(std::max(0.0, cov(j, j)));
    b.ci_lo = b.beta - kZ975 * b.se;
    b.ci_hi = b.beta + kZ975 * b.se;
    out.push_back(b);
  }
  return out;
}

std::string_view model_name(TrendModel m) {
  return m == TrendModel::kLinear ? "linear" : "quadratic";
}

std::string_view estimator_name(Estimator e) {
  return e == Estimator::kOls ? "ols" : "gls_ar1";
}

TrendModel parse_model(std::string_view name) {
  if (name == "linear") return TrendModel::kLinear;
  if (name == "quadratic") return TrendModel::kQuadratic;
  throw ConfigError("unknown model '" + std::string(name) + "'");
}

TrendFit fit_trend(const IndexSeries& series, TrendModel model,
                   const TrendOptions& options) {
  const int k = model == TrendModel::kLinear ? 1 : 2;
  const auto n = series.points.size();
  if (n < static_cast<std::size_t>(k + 2)) {
    throw Error("trend fit needs at least " + std::to_string(k + 2) +
                " points, series " + series.target + "/" + series.index_name +
                " has " + std::to_string(n));
  }
  TrendFit fit;
  fit.model = model;
  fit.n = static_cast<int>(n);
  fit.center = 0.5 * (series.points.front().time_unit + series.points.back().time_unit);

  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(k),
                                        std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double c = series.points[i].time_unit - fit.center;
    y(static_cast<Eigen::Index>(i)) = series.points[i].value;
    cols[0][i] = c;
    if (k == 2) cols[1][i] = c * c;
  }
  std::vector<std::string> names{"year"};
  if (k == 2) names.push_back("year^2");
  const auto design = make_design(cols, names);

  const auto ols = ols_fit(y, design);
  fit.f = ols.f;
  fit.f_p = ols.f_p;
  fit.df1 = ols.df1;
  fit.df2 = ols.df2;
  fit.r2 = ols.r2;
  fit.adj_r2 = ols.adj_r2;
  fit.coefficients = ols.coefficients;
  fit.rse = ols.sigma;
  fit.bic = ols.bic;

  if (ols.perfect_fit) {
    fit.dw = {kNaN, kNaN, true};
  } else {
    fit.dw = durbin_watson(to_std(ols.residuals), options.seed,
                           options.dw_permutations);
  }

  if (options.allow_gls && !fit.dw.perfect_fit && fit.dw.p < options.gls_threshold) {
    const auto gls = gls_ar1_fit(y, design, options.gls);
    fit.estimator = Estimator::kGlsAr1;
    fit.coefficients = gls.coefficients;
    fit.rho = gls.rho;
    fit.rse = gls.rse;
    fit.bic = gls.bic;
  }

  if (ols.constant_y) {
    for (std::size_t j = 1; j < design.terms.size(); ++j) {
      fit.std_betas.push_back({design.terms[j], kNaN, kNaN, kNaN, kNaN});
    }
  } else {
    fit.std_betas = hc3_standardized(y, design);
  }
  return fit;
}

const std::vector<std::string>& regression_columns() {
  static const std::vector<std::string> cols = {
      "index", "concept", "corpus",  "model",  "term",   "B",
      "SE",    "t",       "p",       "F",      "df1",    "df2",
      "adj_r2", "estimator", "dw_stat", "dw_p", "rho",   "bic",
      "beta",  "beta_se", "ci_lo",   "ci_hi"};
  return cols;
}

void write_regression_csv(std::ostream& out, std::span<const RegressionRow> rows) {
  const auto& cols = regression_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out << (i ? "," : "") << cols[i];
  }
  out << '\n';
  const auto num = [](double v) { return csv::format_double(v); };
  for (const auto& r : rows) {
    const auto& f = r.fit;
    for (const auto& c : f.coefficients) {
      const StdBeta* sb = nullptr;
      for (const auto& b : f.std_betas) {
        if (b.term == c.term) sb = &b;
      }
      out << csv::escape(r.index) << ',' << csv::escape(r.term_concept) << ','
          << csv::escape(r.corpus) << ',' << model_name(f.model) << ','
          << csv::escape(c.term) << ',' << num(c.b) << ',' << num(c.se) << ','
          << num(c.t) << ',' << num(c.p) << ',' << num(f.f) << ',' << f.df1
          << ',' << f.df2 << ',' << num(f.adj_r2) << ','
          << estimator_name(f.estimator) << ',' << num(f.dw.statistic) << ','
          << num(f.dw.p) << ',' << (f.rho ? num(*f.rho) : "NA") << ','
          << num(f.bic) << ',' << (sb ? num(sb->beta) : "NA") << ','
          << (sb ? num(sb->se) : "NA") << ',' << (sb ? num(sb->ci_lo) : "NA")
          << ',' << (sb ? num(sb->ci_hi) : "NA") << '\n';
    }
  }
}

}  // namespace semdrift::stats
