#include "semdrift/stats.hpp"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "semdrift/common.hpp"
#include "semdrift/csv.hpp"
#include "semdrift/random.hpp"

namespace sd = semdrift;
namespace st = semdrift::stats;

namespace {

st::Design line_design(const std::vector<double>& x) {
  std::vector<std::vector<double>> cols{x};
  return st::make_design(cols, {"x"});
}

Eigen::VectorXd vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

oracle::Matrix to_rows(const Eigen::MatrixXd& X) {
  oracle::Matrix m(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) m[i].push_back(X(i, j));
  }
  return m;
}

sd::IndexSeries make_series(int first, const std::vector<double>& y) {
  sd::IndexSeries s;
  s.target = "t";
  s.index_name = "valence";
  for (std::size_t i = 0; i < y.size(); ++i) {
    s.points.push_back({first + static_cast<int>(i), y[i], 1, false});
  }
  return s;
}

std::vector<double> ar1_noise(sd::Rng& rng, int n, double rho) {
  std::vector<double> e(n);
  e[0] = sd::standard_normal(rng) / std::sqrt(1 - rho * rho);
  for (int t = 1; t < n; ++t) e[t] = rho * e[t - 1] + sd::standard_normal(rng);
  return e;
}

}  // namespace

TEST(Ols, HandSolvedNormalEquations) {
  const auto f = st::ols_fit(vec({2.1, 3.9, 6.2, 7.8}), line_design({1, 2, 3, 4}));
  EXPECT_NEAR(f.coefficients[1].b, 1.94, 1e-10);
  EXPECT_NEAR(f.coefficients[0].b, 0.15, 1e-10);
  EXPECT_EQ(f.coefficients[0].term, "(Intercept)");
  EXPECT_EQ(f.df1, 1);
  EXPECT_EQ(f.df2, 2);
  const auto o = oracle::ols({{1, 1}, {1, 2}, {1, 3}, {1, 4}}, {2.1, 3.9, 6.2, 7.8});
  EXPECT_NEAR(f.coefficients[1].se, o.se[1], 1e-10);
  EXPECT_NEAR(f.coefficients[0].se, o.se[0], 1e-10);
  EXPECT_GE(f.coefficients[1].p, 0);
  EXPECT_LE(f.coefficients[1].p, 1);
}

TEST(Ols, ExactLine) {
  const auto f = st::ols_fit(vec({1, 2, 3}), line_design({1, 2, 3}));
  EXPECT_NEAR(f.coefficients[1].b, 1, 1e-12);
  EXPECT_NEAR(f.coefficients[0].b, 0, 1e-12);
  EXPECT_LT(f.residuals.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(f.perfect_fit);
}

TEST(Ols, ConstantY) {
  const auto f = st::ols_fit(vec({4, 4, 4, 4}), line_design({1, 2, 3, 4}));
  EXPECT_TRUE(f.constant_y);
  EXPECT_EQ(f.coefficients[1].b, 0);
  EXPECT_NEAR(f.f, 0, 1e-12);
  EXPECT_EQ(f.f_p, 1);
}

TEST(Ols, SingularDesignReportsCondition) {
  std::vector<std::vector<double>> cols{{1, 2, 3, 4}, {2, 4, 6, 8}};
  const auto d = st::make_design(cols, {"a", "b"});
  try {
    st::ols_fit(vec({1, 2, 3, 5}), d);
    FAIL();
  } catch (const sd::NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("condition number"), std::string::npos);
  }
}

TEST(Ols, RandomFixturesMatchOracle) {
  sd::Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 5 + static_cast<int>(sd::uniform_below(rng, 30));
    std::vector<double> x1(n), x2(n), y(n);
    for (int i = 0; i < n; ++i) {
      x1[i] = sd::standard_normal(rng) * 10;
      x2[i] = sd::uniform01(rng);
      y[i] = 3 - 0.5 * x1[i] + 2 * x2[i] + sd::standard_normal(rng);
    }
    std::vector<std::vector<double>> cols{x1, x2};
    const auto d = st::make_design(cols, {"x1", "x2"});
    const auto f = st::ols_fit(vec(y), d);
    const auto o = oracle::ols(to_rows(d.X), y);
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(f.coefficients[j].b, o.beta[j], 1e-10);
      EXPECT_NEAR(f.coefficients[j].se, o.se[j], 1e-10);
    }
    // Residuals orthogonal to every column.
    const Eigen::VectorXd xe = d.X.transpose() * f.residuals;
    EXPECT_LT(xe.cwiseAbs().maxCoeff(), 1e-8 * (1 + d.X.cwiseAbs().maxCoeff() * n));
    EXPECT_LE(f.adj_r2, f.r2);
  }
}

TEST(DurbinWatson, Examples) {
  const std::vector<double> alt{1, -1, 1, -1};
  EXPECT_EQ(st::durbin_watson(alt).statistic, 3.0);
  const std::vector<double> flat{1, 1, 1};
  const auto d = st::durbin_watson(flat, 1, 200);
  EXPECT_EQ(d.statistic, 0.0);
  EXPECT_EQ(d.p, 1.0);  // every permutation ties
  const std::vector<double> zeros{0, 0, 0};
  EXPECT_TRUE(st::durbin_watson(zeros).perfect_fit);
  const std::vector<double> two{1, 2};
  EXPECT_THROW(st::durbin_watson(two), std::invalid_argument);
}

TEST(DurbinWatson, WhiteNoiseNearTwo) {
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    sd::Rng rng(seed);
    std::vector<double> e(200);
    for (auto& x : e) x = sd::standard_normal(rng);
    const double d = st::durbin_watson_statistic(e);
    EXPECT_NEAR(d, oracle::durbin_watson(e), 1e-12);
    if (std::fabs(d - 2) <= 0.35) ++inside;
  }
  EXPECT_GE(inside, 95);
}

TEST(DurbinWatson, PermutationPSeededAndOrdered) {
  sd::Rng rng(5);
  const auto e = ar1_noise(rng, 60, 0.8);
  const auto a = st::durbin_watson(e, 9, 2000);
  const auto b = st::durbin_watson(e, 9, 2000);
  EXPECT_EQ(a.p, b.p);
  EXPECT_LT(a.p, 0.05);
  std::vector<double> alt(40);
  for (int i = 0; i < 40; ++i) alt[i] = i % 2 ? 1 : -1;
  EXPECT_GT(st::durbin_watson(alt, 9, 2000).p, 0.95);
}

TEST(Hc3, FourPointFixtureMatchesOracle) {
  const std::vector<double> x{1, 2, 3, 4}, y{2.1, 3.9, 6.2, 7.8};
  const auto d = line_design(x);
  const auto hc = st::hc3_standardized(vec(y), d);
  std::vector<double> betas;
  const auto se = oracle::hc3_standardized_se(to_rows(d.X), y, &betas);
  ASSERT_EQ(hc.size(), 1u);
  EXPECT_NEAR(hc[0].se, se[0], 1e-10);
  EXPECT_NEAR(hc[0].beta, betas[0], 1e-10);
  EXPECT_NEAR(hc[0].ci_lo, hc[0].beta - 1.96 * hc[0].se, 1e-15);
  EXPECT_NEAR(hc[0].ci_hi, hc[0].beta + 1.96 * hc[0].se, 1e-15);
}

TEST(Hc3, RandomFixturesMatchOracle) {
  sd::Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 6 + static_cast<int>(sd::uniform_below(rng, 40));
    std::vector<double> x1(n), x2(n), y(n);
    for (int i = 0; i < n; ++i) {
      x1[i] = i;
      x2[i] = sd::standard_normal(rng);
      y[i] = 0.1 * i + x2[i] + sd::standard_normal(rng) * (1 + i % 3);
    }
    std::vector<std::vector<double>> cols{x1, x2};
    const auto d = st::make_design(cols, {"a", "b"});
    const auto hc = st::hc3_standardized(vec(y), d);
    std::vector<double> betas;
    const auto se = oracle::hc3_standardized_se(to_rows(d.X), y, &betas);
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(hc[j].se, se[j], 1e-10);
      EXPECT_NEAR(hc[j].beta, betas[j], 1e-10);
    }
  }
}

TEST(Hc3, SimpleRegressionBetaIsPearsonR) {
  const std::vector<double> x{1, 2, 3, 4, 5, 6}, y{3, 1, 4, 1, 5, 9};
  const double mx = 3.5, my = 23.0 / 6;
  double sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < 6; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  const auto hc = st::hc3_standardized(vec(y), line_design(x));
  EXPECT_NEAR(hc[0].beta, sxy / std::sqrt(sxx * syy), 1e-12);
}

TEST(Hc3, PerfectFitHasZeroSe) {
  const auto hc = st::hc3_standardized(vec({3, 5, 7, 9}), line_design({1, 2, 3, 4}));
  EXPECT_NEAR(hc[0].beta, 1, 1e-12);
  EXPECT_NEAR(hc[0].se, 0, 1e-12);
}

TEST(Hc3, DegenerateInputs) {
  EXPECT_THROW(st::hc3_standardized(vec({1, 1, 1}), line_design({1, 2, 3})), sd::NumericError);
  // Observation 3 alone determines the dummy's coefficient: leverage 1.
  std::vector<std::vector<double>> cols{{1, 2, 3, 4, 5}, {0, 0, 1, 0, 0}};
  EXPECT_THROW(st::hc3_standardized(vec({1, 3, 2, 5, 4}), st::make_design(cols, {"x", "d"})),
               sd::NumericError);
}

TEST(Gls, RhoZeroIsOls) {
  const std::vector<double> y{2.1, 3.9, 6.2, 7.8, 9.7, 12.5};
  const auto d = line_design({1, 2, 3, 4, 5, 6});
  const auto o = st::ols_fit(vec(y), d);
  const auto g = st::prais_winsten(vec(y), d, 0.0);
  for (int j = 0; j < 2; ++j) {
    EXPECT_NEAR(g.coefficients[j].b, o.coefficients[j].b, 1e-10);
    EXPECT_NEAR(g.coefficients[j].se, o.coefficients[j].se, 1e-10);
  }
  EXPECT_NEAR(g.rse, o.sigma, 1e-10);
  EXPECT_NEAR(g.bic, o.bic + std::log(6.0), 1e-9);  // one extra parameter
  EXPECT_THROW(st::prais_winsten(vec(y), d, 1.0), sd::NumericError);
}

TEST(Gls, RecoversAr1Slope) {
  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    sd::Rng rng(sd::derive_seed(seed, 1, 2));
    const auto e = ar1_noise(rng, 200, 0.7);
    std::vector<double> t(200), y(200);
    for (int i = 0; i < 200; ++i) {
      t[i] = i;
      y[i] = 0.5 * i + e[i];
    }
    const auto g = st::gls_ar1_fit(vec(y), line_design(t));
    EXPECT_TRUE(g.converged);
    EXPECT_LT(std::fabs(g.rho), 1);
    if (std::fabs(g.coefficients[1].b - 0.5) <= 3 * g.coefficients[1].se) ++within;
  }
  EXPECT_GE(within, 95);
}

TEST(FitTrend, CentersYearAndNeedsPoints) {
  const auto s = make_series(2000, {1, 2, 2.5, 4, 5.5});
  const auto f = st::fit_trend(s, st::TrendModel::kLinear, {.seed = 1, .dw_permutations = 500});
  EXPECT_EQ(f.center, 2002);
  EXPECT_EQ(f.n, 5);
  EXPECT_EQ(f.coefficients[1].term, "year");
  EXPECT_NEAR(f.coefficients[0].b, (1 + 2 + 2.5 + 4 + 5.5) / 5, 1e-12);
  EXPECT_THROW(st::fit_trend(make_series(2000, {1, 2}), st::TrendModel::kLinear), sd::Error);
  EXPECT_THROW(st::fit_trend(make_series(2000, {1, 2, 3}), st::TrendModel::kQuadratic),
               sd::Error);
}

TEST(FitTrend, SymmetricParabola) {
  std::vector<double> y;
  for (int t = 0; t < 21; ++t) y.push_back(0.3 * (t - 10) * (t - 10) + 2);
  const auto f = st::fit_trend(make_series(1990, y), st::TrendModel::kQuadratic,
                               {.seed = 2, .dw_permutations = 500});
  ASSERT_EQ(f.coefficients.size(), 3u);
  EXPECT_NEAR(f.coefficients[1].b, 0, 1e-10);
  EXPECT_NEAR(f.coefficients[2].b, 0.3, 1e-10);
  EXPECT_EQ(f.coefficients[2].term, "year^2");
}

TEST(FitTrend, LinearSeriesHasNullQuadraticTerm) {
  sd::Rng rng(8);
  std::vector<double> y;
  for (int t = 0; t < 47; ++t) y.push_back(0.05 * t + 0.01 * sd::standard_normal(rng));
  const auto f = st::fit_trend(make_series(1970, y), st::TrendModel::kQuadratic,
                               {.seed = 3, .dw_permutations = 2000, .allow_gls = false});
  EXPECT_NEAR(f.coefficients[2].b, 0, 1e-4);
  EXPECT_GT(f.coefficients[2].p, 0.05);
}

TEST(FitTrend, SwitchesToGlsOnAutocorrelation) {
  sd::Rng rng(21);
  const auto e = ar1_noise(rng, 47, 0.9);
  std::vector<double> y;
  for (int t = 0; t < 47; ++t) y.push_back(0.02 * t + e[t]);
  const auto f = st::fit_trend(make_series(1970, y), st::TrendModel::kLinear,
                               {.seed = 4, .dw_permutations = 2000});
  EXPECT_LT(f.dw.p, 0.05);
  EXPECT_EQ(f.estimator, st::Estimator::kGlsAr1);
  ASSERT_TRUE(f.rho.has_value());
  EXPECT_LT(std::fabs(*f.rho), 1);

  const auto no = st::fit_trend(make_series(1970, y), st::TrendModel::kLinear,
                                {.seed = 4, .dw_permutations = 2000, .allow_gls = false});
  EXPECT_EQ(no.estimator, st::Estimator::kOls);
  EXPECT_FALSE(no.rho.has_value());
}

TEST(FitTrend, ConstantSeries) {
  const auto f = st::fit_trend(make_series(1970, {2, 2, 2, 2, 2}), st::TrendModel::kLinear);
  EXPECT_TRUE(f.dw.perfect_fit);
  EXPECT_EQ(f.estimator, st::Estimator::kOls);
  ASSERT_EQ(f.std_betas.size(), 1u);
  EXPECT_TRUE(std::isnan(f.std_betas[0].beta));
}

TEST(FitTrend, InvariantsOnRandomSeries) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    sd::Rng rng(seed);
    std::vector<double> y;
    for (int t = 0; t < 30; ++t) y.push_back(sd::standard_normal(rng) + 0.01 * t);
    for (auto m : {st::TrendModel::kLinear, st::TrendModel::kQuadratic}) {
      const auto f = st::fit_trend(make_series(1980, y), m, {.seed = seed, .dw_permutations = 300});
      EXPECT_LE(f.adj_r2, f.r2);
      EXPECT_GE(f.dw.statistic, 0);
      EXPECT_LE(f.dw.statistic, 4);
      for (const auto& c : f.coefficients) {
        EXPECT_GE(c.p, 0);
        EXPECT_LE(c.p, 1);
      }
      for (const auto& b : f.std_betas) EXPECT_LE(b.ci_lo, b.ci_hi);
    }
  }
}

TEST(RegressionCsv, Columns) {
  const auto s = make_series(1970, {1, 3, 2, 5, 4, 6});
  std::vector<st::RegressionRow> rows{
      {"valence", "mental_health", "toy",
       st::fit_trend(s, st::TrendModel::kQuadratic, {.seed = 1, .dw_permutations = 100})}};
  std::ostringstream out;
  st::write_regression_csv(out, rows);
  std::istringstream in(out.str());
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header,
            "index,concept,corpus,model,term,B,SE,t,p,F,df1,df2,adj_r2,estimator,"
            "dw_stat,dw_p,rho,bic,beta,beta_se,ci_lo,ci_hi");
  int n = 0;
  while (std::getline(in, line)) {
    const auto f = sd::csv::split_line(line);
    EXPECT_EQ(f.size(), st::regression_columns().size());
    EXPECT_EQ(f[0], "valence");
    EXPECT_EQ(f[3], "quadratic");
    ++n;
  }
  EXPECT_EQ(n, 3);
  EXPECT_EQ(st::parse_model("linear"), st::TrendModel::kLinear);
  EXPECT_THROW(st::parse_model("cubic"), sd::ConfigError);
}
