#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gamp/errors.hpp"
#include "gamp/normal.hpp"
#include "gamp/state_evolution.hpp"
#include "oracles.hpp"

using namespace gamp;

namespace {

SEMoments moments(double e_w, double var_w, double e_what, double var_what, double cov, double delta) {
  SEMoments m;
  m.e_w = e_w;
  m.var_w = var_w;
  m.e_what = e_what;
  m.var_what = var_what;
  m.cov_w_what = cov;
  m.delta = delta;
  return m;
}

// Pr{Y != sgn(Z_hat)} by nested adaptive quadrature over (Z_hat, Z).
double error_rate_oracle(const SigmaZ& s, const OutputChannel& ch) {
  const double c = s.s12 / s.s22;
  const double cond = s.s11 - c * s.s12;
  const double sd2 = std::sqrt(s.s22), sdc = std::sqrt(cond);
  return oracle::integrate(
      [&](double zh) {
        const double dens = std::exp(oracle::log_gauss(zh, 0.0, s.s22));
        const double inner = oracle::integrate(
            [&](double z) {
              const double p_plus = ch.predict_proba(z, 0.0);
              const double wrong = zh >= 0.0 ? 1.0 - p_plus : p_plus;
              return wrong * std::exp(oracle::log_gauss(z, c * zh, cond));
            },
            c * zh - 12 * sdc, c * zh + 12 * sdc);
        return dens * inner;
      },
      -12 * sd2, 12 * sd2);
}

}  // namespace

TEST_CASE("sigma from moments") {
  const SigmaZ same = sigma_from_moments(moments(0.2, 0.5, 0.2, 0.5, 0.5, 2.0));
  CHECK(same.s12 == doctest::Approx(same.s11));
  CHECK(same.s22 == doctest::Approx(same.s11));
  CHECK(sigma_from_moments(moments(0.0, 1.0, 0.0, 0.3, 0.0, 1.0)).s12 == 0.0);
  CHECK(sigma_from_moments(moments(0.0, 0.1, 0.0, 0.0, 0.0, 0.5)).s11 == doctest::Approx(0.2));
  // homogeneity in the second moments
  const SEMoments base = moments(0.0, 0.4, 0.0, 0.3, 0.2, 0.7);
  const SigmaZ a = sigma_from_moments(base);
  const SigmaZ b = sigma_from_moments(moments(0.0, 1.2, 0.0, 0.9, 0.6, 0.7));
  CHECK(b.s11 == doctest::Approx(3 * a.s11));
  CHECK(b.s12 == doctest::Approx(3 * a.s12));
  CHECK(b.s22 == doctest::Approx(3 * a.s22));
  CHECK_THROWS_AS(sigma_from_moments(moments(0.0, 1.0, 0.0, 1.0, 2.0, 1.0)), NumericError);
}

TEST_CASE("probit error rate closed form") {
  const auto ch = OutputChannel::probit(0.1);
  CHECK(se_error_rate({1.0, 1.0, 1.0}, OutputChannel::probit(1e-300)) == doctest::Approx(0.0));
  CHECK(se_error_rate({1.0, 0.0, 1.0}, ch) == doctest::Approx(0.5));
  CHECK(se_error_rate({1.0, 0.8, 1.0}, ch) <= 0.5);
  CHECK(se_error_rate({1.0, -0.8, 1.0}, ch) > 0.5);

  double worst = 0.0;
  for (double s11 : {0.3, 1.0, 2.5})
    for (double r : {-0.4, 0.3, 0.9})
      for (double s22 : {0.2, 1.0, 4.0}) {
        const SigmaZ s{s11, r * std::sqrt(s11 * s22), s22};
        worst = std::max(worst, std::abs(se_error_rate(s, ch) - se_error_rate_quadrature(s, ch)));
      }
  CHECK(worst < 1e-6);

  // Monte-Carlo of the defining expectation with 10^7 samples
  const SigmaZ s{1.0, 0.8, 1.0};
  Rng rng(12);
  std::normal_distribution<double> g;
  const long n = 10000000;
  long wrong = 0;
  for (long i = 0; i < n; ++i) {
    const double zh = g(rng);
    const double z = 0.8 * zh + 0.6 * g(rng);
    const double y = z - std::sqrt(0.1) * g(rng) >= 0.0 ? 1.0 : -1.0;
    wrong += (zh >= 0.0 ? 1.0 : -1.0) != y;
  }
  const double p = static_cast<double>(wrong) / n;
  CHECK(std::abs(se_error_rate(s, ch) - p) < 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("generic-channel error rate against nested quadrature") {
  const SigmaZ s{1.2, 0.7, 0.9};
  for (const OutputChannel& ch : {OutputChannel::logistic(3.0), OutputChannel::hinge(), OutputChannel::probit(0.2).robustified(0.1)})
    CHECK(std::abs(se_error_rate(s, ch) - error_rate_oracle(s, ch)) < 1e-6);
}

TEST_CASE("mse") {
  CHECK(se_mse(moments(0.3, 0.5, 0.3, 0.5, 0.5, 1.0)) == doctest::Approx(0.0).scale(1.0));
  CHECK(se_mse(moments(0.3, 0.5, 0.0, 0.0, 0.0, 1.0)) == doctest::Approx(0.5 + 0.09));
  // two-point joint law: (W, W_hat) = (1, 0.5) w.p. 0.3, (-1, 0.2) w.p. 0.7
  const double ew = 0.3 - 0.7, eh = 0.15 + 0.14;
  const double vw = 1.0 - ew * ew, vh = 0.3 * 0.25 + 0.7 * 0.04 - eh * eh;
  const double cov = 0.3 * 0.5 - 0.7 * 0.2 - ew * eh;
  const double direct = 0.3 * 0.25 + 0.7 * 1.44;
  CHECK(se_mse(moments(ew, vw, eh, vh, cov, 1.0)) == doctest::Approx(direct));

  Vector w(4), wh(4);
  w << 1, 0, -2, 0;
  wh << 0.8, 0.1, -1.5, 0;
  const SEMoments em = empirical_moments(w, wh, 0.5);
  CHECK(se_mse(em) == doctest::Approx((w - wh).squaredNorm() / 4));
  CHECK(std::abs(em.cov_w_what) <= std::sqrt(em.var_w * em.var_what) + 1e-12);
}

TEST_CASE("uninformative channel carries no information") {
  SEConfig cfg;
  cfg.mc_samples = 20000;
  cfg.max_iter = 10;
  const auto trace = se_recursion(InputChannel::gaussian(0.0, 1.0), OutputChannel::probit(1.0).robustified(0.5 - 1e-9), 0.5, cfg);
  REQUIRE_FALSE(trace.empty());
  for (const auto& m : trace) CHECK(std::abs(m.cov_w_what) < 1e-6);
  CHECK_THROWS_AS(se_recursion(InputChannel::gaussian(0.0, 1.0), OutputChannel::probit(1.0), 0.5, SEConfig{100, 100, 1e-7, 1, std::nullopt}), DomainError);
}

TEST_CASE("recursion moments are valid and the mse decreases with more data") {
  SEConfig cfg;
  cfg.mc_samples = 20000;
  const auto prior = InputChannel::spike_slab(0.05, InputChannel::gaussian(0.0, 1.0));
  const auto ch = OutputChannel::probit(0.01);
  double prev = INFINITY;
  for (double delta : {0.1, 0.3, 0.6}) {
    const auto trace = se_recursion(prior, ch, delta, cfg);
    for (const auto& m : trace) {
      CHECK(m.var_what >= 0.0);
      CHECK(std::abs(m.cov_w_what) <= std::sqrt(m.var_w * m.var_what) + 1e-12);
    }
    const double mse = se_mse(trace.back());
    CHECK(mse <= prev);
    prev = mse;
  }
}

TEST_CASE("phase sweep") {
  SweepConfig cfg;
  cfg.se.mc_samples = 10000;
  const auto one = se_phase_sweep({{0.3, 0.05}}, cfg);
  REQUIRE(one.size() == 1);
  CHECK_FALSE(one[0].ill_posed);
  CHECK(one[0].epsilon_pred >= 0.0);
  CHECK(one[0].epsilon_pred <= 0.5);
  const auto bad = se_phase_sweep({{0.1, 0.2}}, cfg);
  CHECK(bad[0].ill_posed);
  CHECK(std::isnan(bad[0].epsilon_pred));

  std::vector<SweepPoint> grid;
  for (double k : {0.01, 0.0325, 0.055, 0.0775, 0.1})
    for (double m : {0.1, 0.225, 0.35, 0.475, 0.6}) grid.push_back({m, k});
  const auto rows = se_phase_sweep(grid, cfg);
  REQUIRE(rows.size() == 25);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 1; c < 5; ++c) {
      const auto& lo = rows[r * 5 + c - 1];
      const auto& hi = rows[r * 5 + c];
      if (lo.ill_posed || hi.ill_posed) continue;
      // With features of variance 1/M and fixed v the Bayes error itself grows with M/N, so the
      // error rate is not monotone along a row; the estimation error is.
      CHECK(hi.mse_pred <= lo.mse_pred + 1e-9);
      const SigmaZ oracle_sigma{hi.k_over_n / hi.m_over_n, hi.k_over_n / hi.m_over_n, hi.k_over_n / hi.m_over_n};
      CHECK(hi.epsilon_pred >= se_error_rate(oracle_sigma, OutputChannel::probit(cfg.probit_v)) - 1e-3);
    }
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  CHECK(csv.str().rfind("M_over_N,K_over_N,k,epsilon_pred,epsilon_emp,mse_pred,mse_emp,ill_posed\n", 0) == 0);
  CHECK_THROWS_AS(se_phase_sweep({}, cfg), DomainError);
}

TEST_CASE("prior sampling matches the prior moments") {
  Rng rng(3);
  for (const InputChannel& p : {InputChannel::spike_slab(0.2, InputChannel::gaussian(0.5, 2.0)), InputChannel::laplacian(2.0),
                                InputChannel::elastic_net(1.0, 0.5)}) {
    double s1 = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double w = sample_prior(p, rng);
      s1 += w;
      s2 += w * w;
    }
    const double mean = s1 / n;
    CHECK(mean == doctest::Approx(p.prior_mean()).epsilon(0.02).scale(1.0));
    CHECK(s2 / n - mean * mean == doctest::Approx(p.prior_variance()).epsilon(0.02));
  }
}
