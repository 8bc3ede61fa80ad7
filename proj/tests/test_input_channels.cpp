#include <doctest.h>

#include <cmath>
#include <vector>

#include "gamp/errors.hpp"
#include "gamp/input_channel.hpp"
#include "oracles.hpp"

using namespace gamp;

namespace {

const std::vector<double> kR{-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5};
const std::vector<double> kTau{1e-3, 1.0, 10.0};

double grid_max(const std::function<double(double)>& f, double lo, double hi) {
  double best = -INFINITY;
  for (int i = 0; i <= 4000; ++i) best = std::max(best, f(lo + (hi - lo) * i / 4000.0));
  return best;
}

// Posterior of w under exp(log_prior(w)) N(w; r, tau); mass is the log normalizer.
oracle::Moments posterior(const std::function<double(double)>& log_prior, double r, double tau) {
  const double sd = std::sqrt(tau);
  const double lo = std::min(r - 40.0 * sd, -1.0);
  const double hi = std::max(r + 40.0 * sd, 1.0);
  auto log_f = [&](double w) { return log_prior(w) + oracle::log_gauss(w, r, tau); };
  const double shift = grid_max(log_f, lo, hi);
  oracle::Moments m = oracle::centred_moments(log_f, lo, hi, {0.0, r}, shift);
  m.mass = std::log(m.mass) + shift;
  return m;
}

double en_log_normalizer(double l1, double l2) {
  const double z = oracle::integrate([&](double w) { return std::exp(-l1 * w - l2 * w * w); }, 0.0, 200.0 / std::max(l1, 0.05));
  return std::log(2.0 * z);
}

}  // namespace

TEST_CASE("gaussian prior conjugate formula") {
  const PriorMoments m = gaussian_spg(1.0, 1.0, 0.0, 1.0);
  CHECK(m.mean == doctest::Approx(0.5));
  CHECK(m.var == doctest::Approx(0.5));
  const PriorMoments wide = gaussian_spg(1.3, 0.7, 0.0, 1e14);
  CHECK(wide.mean == doctest::Approx(1.3));
  CHECK(wide.var == doctest::Approx(0.7));
  const PriorMoments point = gaussian_spg(1.3, 0.7, 2.0, 1e-14);
  CHECK(point.mean == doctest::Approx(2.0));
  CHECK(point.var < 1e-13);
  CHECK(m.log_scale == doctest::Approx(oracle::log_gauss(1.0, 0.0, 2.0)));
}

TEST_CASE("elastic-net moments match quadrature over the grid") {
  double worst = 0.0, worst_scale = 0.0, worst_abs = 0.0;
  for (double l1 : {0.1, 1.0, 5.0})
    for (double l2 : {0.0, 0.5, 2.0}) {
      const double log_z = en_log_normalizer(l1, l2);
      for (double r : kR)
        for (double tau : kTau) {
          const PriorMoments s = elastic_net_spg(r, tau, l1, l2);
          const auto o = posterior([&](double w) { return -l1 * std::abs(w) - l2 * w * w; }, r, tau);
          worst = std::max({worst, std::abs(s.mean - o.mean), std::abs(s.var - o.var)});
          worst_scale = std::max(worst_scale, std::abs(s.log_scale - (o.mass - log_z)));
          CHECK(s.var >= 0.0);
          CHECK(s.var <= tau * (1 + 1e-12));
          CHECK(std::abs(s.mean) <= std::abs(r) + 1e-12);
          const auto ab = posterior([&](double w) { return -l1 * std::abs(w) - l2 * w * w + std::log(std::abs(w) + 1e-300); }, r, tau);
          worst_abs = std::max(worst_abs, std::abs(s.abs_mean - std::exp(ab.mass - o.mass)));
        }
    }
  CHECK(worst < 1e-6);
  CHECK(worst_scale < 1e-6);
  CHECK(worst_abs < 1e-6);
}

TEST_CASE("laplacian worked example and symmetry") {
  const PriorMoments s = elastic_net_spg(2.0, 1.0, 1.0, 0.0);
  const auto o = posterior([](double w) { return -std::abs(w); }, 2.0, 1.0);
  CHECK(s.mean == doctest::Approx(o.mean).epsilon(1e-8));
  CHECK(s.var == doctest::Approx(o.var).epsilon(1e-8));

  const PriorMoments z = elastic_net_spg(0.0, 1.0, 1.0, 0.5);
  const auto oz = posterior([](double w) { return -std::abs(w) - 0.5 * w * w; }, 0.0, 1.0);
  CHECK(z.mean == 0.0);
  CHECK(z.var == doctest::Approx(oz.var).epsilon(1e-8));

  for (double r : {0.3, 2.0, 40.0})
    for (double tau : {0.01, 1.0, 30.0}) {
      const PriorMoments a = elastic_net_spg(r, tau, 0.7, 0.2);
      const PriorMoments b = elastic_net_spg(-r, tau, 0.7, 0.2);
      CHECK(a.mean == doctest::Approx(-b.mean).epsilon(1e-12));
      CHECK(a.var == doctest::Approx(b.var).epsilon(1e-12));
    }
}

TEST_CASE("elastic-net degenerate weights") {
  const PriorMoments g = elastic_net_spg(1.0, 1.0, 0.0, 0.5);
  const PriorMoments ref = gaussian_spg(1.0, 1.0, 0.0, 1.0);
  CHECK(g.mean == doctest::Approx(ref.mean));
  CHECK(g.var == doctest::Approx(ref.var));
  const PriorMoments f = elastic_net_spg(1.5, 0.4, 0.0, 0.0);
  CHECK(f.mean == 1.5);
  CHECK(f.var == 0.4);
  // huge |r| where the unscaled exponentials of the closed form overflow
  const PriorMoments big = elastic_net_spg(800.0, 1.0, 3.0, 0.0);
  CHECK(big.mean == doctest::Approx(797.0));
  CHECK(big.var == doctest::Approx(1.0));
  CHECK_THROWS_AS(InputChannel::elastic_net(0.0, 0.0), DomainError);
}

TEST_CASE("elastic-net prox matches derivative-free minimization") {
  double worst = 0.0;
  for (double l1 : {0.0, 0.1, 1.0, 5.0})
    for (double l2 : {0.0, 0.25, 2.0})
      for (double r : kR)
        for (double tau : kTau) {
          const PriorMoments s = elastic_net_msg(r, tau, l1, l2);
          auto obj = [&](double u) { return l1 * std::abs(u) + l2 * u * u + (u - r) * (u - r) / (2.0 * tau); };
          const double u = oracle::minimize(obj, -20.0, 20.0);
          worst = std::max(worst, std::abs(s.mean - u));
        }
  CHECK(worst < 1e-6);

  auto obj = [](double u) { return 0.5 * std::abs(u) + 0.25 * u * u + (u - 3.0) * (u - 3.0) / 4.0; };
  CHECK(std::abs(elastic_net_msg(3.0, 2.0, 0.5, 0.25).mean - oracle::minimize(obj, -10, 10)) < 1e-6);

  const PriorMoments none = elastic_net_msg(1.7, 0.3, 0.0, 0.0);
  CHECK(none.mean == 1.7);
  CHECK(none.var == 0.3);
  // pure l1 is soft thresholding
  for (double r : {-2.0, -0.4, 0.0, 0.2, 3.0}) {
    const PriorMoments st = elastic_net_msg(r, 0.5, 1.0, 0.0);
    const double expect = std::copysign(std::max(std::abs(r) - 0.5, 0.0), r);
    CHECK(st.mean == doctest::Approx(expect));
    CHECK(st.var == (expect != 0.0 ? 0.5 : 0.0));
  }
}

TEST_CASE("gaussian mixture moments") {
  const std::vector<MixtureComponent> one{{1.0, 0.4, 2.0}};
  const PriorMoments a = gaussian_mixture_spg(1.1, 0.6, one);
  const PriorMoments b = gaussian_spg(1.1, 0.6, 0.4, 2.0);
  CHECK(a.mean == doctest::Approx(b.mean));
  CHECK(a.var == doctest::Approx(b.var));
  CHECK(a.log_scale == doctest::Approx(b.log_scale));

  const std::vector<MixtureComponent> sym{{0.5, -2.0, 1.0}, {0.5, 2.0, 1.0}};
  CHECK(std::abs(gaussian_mixture_spg(0.0, 0.5, sym).mean) < 1e-15);

  const std::vector<MixtureComponent> mix{{0.3, -1.0, 1.0}, {0.7, 2.0, 0.25}};
  auto log_prior = [&](double w) {
    return std::log(0.3 * std::exp(oracle::log_gauss(w, -1.0, 1.0)) + 0.7 * std::exp(oracle::log_gauss(w, 2.0, 0.25)));
  };
  const PriorMoments s = gaussian_mixture_spg(1.0, 0.5, mix);
  const auto o = posterior(log_prior, 1.0, 0.5);
  CHECK(std::abs(s.mean - o.mean) < 1e-8);
  CHECK(std::abs(s.var - o.var) < 1e-8);
  CHECK(std::abs(s.log_scale - o.mass) < 1e-8);

  double worst = 0.0;
  for (double r : kR)
    for (double tau : kTau) {
      const PriorMoments g = gaussian_mixture_spg(r, tau, mix);
      const auto q = posterior(log_prior, r, tau);
      worst = std::max({worst, std::abs(g.mean - q.mean), std::abs(g.var - q.var)});
    }
  CHECK(worst < 1e-6);
}

namespace {

// Spike-and-slab oracle: the point mass is exact, the slab part is integrated.
oracle::Moments spike_oracle(double pi, const std::function<double(double)>& log_slab, double r, double tau) {
  const auto slab = posterior(log_slab, r, tau);
  const double log_on = std::log(pi) + slab.mass;
  const double log_off = std::log1p(-pi) + oracle::log_gauss(0.0, r, tau);
  const double top = std::max(log_on, log_off);
  const double p = std::exp(log_on - top) / (std::exp(log_on - top) + std::exp(log_off - top));
  oracle::Moments m;
  m.mean = p * slab.mean;
  m.var = p * (slab.var + slab.mean * slab.mean) - m.mean * m.mean;
  m.mass = p;
  return m;
}

}  // namespace

TEST_CASE("spike-and-slab moments match quadrature") {
  const auto gauss_slab = [](double w) { return oracle::log_gauss(w, 0.0, 1.0); };
  const PriorMoments s = spike_slab_spg(2.0, 0.5, 0.1, gaussian_spg(2.0, 0.5, 0.0, 1.0));
  const auto o = spike_oracle(0.1, gauss_slab, 2.0, 0.5);
  CHECK(std::abs(s.mean - o.mean) < 1e-8);
  CHECK(std::abs(s.var - o.var) < 1e-8);
  CHECK(std::abs(s.nonzero_prob - o.mass) < 1e-8);

  double worst = 0.0;
  const InputChannel bg = InputChannel::spike_slab(0.05, InputChannel::gaussian(0.3, 2.0));
  const InputChannel bl = InputChannel::spike_slab(0.2, InputChannel::laplacian(1.5));
  const std::vector<MixtureComponent> mix{{0.5, -1.0, 0.5}, {0.5, 1.0, 0.5}};
  const InputChannel bm = InputChannel::spike_slab(0.3, InputChannel::gaussian_mixture(mix));
  for (double r : kR)
    for (double tau : kTau) {
      const PriorMoments a = bg.sum_product(r, tau);
      const auto oa = spike_oracle(0.05, [](double w) { return oracle::log_gauss(w, 0.3, 2.0); }, r, tau);
      const PriorMoments b = bl.sum_product(r, tau);
      const auto ob = spike_oracle(0.2, [](double w) { return std::log(0.75) - 1.5 * std::abs(w); }, r, tau);
      const PriorMoments c = bm.sum_product(r, tau);
      const auto oc = spike_oracle(
          0.3,
          [](double w) {
            return std::log(0.5 * std::exp(oracle::log_gauss(w, -1.0, 0.5)) + 0.5 * std::exp(oracle::log_gauss(w, 1.0, 0.5)));
          },
          r, tau);
      worst = std::max({worst, std::abs(a.mean - oa.mean), std::abs(a.var - oa.var), std::abs(a.nonzero_prob - oa.mass),
                        std::abs(b.mean - ob.mean), std::abs(b.var - ob.var), std::abs(b.nonzero_prob - ob.mass),
                        std::abs(c.mean - oc.mean), std::abs(c.var - oc.var), std::abs(c.nonzero_prob - oc.mass)});
      CHECK(a.var >= 0.0);
      CHECK(a.nonzero_prob >= 0.0);
      CHECK(a.nonzero_prob <= 1.0);
    }
  CHECK(worst < 1e-6);
}

TEST_CASE("spike-and-slab limits and monotone support probability") {
  const PriorMoments slab = gaussian_spg(1.2, 0.4, 0.0, 1.0);
  const PriorMoments all = spike_slab_spg(1.2, 0.4, 1.0, slab);
  CHECK(all.mean == slab.mean);
  CHECK(all.var == slab.var);
  CHECK(all.nonzero_prob == 1.0);
  const PriorMoments none = spike_slab_spg(1.2, 0.4, 0.0, slab);
  CHECK(none.mean == 0.0);
  CHECK(none.var == 0.0);
  CHECK(none.nonzero_prob == 0.0);

  const InputChannel bg = InputChannel::spike_slab(0.1, InputChannel::gaussian(0.0, 1.0));
  double prev = -1.0;
  for (double r = 0.0; r <= 6.0; r += 0.25) {
    const PriorMoments m = bg.sum_product(r, 0.3);
    CHECK(m.nonzero_prob >= prev);
    CHECK(std::abs(m.mean) <= r + 1e-12);
    prev = m.nonzero_prob;
  }
  // far tail stays finite
  const PriorMoments far = bg.sum_product(200.0, 1e-3);
  CHECK(far.nonzero_prob == doctest::Approx(1.0));
  CHECK(std::isfinite(far.mean));
}

TEST_CASE("input channel object") {
  const InputChannel bg = InputChannel::spike_slab(0.1, InputChannel::gaussian(0.0, 2.0));
  CHECK(bg.prior_variance() == doctest::Approx(0.2));
  CHECK_FALSE(bg.supports_max_sum());
  CHECK_THROWS_AS(bg.max_sum(0.0, 1.0), ConfigError);
  CHECK(InputChannel::laplacian(2.0).prior_variance() == doctest::Approx(0.5));
  const double en_var = InputChannel::elastic_net(1.0, 0.5).prior_variance();
  const double num = oracle::integrate([](double w) { return w * w * std::exp(-w - 0.5 * w * w); }, 0.0, 60.0) /
                     oracle::integrate([](double w) { return std::exp(-w - 0.5 * w * w); }, 0.0, 60.0);
  CHECK(en_var == doctest::Approx(num).epsilon(1e-9));
  const InputChannel lap = InputChannel::laplacian(1.0);
  CHECK(lap.max_sum(3.0, 1.0).mean == doctest::Approx(2.0));
  CHECK(lap.penalty(-2.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(InputChannel::gaussian_mixture({{0.4, 0, 1}, {0.4, 1, 1}}), DomainError);
  CHECK_THROWS_AS(InputChannel::spike_slab(1.5, lap), DomainError);
}
