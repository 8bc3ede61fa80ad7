#include "gamp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "gamp/crossval.hpp"
#include "gamp/errors.hpp"
#include "gamp/metrics.hpp"
#include "gamp/normal.hpp"
#include "gamp/parallel.hpp"
#include "gamp/synthetic.hpp"

namespace gamp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Stats {
  double mean = kNaN;
  double sd = kNaN;
};

Stats summarize(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) {
    s.sd = 0.0;
    return s;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return s;
}

double safe_closed_form_error(const Vector& w, const Vector& w_hat, double v) {
  if (w_hat.squaredNorm() == 0.0) return 0.5;
  return closed_form_error(w, w_hat, v);
}

Vector labels_of(const Prediction& p) {
  Vector y(static_cast<Index>(p.labels.size()));
  for (std::size_t i = 0; i < p.labels.size(); ++i) y(static_cast<Index>(i)) = p.labels[i];
  return y;
}

}  // namespace

// ---------------------------------------------------------------------------------------------

std::vector<Fig2Row> run_fig2(const std::vector<SweepPoint>& grid, const Fig2Config& config) {
  if (grid.empty()) throw DomainError("fig2: empty grid");
  if (config.trials < 1 || config.n < 1) throw ConfigError("fig2: trials and N must be positive");
  SweepConfig sc;
  sc.se = config.se;
  sc.probit_v = config.probit_v;
  sc.slab_var = config.slab_var;
  const std::vector<SweepRow> pred = se_phase_sweep(grid, sc);
  const OutputChannel channel = OutputChannel::probit(config.probit_v);

  std::vector<Fig2Row> rows(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    Fig2Row& out = rows[g];
    out.row = pred[g];
    if (out.row.ill_posed) continue;
    const double delta = grid[g].m_over_n;
    const double pi = grid[g].k_over_n;
    const Index m = std::max<Index>(1, static_cast<Index>(std::llround(delta * static_cast<double>(config.n))));
    const InputChannel prior = InputChannel::spike_slab(pi, InputChannel::gaussian(0.0, config.slab_var));

    std::vector<double> eps(static_cast<std::size_t>(config.trials), kNaN);
    std::vector<double> mse(static_cast<std::size_t>(config.trials), kNaN);
    parallel_for(static_cast<std::size_t>(config.trials), [&](std::size_t t) {
      Rng rng(task_seed(config.seed, {2, g, t}));
      const SyntheticTruth truth = gen_bernoulli_gaussian_weights(config.n, pi, config.slab_var, rng);
      const Dataset data = gen_probit_data(truth, m, 1.0 / static_cast<double>(m), config.probit_v, rng);
      try {
        const GampResult r = run_gamp(data, channel, prior, config.gamp);
        const Vector& w_hat = r.state.w_hat;
        const SEMoments em = empirical_moments(truth.w, w_hat, static_cast<double>(m) / config.n);
        const SigmaZ sig = sigma_from_moments(em);
        eps[t] = sig.s22 > 0.0 ? se_error_rate(sig, channel) : 0.5;
        mse[t] = (w_hat - truth.w).squaredNorm() / static_cast<double>(config.n);
      } catch (const NumericError&) {
      }
    });
    std::vector<double> e_ok, m_ok;
    for (std::size_t t = 0; t < eps.size(); ++t) {
      if (std::isnan(eps[t])) {
        ++out.failures;
        continue;
      }
      e_ok.push_back(eps[t]);
      m_ok.push_back(mse[t]);
    }
    out.trials = config.trials;
    const Stats se = summarize(e_ok);
    const Stats sm = summarize(m_ok);
    out.row.epsilon_emp = se.mean;
    out.epsilon_emp_sd = se.sd;
    out.row.mse_emp = sm.mean;
    out.mse_emp_sd = sm.sd;
  }
  return rows;
}

void write_fig2_csv(std::ostream& os, const std::vector<Fig2Row>& rows) {
  os << "M_over_N,K_over_N,k,epsilon_pred,epsilon_emp,mse_pred,mse_emp,ill_posed,epsilon_emp_sd,mse_emp_sd,"
        "trials,failures\n";
  char buf[320];
  for (const auto& f : rows) {
    const SweepRow& r = f.row;
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%d,%.10g,%.10g,%.10g,%.10g,%d,%.10g,%.10g,%d,%d\n", r.m_over_n,
                  r.k_over_n, r.k, r.epsilon_pred, r.epsilon_emp, r.mse_pred, r.mse_emp, r.ill_posed ? 1 : 0,
                  f.epsilon_emp_sd, f.mse_emp_sd, f.trials, f.failures);
    os << buf;
  }
}

// ---------------------------------------------------------------------------------------------

const char* to_string(Fig3Method m) {
  switch (m) {
    case Fig3Method::kProbit:
      return "bg_probit";
    case Fig3Method::kLogistic:
      return "bg_logistic";
    case Fig3Method::kHinge:
      return "bg_hinge";
    case Fig3Method::kOneBitCS:
      return "onebitcs";
  }
  return "?";
}

double fig3_feature_variance(Index k, double eps_bayes) {
  if (k < 1 || !(eps_bayes > 0.0 && eps_bayes < 0.5)) throw DomainError("fig3: need K >= 1 and 0 < eps_bayes < 1/2");
  // Bayes error Phi(-sqrt(K / v)) for K unit-magnitude class means.
  const double q = norm_quantile(1.0 - eps_bayes);
  return static_cast<double>(k) / (q * q);
}

namespace {

struct TrialOutcome {
  double error = 0.5;
  double khat = 0.0;
  bool failed = false;
};

TrialOutcome fig3_gamp(const Dataset& data, const SyntheticTruth& truth, double vfeat, Fig3Method method,
                       const Fig3Config& c) {
  const double pi0 = std::min(1.0, c.pi0_scale * static_cast<double>(c.m) / static_cast<double>(c.n));
  const InputChannel prior = InputChannel::spike_slab(pi0, InputChannel::gaussian(0.0, c.slab_var));
  TuneMask mask;
  mask.pi = true;
  OutputChannel out = OutputChannel::hinge();
  if (method == Fig3Method::kProbit) {
    out = OutputChannel::probit(c.v0);
    mask.v = true;
  } else if (method == Fig3Method::kLogistic) {
    out = OutputChannel::logistic(c.alpha0);
    mask.alpha = true;
  }
  EMConfig em;
  em.em_iters = c.em_iters;
  em.gamp = c.gamp;
  const EmResult r = em_fit(data, out, prior, mask, em);
  TrialOutcome o;
  o.error = safe_closed_form_error(truth.w, r.result.state.w_hat, vfeat);
  o.khat = static_cast<double>(estimated_support(r.result.nonzero_prob).size());
  return o;
}

TrialOutcome fig3_onebitcs(const Dataset& data, const SyntheticTruth& truth, double vfeat, const Fig3Config& c,
                           std::uint64_t seed) {
  const Index n = data.num_features();
  XvalSpec spec;
  spec.folds = c.xval_folds;
  spec.names = {"K"};
  std::vector<double> ks;
  for (Index k = std::max<Index>(1, truth.K - c.xval_radius); k <= std::min(n, truth.K + c.xval_radius); ++k)
    ks.push_back(static_cast<double>(k));
  spec.grids = {ks};
  const TrainFn train = [](const Dataset& d, const std::vector<double>& p) {
    FittedModel f;
    f.w_hat = one_bit_cs(d, static_cast<Index>(p[0]));
    f.support = support_of(f.w_hat);
    const Vector w = f.w_hat;
    f.predict = [w](const FeatureMatrix& x) {
      const Vector z = x.multiply(w);
      return Vector(z.unaryExpr([](double s) { return s >= 0.0 ? 1.0 : -1.0; }));
    };
    return f;
  };
  const XvalResult xr = cross_validate(data, spec, train, seed);
  const Index k = static_cast<Index>(xr.best_params[0]);
  TrialOutcome o;
  o.error = safe_closed_form_error(truth.w, one_bit_cs(data, k), vfeat);
  o.khat = static_cast<double>(k);
  return o;
}

}  // namespace

std::vector<Fig3Row> run_fig3(const Fig3Config& config) {
  if (config.trials < 1 || config.ks.empty() || config.methods.empty()) throw ConfigError("fig3: empty experiment");
  const std::size_t nm = config.methods.size();
  std::vector<Fig3Row> rows;
  for (std::size_t ki = 0; ki < config.ks.size(); ++ki) {
    const Index k = config.ks[ki];
    const double vfeat = fig3_feature_variance(k, config.eps_bayes);
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(config.trials) * nm);
    parallel_for(static_cast<std::size_t>(config.trials), [&](std::size_t t) {
      Rng rng(task_seed(config.seed, {3, static_cast<std::uint64_t>(k), t}));
      const SyntheticTruth truth = gen_sparse_weights(config.n, k, Amplitude::kPlusMinusOne, rng);
      const Dataset data = gen_class_conditional(truth.w, config.m, vfeat, true, rng);
      for (std::size_t mi = 0; mi < nm; ++mi) {
        TrialOutcome& o = outcomes[t * nm + mi];
        try {
          if (config.methods[mi] == Fig3Method::kOneBitCS)
            o = fig3_onebitcs(data, truth, vfeat, config, task_seed(config.seed, {33, static_cast<std::uint64_t>(k), t}));
          else
            o = fig3_gamp(data, truth, vfeat, config.methods[mi], config);
        } catch (const NumericError&) {
          o = TrialOutcome{0.5, 0.0, true};
        }
      }
    });
    for (std::size_t mi = 0; mi < nm; ++mi) {
      Fig3Row row;
      row.k = k;
      row.method = config.methods[mi];
      row.trials = config.trials;
      std::vector<double> errs, khats;
      for (int t = 0; t < config.trials; ++t) {
        const TrialOutcome& o = outcomes[static_cast<std::size_t>(t) * nm + mi];
        if (o.failed) ++row.failures;
        errs.push_back(o.error);
        khats.push_back(o.khat);
      }
      const Stats se = summarize(errs);
      const Stats sk = summarize(khats);
      row.error_mean = se.mean;
      row.error_sd = se.sd;
      row.khat_mean = sk.mean;
      row.khat_sd = sk.sd;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_fig3_csv(std::ostream& os, const std::vector<Fig3Row>& rows) {
  os << "K,method,trials,failures,error_mean,error_sd,khat_mean,khat_sd\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%lld,%s,%d,%d,%.10g,%.10g,%.10g,%.10g\n", static_cast<long long>(r.k),
                  to_string(r.method), r.trials, r.failures, r.error_mean, r.error_sd, r.khat_mean, r.khat_sd);
    os << buf;
  }
}

// ---------------------------------------------------------------------------------------------

const char* to_string(Fig4Classifier c) {
  switch (c) {
    case Fig4Classifier::kGenieLogistic:
      return "genie_logistic";
    case Fig4Classifier::kGenieRobust:
      return "genie_robust";
    case Fig4Classifier::kEmLogistic:
      return "em_logistic";
    case Fig4Classifier::kEmRobust:
      return "em_robust";
  }
  return "?";
}

std::vector<Fig4Row> run_fig4(const Fig4Config& config) {
  if (config.trials < 1 || config.gammas.empty() || config.classifiers.empty()) throw ConfigError("fig4: empty experiment");
  for (double g : config.gammas)
    if (!(g >= 0.0 && g < 0.5)) throw ConfigError("fig4: gamma must lie in [0, 1/2)");
  const std::size_t nc = config.classifiers.size();
  std::vector<Fig4Row> rows;
  for (std::size_t gi = 0; gi < config.gammas.size(); ++gi) {
    const double gamma = config.gammas[gi];
    std::vector<double> errors(static_cast<std::size_t>(config.trials) * nc, 0.5);
    std::vector<double> gamma_hat(static_cast<std::size_t>(config.trials) * nc, kNaN);
    std::vector<char> failed(static_cast<std::size_t>(config.trials) * nc, 0);
    parallel_for(static_cast<std::size_t>(config.trials), [&](std::size_t t) {
      Rng rng(task_seed(config.seed, {4, gi, t}));
      auto [train, truth] = gen_class_conditional(config.n, config.m, config.eps_bayes, true, rng);
      train.y = flip_labels(train.y, gamma, rng).first;
      const Dataset test = gen_class_conditional(truth.w, config.test, truth.v, true, rng);
      const double alpha_genie = 2.0 * static_cast<double>(config.m) * truth.mu;
      const InputChannel prior = InputChannel::gaussian(0.0, 1.0);
      for (std::size_t ci = 0; ci < nc; ++ci) {
        const std::size_t slot = t * nc + ci;
        try {
          OutputChannel out = OutputChannel::logistic(alpha_genie);
          GampResult res;
          switch (config.classifiers[ci]) {
            case Fig4Classifier::kGenieLogistic:
              res = run_gamp(train, out, prior, config.gamp);
              break;
            case Fig4Classifier::kGenieRobust:
              out = out.robustified(gamma);
              res = run_gamp(train, out, prior, config.gamp);
              break;
            case Fig4Classifier::kEmLogistic:
            case Fig4Classifier::kEmRobust: {
              const bool robust = config.classifiers[ci] == Fig4Classifier::kEmRobust;
              out = OutputChannel::logistic(config.em_alpha);
              if (robust) out = out.robustified(config.gamma0);
              TuneMask mask;
              mask.slab_var = true;
              mask.gamma = robust;
              EMConfig em;
              em.em_iters = config.em_iters;
              em.gamp = config.gamp;
              const EmResult er = em_fit(train, out, prior, mask, em);
              out = er.output;
              res = er.result;
              if (robust) gamma_hat[slot] = er.output.gamma();
              break;
            }
          }
          const Prediction p = predict(res.state.w_hat, res.state.tau_w, test.X, out);
          errors[slot] = error_rate(test.y, labels_of(p));
        } catch (const NumericError&) {
          failed[slot] = 1;
        }
      }
    });
    for (std::size_t ci = 0; ci < nc; ++ci) {
      Fig4Row row;
      row.gamma = gamma;
      row.classifier = config.classifiers[ci];
      row.trials = config.trials;
      std::vector<double> errs, ghats;
      for (int t = 0; t < config.trials; ++t) {
        const std::size_t slot = static_cast<std::size_t>(t) * nc + ci;
        if (failed[slot]) ++row.failures;
        errs.push_back(errors[slot]);
        if (!std::isnan(gamma_hat[slot])) ghats.push_back(gamma_hat[slot]);
      }
      const Stats se = summarize(errs);
      row.error_mean = se.mean;
      row.error_sd = se.sd;
      row.gamma_hat_mean = summarize(ghats).mean;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_fig4_csv(std::ostream& os, const std::vector<Fig4Row>& rows) {
  os << "gamma,classifier,trials,failures,error_mean,error_sd,gamma_hat_mean\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%s,%d,%d,%.10g,%.10g,%.10g\n", r.gamma, to_string(r.classifier), r.trials,
                  r.failures, r.error_mean, r.error_sd, r.gamma_hat_mean);
    os << buf;
  }
}

}  // namespace gamp
