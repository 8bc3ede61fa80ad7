#include "gamp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "gamp/errors.hpp"

namespace gamp {

void GampConfig::validate() const {
  if (max_iter < 1) throw ConfigError("gamp: max_iter must be at least 1");
  if (!(tol > 0.0)) throw ConfigError("gamp: tol must be positive");
  if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("gamp: damping must lie in (0, 1]");
  if (!(var_floor > 0.0 && var_ceiling > var_floor)) throw ConfigError("gamp: variance bounds must be 0 < floor < ceiling");
  if (init_tau_w && !(*init_tau_w >= 0.0)) throw ConfigError("gamp: init_tau_w must be non-negative");
}

Gamp::Gamp(const FeatureMatrix& x, const Vector& y, const OutputModel& out, const InputModel& in, GampConfig config)
    : x_(&x), y_(&y), out_(&out), in_(&in), config_(std::move(config)) {
  config_.validate();
  const Index m = x.rows();
  const Index n = x.cols();
  if (m < 1 || n < 1) throw DomainError("gamp: need at least one example and one feature");
  if (y.size() != m) throw DomainError("gamp: label count does not match feature rows");
  if (config_.mode == Mode::kMaxSum && !in.supports_max_sum())
    throw ConfigError("gamp: prior does not support max-sum inference");

  double tau0 = 1.0;
  if (config_.init_tau_w) {
    tau0 = *config_.init_tau_w;
  } else if (!config_.literal_init) {
    const auto* ic = dynamic_cast<const InputChannel*>(&in);
    if (ic && ic->spike()) tau0 = ic->prior_variance();
  }
  state_.w_hat = Vector::Zero(n);
  state_.w_prox = Vector::Zero(n);
  state_.tau_w = clamp_var(Vector::Constant(n, tau0));
  state_.s_hat = Vector::Zero(m);
  state_.tau_s = Vector::Zero(m);
  state_.p_hat = Vector::Zero(m);
  state_.tau_p = Vector::Zero(m);
  state_.z_hat = Vector::Zero(m);
  state_.tau_z = Vector::Zero(m);
  state_.r_hat = Vector::Zero(n);
  state_.tau_r = Vector::Zero(n);
  nonzero_ = Vector::Ones(n);
}

Vector Gamp::clamp_var(const Vector& v) const {
  return v.cwiseMax(config_.var_floor).cwiseMin(config_.var_ceiling);
}

void Gamp::diverged(const char* what) const {
  std::vector<double> rel;
  rel.reserve(trace_.size());
  for (const auto& r : trace_) rel.push_back(r.rel_change);
  throw DivergenceError(std::string("gamp diverged at iteration ") + std::to_string(state_.k + 1) + ": " + what,
                        std::move(rel));
}

double Gamp::objective(const Vector& w) const {
  const Vector z = x_->multiply(w);
  double total = 0.0;
  for (Index m = 0; m < z.size(); ++m) total += out_->loss((*y_)(m), z(m));
  for (Index n = 0; n < w.size(); ++n) total += in_->penalty(w(n));
  return total;
}

bool Gamp::step() {
  GampState& s = state_;
  const Index m = x_->rows();
  const Index n = x_->cols();
  const double beta = config_.damping;
  const bool max_sum = config_.mode == Mode::kMaxSum;

  const bool damp_var = config_.damp_variances && s.k > 0;
  const Vector tau_p = clamp_var(x_->multiply_squared(s.tau_w));
  s.tau_p = damp_var ? Vector(beta * tau_p + (1.0 - beta) * s.tau_p) : tau_p;
  s.p_hat = x_->multiply(s.w_hat) - s.s_hat.cwiseProduct(s.tau_p);
  Vector tau_s(m);
  Vector s_new(m);
  for (Index i = 0; i < m; ++i) {
    const double y = (*y_)(i);
    const ScalarMoments zm =
        max_sum ? out_->max_sum(y, s.p_hat(i), s.tau_p(i)) : out_->sum_product(y, s.p_hat(i), s.tau_p(i));
    s.z_hat(i) = zm.mean;
    s.tau_z(i) = zm.var;
    const double tp = s.tau_p(i);
    tau_s(i) = std::max(1.0 / tp - zm.var / (tp * tp), config_.var_floor);
    s_new(i) = (zm.mean - s.p_hat(i)) / tp;
  }
  if (!s_new.allFinite()) diverged("non-finite output messages");
  const Vector s_old = s.s_hat;
  s.s_hat = beta * s_new + (1.0 - beta) * s_old;
  s.tau_s = damp_var ? Vector(beta * tau_s + (1.0 - beta) * s.tau_s) : tau_s;

  s.tau_r = clamp_var(x_->multiply_squared_transpose(s.tau_s).cwiseInverse());
  s.r_hat = s.w_hat + s.tau_r.cwiseProduct(x_->multiply_transpose(s.s_hat));

  Vector w_new(n);
  Vector tau_w(n);
  for (Index j = 0; j < n; ++j) {
    const PriorMoments pm = max_sum ? in_->max_sum(s.r_hat(j), s.tau_r(j)) : in_->sum_product(s.r_hat(j), s.tau_r(j));
    w_new(j) = pm.mean;
    tau_w(j) = pm.var;
    nonzero_(j) = pm.nonzero_prob;
  }
  if (!w_new.allFinite() || !tau_w.allFinite()) diverged("non-finite weight estimates");

  const Vector w_old = s.w_hat;
  s.w_hat = beta * w_new + (1.0 - beta) * w_old;
  s.tau_w = clamp_var(tau_w);
  ++s.k;

  auto relative = [](double diff, double norm) {
    if (norm > 0.0) return diff / norm;
    return diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  const double diff = (s.w_hat - w_old).norm();
  double rel = relative(diff, s.w_hat.norm());
  // An all-zero estimate that stays zero says nothing about the output messages, which may
  // still be moving (e.g. an l1 prox that thresholds everything on the first pass).
  if (diff == 0.0 && s.w_hat.norm() == 0.0) rel = relative((s.s_hat - s_old).norm(), s.s_hat.norm());
  if (std::isnan(rel)) diverged("relative change is NaN");

  IterationRecord rec;
  rec.k = s.k;
  rec.rel_change = rel;
  rec.objective = max_sum ? objective(s.w_hat) : std::numeric_limits<double>::quiet_NaN();
  const double inv_n = 1.0 / static_cast<double>(n);
  rec.mean_w = s.w_hat.sum() * inv_n;
  rec.mean_w2 = s.w_hat.squaredNorm() * inv_n;
  rec.mean_tau_w = s.tau_w.sum() * inv_n;
  rec.mean_tau_r = s.tau_r.sum() * inv_n;
  trace_.push_back(rec);

  converged_ = rel < config_.tol;
  // Damping leaves geometric remnants where the prox returns exact zeros.
  s.w_prox = w_new;
  if (converged_) s.w_hat = w_new;
  return converged_;
}

void Gamp::run(const std::function<void(const GampState&)>& observer) {
  while (state_.k < config_.max_iter) {
    const bool done = step();
    if (observer) observer(state_);
    if (done) break;
  }
}

GampResult Gamp::result() const {
  GampResult r;
  r.state = state_;
  r.converged = converged_;
  r.iterations = state_.k;
  r.trace = trace_;
  r.nonzero_prob = nonzero_;
  return r;
}

GampResult run_gamp(const Dataset& data, const OutputModel& out, const InputModel& in, const GampConfig& config,
                    const std::function<void(const GampState&)>& observer) {
  Gamp g(data.X, data.y, out, in, config);
  g.run(observer);
  return g.result();
}

Prediction predict(const Vector& w_hat, const Vector& tau_w, const FeatureMatrix& x_test, const OutputModel& out) {
  if (w_hat.size() != x_test.cols() || tau_w.size() != x_test.cols())
    throw DomainError("predict: weight length does not match feature count");
  const Vector z = x_test.multiply(w_hat);
  const Vector tz = x_test.multiply_squared(tau_w);
  Prediction p;
  p.labels.resize(static_cast<std::size_t>(z.size()));
  p.probabilities.resize(z.size());
  for (Index t = 0; t < z.size(); ++t) {
    const double prob = out.predict_proba(z(t), std::max(tz(t), 0.0));
    p.probabilities(t) = prob;
    p.labels[static_cast<std::size_t>(t)] = prob >= 0.5 ? 1 : -1;
  }
  return p;
}

Vector one_bit_cs(const Dataset& data, Index k) {
  const Index n = data.num_features();
  if (k < 1 || k > n) throw DomainError("one_bit_cs: K must lie in [1, N]");
  const Vector corr = data.X.multiply_transpose(data.y);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(corr(a)) > std::abs(corr(b)); });
  Vector w = Vector::Zero(n);
  for (Index i = 0; i < k; ++i) w(order[static_cast<std::size_t>(i)]) = corr(order[static_cast<std::size_t>(i)]);
  return w;
}

void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& trace) {
  os << "k,rel_change,objective\n";
  char buf[96];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g\n", r.k, r.rel_change, r.objective);
    os << buf;
  }
}

}  // namespace gamp
