#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gamp/dataset.hpp"
#include "gamp/engine.hpp"
#include "gamp/input_channel.hpp"
#include "gamp/output_channel.hpp"

namespace gamp {

// Which hyperparameters EM is allowed to move.
struct TuneMask {
  bool alpha = false;      // logistic steepness
  bool v = false;          // probit variance
  bool gamma = false;      // label-corruption probability (robust channel)
  bool pi = false;         // spike-and-slab nonzero probability
  bool slab_mean = false;  // mean of a Gaussian prior / slab
  bool slab_var = false;   // variance of a Gaussian prior / slab
  bool lambda1 = false;    // Laplacian / elastic-net l1 weight

  bool empty() const { return !(alpha || v || gamma || pi || slab_mean || slab_var || lambda1); }
};

struct ThetaParams {
  double alpha = 1.0;
  double v = 1.0;
  double gamma = 0.0;
  double pi = 1.0;
  double slab_mu = 0.0;
  double slab_sigma2 = 1.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::vector<MixtureComponent> mixture;
  TuneMask mask;
};

ThetaParams snapshot(const OutputChannel& out, const InputChannel& in, const TuneMask& mask = {});

enum class Cadence {
  kAuto,          // per-iteration for sum-product, per-run for max-sum
  kPerIteration,  // one parameter update after every GAMP iteration
  kPerRun,        // one parameter update after each converged GAMP run
};

struct EMConfig {
  // Per-run cadence: number of GAMP runs. Per-iteration cadence: minimum number of updates
  // before GAMP's stopping rule is honoured.
  int em_iters = 5;
  GampConfig gamp;
  Cadence cadence = Cadence::kAuto;
  int quadrature_nodes = 63;

  void validate() const;
};

struct ThetaTraceRow {
  int em_iter = 0;
  std::string name;
  double value = 0.0;
};

struct EmResult {
  OutputChannel output;
  InputChannel input;
  ThetaParams theta;
  GampResult result;
  std::vector<ThetaTraceRow> trace;
  // Human-readable notes on boundary returns and skipped updates.
  std::vector<std::string> flags;
};

// Inner GAMP divergence propagates as DivergenceError; the message names the last theta.
EmResult em_fit(const Dataset& data, const OutputChannel& out, const InputChannel& in, const TuneMask& mask,
                const EMConfig& config);

struct ScalarUpdate {
  double value = 0.0;
  bool flagged = false;  // boundary return or skipped update
  double residual = 0.0;
};

// Root in alpha of sum_m (z_m y_m - xi_m)/2 + xi_m / (1 + exp(alpha xi_m)), xi frozen.
ScalarUpdate update_alpha(const Vector& z_hat, const Vector& xi, const Vector& y, double alpha_old);
double alpha_residual(const Vector& z_hat, const Vector& xi, const Vector& y, double alpha);

// Gauss-Hermite evaluation of the probit variance score under the z posterior at v_old.
class ProbitVScore {
 public:
  ProbitVScore(const Vector& p_hat, const Vector& tau_p, const Vector& y, double v_old, int nodes = 63);
  // sum_m E[(-t/v) phi(t)/Phi(t)], t = y z / sqrt(v).
  double residual(double v) const;
  // sum_m E[log Phi(y z / sqrt(v))], the surrogate the update maximizes.
  double surrogate(double v) const;
  Index examples() const { return examples_; }

 private:
  std::vector<double> yz_;
  std::vector<double> weight_;
  Index examples_ = 0;
};

ScalarUpdate update_probit_v(const Vector& p_hat, const Vector& tau_p, const Vector& y, double v_old,
                             int nodes = 63);

ScalarUpdate update_gamma(const Vector& responsibilities);

struct SpikeSlabUpdate {
  double pi = 1.0;
  double mu = 0.0;
  double sigma2 = 1.0;
  bool flagged = false;
};

// pi = mean nonzero_prob; slab mean/variance by responsibility-weighted moments. Untuned
// quantities keep their old values (pass tune flags to control).
SpikeSlabUpdate update_spike_slab(const std::vector<PriorMoments>& moments, double mu_old, double sigma2_old,
                                  bool tune_mean = true, bool tune_var = true);

// lambda1 = N / sum_n E|W_n|.
ScalarUpdate update_lambda1(const std::vector<PriorMoments>& moments, double lambda1_old);

// CSV columns: em_iter,parameter,value
void write_theta_csv(std::ostream& os, const std::vector<ThetaTraceRow>& trace);

}  // namespace gamp
