#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gamp/dataset.hpp"
#include "gamp/input_channel.hpp"
#include "gamp/output_channel.hpp"
#include "gamp/synthetic.hpp"

namespace gamp {

// First two moments of the per-coordinate joint law of (W, W_hat^k).
struct SEMoments {
  double e_w = 0.0;
  double var_w = 0.0;
  double e_what = 0.0;
  double var_what = 0.0;
  double cov_w_what = 0.0;
  double delta = 1.0;
  int k = 0;
  // Scalar-channel state that produced these moments (recursion output only).
  double tau_r = 0.0;
  double mean_tau_w = 0.0;
};

struct SigmaZ {
  double s11 = 0.0;
  double s12 = 0.0;
  double s22 = 0.0;
};

// Covariance of (Z, Z_hat) for a test row with i.i.d. entries of variance 1/M.
// Throws NumericError when the result is indefinite beyond rounding.
SigmaZ sigma_from_moments(const SEMoments& m);

// Plug-in moments from one realization (w, w_hat) with ratio delta = M/N.
SEMoments empirical_moments(const Vector& w, const Vector& w_hat, double delta);

// Pr{Y != sgn(Z_hat)}. Closed form for a plain probit channel, 2-D quadrature otherwise.
double se_error_rate(const SigmaZ& sigma, const OutputChannel& channel);
// Always the quadrature path; exposed so the closed form can be checked against it.
double se_error_rate_quadrature(const SigmaZ& sigma, const OutputChannel& channel);

double se_mse(const SEMoments& m);

struct SEConfig {
  int mc_samples = 100000;
  int max_iter = 100;
  // Stop once the MSE changes by less than this (relative) between iterations.
  double tol = 1e-7;
  std::uint64_t seed = 1;
  // Initial tau_w; defaults to the prior variance as in the engine.
  std::optional<double> init_tau_w;
};

// Monte-Carlo scalar state evolution of sum-product GAMP under i.i.d. features of variance 1/M.
// Emits one SEMoments per iteration (k = 1, 2, ...).
std::vector<SEMoments> se_recursion(const InputChannel& prior, const OutputChannel& channel, double delta,
                                    const SEConfig& config);

struct SweepPoint {
  double m_over_n = 0.0;
  double k_over_n = 0.0;
};

struct SweepRow {
  double m_over_n = 0.0;
  double k_over_n = 0.0;
  int k = 0;
  double epsilon_pred = 0.0;
  double epsilon_emp = 0.0;  // NaN unless an empirical ensemble was joined in
  double mse_pred = 0.0;
  double mse_emp = 0.0;
  bool ill_posed = false;
  std::string error;
};

struct SweepConfig {
  SEConfig se;
  double probit_v = 0.01;
  double slab_var = 1.0;
};

// Bernoulli-Gaussian prior (pi = K/N, unit slab) with a probit channel at each grid point.
// Points with K/N > M/N are flagged ill-posed and skipped; per-point failures are recorded.
std::vector<SweepRow> se_phase_sweep(const std::vector<SweepPoint>& grid, const SweepConfig& config);

// CSV columns: M_over_N,K_over_N,k,epsilon_pred,epsilon_emp,mse_pred,mse_emp,ill_posed
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

// Draws one weight from the prior (Gaussian, Laplacian, mixture, optionally spiked).
double sample_prior(const InputChannel& prior, Rng& rng);

}  // namespace gamp
