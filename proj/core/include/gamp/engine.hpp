#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gamp/dataset.hpp"
#include "gamp/input_channel.hpp"
#include "gamp/output_channel.hpp"

namespace gamp {

enum class Mode { kSumProduct, kMaxSum };

struct GampConfig {
  Mode mode = Mode::kSumProduct;
  int max_iter = 200;
  double tol = 1e-3;
  double damping = 0.9;
  // Also damp tau_p and tau_s with the same factor. Fixed points are unchanged; without it
  // the variances can swing by orders of magnitude on correlated features.
  bool damp_variances = true;
  double var_floor = 1e-11;
  double var_ceiling = 1e11;
  // tau_w starts at the prior variance for spike-and-slab priors unless this is set.
  bool literal_init = false;
  // Explicit override of the initial tau_w (takes precedence over both rules above).
  std::optional<double> init_tau_w;

  void validate() const;
};

struct GampState {
  Vector w_hat, tau_w;
  // Undamped input-channel estimate of the last iteration; w_hat takes this value on convergence.
  Vector w_prox;
  Vector s_hat, tau_s;
  Vector p_hat, tau_p, z_hat, tau_z;
  Vector r_hat, tau_r;
  int k = 0;
};

struct IterationRecord {
  int k = 0;
  double rel_change = 0.0;
  // Max-sum objective sum_m f(y_m, x_m'w) + sum_n penalty(w_n); NaN for sum-product.
  double objective = 0.0;
  double mean_w = 0.0;
  double mean_w2 = 0.0;
  double mean_tau_w = 0.0;
  double mean_tau_r = 0.0;
};

struct GampResult {
  GampState state;
  bool converged = false;
  int iterations = 0;
  std::vector<IterationRecord> trace;
  // P(W_n != 0 | data); all ones for priors without a spike.
  Vector nonzero_prob;
};

// One GAMP run that can be stepped, so EM can swap channel parameters between iterations.
// Channel references are non-owning and must outlive the object (or be rebound).
class Gamp {
 public:
  Gamp(const FeatureMatrix& x, const Vector& y, const OutputModel& out, const InputModel& in, GampConfig config);

  void set_output(const OutputModel& out) { out_ = &out; }
  void set_input(const InputModel& in) { in_ = &in; }

  // One full iteration. Returns true once the stopping rule fires. Throws DivergenceError.
  bool step();
  // Steps until convergence or max_iter.
  void run(const std::function<void(const GampState&)>& observer = {});

  const GampState& state() const { return state_; }
  bool converged() const { return converged_; }
  const std::vector<IterationRecord>& trace() const { return trace_; }
  const GampConfig& config() const { return config_; }
  const FeatureMatrix& features() const { return *x_; }
  const Vector& labels() const { return *y_; }
  GampResult result() const;

  // Max-sum objective at w.
  double objective(const Vector& w) const;

 private:
  Vector clamp_var(const Vector& v) const;
  [[noreturn]] void diverged(const char* what) const;

  const FeatureMatrix* x_;
  const Vector* y_;
  const OutputModel* out_;
  const InputModel* in_;
  GampConfig config_;
  GampState state_;
  Vector nonzero_;
  std::vector<IterationRecord> trace_;
  bool converged_ = false;
};

GampResult run_gamp(const Dataset& data, const OutputModel& out, const InputModel& in, const GampConfig& config,
                    const std::function<void(const GampState&)>& observer = {});

struct Prediction {
  std::vector<int> labels;
  Vector probabilities;
};

// Test labels from the weight posterior: z_t = x_t'w, tau_z = sum_n x_tn^2 tau_w_n.
Prediction predict(const Vector& w_hat, const Vector& tau_w, const FeatureMatrix& x_test, const OutputModel& out);

// Keep the K largest |X'y| entries (ties to the lowest index), zero the rest.
Vector one_bit_cs(const Dataset& data, Index k);

// CSV columns: k,rel_change,objective
void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& trace);

}  // namespace gamp
