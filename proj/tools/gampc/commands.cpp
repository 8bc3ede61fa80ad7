#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "gamp/crossval.hpp"
#include "gamp/errors.hpp"
#include "gamp/experiments.hpp"
#include "gamp/io.hpp"
#include "gamp/metrics.hpp"
#include "gamp/synthetic.hpp"
#include "model_file.hpp"

namespace gampc {

using gamp::Dataset;
using gamp::Index;
using gamp::Vector;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Dataset load_data(const DataOptions& d, std::optional<Index> features = std::nullopt) {
  if (d.path.empty()) throw gamp::ConfigError("no data file given");
  if (d.features > 0) features = static_cast<Index>(d.features);
  const bool csv = d.format == "csv" || (d.format == "auto" && ends_with(d.path, ".csv"));
  std::ifstream probe(d.path);
  if (!probe) throw gamp::ConfigError("cannot open " + d.path);
  Dataset data = csv ? gamp::read_csv(d.path) : gamp::read_libsvm(d.path, features);
  if (csv && features && data.num_features() != *features)
    throw gamp::DomainError(d.path + ": expected " + std::to_string(*features) + " features");
  data.validate();
  return data;
}

// Writes to the named file, or stdout for an empty name.
template <class F>
void with_output(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream os(path);
  if (!os) throw gamp::ConfigError("cannot write " + path);
  write(os);
}

void write_predictions(std::ostream& os, const gamp::Prediction& p) {
  os << "index,label,probability\n";
  char buf[64];
  for (std::size_t i = 0; i < p.labels.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%d,%.17g\n", i, p.labels[i], p.probabilities(static_cast<Index>(i)));
    os << buf;
  }
}

Vector labels_vector(const gamp::Prediction& p) {
  Vector v(static_cast<Index>(p.labels.size()));
  for (std::size_t i = 0; i < p.labels.size(); ++i) v(static_cast<Index>(i)) = p.labels[i];
  return v;
}

gamp::Support model_support(const gamp::InputChannel& in, const gamp::GampResult& r) {
  return in.spike() ? gamp::estimated_support(r.nonzero_prob) : gamp::support_of(r.state.w_hat);
}

std::string divergence_trace_path(const std::string& stem) {
  return (stem.empty() ? std::string("gampc") : stem) + ".diverged.csv";
}

int report_divergence(const gamp::DivergenceError& e, const std::string& stem) {
  const std::string path = divergence_trace_path(stem);
  std::ofstream os(path);
  os << "k,rel_change\n";
  char buf[64];
  for (std::size_t i = 0; i < e.trace().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.10g\n", i + 1, e.trace()[i]);
    os << buf;
  }
  std::cerr << "gampc: " << e.what() << "\ngampc: iteration trace written to " << path << '\n';
  return 2;
}

struct Fit {
  gamp::OutputChannel out;
  gamp::InputChannel in;
  gamp::GampResult result;
  std::vector<gamp::ThetaTraceRow> theta;
  std::vector<std::string> flags;
  double total_s = 0.0;
  double post_s = 0.0;
};

// EM tuning (when anything is tuned) followed by a timed run at the final parameters.
Fit fit(const Dataset& data, const ModelOptions& o) {
  Fit f{make_output(o), make_prior(o), {}, {}, {}, 0.0, 0.0};
  const gamp::TuneMask mask = make_mask(o);
  const gamp::GampConfig g = make_gamp_config(o);
  const auto t0 = Clock::now();
  if (!mask.empty()) {
    const gamp::EmResult er = gamp::em_fit(data, f.out, f.in, mask, make_em_config(o));
    f.out = er.output;
    f.in = er.input;
    f.theta = er.trace;
    f.flags = er.flags;
  }
  const auto t1 = Clock::now();
  f.result = gamp::run_gamp(data, f.out, f.in, g);
  f.post_s = seconds_since(t1);
  f.total_s = seconds_since(t0);
  return f;
}

Dataset prepare(Dataset d, const ModelOptions& o) {
  if (o.scalar_variance) d.X = d.X.with_scalar_variance();
  return d;
}

std::pair<std::string, std::vector<double>> parse_grid(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw gamp::ConfigError("--grid: expected name=values, got '" + spec + "'");
  const std::string name = spec.substr(0, eq);
  const std::string rest = spec.substr(eq + 1);
  std::vector<double> values;
  if (rest.find(':') != std::string::npos) {
    double lo = 0.0, hi = 0.0;
    int count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(rest);
    if (!(is >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':')
      throw gamp::ConfigError("--grid: expected name=lo:hi:count, got '" + spec + "'");
    values = gamp::log_grid(lo, hi, count);
  } else {
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        values.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw gamp::ConfigError("--grid: bad value '" + item + "'");
      }
    }
  }
  if (values.empty()) throw gamp::ConfigError("--grid: no values for " + name);
  return {name, values};
}

std::vector<gamp::SweepPoint> parse_points(const std::vector<std::string>& items) {
  std::vector<gamp::SweepPoint> out;
  for (const auto& s : items) {
    gamp::SweepPoint p;
    char c = 0;
    std::istringstream is(s);
    if (!(is >> p.m_over_n >> c >> p.k_over_n) || c != ':')
      throw gamp::ConfigError("--points: expected M/N:K/N, got '" + s + "'");
    out.push_back(p);
  }
  return out;
}

}  // namespace

int cmd_train(const TrainOptions& o) {
  if (!o.predictions.empty() && o.test.empty()) throw gamp::ConfigError("--predictions needs --test");
  const Dataset data = prepare(load_data(o.data), o.model);
  std::optional<Dataset> test;
  if (!o.test.empty()) {
    DataOptions td = o.data;
    td.path = o.test;
    test = load_data(td, data.num_features());
  }

  std::optional<Fit> fitted;
  try {
    fitted = fit(data, o.model);
  } catch (const gamp::DivergenceError& e) {
    return report_divergence(e, o.model_out);
  }
  const Fit& f = *fitted;

  const gamp::GampResult& r = f.result;
  const Index n = data.num_features();
  const gamp::Support support = model_support(f.in, r);
  const double train_err =
      gamp::error_rate(data.y, labels_vector(gamp::predict(r.state.w_hat, r.state.tau_w, data.X, f.out)));
  std::optional<double> test_err;
  if (test) {
    const gamp::Prediction tp = gamp::predict(r.state.w_hat, r.state.tau_w, test->X, f.out);
    test_err = gamp::error_rate(test->y, labels_vector(tp));
    if (!o.predictions.empty()) with_output(o.predictions, [&](std::ostream& os) { write_predictions(os, tp); });
  }

  std::printf("examples %lld  features %lld\n", static_cast<long long>(data.num_examples()),
              static_cast<long long>(n));
  std::printf("%s after %d iterations\n", r.converged ? "converged" : "not converged", r.iterations);
  std::printf("training error %.6f\n", train_err);
  if (test_err) std::printf("test error %.6f\n", *test_err);
  std::printf("estimated K %zu  density %.6f\n", support.size(),
              static_cast<double>(support.size()) / static_cast<double>(n));
  std::printf("runtime total %.3f s  post-tuning %.3f s\n", f.total_s, f.post_s);
  for (const auto& flag : f.flags) std::printf("note: %s\n", flag.c_str());

  if (!o.model_out.empty()) {
    SavedModel m;
    m.output = f.out;
    m.prior = f.in;
    m.mode = o.model.mode == "max-sum" ? gamp::Mode::kMaxSum : gamp::Mode::kSumProduct;
    m.converged = r.converged;
    m.iterations = r.iterations;
    m.w_hat = r.state.w_hat;
    m.tau_w = r.state.tau_w;
    m.nonzero_prob = r.nonzero_prob;
    save_model(o.model_out, m);
  }
  if (!o.trace.empty()) with_output(o.trace, [&](std::ostream& os) { gamp::write_trace_csv(os, r.trace); });
  if (!o.theta_trace.empty())
    with_output(o.theta_trace, [&](std::ostream& os) { gamp::write_theta_csv(os, f.theta); });
  if (!o.report.empty()) {
    json j = {{"examples", data.num_examples()},
              {"features", n},
              {"converged", r.converged},
              {"iterations", r.iterations},
              {"training_error", train_err},
              {"test_error", test_err ? json(*test_err) : json(nullptr)},
              {"estimated_k", support.size()},
              {"density", static_cast<double>(support.size()) / static_cast<double>(n)},
              {"runtime_total_s", f.total_s},
              {"runtime_post_tuning_s", f.post_s},
              {"output", to_json(f.out)},
              {"prior", to_json(f.in)},
              {"em_notes", f.flags}};
    with_output(o.report, [&](std::ostream& os) { os << j.dump(1) << '\n'; });
  }
  return 0;
}

int cmd_predict(const PredictOptions& o) {
  const SavedModel m = load_model(o.model);
  const Dataset data = load_data(o.data, m.w_hat.size());
  const gamp::Prediction p = gamp::predict(m.w_hat, m.tau_w, data.X, m.output);
  with_output(o.out, [&](std::ostream& os) { write_predictions(os, p); });
  if (!o.out.empty())
    std::printf("examples %lld  error %.6f\n", static_cast<long long>(data.num_examples()),
                gamp::error_rate(data.y, labels_vector(p)));
  return 0;
}

int cmd_xval(const XvalOptions& o) {
  const Dataset data = prepare(load_data(o.data), o.model);
  gamp::XvalSpec spec;
  spec.folds = o.folds;
  for (const auto& g : o.grids) {
    auto [name, values] = parse_grid(g);
    ModelOptions probe = o.model;
    set_param(probe, name, 1.0);
    spec.names.push_back(name);
    spec.grids.push_back(std::move(values));
  }
  if (spec.names.empty()) throw gamp::ConfigError("xval: give at least one --grid");
  spec.validate();

  const gamp::GampConfig g = make_gamp_config(o.model);
  const gamp::TrainFn train = [&](const Dataset& d, const std::vector<double>& params) {
    ModelOptions mo = o.model;
    for (std::size_t i = 0; i < params.size(); ++i) set_param(mo, spec.names[i], params[i]);
    const gamp::OutputChannel out = make_output(mo);
    const gamp::InputChannel in = make_prior(mo);
    const gamp::GampResult r = gamp::run_gamp(d, out, in, g);
    gamp::FittedModel fm;
    fm.w_hat = r.state.w_hat;
    fm.support = model_support(in, r);
    const Vector w = r.state.w_hat;
    const Vector tw = r.state.tau_w;
    fm.predict = [w, tw, out](const gamp::FeatureMatrix& x) { return labels_vector(gamp::predict(w, tw, x, out)); };
    return fm;
  };

  const auto t0 = Clock::now();
  const gamp::XvalResult xr = gamp::cross_validate(data, spec, train, o.seed);
  ModelOptions best = o.model;
  for (std::size_t i = 0; i < xr.best_params.size(); ++i) set_param(best, spec.names[i], xr.best_params[i]);
  const gamp::OutputChannel out = make_output(best);
  const gamp::InputChannel in = make_prior(best);
  const auto t1 = Clock::now();
  gamp::GampResult r;
  try {
    r = gamp::run_gamp(data, out, in, g);
  } catch (const gamp::DivergenceError& e) {
    return report_divergence(e, o.model_out);
  }
  const double post_s = seconds_since(t1);
  const double total_s = seconds_since(t0);

  for (const auto& name : spec.names) std::printf("%-10s ", name.c_str());
  std::printf("%-10s %-10s %-10s\n", "error", "density", "jaccard");
  for (const auto& s : xr.scores) {
    for (double p : s.params) std::printf("%-10.4g ", p);
    std::printf("%-10.4f %-10.4f %-10.4f%s\n", s.error, s.density, s.jaccard, s.diverged ? " diverged" : "");
  }
  std::printf("best:");
  for (std::size_t i = 0; i < spec.names.size(); ++i) std::printf(" %s=%.6g", spec.names[i].c_str(), xr.best_params[i]);
  std::printf("\nclassifiers trained %zu\n", xr.classifiers_trained);
  std::printf("runtime total %.3f s  post-tuning %.3f s\n", total_s, post_s);
  for (const auto& note : xr.notes) std::printf("note: %s\n", note.c_str());

  if (!o.model_out.empty()) {
    SavedModel m;
    m.output = out;
    m.prior = in;
    m.mode = g.mode;
    m.converged = r.converged;
    m.iterations = r.iterations;
    m.w_hat = r.state.w_hat;
    m.tau_w = r.state.tau_w;
    m.nonzero_prob = r.nonzero_prob;
    save_model(o.model_out, m);
  }
  if (!o.report.empty()) {
    json scores = json::array();
    for (const auto& s : xr.scores)
      scores.push_back({{"params", s.params},
                        {"error", s.error},
                        {"density", s.density},
                        {"jaccard", s.jaccard},
                        {"diverged", s.diverged}});
    json best_j = json::object();
    for (std::size_t i = 0; i < spec.names.size(); ++i) best_j[spec.names[i]] = xr.best_params[i];
    json j = {{"names", spec.names},
              {"folds", spec.folds},
              {"best", best_j},
              {"best_index", xr.best_index},
              {"scores", scores},
              {"classifiers_trained", xr.classifiers_trained},
              {"runtime_total_s", total_s},
              {"runtime_post_tuning_s", post_s},
              {"notes", xr.notes}};
    with_output(o.report, [&](std::ostream& os) { os << j.dump(1) << '\n'; });
  }
  return 0;
}

int cmd_sweep(const SweepOptions& o) {
  std::vector<gamp::SweepPoint> grid;
  for (double mn : o.m_over_n)
    for (double kn : o.k_over_n) grid.push_back({mn, kn});
  gamp::SEConfig se;
  se.mc_samples = o.mc_samples;
  se.max_iter = o.se_iters;
  se.seed = o.seed;
  if (o.trials > 0) {
    gamp::Fig2Config c;
    c.n = static_cast<Index>(o.n);
    c.trials = o.trials;
    c.probit_v = o.v;
    c.slab_var = o.slab_var;
    c.se = se;
    c.seed = o.seed;
    const auto rows = gamp::run_fig2(grid, c);
    with_output(o.out, [&](std::ostream& os) { gamp::write_fig2_csv(os, rows); });
    return 0;
  }
  gamp::SweepConfig c;
  c.se = se;
  c.probit_v = o.v;
  c.slab_var = o.slab_var;
  const auto rows = gamp::se_phase_sweep(grid, c);
  with_output(o.out, [&](std::ostream& os) { gamp::write_sweep_csv(os, rows); });
  for (const auto& r : rows)
    if (!r.error.empty()) std::cerr << "gampc: point (" << r.m_over_n << ", " << r.k_over_n << "): " << r.error << '\n';
  return 0;
}

int cmd_synth(const SynthOptions& o) {
  if (o.out.empty()) throw gamp::ConfigError("synth: --out is required");
  gamp::Rng rng(o.seed);
  const Index n = static_cast<Index>(o.n);
  const Index m = static_cast<Index>(o.m);
  const gamp::Amplitude amp = o.amplitude == "gaussian" ? gamp::Amplitude::kGaussian : gamp::Amplitude::kPlusMinusOne;
  Dataset data;
  gamp::SyntheticTruth truth;
  std::function<Dataset(Index)> draw;
  if (o.generator == "probit") {
    truth = gamp::gen_sparse_weights(n, static_cast<Index>(o.k), amp, rng);
    const double fv = o.feature_var > 0.0 ? o.feature_var : 1.0 / static_cast<double>(m);
    draw = [&, fv](Index rows) { return gamp::gen_probit_data(truth, rows, fv, o.v, rng); };
    truth.v = o.v;
  } else if (o.generator == "class-conditional") {
    truth = gamp::gen_sparse_weights(n, static_cast<Index>(o.k), amp, rng);
    const double fv = o.feature_var > 0.0 ? o.feature_var : gamp::fig3_feature_variance(truth.K, o.eps_bayes);
    draw = [&, fv](Index rows) { return gamp::gen_class_conditional(truth.w, rows, fv, !o.unbalanced, rng); };
    truth.model = gamp::GenerativeModel::kClassConditional;
    truth.v = fv;
  } else {
    std::tie(data, truth) = gamp::gen_class_conditional(n, m, o.eps_bayes, !o.unbalanced, rng);
    draw = [&](Index rows) { return gamp::gen_class_conditional(truth.w, rows, truth.v, !o.unbalanced, rng); };
  }
  if (o.generator != "dense") data = draw(m);
  Vector clean;
  if (o.gamma > 0.0) std::tie(data.y, clean) = gamp::flip_labels(data.y, o.gamma, rng);
  if (o.format == "csv") gamp::write_csv(o.out, data);
  else gamp::write_libsvm(o.out, data);
  if (!o.truth.empty()) save_truth(o.truth, truth, o.generator, o.gamma, clean);
  if (!o.test_out.empty()) {
    const Dataset test = draw(static_cast<Index>(o.test_m));
    if (o.format == "csv") gamp::write_csv(o.test_out, test);
    else gamp::write_libsvm(o.test_out, test);
  }
  std::printf("wrote %lld examples of %lld features to %s\n", static_cast<long long>(m), static_cast<long long>(n),
              o.out.c_str());
  return 0;
}

int cmd_reproduce(const ReproduceOptions& o) {
  if (o.figure == "fig2") {
    gamp::Fig2Config c;
    c.seed = o.seed;
    if (o.trials > 0) c.trials = o.trials;
    if (o.n > 0) c.n = static_cast<Index>(o.n);
    std::vector<gamp::SweepPoint> grid{{0.2, 0.02}, {0.4, 0.05}, {0.6, 0.10}};
    if (!o.points.empty()) grid = parse_points(o.points);
    const auto rows = gamp::run_fig2(grid, c);
    with_output(o.out, [&](std::ostream& os) { gamp::write_fig2_csv(os, rows); });
  } else if (o.figure == "fig3") {
    gamp::Fig3Config c;
    c.seed = o.seed;
    if (o.trials > 0) c.trials = o.trials;
    if (o.n > 0) c.n = static_cast<Index>(o.n);
    if (o.m > 0) c.m = static_cast<Index>(o.m);
    if (o.em_iters > 0) c.em_iters = o.em_iters;
    if (!o.ks.empty()) c.ks.assign(o.ks.begin(), o.ks.end());
    if (!o.methods.empty()) {
      c.methods.clear();
      for (const auto& name : o.methods) {
        if (name == "probit") c.methods.push_back(gamp::Fig3Method::kProbit);
        else if (name == "logistic") c.methods.push_back(gamp::Fig3Method::kLogistic);
        else if (name == "hinge") c.methods.push_back(gamp::Fig3Method::kHinge);
        else if (name == "onebitcs") c.methods.push_back(gamp::Fig3Method::kOneBitCS);
        else throw gamp::ConfigError("fig3: unknown method '" + name + "'");
      }
    }
    const auto rows = gamp::run_fig3(c);
    with_output(o.out, [&](std::ostream& os) { gamp::write_fig3_csv(os, rows); });
  } else if (o.figure == "fig4") {
    gamp::Fig4Config c;
    c.seed = o.seed;
    if (o.trials > 0) c.trials = o.trials;
    if (o.n > 0) c.n = static_cast<Index>(o.n);
    if (o.m > 0) c.m = static_cast<Index>(o.m);
    if (o.em_iters > 0) c.em_iters = o.em_iters;
    if (!o.gammas.empty()) c.gammas = o.gammas;
    if (!o.methods.empty()) {
      c.classifiers.clear();
      for (const auto& name : o.methods) {
        if (name == "genie-logistic") c.classifiers.push_back(gamp::Fig4Classifier::kGenieLogistic);
        else if (name == "genie-robust") c.classifiers.push_back(gamp::Fig4Classifier::kGenieRobust);
        else if (name == "em-logistic") c.classifiers.push_back(gamp::Fig4Classifier::kEmLogistic);
        else if (name == "em-robust") c.classifiers.push_back(gamp::Fig4Classifier::kEmRobust);
        else throw gamp::ConfigError("fig4: unknown classifier '" + name + "'");
      }
    }
    const auto rows = gamp::run_fig4(c);
    with_output(o.out, [&](std::ostream& os) { gamp::write_fig4_csv(os, rows); });
  } else {
    throw gamp::ConfigError("reproduce: unknown figure '" + o.figure + "'");
  }
  return 0;
}

}  // namespace gampc
