// gampc: train, apply and study GAMP linear classifiers from the shell.
// Exit codes: 0 success, 1 usage or input error, 2 numeric failure.

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "gamp/errors.hpp"

namespace {

void add_data_options(CLI::App& app, gampc::DataOptions& d) {
  app.add_option("--data", d.path, "training or input data (libsvm or csv)")->required();
  app.add_option("--format", d.format, "auto, libsvm or csv")
      ->check(CLI::IsMember({"auto", "libsvm", "csv"}))
      ->capture_default_str();
  app.add_option("--features", d.features, "feature count for libsvm input (default: largest index)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GAMP linear classification and feature selection"};
  app.set_config("--config", "", "INI or TOML file with option values (sections name subcommands)");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand help for every subcommand");

  gampc::TrainOptions train;
  auto* c_train = app.add_subcommand("train", "fit a classifier, optionally EM-tuning its hyperparameters");
  gampc::add_model_options(*c_train, train.model);
  add_data_options(*c_train, train.data);
  c_train->add_option("--test", train.test, "held-out data to score");
  c_train->add_option("--model", train.model_out, "write the trained model (JSON)");
  c_train->add_option("--report", train.report, "write a JSON run report");
  c_train->add_option("--trace", train.trace, "write the per-iteration trace (CSV)");
  c_train->add_option("--theta-trace", train.theta_trace, "write the EM parameter trace (CSV)");
  c_train->add_option("--predictions", train.predictions, "write predictions for --test (CSV)");

  gampc::PredictOptions predict;
  auto* c_predict = app.add_subcommand("predict", "label data with a saved model");
  c_predict->add_option("--model", predict.model, "model file written by train")->required();
  add_data_options(*c_predict, predict.data);
  c_predict->add_option("--out", predict.out, "prediction CSV (default: stdout)");

  gampc::XvalOptions xval;
  auto* c_xval = app.add_subcommand("xval", "tune hyperparameters by K-fold cross-validation");
  gampc::add_model_options(*c_xval, xval.model);
  add_data_options(*c_xval, xval.data);
  c_xval->add_option("--grid", xval.grids, "name=lo:hi:count (log-spaced) or name=a,b,c; repeatable")->required();
  c_xval->add_option("--folds", xval.folds, "number of folds")->capture_default_str();
  c_xval->add_option("--seed", xval.seed, "fold assignment seed")->capture_default_str();
  c_xval->add_option("--report", xval.report, "write a JSON report");
  c_xval->add_option("--model", xval.model_out, "write the model refit at the best grid point");

  gampc::SweepOptions sweep;
  auto* c_sweep = app.add_subcommand("sweep", "state-evolution predictions over an (M/N, K/N) grid");
  c_sweep->add_option("--m-over-n", sweep.m_over_n, "M/N values")->delimiter(',')->capture_default_str();
  c_sweep->add_option("--k-over-n", sweep.k_over_n, "K/N values")->delimiter(',')->capture_default_str();
  c_sweep->add_option("--v", sweep.v, "probit noise variance")->capture_default_str();
  c_sweep->add_option("--slab-var", sweep.slab_var, "slab variance of the Bernoulli-Gaussian prior")
      ->capture_default_str();
  c_sweep->add_option("--mc-samples", sweep.mc_samples, "Monte-Carlo samples per expectation")
      ->capture_default_str();
  c_sweep->add_option("--se-iters", sweep.se_iters, "state-evolution iteration cap")->capture_default_str();
  c_sweep->add_option("--trials", sweep.trials, "empirical GAMP trials per point (0: prediction only)")
      ->capture_default_str();
  c_sweep->add_option("--n", sweep.n, "feature count of the empirical trials")->capture_default_str();
  c_sweep->add_option("--seed", sweep.seed, "random seed")->capture_default_str();
  c_sweep->add_option("--out", sweep.out, "CSV output (default: stdout)");

  gampc::SynthOptions synth;
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic dataset and its ground truth");
  c_synth->add_option("--generator", synth.generator, "probit, class-conditional or dense")
      ->check(CLI::IsMember({"probit", "class-conditional", "dense"}))
      ->capture_default_str();
  c_synth->add_option("--n", synth.n, "features")->capture_default_str();
  c_synth->add_option("--m", synth.m, "examples")->capture_default_str();
  c_synth->add_option("--k", synth.k, "nonzero weights")->capture_default_str();
  c_synth->add_option("--amplitude", synth.amplitude, "pm1 or gaussian")
      ->check(CLI::IsMember({"pm1", "gaussian"}))
      ->capture_default_str();
  c_synth->add_option("--feature-var", synth.feature_var,
                      "feature variance (probit default 1/M; class-conditional default from --eps-bayes)");
  c_synth->add_option("--v", synth.v, "probit noise variance")->capture_default_str();
  c_synth->add_option("--eps-bayes", synth.eps_bayes, "Bayes error of class-conditional data")
      ->capture_default_str();
  c_synth->add_option("--gamma", synth.gamma, "label flip probability")->capture_default_str();
  c_synth->add_flag("--unbalanced", synth.unbalanced, "draw class-conditional labels i.i.d. instead of balanced");
  c_synth->add_option("--format", synth.format, "libsvm or csv")
      ->check(CLI::IsMember({"libsvm", "csv"}))
      ->capture_default_str();
  c_synth->add_option("--out", synth.out, "data file")->required();
  c_synth->add_option("--truth", synth.truth, "ground-truth JSON sidecar");
  c_synth->add_option("--test-out", synth.test_out, "also write clean held-out examples from the same truth");
  c_synth->add_option("--test-m", synth.test_m, "held-out examples")->capture_default_str();
  c_synth->add_option("--seed", synth.seed, "random seed")->capture_default_str();

  gampc::ReproduceOptions repro;
  auto* c_repro = app.add_subcommand("reproduce", "rerun a study: fig2 (SE vs GAMP), fig3 (sparse), fig4 (robust)");
  c_repro->add_option("figure", repro.figure, "fig2, fig3 or fig4")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
  c_repro->add_option("--seed", repro.seed, "random seed")->capture_default_str();
  c_repro->add_option("--trials", repro.trials, "Monte-Carlo trials (default: study default)");
  c_repro->add_option("--out", repro.out, "CSV output (default: stdout)");
  c_repro->add_option("--n", repro.n, "feature count");
  c_repro->add_option("--m", repro.m, "training examples (fig3, fig4)");
  c_repro->add_option("--ks", repro.ks, "sparsities (fig3)")->delimiter(',');
  c_repro->add_option("--methods", repro.methods,
                      "fig3: probit,logistic,hinge,onebitcs; fig4: genie-logistic,genie-robust,em-logistic,em-robust")
      ->delimiter(',');
  c_repro->add_option("--gammas", repro.gammas, "mislabeling probabilities (fig4)")->delimiter(',');
  c_repro->add_option("--points", repro.points, "M/N:K/N grid points (fig2)")->delimiter(',');
  c_repro->add_option("--em-iters", repro.em_iters, "EM iterations (fig3, fig4)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*c_train) return gampc::cmd_train(train);
    if (*c_predict) return gampc::cmd_predict(predict);
    if (*c_xval) return gampc::cmd_xval(xval);
    if (*c_sweep) return gampc::cmd_sweep(sweep);
    if (*c_synth) return gampc::cmd_synth(synth);
    if (*c_repro) return gampc::cmd_reproduce(repro);
  } catch (const gamp::NumericError& e) {
    std::cerr << "gampc: numeric failure: " << e.what() << '\n';
    return 2;
  } catch (const gamp::Error& e) {
    std::cerr << "gampc: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "gampc: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
