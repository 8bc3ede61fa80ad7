#include "model_file.hpp"

#include <fstream>

#include "gamp/errors.hpp"

namespace gampc {

using nlohmann::json;

namespace {

const char* activation_name(gamp::Activation a) {
  switch (a) {
    case gamp::Activation::kLogistic:
      return "logistic";
    case gamp::Activation::kProbit:
      return "probit";
    case gamp::Activation::kHinge:
      return "hinge";
  }
  return "?";
}

const char* prior_name(gamp::PriorKind k) {
  switch (k) {
    case gamp::PriorKind::kGaussian:
      return "gaussian";
    case gamp::PriorKind::kLaplacian:
      return "laplacian";
    case gamp::PriorKind::kElasticNet:
      return "elastic-net";
    case gamp::PriorKind::kGaussianMixture:
      return "mixture";
  }
  return "?";
}

}  // namespace

json vector_json(const gamp::Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

gamp::Vector json_vector(const json& j) {
  const auto vals = j.get<std::vector<double>>();
  return Eigen::Map<const gamp::Vector>(vals.data(), static_cast<gamp::Index>(vals.size()));
}

json to_json(const gamp::OutputChannel& out) {
  return {{"activation", activation_name(out.activation())},
          {"alpha", out.alpha()},
          {"v", out.v()},
          {"robust", out.robust()},
          {"gamma", out.gamma()}};
}

json to_json(const gamp::InputChannel& in) {
  json mix = json::array();
  for (const auto& c : in.mixture()) mix.push_back({{"omega", c.omega}, {"mu", c.mu}, {"sigma2", c.sigma2}});
  return {{"kind", prior_name(in.kind())}, {"spike", in.spike()},     {"pi", in.pi()},
          {"mu", in.mu()},                 {"sigma2", in.sigma2()},   {"lambda1", in.lambda1()},
          {"lambda2", in.lambda2()},       {"mixture", std::move(mix)}};
}

gamp::OutputChannel output_from_json(const json& j) {
  const std::string a = j.at("activation").get<std::string>();
  gamp::OutputChannel out = gamp::OutputChannel::probit(j.at("v").get<double>());
  if (a == "logistic") out = gamp::OutputChannel::logistic(j.at("alpha").get<double>());
  else if (a == "hinge") out = gamp::OutputChannel::hinge();
  else if (a != "probit") throw gamp::ConfigError("model: unknown activation '" + a + "'");
  if (j.at("robust").get<bool>()) out = out.robustified(j.at("gamma").get<double>());
  return out;
}

gamp::InputChannel prior_from_json(const json& j) {
  const std::string k = j.at("kind").get<std::string>();
  gamp::InputChannel in = gamp::InputChannel::gaussian(j.at("mu").get<double>(), j.at("sigma2").get<double>());
  if (k == "laplacian") {
    in = gamp::InputChannel::laplacian(j.at("lambda1").get<double>());
  } else if (k == "elastic-net") {
    in = gamp::InputChannel::elastic_net(j.at("lambda1").get<double>(), j.at("lambda2").get<double>());
  } else if (k == "mixture") {
    std::vector<gamp::MixtureComponent> mix;
    for (const auto& c : j.at("mixture"))
      mix.push_back({c.at("omega").get<double>(), c.at("mu").get<double>(), c.at("sigma2").get<double>()});
    in = gamp::InputChannel::gaussian_mixture(std::move(mix));
  } else if (k != "gaussian") {
    throw gamp::ConfigError("model: unknown prior '" + k + "'");
  }
  if (j.at("spike").get<bool>()) in = gamp::InputChannel::spike_slab(j.at("pi").get<double>(), in);
  return in;
}

void save_model(const std::filesystem::path& path, const SavedModel& m) {
  json j = {{"format", "gampc-model"},
            {"version", 1},
            {"num_features", m.w_hat.size()},
            {"mode", m.mode == gamp::Mode::kMaxSum ? "max-sum" : "sum-product"},
            {"output", to_json(m.output)},
            {"prior", to_json(m.prior)},
            {"converged", m.converged},
            {"iterations", m.iterations},
            {"w_hat", vector_json(m.w_hat)},
            {"tau_w", vector_json(m.tau_w)},
            {"nonzero_prob", vector_json(m.nonzero_prob)}};
  std::ofstream os(path);
  if (!os) throw gamp::ConfigError("cannot write " + path.string());
  os << j.dump(1) << '\n';
}

SavedModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw gamp::ConfigError("cannot open model " + path.string());
  try {
    const json j = json::parse(is);
    if (j.at("format") != "gampc-model") throw gamp::ConfigError("model: not a gampc model file");
    SavedModel m;
    m.output = output_from_json(j.at("output"));
    m.prior = prior_from_json(j.at("prior"));
    m.mode = j.at("mode") == "max-sum" ? gamp::Mode::kMaxSum : gamp::Mode::kSumProduct;
    m.converged = j.at("converged").get<bool>();
    m.iterations = j.at("iterations").get<int>();
    m.w_hat = json_vector(j.at("w_hat"));
    m.tau_w = json_vector(j.at("tau_w"));
    m.nonzero_prob = json_vector(j.at("nonzero_prob"));
    const auto n = j.at("num_features").get<gamp::Index>();
    if (m.w_hat.size() != n || m.tau_w.size() != n || m.nonzero_prob.size() != n)
      throw gamp::ConfigError("model: vector lengths disagree with num_features");
    return m;
  } catch (const json::exception& e) {
    throw gamp::ConfigError("model " + path.string() + ": " + e.what());
  }
}

void save_truth(const std::filesystem::path& path, const gamp::SyntheticTruth& truth, const std::string& generator,
                double flip_gamma, const gamp::Vector& clean_mask) {
  json support = json::array();
  for (gamp::Index n = 0; n < truth.w.size(); ++n)
    if (truth.w(n) != 0.0) support.push_back(n);
  json j = {{"generator", generator},
            {"num_features", truth.w.size()},
            {"K", truth.K},
            {"v", truth.v},
            {"mu", truth.mu},
            {"flip_gamma", flip_gamma},
            {"support", std::move(support)},
            {"w", vector_json(truth.w)}};
  // 1 for a clean label, 0 for a flipped one.
  if (clean_mask.size() > 0) j["clean"] = vector_json(clean_mask);
  std::ofstream os(path);
  if (!os) throw gamp::ConfigError("cannot write " + path.string());
  os << j.dump(1) << '\n';
}

}  // namespace gampc
