#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "gamp/engine.hpp"
#include "gamp/input_channel.hpp"
#include "gamp/output_channel.hpp"
#include "gamp/synthetic.hpp"

namespace gampc {

// A trained classifier as stored on disk.
struct SavedModel {
  gamp::OutputChannel output = gamp::OutputChannel::probit(1.0);
  gamp::InputChannel prior = gamp::InputChannel::gaussian(0.0, 1.0);
  gamp::Mode mode = gamp::Mode::kSumProduct;
  bool converged = false;
  int iterations = 0;
  gamp::Vector w_hat, tau_w, nonzero_prob;
};

nlohmann::json to_json(const gamp::OutputChannel& out);
nlohmann::json to_json(const gamp::InputChannel& in);
gamp::OutputChannel output_from_json(const nlohmann::json& j);
gamp::InputChannel prior_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const SavedModel& m);
// Throws gamp::ConfigError on a malformed file.
SavedModel load_model(const std::filesystem::path& path);

void save_truth(const std::filesystem::path& path, const gamp::SyntheticTruth& truth, const std::string& generator,
                double flip_gamma, const gamp::Vector& clean_mask);

nlohmann::json vector_json(const gamp::Vector& v);
gamp::Vector json_vector(const nlohmann::json& j);

}  // namespace gampc
