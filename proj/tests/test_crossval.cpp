#include <doctest.h>

#include <atomic>
#include <set>
#include <stdexcept>

#include "gamp/crossval.hpp"
#include "gamp/errors.hpp"
#include "gamp/parallel.hpp"
#include "gamp/synthetic.hpp"

using namespace gamp;

namespace {

Dataset toy(Index m, Rng& rng) {
  const SyntheticTruth t = gen_sparse_weights(10, 2, Amplitude::kPlusMinusOne, rng);
  return gen_probit_data(t, m, 1.0, 0.1, rng);
}

// A stub classifier whose error and support are dictated by the grid point.
FittedModel constant_model(double label, Index support_size) {
  FittedModel f;
  for (Index i = 0; i < support_size; ++i) f.support.push_back(i);
  f.predict = [label](const FeatureMatrix& x) { return Vector::Constant(x.rows(), label); };
  return f;
}

}  // namespace

TEST_CASE("grid arithmetic") {
  XvalSpec spec;
  spec.folds = 2;
  spec.names = {"a", "b"};
  spec.grids = {log_grid(0.01, 100, 10), log_grid(1, 10, 10)};
  CHECK(spec.grid_points() == 100);
  CHECK(spec.point(0) == std::vector<double>{0.01, 1.0});
  CHECK(spec.point(11)[0] == doctest::Approx(spec.grids[0][1]));
  CHECK(spec.point(11)[1] == doctest::Approx(spec.grids[1][1]));

  Rng rng(1);
  const Dataset d = toy(40, rng);
  std::atomic<int> calls{0};
  const XvalResult r = cross_validate(d, spec, [&](const Dataset&, const std::vector<double>&) {
    ++calls;
    return constant_model(1.0, 1);
  }, 3);
  CHECK(r.classifiers_trained == 200);
  CHECK(calls == 200);

  const auto g = log_grid(1e-3, 1e3, 7);
  CHECK(g.front() == doctest::Approx(1e-3));
  CHECK(g[3] == doctest::Approx(1.0));
  CHECK(g.back() == 1e3);
  spec.grids.push_back({});
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("folds partition the examples") {
  const auto folds = make_folds(11, 3, 42);
  std::set<Index> seen;
  std::size_t total = 0;
  for (const auto& f : folds) {
    CHECK(f.size() >= 3);
    CHECK(f.size() <= 4);
    total += f.size();
    seen.insert(f.begin(), f.end());
  }
  CHECK(total == 11);
  CHECK(seen.size() == 11);
  CHECK(make_folds(11, 3, 42) == folds);
  CHECK(make_folds(11, 3, 43) != folds);
  CHECK_THROWS_AS(make_folds(1, 2, 0), DomainError);
}

TEST_CASE("selection and tie-breaks") {
  Rng rng(2);
  Dataset d = toy(30, rng);
  d.y.setOnes();
  XvalSpec spec;
  spec.grids = {{0.0, 1.0, 2.0, 3.0}};
  // point 0 always wrong; points 1..3 perfect, with supports of size 5, 2, 2
  const XvalResult r = cross_validate(d, spec, [](const Dataset&, const std::vector<double>& p) {
    if (p[0] == 0.0) return constant_model(-1.0, 1);
    return constant_model(1.0, p[0] == 1.0 ? 5 : 2);
  }, 0);
  CHECK(r.scores[0].error == 1.0);
  CHECK(r.best_index == 2);
  CHECK(r.best_params == std::vector<double>{2.0});
  CHECK(r.scores[2].jaccard == 1.0);

  // a grid of size one is a plain train/test on each fold
  XvalSpec single;
  single.grids = {{7.0}};
  const XvalResult s = cross_validate(d, single, [](const Dataset&, const std::vector<double>&) { return constant_model(1.0, 1); }, 0);
  CHECK(s.best_index == 0);
  CHECK(s.classifiers_trained == 2);
}

TEST_CASE("diverging grid points score as errors") {
  Rng rng(3);
  Dataset d = toy(20, rng);
  d.y.setOnes();
  XvalSpec spec;
  spec.grids = {{0.0, 1.0}};
  const XvalResult r = cross_validate(d, spec, [](const Dataset&, const std::vector<double>& p) {
    if (p[0] == 0.0) throw DivergenceError("boom", {});
    return constant_model(-1.0, 1);
  }, 0);
  CHECK(r.scores[0].diverged);
  CHECK(r.scores[0].error == 1.0);
  CHECK_FALSE(r.notes.empty());
  // both score 1.0; the tie goes to the sparser, then the lower index
  CHECK(r.best_index == 0);
}

TEST_CASE("parallel helpers") {
  std::vector<int> out(100, 0);
  parallel_for(out.size(), [&](std::size_t i) { out[i] = static_cast<int>(i) * 2; }, 4);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(2 * i));
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }, 3), std::runtime_error);
  CHECK(task_seed(1, {2, 3}) == task_seed(1, {2, 3}));
  CHECK(task_seed(1, {2, 3}) != task_seed(1, {3, 2}));
  CHECK(worker_count() >= 1);
}
