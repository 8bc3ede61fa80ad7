#include "gamp/crossval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gamp/errors.hpp"
#include "gamp/parallel.hpp"
#include "gamp/synthetic.hpp"

namespace gamp {

void XvalSpec::validate() const {
  if (folds < 2) throw ConfigError("xval: at least two folds are required");
  if (grids.empty()) throw ConfigError("xval: no parameter grids");
  if (!names.empty() && names.size() != grids.size()) throw ConfigError("xval: names and grids differ in length");
  for (const auto& g : grids)
    if (g.empty()) throw ConfigError("xval: every grid needs at least one value");
}

std::size_t XvalSpec::grid_points() const {
  std::size_t n = 1;
  for (const auto& g : grids) n *= g.size();
  return n;
}

std::vector<double> XvalSpec::point(std::size_t index) const {
  std::vector<double> p(grids.size());
  for (std::size_t d = grids.size(); d-- > 0;) {
    p[d] = grids[d][index % grids[d].size()];
    index /= grids[d].size();
  }
  return p;
}

std::vector<std::vector<Index>> make_folds(Index m, int folds, std::uint64_t seed) {
  if (folds < 2 || m < folds) throw DomainError("make_folds: need 2 <= folds <= M");
  std::vector<Index> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(folds));
  for (std::size_t i = 0; i < perm.size(); ++i) out[i % out.size()].push_back(perm[i]);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

XvalResult cross_validate(const Dataset& data, const XvalSpec& spec, const TrainFn& train, std::uint64_t seed) {
  spec.validate();
  const Index m = data.num_examples();
  const auto folds = make_folds(m, spec.folds, seed);
  const std::size_t g = spec.grid_points();
  const std::size_t k = folds.size();

  std::vector<Dataset> train_sets, test_sets;
  for (const auto& held : folds) {
    std::vector<Index> keep;
    keep.reserve(static_cast<std::size_t>(m) - held.size());
    std::size_t h = 0;
    for (Index i = 0; i < m; ++i) {
      if (h < held.size() && held[h] == i) ++h;
      else keep.push_back(i);
    }
    train_sets.push_back(data.subset(keep));
    test_sets.push_back(data.subset(held));
  }

  struct Cell {
    double error = 1.0;
    double density = 0.0;
    Support support;
    bool failed = false;
    std::string note;
  };
  std::vector<Cell> cells(g * k);
  parallel_for(cells.size(), [&](std::size_t t) {
    const std::size_t gi = t / k;
    const std::size_t fi = t % k;
    Cell& c = cells[t];
    try {
      const FittedModel fit = train(train_sets[fi], spec.point(gi));
      c.error = error_rate(test_sets[fi].y, fit.predict(test_sets[fi].X));
      c.support = fit.support;
      c.density = static_cast<double>(fit.support.size()) / static_cast<double>(data.num_features());
    } catch (const NumericError& e) {
      c.failed = true;
      c.note = e.what();
    }
  });

  XvalResult res;
  res.classifiers_trained = g * k;
  res.scores.resize(g);
  for (std::size_t gi = 0; gi < g; ++gi) {
    GridScore& s = res.scores[gi];
    s.params = spec.point(gi);
    std::vector<Support> supports;
    for (std::size_t fi = 0; fi < k; ++fi) {
      const Cell& c = cells[gi * k + fi];
      if (c.failed) {
        s.diverged = true;
        res.notes.push_back("grid point " + std::to_string(gi) + " fold " + std::to_string(fi) + ": " + c.note);
      }
      s.density += c.density / static_cast<double>(k);
      s.error += c.error / static_cast<double>(k);
      supports.push_back(c.support);
    }
    if (s.diverged) s.error = 1.0;
    s.jaccard = jaccard_consistency(supports);
  }
  for (std::size_t gi = 1; gi < g; ++gi) {
    const GridScore& a = res.scores[gi];
    const GridScore& b = res.scores[res.best_index];
    if (a.error < b.error || (a.error == b.error && a.density < b.density)) res.best_index = gi;
  }
  res.best_params = res.scores[res.best_index].params;
  return res;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi >= lo) || count < 1) throw DomainError("log_grid: need 0 < lo <= hi and count >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace gamp
