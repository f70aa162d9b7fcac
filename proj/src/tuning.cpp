#include "pidae/tuning.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>

namespace pidae {

void SearchSpace::validate() const {
  using B = HyperparameterBounds;
  auto inside = [](std::size_t lo, std::size_t hi, std::size_t min, std::size_t max) {
    return lo <= hi && lo >= min && hi <= max;
  };
  if (!inside(min_filters, max_filters, B::kMinFilters, B::kMaxFilters) ||
      !inside(min_kernel, max_kernel, B::kMinKernel, B::kMaxKernel) ||
      !inside(min_batch, max_batch, B::kMinBatch, B::kMaxBatch) ||
      !(min_learning_rate <= max_learning_rate && min_learning_rate >= B::kMinLearningRate &&
        max_learning_rate <= B::kMaxLearningRate)) {
    throw ArgumentError("search space exceeds the hyperparameter bounds");
  }
}

ModelSpec sample_spec(ModelKind kind, const SearchSpace& space, Rng& rng) {
  std::uniform_int_distribution<std::size_t> filters(space.min_filters, space.max_filters);
  std::uniform_int_distribution<std::size_t> kernel(space.min_kernel, space.max_kernel);
  std::uniform_int_distribution<std::size_t> batch(space.min_batch, space.max_batch);
  std::uniform_real_distribution<double> log_lr(std::log(space.min_learning_rate),
                                                std::log(space.max_learning_rate));
  ModelSpec s = ModelSpec::for_kind(kind);
  s.filters_external = filters(rng);
  s.filters_internal = filters(rng);
  s.kernel = kernel(rng);
  s.learning_rate = std::clamp(std::exp(log_lr(rng)), space.min_learning_rate, space.max_learning_rate);
  s.batch_size = batch(rng);
  return s;
}

SearchResult random_search(ModelKind kind, const SearchSpace& space, int budget,
                           const Objective& objective, std::uint64_t seed, int workers) {
  if (budget < 1) throw ArgumentError("random_search: budget must be >= 1");
  space.validate();

  Rng rng(seed);
  SearchResult result;
  result.trials.resize(static_cast<std::size_t>(budget));
  for (int i = 0; i < budget; ++i) {
    result.trials[i].index = i;
    result.trials[i].spec = sample_spec(kind, space, rng);
  }

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int i = next++; i < budget; i = next++) {
      try {
        result.trials[i].objective = objective(result.trials[i].spec, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, std::min(workers, budget));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.trials.size(); ++i) {
    if (result.trials[i].objective < result.trials[best].objective) best = i;
  }
  result.best = result.trials[best].spec;
  result.best_objective = result.trials[best].objective;
  return result;
}

void write_trial_log(std::ostream& out, const SearchResult& result) {
  out << "trial,kind,filters_external,filters_internal,kernel,learning_rate,batch_size,objective\n";
  out << std::setprecision(10);
  for (const auto& t : result.trials) {
    out << t.index << ',' << to_string(t.spec.kind) << ',' << t.spec.filters_external << ','
        << t.spec.filters_internal << ',' << t.spec.kernel << ',' << t.spec.learning_rate << ','
        << t.spec.batch_size << ',' << t.objective << '\n';
  }
}

}  // namespace pidae
