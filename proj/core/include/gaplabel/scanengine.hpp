#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gaplabel/model.hpp"

namespace gaplabel {

template <class R>
struct ScanResult {
  /// One slot per job, in job order. Empty for failed jobs.
  std::vector<std::optional<R>> results;
  /// (job index, message) for every job that threw.
  std::vector<std::pair<std::size_t, std::string>> failures;
  double wall_seconds = 0.0;

  bool ok() const { return failures.empty(); }
};

/// Run independent jobs on a pool of workers and merge the results by job
/// index. The merged output does not depend on the number of workers.
template <class R, class Job>
ScanResult<R> scan_indexed(std::size_t count, Job&& job, int workers = 1) {
  const auto start = std::chrono::steady_clock::now();
  ScanResult<R> out;
  out.results.resize(count);
  std::vector<std::optional<std::string>> errors(count);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        out.results[i].emplace(job(i));
      } catch (const std::exception& e) {
        errors[i] = e.what();
      } catch (...) {
        errors[i] = "unknown exception";
      }
    }
  };

  const auto pool_size = static_cast<std::size_t>(std::max(1, workers));
  if (pool_size == 1 || count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(std::min(pool_size, count));
    for (std::size_t w = 0; w < std::min(pool_size, count); ++w) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < count; ++i)
    if (errors[i]) out.failures.emplace_back(i, *errors[i]);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

template <class R>
ScanResult<R> scan(std::span<const std::function<R()>> jobs, int workers = 1) {
  return scan_indexed<R>(jobs.size(), [&](std::size_t i) { return jobs[i](); }, workers);
}

/// Values f(T^n theta0), n = 0..length, evaluated once and then shared read-only.
class OrbitCache {
 public:
  OrbitCache(const OperatorModel& model, BasePoint theta0, int length);

  int length() const { return static_cast<int>(blocks_.size()) - 1; }
  const BasePoint& start() const { return start_; }
  const ComplexMatrix& operator[](int n) const { return blocks_[static_cast<std::size_t>(n)]; }
  /// Blocks for n = first .. first + count - 1.
  std::span<const ComplexMatrix> range(int first, int count) const;
  /// Site blocks of H^N_theta0 (n = 1..N).
  std::span<const ComplexMatrix> sites(int n) const { return range(1, n); }
  const BasePoint& point(int n) const { return points_[static_cast<std::size_t>(n)]; }

  /// Re-evaluate roughly `fraction` of the entries and return the largest deviation.
  double verify(const OperatorModel& model, double fraction = 0.01) const;

 private:
  BasePoint start_;
  std::vector<BasePoint> points_;
  std::vector<ComplexMatrix> blocks_;
};

/// Counter-based generator: the stream for (seed, key) is a pure function of
/// its inputs, so parallel jobs draw identical numbers under any schedule.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t key) : seed_(seed), key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return at(counter_++); }
  result_type at(std::uint64_t counter) const;
  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace gaplabel
