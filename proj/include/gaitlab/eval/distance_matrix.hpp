#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "gaitlab/error.hpp"

namespace gaitlab {

// Worker count: GAITLAB_THREADS when set to a positive integer, otherwise
// the hardware concurrency.
inline std::size_t worker_threads() {
  std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GAITLAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return hw;
}

struct DistanceMatrix {
  Eigen::MatrixXd values;  // symmetric, zero diagonal
  std::vector<std::string> labels;
  std::size_t computations = 0;
  double mean_ms = 0.0;  // average time of one distance computation

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
};

using PairDistance = std::function<double(std::size_t, std::size_t)>;

// Fills the upper triangle with dist(i, j), i < j, and mirrors it. Rows are
// dealt to workers round-robin; each cell is written by exactly one worker,
// so the result does not depend on scheduling.
inline DistanceMatrix distance_matrix(std::size_t n, const PairDistance& dist, std::vector<std::string> labels = {}) {
  if (n < 2) throw InvalidArgument("distance matrix needs at least 2 templates");
  if (!labels.empty() && labels.size() != n) throw ShapeError("label count does not match template count");
  DistanceMatrix out;
  out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  out.labels = std::move(labels);
  const std::size_t workers = std::min(worker_threads(), n - 1);
  std::vector<double> elapsed(workers, 0.0);
  std::mutex error_mutex;
  std::size_t error_pair = static_cast<std::size_t>(-1);
  std::string error_text;

  auto work = [&](std::size_t w) {
    using clock = std::chrono::steady_clock;
    for (std::size_t i = w; i + 1 < n; i += workers) {
      for (std::size_t j = i + 1; j < n; ++j) {
        try {
          auto t0 = clock::now();
          double d = dist(i, j);
          elapsed[w] += std::chrono::duration<double, std::milli>(clock::now() - t0).count();
          out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
          out.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
        } catch (const std::exception& e) {
          std::lock_guard lock(error_mutex);
          std::size_t key = i * n + j;
          if (key < error_pair) {
            error_pair = key;
            error_text = "distance(" + std::to_string(i) + ", " + std::to_string(j) + ") failed: " + e.what();
          }
          return;
        }
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  if (!error_text.empty()) throw Error(error_text);
  out.computations = n * (n - 1) / 2;
  double total = 0.0;
  for (double e : elapsed) total += e;
  out.mean_ms = total / static_cast<double>(out.computations);
  return out;
}

}  // namespace gaitlab
