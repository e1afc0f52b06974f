#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace besvm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Failure category. The CLI maps these onto exit codes:
// config -> 1, data -> 2, numeric -> 3.
class Error : public std::runtime_error {
public:
  enum class Kind { config, data, numeric };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

[[noreturn]] void fail_config(const std::string& msg);
[[noreturn]] void fail_data(const std::string& msg);
[[noreturn]] void fail_numeric(const std::string& msg);

// mt19937_64 plus hand-rolled output transforms. The standard distributions
// are implementation-defined, so streams would differ across toolchains;
// every seeded result in this project goes through this class instead.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();                      // [0,1)
  double uniform(double lo, double hi);  // [lo,hi)
  int uniform_int(int lo, int hi);       // inclusive bounds, unbiased
  double gaussian();                     // standard normal (Box-Muller)

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Worker count for data-parallel loops: hardware concurrency, capped by the
// BESVM_THREADS environment variable when set.
int worker_thread_count();

// Runs fn over [0,n) split into contiguous per-worker chunks. Chunks are
// disjoint, so workers may write into preallocated output without locking.
void parallel_for(std::int64_t n,
                  const std::function<void(std::int64_t begin, std::int64_t end)>& fn);

}  // namespace besvm
