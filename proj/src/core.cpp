#include "besvm/core.hpp"

#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

namespace besvm {

void fail_config(const std::string& msg) { throw Error(Error::Kind::config, msg); }
void fail_data(const std::string& msg) { throw Error(Error::Kind::data, msg); }
void fail_numeric(const std::string& msg) { throw Error(Error::Kind::numeric, msg); }

double Rng::uniform() {
  // 53 random bits -> double in [0,1)
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) fail_config("Rng::uniform_int: empty range");
  const std::uint64_t range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  // rejection sampling to avoid modulo bias
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return lo + static_cast<int>(r % range);
}

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0,1], keeps log finite
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

int worker_thread_count() {
  if (const char* env = std::getenv("BESVM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  int count = static_cast<int>(std::thread::hardware_concurrency());
  return count < 1 ? 1 : count;
}

void parallel_for(std::int64_t n,
                  const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (n <= 0) return;
  const int workers = worker_thread_count();
  if (workers == 1 || n == 1) {
    fn(0, n);
    return;
  }
  const std::int64_t chunks = std::min<std::int64_t>(workers, n);
  const std::int64_t base = n / chunks;
  const std::int64_t extra = n % chunks;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(chunks));
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::int64_t begin = 0;
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t len = base + (c < extra ? 1 : 0);
    const std::int64_t end = begin + len;
    pool.emplace_back([&, begin, end]() {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
    begin = end;
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace besvm
