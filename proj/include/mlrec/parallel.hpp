#pragma once

namespace mlrec {

// Thin wrappers over the OpenMP runtime so callers never include <omp.h>.
// With OpenMP disabled every function reports a single thread.
void set_num_threads(int n);
int max_threads();
int thread_num();
bool in_parallel();

// Restores the previous thread count on scope exit. n <= 0 keeps the default.
class ThreadScope {
 public:
  explicit ThreadScope(int n);
  ~ThreadScope();
  ThreadScope(const ThreadScope&) = delete;
  ThreadScope& operator=(const ThreadScope&) = delete;

 private:
  int previous_;
};

}  // namespace mlrec
