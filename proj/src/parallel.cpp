#include "mlrec/parallel.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace mlrec {

void set_num_threads(int n) {
#if defined(_OPENMP)
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int thread_num() {
#if defined(_OPENMP)
  return omp_get_thread_num();
#else
  return 0;
#endif
}

bool in_parallel() {
#if defined(_OPENMP)
  return omp_in_parallel() != 0;
#else
  return false;
#endif
}

ThreadScope::ThreadScope(int n) : previous_(max_threads()) { set_num_threads(n); }

ThreadScope::~ThreadScope() { set_num_threads(previous_); }

}  // namespace mlrec
