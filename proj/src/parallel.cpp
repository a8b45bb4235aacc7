#include "flexsec/parallel.hpp"

#include <omp.h>

namespace flexsec {

void set_num_threads(int n) { omp_set_num_threads(n < 1 ? 1 : n); }

int max_threads() { return omp_get_max_threads(); }

ThreadLimit::ThreadLimit(int n) : previous_(omp_get_max_threads()) { set_num_threads(n); }

ThreadLimit::~ThreadLimit() { omp_set_num_threads(previous_); }

}  // namespace flexsec
