#pragma once

#include <exception>

namespace flexsec {

// Selects between the serial reference loop and the OpenMP loop of a
// data-parallel kernel. Both produce bit-identical results: the parallel
// variants only distribute independent work items and reduce in index order.
enum class Exec { serial, parallel };

// Wraps omp_set_num_threads / omp_get_max_threads so headers stay OpenMP-free.
void set_num_threads(int n);
int max_threads();

// Restores the previous OpenMP thread count on scope exit.
class ThreadLimit {
public:
    explicit ThreadLimit(int n);
    ~ThreadLimit();
    ThreadLimit(const ThreadLimit&) = delete;
    ThreadLimit& operator=(const ThreadLimit&) = delete;

private:
    int previous_;
};

// Runs f(i) for i in [0, count). The parallel branch rethrows the first
// exception raised by any item after the loop finishes.
template <typename F>
void parallel_for(int count, Exec exec, F&& f) {
    if (exec == Exec::serial) {
        for (int i = 0; i < count; ++i) f(i);
        return;
    }
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
        try {
            f(i);
        } catch (...) {
#pragma omp critical(flexsec_parallel_for)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace flexsec
