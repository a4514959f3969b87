#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <string_view>
#include <thread>
#include <vector>

namespace formcount {

/// Execution knobs shared by every enumerating routine. Results never depend
/// on `workers`; partial results are merged in task order.
struct ExecPolicy {
    unsigned workers = 1;
    bool unsafe_guard = false;
};

/// Throws GuardExceeded when `cost > limit` unless the policy disables guards.
void check_guard(double cost, double limit, const ExecPolicy& policy, std::string_view what);

/// Runs `task(i)` for i in [0, n_tasks) on up to `workers` threads and returns
/// the per-task results in task order.
template <typename T>
std::vector<T> parallel_map(std::size_t n_tasks, unsigned workers,
                            const std::function<T(std::size_t)>& task) {
    std::vector<T> out(n_tasks);
    const std::size_t n_threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n_tasks, 1));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) out[i] = task(i);
        return out;
    }
    std::vector<std::exception_ptr> errors(n_threads);
    {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < n_tasks; i += n_threads) out[i] = task(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace formcount
