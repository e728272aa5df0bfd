#include "scbench/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>

namespace scbench {

namespace {

std::atomic<int> override_threads{0};

int env_threads() {
    const char* raw = std::getenv("SCBENCH_THREADS");
    if (raw != nullptr) {
        try {
            int n = std::stoi(raw);
            if (n > 0) {
                return n;
            }
        } catch (const std::exception&) {
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}

int thread_count() {
    int n = override_threads.load();
    return n > 0 ? n : env_threads();
}

void set_thread_count(int n) {
    override_threads.store(std::max(n, 0));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) {
        return;
    }
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
    if (workers <= 1) {
        fn(0, n);
        return;
    }

    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    std::size_t chunk = n / workers, extra = n % workers;

    auto run = [&](std::size_t w, std::size_t begin, std::size_t end) {
        try {
            fn(begin, end);
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };

    std::size_t begin = 0;
    std::size_t first_end = chunk + (extra > 0 ? 1 : 0);
    begin = first_end;
    for (std::size_t w = 1; w < workers; ++w) {
        std::size_t len = chunk + (w < extra ? 1 : 0);
        pool.emplace_back(run, w, begin, begin + len);
        begin += len;
    }
    run(0, 0, first_end);
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}
