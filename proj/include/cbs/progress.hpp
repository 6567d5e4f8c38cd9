#pragma once
// Rate-limited progress reporting to stderr for the long O(n^2) sweeps and
// Monte Carlo batches. Callbacks are invoked from worker threads; emission
// is serialized and throttled to at most one line per second.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>

namespace cbs {

/// progress(done, total); total may be 0 when unknown.
using ProgressFn = std::function<void(std::int64_t, std::int64_t)>;

class ProgressMeter {
public:
    explicit ProgressMeter(std::string label, bool enabled = true)
        : label_(std::move(label)),
          enabled_(enabled),
          start_(std::chrono::steady_clock::now()) {}

    void update(std::int64_t done, std::int64_t total) {
        if (!enabled_) return;
        const auto now = std::chrono::steady_clock::now();
        const auto ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(now - start_).count();
        std::int64_t last = last_emit_ms_.load(std::memory_order_relaxed);
        const bool final = total > 0 && done >= total;
        if (!final && ms - last < 1000) return;
        if (!last_emit_ms_.compare_exchange_strong(last, ms, std::memory_order_relaxed))
            return;  // another thread just emitted
        if (total > 0)
            std::fprintf(stderr, "# %s %3d%% (%lld/%lld, %.1fs)\n", label_.c_str(),
                         static_cast<int>(100 * done / total), static_cast<long long>(done),
                         static_cast<long long>(total), static_cast<double>(ms) / 1000.0);
        else
            std::fprintf(stderr, "# %s %lld (%.1fs)\n", label_.c_str(),
                         static_cast<long long>(done), static_cast<double>(ms) / 1000.0);
    }

    /// Bindable callback for the library hooks.
    ProgressFn fn() {
        return [this](std::int64_t done, std::int64_t total) { update(done, total); };
    }

private:
    std::string label_;
    bool enabled_;
    std::chrono::steady_clock::time_point start_;
    std::atomic<std::int64_t> last_emit_ms_{-1000000};
};

}  // namespace cbs
