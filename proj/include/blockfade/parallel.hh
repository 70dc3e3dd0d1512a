/*
Fixed-batch worker pool. Work is always partitioned into the same batches
regardless of how many threads run them, per-batch results land in
index-addressed slots, and callers merge in batch order — so every result
is byte-identical for any worker count. BLOCKFADE_THREADS caps the pool.
*/

#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace blockfade {

inline unsigned worker_limit() {
	unsigned hw = std::thread::hardware_concurrency();
	if (hw == 0)
		hw = 1;
	if (const char *env = std::getenv("BLOCKFADE_THREADS")) {
		char *end = nullptr;
		long v = std::strtol(env, &end, 10);
		if (end == env || *end != '\0' || v < 1)
			throw std::invalid_argument("BLOCKFADE_THREADS must be a positive integer");
		return unsigned(v < 1024 ? v : 1024);
	}
	return hw;
}

// Run fn(i) for i in [0, count), spread over at most worker_limit() threads.
// fn must only touch its own slot; exceptions propagate to the caller.
template <class Fn>
void parallel_for(std::size_t count, Fn &&fn) {
	std::size_t workers = worker_limit();
	if (workers > count)
		workers = count;
	if (workers <= 1) {
		for (std::size_t i = 0; i < count; ++i)
			fn(i);
		return;
	}
	std::atomic<std::size_t> next{0};
	std::atomic<bool> failed{false};
	std::exception_ptr error;
	std::mutex error_mutex;
	auto body = [&]() {
		for (;;) {
			std::size_t i = next.fetch_add(1);
			if (i >= count || failed.load())
				return;
			try {
				fn(i);
			} catch (...) {
				std::lock_guard<std::mutex> lock(error_mutex);
				if (!failed.exchange(true))
					error = std::current_exception();
				return;
			}
		}
	};
	std::vector<std::thread> pool;
	pool.reserve(workers - 1);
	for (std::size_t w = 1; w < workers; ++w)
		pool.emplace_back(body);
	body();
	for (auto &t : pool)
		t.join();
	if (error)
		std::rethrow_exception(error);
}

// Partition `total` items into fixed-size batches (last one short). The
// partition depends only on (total, batch), never on the worker count.
struct BatchPlan {
	long long total = 0;
	long long batch = 1;

	std::size_t count() const {
		return total > 0 ? std::size_t((total + batch - 1) / batch) : 0;
	}
	long long begin(std::size_t i) const { return (long long)(i)*batch; }
	long long size(std::size_t i) const {
		long long b = begin(i);
		long long left = total - b;
		return left < batch ? left : batch;
	}
};

inline BatchPlan plan_batches(long long total, long long batch) {
	if (total < 0 || batch < 1)
		throw std::invalid_argument("bad batch plan");
	return BatchPlan{total, batch};
}

inline constexpr long long default_sample_batch = 20000; // MC samples per batch
inline constexpr long long default_trial_batch = 2500;   // genie trials per batch
inline constexpr long long default_frame_batch = 250;    // frames per batch

// Batch a frame-error run: kernel(frames, stream_index) -> some count type
// with operator+=. Streams are derived by the caller from stream_index.
template <class Count, class Kernel>
Count merge_batches(long long total, long long batch, Kernel &&kernel) {
	BatchPlan plan = plan_batches(total, batch);
	std::vector<Count> slots(plan.count());
	parallel_for(plan.count(), [&](std::size_t i) {
		slots[i] = kernel(plan.size(i), i);
	});
	Count merged{};
	for (const Count &c : slots)
		merged += c;
	return merged;
}

} // namespace blockfade
