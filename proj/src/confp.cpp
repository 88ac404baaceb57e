#include "tracepred/confp.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

namespace tracepred {

namespace {

class Closure {
public:
	Closure(const Execution &exec, std::span<const EventIndex> forbidden)
		: exec_(exec), in_(exec.size() + 1, false), forbidden_(exec.size() + 1, false)
	{
		for (auto f : forbidden) {
			if (f == 0 || f > exec.size())
				throw std::out_of_range("event index " + std::to_string(f) + " out of range");
			forbidden_[f] = true;
		}
	}

	bool add(EventIndex e)
	{
		if (in_[e])
			return true;
		if (forbidden_[e])
			return false;
		in_[e] = true;
		work_.push_back(e);
		return true;
	}

	bool saturate()
	{
		std::vector<EventIndex> acquires;
		while (true) {
			while (!work_.empty()) {
				auto e = work_.back();
				work_.pop_back();
				if (auto p = exec_.thread_predecessor(e); p && !add(p))
					return false;
				if (auto w = exec_.reads_from(e); w && !add(*w))
					return false;
				if (exec_.event(e).op == Op::acquire)
					acquires.push_back(e);
			}
			// Every kept acquire of a lock except the last needs its release.
			std::map<std::uint32_t, EventIndex> last;
			for (auto a : acquires) {
				auto &slot = last[to_index(exec_.event(a).operand)];
				slot = std::max(slot, a);
			}
			for (auto a : acquires) {
				if (last[to_index(exec_.event(a).operand)] == a)
					continue;
				auto r = exec_.matching_release(a);
				if (r == 0 || !add(r))
					return false;
			}
			if (work_.empty())
				return true;
		}
	}

	SubsequenceMask mask() const
	{
		SubsequenceMask m(exec_.size());
		for (EventIndex i = 1; i <= exec_.size(); ++i)
			if (in_[i])
				m.keep(i);
		return m;
	}

private:
	const Execution &exec_;
	std::vector<bool> in_;
	std::vector<bool> forbidden_;
	std::vector<EventIndex> work_;
};

void require_well_formed(const Execution &exec)
{
	if (auto v = check_well_formed(exec))
		throw std::invalid_argument("execution is not well-formed at event " + std::to_string(v->index) +
					    ": " + v->reason);
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn &&fn)
{
	if (threads <= 1 || count < 2) {
		for (std::size_t i = 0; i < count; ++i)
			fn(i);
		return;
	}
	std::atomic<std::size_t> next{0};
	std::vector<std::thread> pool;
	auto workers = std::min<std::size_t>(threads, count);
	for (std::size_t t = 0; t < workers; ++t)
		pool.emplace_back([&] {
			for (auto i = next++; i < count; i = next++)
				fn(i);
		});
	for (auto &th : pool)
		th.join();
}

std::vector<EventIndex> predecessors_of(const Execution &exec, std::span<const EventIndex> events)
{
	std::vector<EventIndex> seeds;
	for (auto e : events)
		if (auto p = exec.thread_predecessor(e))
			seeds.push_back(p);
	return seeds;
}

} // namespace

std::optional<SubsequenceMask> feasible_closure(const Execution &exec, std::span<const EventIndex> seeds,
						std::span<const EventIndex> forbidden)
{
	Closure c(exec, forbidden);
	for (auto s : seeds) {
		if (s == 0 || s > exec.size())
			throw std::out_of_range("event index " + std::to_string(s) + " out of range");
		if (!c.add(s))
			return std::nullopt;
	}
	if (!c.saturate())
		return std::nullopt;
	return c.mask();
}

std::optional<RaceReport> confp_race_pair(const Execution &exec, EventIndex i, EventIndex j)
{
	if (i == 0 || j == 0 || i > exec.size() || j > exec.size())
		throw std::out_of_range("event index out of range");
	if (!conflicting(exec, i, j))
		throw std::invalid_argument("events " + std::to_string(i) + " and " + std::to_string(j) +
					    " do not conflict");
	if (exec.event(i).thread == exec.event(j).thread)
		throw std::invalid_argument("events " + std::to_string(i) + " and " + std::to_string(j) +
					    " belong to the same thread");
	if (i > j)
		std::swap(i, j);
	EventIndex pair[] = {i, j};
	auto seeds = predecessors_of(exec, pair);
	auto mask = feasible_closure(exec, seeds, pair);
	if (!mask)
		return std::nullopt;
	return RaceReport{i, j, std::move(*mask)};
}

RaceAnalysis confp_races(const Execution &exec, unsigned threads)
{
	require_well_formed(exec);
	auto n = exec.size();
	std::vector<std::optional<RaceReport>> found(n + 1);
	std::vector<std::size_t> checked(n + 1, 0);
	parallel_for(n, threads, [&](std::size_t k) {
		auto j = static_cast<EventIndex>(k + 1);
		if (!is_access(exec.event(j).op))
			return;
		for (EventIndex i = j - 1; i >= 1; --i) {
			if (exec.event(i).thread == exec.event(j).thread || !conflicting(exec, i, j))
				continue;
			++checked[j];
			if (auto r = confp_race_pair(exec, i, j)) {
				found[j] = std::move(r);
				return;
			}
		}
	});
	RaceAnalysis out;
	for (EventIndex j = 1; j <= n; ++j) {
		out.pairs_checked += checked[j];
		if (found[j])
			out.races.push_back(std::move(*found[j]));
	}
	return out;
}

bool is_deadlock_pattern(const Execution &exec, std::span<const EventIndex> acquires)
{
	auto k = acquires.size();
	if (k < 2)
		return false;
	std::set<std::uint32_t> threads, locks;
	for (auto e : acquires) {
		if (e == 0 || e > exec.size() || exec.event(e).op != Op::acquire)
			return false;
		threads.insert(to_index(exec.event(e).thread));
		locks.insert(to_index(exec.event(e).operand));
	}
	if (threads.size() != k || locks.size() != k)
		return false;
	for (std::size_t i = 0; i < k; ++i) {
		auto lock = exec.event(acquires[i]).operand;
		auto held = exec.held_locks(acquires[(i + 1) % k]);
		if (std::find(held.begin(), held.end(), lock) == held.end())
			return false;
	}
	for (std::size_t i = 0; i < k; ++i)
		for (std::size_t j = i + 1; j < k; ++j) {
			auto a = exec.held_locks(acquires[i]);
			auto b = exec.held_locks(acquires[j]);
			for (auto l : a)
				if (std::find(b.begin(), b.end(), l) != b.end())
					return false;
		}
	return true;
}

namespace {

std::vector<std::string> canonical_signature(const Execution &exec, std::span<const EventIndex> acquires)
{
	std::vector<std::string> labels;
	for (auto e : acquires)
		labels.push_back(to_string(exec.label(e)));
	std::vector<std::string> best = labels;
	for (std::size_t r = 1; r < labels.size(); ++r) {
		std::rotate(labels.begin(), labels.begin() + 1, labels.end());
		best = std::min(best, labels);
	}
	return best;
}

// edges[l][l2]: acquires of l2 performed while holding l.
using LockGraph = std::map<std::uint32_t, std::map<std::uint32_t, std::vector<EventIndex>>>;

void find_cycles(const LockGraph &graph, std::uint32_t start, std::vector<std::uint32_t> &path,
		 std::size_t max_k, std::vector<std::vector<std::uint32_t>> &out)
{
	auto it = graph.find(path.back());
	if (it == graph.end())
		return;
	for (const auto &[next, events] : it->second) {
		if (next == start && path.size() >= 2) {
			out.push_back(path);
			continue;
		}
		if (next <= start || path.size() >= max_k ||
		    std::find(path.begin(), path.end(), next) != path.end())
			continue;
		path.push_back(next);
		find_cycles(graph, start, path, max_k, out);
		path.pop_back();
	}
}

} // namespace

DeadlockAnalysis confp_deadlocks(const Execution &exec, std::size_t max_k, unsigned threads)
{
	if (max_k < 2)
		throw std::invalid_argument("cycle bound must be at least 2");
	require_well_formed(exec);

	LockGraph graph;
	for (EventIndex e = 1; e <= exec.size(); ++e) {
		if (exec.event(e).op != Op::acquire)
			continue;
		for (auto held : exec.held_locks(e))
			graph[to_index(held)][to_index(exec.event(e).operand)].push_back(e);
	}
	std::vector<std::vector<std::uint32_t>> cycles;
	for (const auto &[start, _] : graph) {
		std::vector<std::uint32_t> path{start};
		find_cycles(graph, start, path, max_k, cycles);
	}

	std::vector<std::vector<DeadlockReport>> per_cycle(cycles.size());
	parallel_for(cycles.size(), threads, [&](std::size_t c) {
		const auto &cycle = cycles[c];
		auto k = cycle.size();
		// Event i realizes edge cycle[i] -> cycle[i+1].
		std::vector<const std::vector<EventIndex> *> choices;
		for (std::size_t i = 0; i < k; ++i)
			choices.push_back(&graph.at(cycle[i]).at(cycle[(i + 1) % k]));
		std::vector<std::size_t> pick(k, 0);
		std::vector<EventIndex> events(k);
		while (true) {
			for (std::size_t i = 0; i < k; ++i)
				events[i] = (*choices[i])[pick[i]];
			if (is_deadlock_pattern(exec, events)) {
				auto seeds = predecessors_of(exec, events);
				if (auto mask = feasible_closure(exec, seeds, events)) {
					auto first = std::min_element(events.begin(), events.end()) - events.begin();
					std::vector<EventIndex> rotated(events.begin() + first, events.end());
					rotated.insert(rotated.end(), events.begin(), events.begin() + first);
					DeadlockReport r;
					for (auto e : rotated) {
						r.pattern.acquires.push_back(e);
						r.pattern.locks.push_back(exec.event(e).operand);
					}
					r.witness = std::move(*mask);
					r.signature = canonical_signature(exec, rotated);
					per_cycle[c].push_back(std::move(r));
				}
			}
			std::size_t i = 0;
			while (i < k && ++pick[i] == choices[i]->size())
				pick[i++] = 0;
			if (i == k)
				break;
		}
	});

	DeadlockAnalysis out;
	for (auto &v : per_cycle)
		for (auto &r : v)
			out.deadlocks.push_back(std::move(r));
	std::sort(out.deadlocks.begin(), out.deadlocks.end(), [](const auto &a, const auto &b) {
		return a.pattern.acquires < b.pattern.acquires;
	});
	std::set<std::vector<std::string>> signatures;
	for (const auto &r : out.deadlocks)
		signatures.insert(r.signature);
	out.distinct = signatures.size();
	return out;
}

} // namespace tracepred
