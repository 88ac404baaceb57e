#pragma once

#include "tracepred/trace.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tracepred {

/// Least event set containing `seeds` that is closed under thread
/// predecessors, reads-from sources, and, for two kept acquires of one lock,
/// the release of the earlier one. nullopt if it meets `forbidden`.
std::optional<SubsequenceMask> feasible_closure(const Execution &exec, std::span<const EventIndex> seeds,
						std::span<const EventIndex> forbidden);

struct RaceReport {
	EventIndex first = 0;
	EventIndex second = 0;
	SubsequenceMask witness;
};

/// Throws std::invalid_argument unless the events conflict and belong to
/// different threads.
std::optional<RaceReport> confp_race_pair(const Execution &exec, EventIndex i, EventIndex j);

struct RaceAnalysis {
	/// One report per racing second event (with its latest racing partner),
	/// sorted by (second, first).
	std::vector<RaceReport> races;
	std::size_t pairs_checked = 0;
};

/// Throws std::invalid_argument on an ill-formed execution.
RaceAnalysis confp_races(const Execution &exec, unsigned threads = 1);

struct DeadlockPattern {
	std::vector<EventIndex> acquires;
	/// Lock acquired by each event.
	std::vector<OperandId> locks;
};

struct DeadlockReport {
	DeadlockPattern pattern;
	SubsequenceMask witness;
	/// Canonical label tuple; reports sharing it count once.
	std::vector<std::string> signature;
};

struct DeadlockAnalysis {
	/// Every confirmed pattern, sorted by acquire indices.
	std::vector<DeadlockReport> deadlocks;
	std::size_t distinct = 0;
};

/// Acquires of distinct threads and locks, each holding the lock of its
/// cyclic predecessor, with pairwise disjoint held-lock sets.
bool is_deadlock_pattern(const Execution &exec, std::span<const EventIndex> acquires);

/// Throws std::invalid_argument on an ill-formed execution or max_k < 2.
DeadlockAnalysis confp_deadlocks(const Execution &exec, std::size_t max_k, unsigned threads = 1);

} // namespace tracepred
