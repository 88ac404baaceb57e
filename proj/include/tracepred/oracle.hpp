#pragma once

// Exponential-time reference closures over small inputs. Every closure is a
// set of sequences of 1-based positions into the seed word (for executions:
// event indices), so results over the same execution compare directly.

#include "tracepred/alphabet.hpp"
#include "tracepred/trace.hpp"

#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

namespace tracepred::oracle {

inline constexpr std::size_t kDefaultBound = 10;
inline constexpr std::size_t kMaxBound = 15;

class BoundExceeded : public std::length_error {
public:
	BoundExceeded(std::size_t size, std::size_t bound);
};

using Sequence = std::vector<EventIndex>;

/// Positions packed four bits each, length in the top nibble.
using PackedSequence = std::uint64_t;

PackedSequence pack(std::span<const EventIndex> seq);
Sequence unpack(PackedSequence packed);

class ClosureSet {
public:
	ClosureSet() = default;
	explicit ClosureSet(std::vector<PackedSequence> items);

	std::size_t size() const { return items_.size(); }
	bool contains(std::span<const EventIndex> seq) const;
	bool contains_packed(PackedSequence p) const;
	/// this ⊇ other
	bool includes(const ClosureSet &other) const;
	ClosureSet filter(const std::function<bool(const Sequence &)> &keep) const;
	/// Lexicographically sorted.
	std::vector<Sequence> sequences() const;
	std::span<const PackedSequence> packed() const { return items_; }

	friend bool operator==(const ClosureSet &, const ClosureSet &) = default;

private:
	std::vector<PackedSequence> items_; // sorted, unique
};

/// Trace equivalence class: closure of the word under swaps of adjacent
/// independent letters.
ClosureSet maz_equiv_class(const ConcurrentAlphabet &alphabet, std::span<const Letter> word,
			   std::size_t bound = kDefaultBound);

/// Ideal prefixes: swaps plus dropping the last letter.
ClosureSet ideal_closure(const ConcurrentAlphabet &alphabet, std::span<const Letter> word,
			 std::size_t bound = kDefaultBound);

/// Strong downward closure: swaps of letters independent under strong ∪ weak,
/// plus dropping a letter with no strongly dependent letter after it.
ClosureSet strong_closure(const DualAlphabet &alphabet, std::span<const Letter> word,
			  std::size_t bound = kDefaultBound);

/// Strong closure of the execution under the read/write/lock dual alphabet,
/// additionally allowing an event to be dropped when no later event is of the
/// same thread or reads from it.
ClosureSet rf_closure(const Execution &exec, std::size_t bound = kDefaultBound);

/// Well-formed, thread-order downward closed sequences of distinct events in
/// which every read reads from the same write as in the execution.
ClosureSet correct_reorderings(const Execution &exec, std::size_t bound = kDefaultBound);

/// Correct reorderings that keep the execution order of same-lock acquires.
ClosureSet syncp_reorderings(const Execution &exec, std::size_t bound = kDefaultBound);

/// Sync-preserving reorderings that also keep the execution order of
/// conflicting accesses.
ClosureSet confp_reorderings(const Execution &exec, std::size_t bound = kDefaultBound);

/// Lock discipline of the labels of a sequence of events.
bool well_formed_sequence(const Execution &exec, std::span<const EventIndex> seq);
ClosureSet well_formed_subset(const ClosureSet &set, const Execution &exec);

/// Letter words of a position closure, deduplicated.
std::set<std::vector<Letter>> words_of(const ClosureSet &set, std::span<const Letter> word);

/// Events absent from `seq` whose thread predecessors are all present.
std::vector<EventIndex> enabled_events(const Execution &exec, std::span<const EventIndex> seq);

} // namespace tracepred::oracle
