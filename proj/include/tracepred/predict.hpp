#pragma once

#include "tracepred/alphabet.hpp"
#include "tracepred/monitor.hpp"
#include "tracepred/trace.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tracepred {

enum class ClosureKind { maz, strong, strong_rf };

std::string_view to_string(ClosureKind kind);
std::optional<ClosureKind> parse_closure_kind(std::string_view text);

struct Sampling {
	std::uint64_t seed = 0;
	std::size_t budget = 1;
	double drop_probability = 0.25;
};

struct PredictMode {
	ClosureKind kind = ClosureKind::strong;
	bool well_formed_retrofit = true;
	/// Exhaustive enumeration when empty.
	std::optional<Sampling> sampling;
};

struct Verdict {
	bool found = false;
	SubsequenceMask witness;
	/// Host event indices of the monitor's match, in match order.
	std::vector<EventIndex> match;
	std::size_t masks_examined = 0;
};

inline constexpr std::size_t kUnboundedArity = std::numeric_limits<std::size_t>::max();

/// Every dropped position has no strongly dependent kept position after it.
bool valid_strong_mask(const DualAlphabet &alphabet, std::span<const Letter> word, const SubsequenceMask &mask);
/// Same, over the read/write/lock dual alphabet of the execution.
bool valid_strong_mask(const Execution &exec, const SubsequenceMask &mask);

/// Kept events are closed under thread predecessors and reads-from sources.
bool valid_rf_mask(const Execution &exec, const SubsequenceMask &mask);

/// Return false from the callback to stop.
using MaskVisitor = std::function<bool(const SubsequenceMask &)>;

/// Visits every strongly downward-closed position set of `word` exactly once,
/// as the closure of an increasing generator tuple of arity at most
/// `max_arity`, in lexicographic tuple order (the empty set first).
/// Returns the number of sets visited.
std::size_t for_each_strong_ideal(const DualAlphabet &alphabet, std::span<const Letter> word,
				  std::size_t max_arity, const MaskVisitor &visit);
std::size_t for_each_strong_ideal(const Execution &exec, std::size_t max_arity, const MaskVisitor &visit);

/// Same for sets closed under thread predecessors and reads-from sources.
std::size_t for_each_rf_ideal(const Execution &exec, std::size_t max_arity, const MaskVisitor &visit);

std::vector<SubsequenceMask> enumerate_strong_ideals(const DualAlphabet &alphabet, std::span<const Letter> word,
						     std::size_t max_arity = kUnboundedArity);
std::vector<SubsequenceMask> enumerate_strong_ideals(const Execution &exec, std::size_t max_arity = kUnboundedArity);

/// Exactly `budget` masks, the first one keeping everything. Throws
/// std::invalid_argument for maz kind, budget 0 or a probability outside [0,1].
std::vector<SubsequenceMask> sample_masks(const Execution &exec, ClosureKind kind, const Sampling &sampling);

/// Looks for a valid mask whose projection the monitor accepts. The monitor
/// must be built over the execution's letters.
Verdict predict(const Execution &exec, const Monitor &monitor, const PredictMode &mode);

/// Whether `candidate` is a strong trace prefix of `word`: some strongly
/// downward-closed subsequence of `word` is equivalent to it under strong ∪ weak.
bool strong_prefix_member(const DualAlphabet &alphabet, std::span<const Letter> word,
			  std::span<const Letter> candidate);

/// Equivalence of two words under the dependence (projection criterion).
bool trace_equivalent(const ConcurrentAlphabet &alphabet, std::span<const Letter> u, std::span<const Letter> v);

} // namespace tracepred
