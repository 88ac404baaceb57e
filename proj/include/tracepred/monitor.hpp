#pragma once

#include "tracepred/alphabet.hpp"
#include "tracepred/trace.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace tracepred {

/// Letter id used for pattern letters that do not occur in the alphabet.
inline constexpr Letter kNoLetter = std::numeric_limits<Letter>::max();

/// Deterministic one-pass acceptor over letters.
///
/// A monitor object is its own state: reset() returns it to the initial state
/// and clone() snapshots the current one. Pattern and adjacency monitors answer
/// whether some reordering equivalent to the input (under the monitor's
/// dependence) lies in the target language; acceptance is monotone.
class Monitor {
public:
	virtual ~Monitor() = default;

	virtual std::unique_ptr<Monitor> clone() const = 0;
	virtual void reset() = 0;
	virtual void step(Letter letter) = 0;
	virtual bool accepting() const = 0;
	virtual bool one_pass() const = 0;

	/// Canonical encoding of the full state, for determinism checks.
	virtual std::vector<std::int64_t> state_key() const = 0;

	/// 1-based stream positions of the events of a witnessing match, in the
	/// order they occur in the witnessing reordering. Empty when not accepting
	/// or when the monitor has no notion of a match.
	virtual std::vector<std::size_t> match() const { return {}; }
};

/// Online summary of the trace partial order induced by a dependence relation.
///
/// For every processed event e, V_e maps each tracked letter b to the largest
/// stream position p such that the event at p is labelled b and lies below e
/// (0 if none). Components for untracked letters are not maintained.
class OrderSummary {
public:
	OrderSummary() = default;
	OrderSummary(const ConcurrentAlphabet &alphabet, std::span<const Letter> tracked);

	/// V for the event that the next push(letter) would add.
	std::vector<std::size_t> peek(Letter letter) const;
	/// Appends an event; returns its V.
	const std::vector<std::size_t> &push(Letter letter);
	void reset();

	std::size_t position() const { return position_; }
	/// Stream position of the latest event labelled `letter`, or 0.
	std::size_t last(Letter letter) const { return last_[letter]; }
	/// V of the latest event labelled `letter` (all zero if none).
	std::span<const std::size_t> latest(Letter letter) const
	{
		return {&latest_[letter * tracked_.size()], tracked_.size()};
	}
	/// Index of a tracked letter inside V vectors, or npos.
	std::size_t slot(Letter letter) const;
	/// Letters dependent with `letter` (including itself).
	std::span<const Letter> neighbours(Letter letter) const { return (*neighbours_)[letter]; }

	std::vector<std::int64_t> state_key() const;

	static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
	std::shared_ptr<const std::vector<std::vector<Letter>>> neighbours_;
	std::vector<Letter> tracked_;
	std::size_t position_ = 0;
	std::vector<std::size_t> last_;
	std::vector<std::size_t> latest_; // letters × tracked
	std::vector<std::size_t> scratch_;
};

enum class MatchKind { subsequence, adjacent };

struct PatternSpec {
	std::vector<Label> letters;
	MatchKind kind = MatchKind::subsequence;
};

/// Parses "t1|w|y,t2|r|y". Throws TraceError.
std::vector<Label> parse_pattern_labels(std::string_view text);
std::optional<MatchKind> parse_match_kind(std::string_view text);

/// Letter ids of pattern labels inside `alphabet` (kNoLetter when absent).
std::vector<Letter> resolve_pattern(const ConcurrentAlphabet &alphabet, std::span<const Label> labels);

/// Accepts iff some equivalent reordering contains `pattern` as a subsequence.
std::unique_ptr<Monitor> pattern_monitor(const ConcurrentAlphabet &alphabet, std::span<const Letter> pattern);

/// Accepts iff some equivalent reordering has an event labelled `first`
/// immediately followed by an event labelled `second`. Requires first != second.
std::unique_ptr<Monitor> adjacency_monitor(const ConcurrentAlphabet &alphabet, Letter first, Letter second);

/// Accepts iff the input processed so far is well-formed. `letters[l]` is the
/// label of letter l.
std::unique_ptr<Monitor> wf_monitor(std::span<const Label> letters);

/// Product: accepts iff both accept.
std::unique_ptr<Monitor> conjoin(std::unique_ptr<Monitor> first, std::unique_ptr<Monitor> second);

std::unique_ptr<Monitor> accept_all();
std::unique_ptr<Monitor> reject_all();

/// Feeds a letter sequence to a fresh copy of the monitor.
bool run_monitor(const Monitor &monitor, std::span<const Letter> word);

} // namespace tracepred
