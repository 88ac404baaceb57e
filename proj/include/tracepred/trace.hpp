#pragma once

#include "tracepred/mask.hpp"

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tracepred {

/// Dense id of an observed letter (event label) of an execution or alphabet.
using Letter = std::uint32_t;

enum class ThreadId : std::uint32_t {};
/// Lock or memory location; both share one namespace per execution.
enum class OperandId : std::uint32_t {};

constexpr std::uint32_t to_index(ThreadId t) { return static_cast<std::uint32_t>(t); }
constexpr std::uint32_t to_index(OperandId d) { return static_cast<std::uint32_t>(d); }

enum class Op : std::uint8_t { read, write, acquire, release };

constexpr bool is_access(Op op) { return op == Op::read || op == Op::write; }
constexpr bool is_lock_op(Op op) { return op == Op::acquire || op == Op::release; }

/// "r", "w", "acq", "rel"
std::string_view op_token(Op op);
std::optional<Op> parse_op(std::string_view token);

/// A letter of the read/write/lock alphabet: thread, operation and operand.
struct Label {
	std::string thread;
	Op op = Op::read;
	std::string operand;

	friend auto operator<=>(const Label &, const Label &) = default;
	friend bool operator==(const Label &, const Label &) = default;
};

/// "t1|w|x"
std::string to_string(const Label &label);
/// Parses "t1|w|x". Throws TraceError on malformed input.
Label parse_label(std::string_view text);

class TraceError : public std::runtime_error {
public:
	explicit TraceError(const std::string &what, std::size_t line = 0)
		: std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
		  line_(line)
	{}
	std::size_t line() const { return line_; }

private:
	std::size_t line_;
};

struct Event {
	ThreadId thread;
	Op op;
	OperandId operand;
	Letter letter;
};

/// An immutable, interned execution over the read/write/lock alphabet.
///
/// Events are addressed by 1-based index. Per-event derived data (reads-from,
/// held locks, thread predecessor, matching release) is computed once at
/// construction.
class Execution {
public:
	Execution() = default;

	/// Throws TraceError when an operand is used both as a lock and a location.
	static Execution from_labels(std::span<const Label> labels);

	std::size_t size() const { return events_.size(); }
	bool empty() const { return events_.empty(); }

	const Event &event(EventIndex i) const { return events_.at(i - 1); }
	Label label(EventIndex i) const;
	Letter letter(EventIndex i) const { return event(i).letter; }
	std::vector<Label> labels() const;

	/// Observed letters; letter id l is letters()[l].
	std::span<const Label> letters() const { return letters_; }
	/// Letter sequence of the execution.
	std::vector<Letter> word() const;
	std::optional<Letter> find_letter(const Label &label) const;

	std::size_t thread_count() const { return thread_names_.size(); }
	const std::string &thread_name(ThreadId t) const { return thread_names_.at(to_index(t)); }
	std::size_t operand_count() const { return operand_names_.size(); }
	const std::string &operand_name(OperandId d) const { return operand_names_.at(to_index(d)); }
	bool is_lock(OperandId d) const { return operand_is_lock_.at(to_index(d)); }
	std::size_t lock_count() const;
	std::size_t location_count() const;

	/// Program order of one thread.
	std::span<const EventIndex> thread_events(ThreadId t) const { return thread_events_.at(to_index(t)); }
	/// Acquire and release events on one lock, in execution order.
	std::span<const EventIndex> lock_events(OperandId lock) const { return lock_events_.at(to_index(lock)); }

	/// Previous event of the same thread, or 0.
	EventIndex thread_predecessor(EventIndex i) const { return thread_pred_.at(i); }
	/// 0-based position of the event inside its thread.
	std::size_t thread_position(EventIndex i) const { return thread_pos_.at(i); }
	/// Write read by a read event (latest earlier write to the same location), or nullopt.
	std::optional<EventIndex> reads_from(EventIndex i) const;
	/// Locks held by the event's thread immediately before the event, sorted by id.
	std::span<const OperandId> held_locks(EventIndex i) const { return held_.at(i); }
	/// Release closing the critical section opened by an acquire, or 0.
	EventIndex matching_release(EventIndex acquire) const { return match_rel_.at(acquire); }

private:
	void derive();

	std::vector<Event> events_;
	std::vector<Label> letters_;
	std::unordered_map<std::string, Letter> letter_ids_;
	std::vector<std::string> thread_names_;
	std::vector<std::string> operand_names_;
	std::vector<bool> operand_is_lock_;

	std::vector<std::vector<EventIndex>> thread_events_;
	std::vector<std::vector<EventIndex>> lock_events_;
	// Indexed by 1-based event index; slot 0 unused.
	std::vector<EventIndex> thread_pred_;
	std::vector<std::size_t> thread_pos_;
	std::vector<EventIndex> rf_;
	std::vector<std::vector<OperandId>> held_;
	std::vector<EventIndex> match_rel_;
};

enum class TraceFormat { std_text, structured };

/// Parses `<thread>|<op>|<operand>` lines (std-text) or a JSON array of
/// {"t","op","d"} records (structured).
Execution parse_trace(std::string_view text, TraceFormat format = TraceFormat::std_text);
Execution parse_trace(std::istream &in, TraceFormat format = TraceFormat::std_text);
Execution load_trace(const std::filesystem::path &path, TraceFormat format = TraceFormat::std_text);

std::string render_trace(const Execution &exec, TraceFormat format = TraceFormat::std_text);

struct WfViolation {
	EventIndex index;
	std::string reason;
};

/// Streaming lock-discipline checker over (thread, op, lock) triples.
///
/// Open critical sections are permitted; a lock has at most one owner and
/// re-entrant acquisition is a violation.
class LockDiscipline {
public:
	/// Returns a violation reason, or nullopt if the step keeps the prefix well-formed.
	std::optional<std::string> step(std::uint32_t thread, Op op, std::uint32_t lock,
					 std::string_view lock_name = {});
	void reset() { owner_.clear(); }

	friend bool operator==(const LockDiscipline &, const LockDiscipline &) = default;
	const std::vector<std::uint32_t> &owners() const { return owner_; }

private:
	static constexpr std::uint32_t kFree = 0;
	// owner_[lock] = thread + 1, or kFree
	std::vector<std::uint32_t> owner_;
};

std::optional<WfViolation> check_well_formed(const Execution &exec);
bool is_well_formed(const Execution &exec);

/// Reads-from map: read index -> write index, or nullopt for reads with no earlier write.
std::vector<std::pair<EventIndex, std::optional<EventIndex>>> reads_from(const Execution &exec);

/// Throws std::out_of_range for an index outside 1..|exec|.
std::vector<OperandId> held_locks_at(const Execution &exec, EventIndex i);

/// Kept events in execution order, reindexed 1..|kept|. Throws on length mismatch.
Execution project(const Execution &exec, const SubsequenceMask &mask);

/// True iff every event thread-before each target is kept. Throws
/// std::invalid_argument if a target is itself kept.
bool enabled_in(const Execution &exec, const SubsequenceMask &mask, std::span<const EventIndex> targets);

/// Events strictly thread-before `i`.
std::vector<EventIndex> thread_predecessors(const Execution &exec, EventIndex i);

/// Same location, at least one write. Thread is not considered.
bool conflicting(const Execution &exec, EventIndex a, EventIndex b);

} // namespace tracepred
