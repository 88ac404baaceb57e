#include "tracepred/oracle.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

namespace tracepred::oracle {

BoundExceeded::BoundExceeded(std::size_t size, std::size_t bound)
	: std::length_error("input of " + std::to_string(size) + " events exceeds oracle bound " +
			    std::to_string(bound))
{}

namespace {

constexpr unsigned kLengthShift = 60;
constexpr PackedSequence kPositionBits = (PackedSequence{1} << kLengthShift) - 1;

std::size_t length_of(PackedSequence p) { return static_cast<std::size_t>(p >> kLengthShift); }
EventIndex at(PackedSequence p, std::size_t k) { return static_cast<EventIndex>((p >> (4 * k)) & 15U); }

PackedSequence swapped(PackedSequence p, std::size_t k)
{
	auto a = (p >> (4 * k)) & 15U;
	auto b = (p >> (4 * (k + 1))) & 15U;
	p &= ~((PackedSequence{0xFF}) << (4 * k));
	return p | (b << (4 * k)) | (a << (4 * (k + 1)));
}

PackedSequence dropped(PackedSequence p, std::size_t k)
{
	auto len = length_of(p);
	auto pos = p & kPositionBits;
	auto low = pos & ((PackedSequence{1} << (4 * k)) - 1);
	auto high = (pos >> (4 * (k + 1))) << (4 * k);
	return (static_cast<PackedSequence>(len - 1) << kLengthShift) | low | high;
}

PackedSequence appended(PackedSequence p, EventIndex e)
{
	auto len = length_of(p);
	auto pos = (p & kPositionBits) | (static_cast<PackedSequence>(e) << (4 * len));
	return (static_cast<PackedSequence>(len + 1) << kLengthShift) | pos;
}

void check_bound(std::size_t size, std::size_t bound)
{
	if (bound > kMaxBound)
		throw std::invalid_argument("oracle bound may not exceed " + std::to_string(kMaxBound));
	if (size > bound)
		throw BoundExceeded(size, bound);
}

PackedSequence identity(std::size_t n)
{
	std::vector<EventIndex> seq(n);
	for (std::size_t i = 0; i < n; ++i)
		seq[i] = static_cast<EventIndex>(i + 1);
	return pack(seq);
}

// Breadth-first fixpoint under adjacent swaps and single-letter drops.
template <class Swappable, class Droppable>
ClosureSet fixpoint(PackedSequence seed, Swappable &&swappable, Droppable &&droppable)
{
	std::unordered_set<PackedSequence> seen{seed};
	std::deque<PackedSequence> queue{seed};
	auto visit = [&](PackedSequence next) {
		if (seen.insert(next).second)
			queue.push_back(next);
	};
	while (!queue.empty()) {
		auto cur = queue.front();
		queue.pop_front();
		auto len = length_of(cur);
		for (std::size_t k = 0; k + 1 < len; ++k)
			if (swappable(at(cur, k), at(cur, k + 1)))
				visit(swapped(cur, k));
		for (std::size_t k = 0; k < len; ++k)
			if (droppable(cur, k))
				visit(dropped(cur, k));
	}
	return ClosureSet(std::vector<PackedSequence>(seen.begin(), seen.end()));
}

// Positions are 1-based into `word`.
struct WordView {
	std::span<const Letter> word;
	Letter letter(EventIndex pos) const { return word[pos - 1]; }
};

} // namespace

PackedSequence pack(std::span<const EventIndex> seq)
{
	if (seq.size() > kMaxBound)
		throw BoundExceeded(seq.size(), kMaxBound);
	PackedSequence p = static_cast<PackedSequence>(seq.size()) << kLengthShift;
	for (std::size_t k = 0; k < seq.size(); ++k) {
		if (seq[k] < 1 || seq[k] > kMaxBound)
			throw std::out_of_range("position outside 1.." + std::to_string(kMaxBound));
		p |= static_cast<PackedSequence>(seq[k]) << (4 * k);
	}
	return p;
}

Sequence unpack(PackedSequence packed)
{
	Sequence seq(length_of(packed));
	for (std::size_t k = 0; k < seq.size(); ++k)
		seq[k] = at(packed, k);
	return seq;
}

ClosureSet::ClosureSet(std::vector<PackedSequence> items) : items_(std::move(items))
{
	std::sort(items_.begin(), items_.end());
	items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

bool ClosureSet::contains(std::span<const EventIndex> seq) const
{
	if (seq.size() > kMaxBound)
		return false;
	for (auto e : seq)
		if (e < 1 || e > kMaxBound)
			return false;
	return contains_packed(pack(seq));
}

bool ClosureSet::contains_packed(PackedSequence p) const
{
	return std::binary_search(items_.begin(), items_.end(), p);
}

bool ClosureSet::includes(const ClosureSet &other) const
{
	return std::includes(items_.begin(), items_.end(), other.items_.begin(), other.items_.end());
}

ClosureSet ClosureSet::filter(const std::function<bool(const Sequence &)> &keep) const
{
	std::vector<PackedSequence> out;
	for (auto p : items_)
		if (keep(unpack(p)))
			out.push_back(p);
	return ClosureSet(std::move(out));
}

std::vector<Sequence> ClosureSet::sequences() const
{
	std::vector<Sequence> out;
	out.reserve(items_.size());
	for (auto p : items_)
		out.push_back(unpack(p));
	std::sort(out.begin(), out.end());
	return out;
}

ClosureSet maz_equiv_class(const ConcurrentAlphabet &alphabet, std::span<const Letter> word, std::size_t bound)
{
	check_bound(word.size(), bound);
	WordView w{word};
	return fixpoint(
		identity(word.size()),
		[&](EventIndex a, EventIndex b) { return !alphabet.dependent(w.letter(a), w.letter(b)); },
		[](PackedSequence, std::size_t) { return false; });
}

ClosureSet ideal_closure(const ConcurrentAlphabet &alphabet, std::span<const Letter> word, std::size_t bound)
{
	check_bound(word.size(), bound);
	WordView w{word};
	return fixpoint(
		identity(word.size()),
		[&](EventIndex a, EventIndex b) { return !alphabet.dependent(w.letter(a), w.letter(b)); },
		[](PackedSequence cur, std::size_t k) { return k + 1 == length_of(cur); });
}

namespace {

template <class Extra>
ClosureSet strong_fixpoint(const DualAlphabet &alphabet, std::span<const Letter> word, Extra &&extra_drop)
{
	WordView w{word};
	return fixpoint(
		identity(word.size()),
		[&](EventIndex a, EventIndex b) { return !alphabet.dependent(w.letter(a), w.letter(b)); },
		[&](PackedSequence cur, std::size_t k) {
			auto a = w.letter(at(cur, k));
			auto len = length_of(cur);
			bool strong_ok = true;
			for (std::size_t q = k + 1; q < len && strong_ok; ++q)
				strong_ok = !alphabet.strong(a, w.letter(at(cur, q)));
			return strong_ok || extra_drop(cur, k);
		});
}

} // namespace

ClosureSet strong_closure(const DualAlphabet &alphabet, std::span<const Letter> word, std::size_t bound)
{
	check_bound(word.size(), bound);
	return strong_fixpoint(alphabet, word, [](PackedSequence, std::size_t) { return false; });
}

ClosureSet rf_closure(const Execution &exec, std::size_t bound)
{
	check_bound(exec.size(), bound);
	auto dual = build_rwl_dual(exec.letters());
	auto word = exec.word();
	return strong_fixpoint(dual, word, [&](PackedSequence cur, std::size_t k) {
		auto e = at(cur, k);
		auto thread = exec.event(e).thread;
		for (std::size_t q = k + 1; q < length_of(cur); ++q) {
			auto f = at(cur, q);
			if (exec.event(f).thread == thread || exec.reads_from(f) == e)
				return false;
		}
		return true;
	});
}

namespace {

enum class ReorderKind { correct, sync_preserving, conflict_preserving };

class ReorderingSearch {
public:
	ReorderingSearch(const Execution &exec, ReorderKind kind) : exec_(exec), kind_(kind)
	{
		State s;
		s.next.assign(exec.thread_count(), 0);
		s.last_write.assign(exec.operand_count(), 0);
		s.max_acquire.assign(exec.operand_count(), 0);
		s.max_write.assign(exec.operand_count(), 0);
		s.max_read.assign(exec.operand_count(), 0);
		s.seq = pack({});
		dfs(s);
	}

	ClosureSet result() { return ClosureSet(std::move(out_)); }

private:
	struct State {
		PackedSequence seq;
		std::vector<std::size_t> next;
		LockDiscipline locks;
		std::vector<EventIndex> last_write;
		std::vector<EventIndex> max_acquire;
		std::vector<EventIndex> max_write;
		std::vector<EventIndex> max_read;
	};

	void dfs(const State &s)
	{
		out_.push_back(s.seq);
		for (std::uint32_t t = 0; t < exec_.thread_count(); ++t) {
			auto po = exec_.thread_events(ThreadId{t});
			if (s.next[t] >= po.size())
				continue;
			auto e = po[s.next[t]];
			State n = s;
			if (extend(n, e)) {
				++n.next[t];
				n.seq = appended(n.seq, e);
				dfs(n);
			}
		}
	}

	bool extend(State &s, EventIndex e) const
	{
		const auto &ev = exec_.event(e);
		auto d = to_index(ev.operand);
		if (s.locks.step(to_index(ev.thread), ev.op, d))
			return false;
		switch (ev.op) {
		case Op::read:
			if (s.last_write[d] != exec_.reads_from(e).value_or(0))
				return false;
			if (kind_ == ReorderKind::conflict_preserving && e < s.max_write[d])
				return false;
			s.max_read[d] = std::max(s.max_read[d], e);
			break;
		case Op::write:
			if (kind_ == ReorderKind::conflict_preserving &&
			    (e < s.max_write[d] || e < s.max_read[d]))
				return false;
			s.last_write[d] = e;
			s.max_write[d] = std::max(s.max_write[d], e);
			break;
		case Op::acquire:
			if (kind_ != ReorderKind::correct && e < s.max_acquire[d])
				return false;
			s.max_acquire[d] = std::max(s.max_acquire[d], e);
			break;
		case Op::release:
			break;
		}
		return true;
	}

	const Execution &exec_;
	ReorderKind kind_;
	std::vector<PackedSequence> out_;
};

} // namespace

ClosureSet correct_reorderings(const Execution &exec, std::size_t bound)
{
	check_bound(exec.size(), bound);
	return ReorderingSearch(exec, ReorderKind::correct).result();
}

ClosureSet syncp_reorderings(const Execution &exec, std::size_t bound)
{
	check_bound(exec.size(), bound);
	return ReorderingSearch(exec, ReorderKind::sync_preserving).result();
}

ClosureSet confp_reorderings(const Execution &exec, std::size_t bound)
{
	check_bound(exec.size(), bound);
	return ReorderingSearch(exec, ReorderKind::conflict_preserving).result();
}

bool well_formed_sequence(const Execution &exec, std::span<const EventIndex> seq)
{
	LockDiscipline locks;
	for (auto e : seq) {
		const auto &ev = exec.event(e);
		if (locks.step(to_index(ev.thread), ev.op, to_index(ev.operand)))
			return false;
	}
	return true;
}

ClosureSet well_formed_subset(const ClosureSet &set, const Execution &exec)
{
	return set.filter([&](const Sequence &s) { return well_formed_sequence(exec, s); });
}

std::set<std::vector<Letter>> words_of(const ClosureSet &set, std::span<const Letter> word)
{
	std::set<std::vector<Letter>> out;
	for (auto p : set.packed()) {
		std::vector<Letter> w;
		for (auto pos : unpack(p))
			w.push_back(word[pos - 1]);
		out.insert(std::move(w));
	}
	return out;
}

std::vector<EventIndex> enabled_events(const Execution &exec, std::span<const EventIndex> seq)
{
	std::vector<bool> present(exec.size() + 1, false);
	for (auto e : seq)
		present[e] = true;
	std::vector<EventIndex> out;
	for (EventIndex e = 1; e <= exec.size(); ++e) {
		if (present[e])
			continue;
		auto p = exec.thread_predecessor(e);
		bool ok = true;
		for (; p != 0 && ok; p = exec.thread_predecessor(p))
			ok = present[p];
		if (ok)
			out.push_back(e);
	}
	return out;
}

} // namespace tracepred::oracle
