#include "tracepred/predict.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <stdexcept>

namespace tracepred {

std::string_view to_string(ClosureKind kind)
{
	switch (kind) {
	case ClosureKind::maz:
		return "maz";
	case ClosureKind::strong:
		return "strong";
	case ClosureKind::strong_rf:
		return "strong-rf";
	}
	return "?";
}

std::optional<ClosureKind> parse_closure_kind(std::string_view text)
{
	if (text == "maz")
		return ClosureKind::maz;
	if (text == "strong")
		return ClosureKind::strong;
	if (text == "strong-rf")
		return ClosureKind::strong_rf;
	return std::nullopt;
}

namespace {

void check_length(std::size_t n, const SubsequenceMask &mask)
{
	if (mask.length() != n)
		throw std::invalid_argument("mask length " + std::to_string(mask.length()) +
					    " does not match " + std::to_string(n) + " events");
}

bool row_hits(std::span<const std::uint64_t> row, const std::vector<std::uint64_t> &set)
{
	for (std::size_t w = 0; w < row.size(); ++w)
		if (row[w] & set[w])
			return true;
	return false;
}

// Bitset over positions 1..n, bit i-1 for position i.
class Bits {
public:
	explicit Bits(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
	void set(std::size_t i) { words_[(i - 1) >> 6] |= std::uint64_t{1} << ((i - 1) & 63); }
	bool test(std::size_t i) const { return (words_[(i - 1) >> 6] >> ((i - 1) & 63)) & 1U; }
	Bits &operator|=(const Bits &o)
	{
		for (std::size_t w = 0; w < words_.size(); ++w)
			words_[w] |= o.words_[w];
		return *this;
	}
	bool intersects(const Bits &o) const
	{
		for (std::size_t w = 0; w < words_.size(); ++w)
			if (words_[w] & o.words_[w])
				return true;
		return false;
	}
	SubsequenceMask to_mask(std::size_t n) const
	{
		SubsequenceMask m(n);
		for (std::size_t w = 0; w < words_.size(); ++w) {
			auto bits = words_[w];
			while (bits) {
				auto b = static_cast<std::size_t>(std::countr_zero(bits));
				bits &= bits - 1;
				m.keep(static_cast<EventIndex>(w * 64 + b + 1));
			}
		}
		return m;
	}

private:
	std::vector<std::uint64_t> words_;
};

// down[i]: positions forced into any closed set containing i.
class IdealEnumerator {
public:
	IdealEnumerator(std::vector<Bits> down, std::size_t max_arity, const MaskVisitor &visit)
		: down_(std::move(down)), n_(down_.size() - 1), max_arity_(max_arity), visit_(visit)
	{}

	std::size_t run()
	{
		Bits empty(n_);
		if (!emit(empty))
			return count_;
		Bits gens(n_);
		dfs(0, empty, gens, 0);
		return count_;
	}

private:
	bool emit(const Bits &set)
	{
		++count_;
		if (!visit_(set.to_mask(n_))) {
			stopped_ = true;
			return false;
		}
		return true;
	}

	void dfs(std::size_t last, const Bits &set, Bits &gens, std::size_t arity)
	{
		if (arity >= max_arity_)
			return;
		for (std::size_t g = last + 1; g <= n_ && !stopped_; ++g) {
			if (down_[g].intersects(gens))
				continue;
			Bits next = set;
			next |= down_[g];
			if (!emit(next))
				return;
			Bits with = gens;
			with.set(g);
			dfs(g, next, with, arity + 1);
		}
	}

	std::vector<Bits> down_;
	std::size_t n_;
	std::size_t max_arity_;
	const MaskVisitor &visit_;
	std::size_t count_ = 0;
	bool stopped_ = false;
};

std::vector<Bits> strong_downsets(const DualAlphabet &alphabet, std::span<const Letter> word)
{
	auto n = word.size();
	std::vector<Bits> down(n + 1, Bits(n));
	// latest[l]: last position labelled l so far; dependence on the latest
	// occurrence subsumes the earlier ones.
	std::vector<std::size_t> latest(alphabet.size(), 0);
	for (std::size_t i = 1; i <= n; ++i) {
		auto a = word[i - 1];
		down[i].set(i);
		for (Letter b = 0; b < alphabet.size(); ++b)
			if (latest[b] && alphabet.strong(a, b))
				down[i] |= down[latest[b]];
		latest[a] = i;
	}
	return down;
}

std::vector<Bits> rf_downsets(const Execution &exec)
{
	auto n = exec.size();
	std::vector<Bits> down(n + 1, Bits(n));
	for (EventIndex i = 1; i <= n; ++i) {
		down[i].set(i);
		if (auto p = exec.thread_predecessor(i))
			down[i] |= down[p];
		if (auto w = exec.reads_from(i))
			down[i] |= down[*w];
	}
	return down;
}

} // namespace

bool valid_strong_mask(const DualAlphabet &alphabet, std::span<const Letter> word, const SubsequenceMask &mask)
{
	check_length(word.size(), mask);
	const auto &strong = alphabet.strong_relation();
	std::vector<std::uint64_t> dropped(strong.stride(), 0);
	for (std::size_t i = 1; i <= word.size(); ++i) {
		auto a = word[i - 1];
		if (!mask.contains(static_cast<EventIndex>(i)))
			dropped[a >> 6] |= std::uint64_t{1} << (a & 63);
		else if (row_hits(strong.row(a), dropped))
			return false;
	}
	return true;
}

bool valid_strong_mask(const Execution &exec, const SubsequenceMask &mask)
{
	auto dual = build_rwl_dual(exec.letters());
	return valid_strong_mask(dual, exec.word(), mask);
}

bool valid_rf_mask(const Execution &exec, const SubsequenceMask &mask)
{
	check_length(exec.size(), mask);
	for (EventIndex i = 1; i <= exec.size(); ++i) {
		if (!mask.contains(i))
			continue;
		auto p = exec.thread_predecessor(i);
		if (p && !mask.contains(p))
			return false;
		auto w = exec.reads_from(i);
		if (w && !mask.contains(*w))
			return false;
	}
	return true;
}

std::size_t for_each_strong_ideal(const DualAlphabet &alphabet, std::span<const Letter> word,
				  std::size_t max_arity, const MaskVisitor &visit)
{
	return IdealEnumerator(strong_downsets(alphabet, word), max_arity, visit).run();
}

std::size_t for_each_strong_ideal(const Execution &exec, std::size_t max_arity, const MaskVisitor &visit)
{
	auto dual = build_rwl_dual(exec.letters());
	auto word = exec.word();
	return for_each_strong_ideal(dual, word, max_arity, visit);
}

std::size_t for_each_rf_ideal(const Execution &exec, std::size_t max_arity, const MaskVisitor &visit)
{
	return IdealEnumerator(rf_downsets(exec), max_arity, visit).run();
}

std::vector<SubsequenceMask> enumerate_strong_ideals(const DualAlphabet &alphabet, std::span<const Letter> word,
						     std::size_t max_arity)
{
	std::vector<SubsequenceMask> out;
	for_each_strong_ideal(alphabet, word, max_arity, [&](const SubsequenceMask &m) {
		out.push_back(m);
		return true;
	});
	return out;
}

std::vector<SubsequenceMask> enumerate_strong_ideals(const Execution &exec, std::size_t max_arity)
{
	auto dual = build_rwl_dual(exec.letters());
	return enumerate_strong_ideals(dual, exec.word(), max_arity);
}

std::vector<SubsequenceMask> sample_masks(const Execution &exec, ClosureKind kind, const Sampling &sampling)
{
	if (kind == ClosureKind::maz)
		throw std::invalid_argument("sampling needs a prefix closure kind");
	if (sampling.budget == 0)
		throw std::invalid_argument("sampling budget must be at least 1");
	if (!(sampling.drop_probability >= 0.0 && sampling.drop_probability <= 1.0))
		throw std::invalid_argument("drop probability must lie in [0,1]");

	auto n = exec.size();
	std::vector<SubsequenceMask> out;
	out.reserve(sampling.budget);
	out.push_back(SubsequenceMask::all(n));

	std::mt19937_64 rng(sampling.seed);
	std::bernoulli_distribution drop(sampling.drop_probability);
	DualAlphabet dual;
	if (kind == ClosureKind::strong)
		dual = build_rwl_dual(exec.letters());

	while (out.size() < sampling.budget) {
		SubsequenceMask m = SubsequenceMask::all(n);
		std::vector<std::uint64_t> dropped_letters(dual.strong_relation().stride(), 0);
		for (EventIndex i = 1; i <= n; ++i) {
			bool forced;
			if (kind == ClosureKind::strong) {
				forced = row_hits(dual.strong_relation().row(exec.letter(i)), dropped_letters);
			} else {
				auto p = exec.thread_predecessor(i);
				auto w = exec.reads_from(i);
				forced = (p && !m.contains(p)) || (w && !m.contains(*w));
			}
			// Draw even when forced so the stream does not depend on repairs.
			bool chosen = drop(rng);
			if (forced || chosen) {
				m.drop(i);
				if (kind == ClosureKind::strong) {
					auto a = exec.letter(i);
					dropped_letters[a >> 6] |= std::uint64_t{1} << (a & 63);
				}
			}
		}
		out.push_back(std::move(m));
	}
	return out;
}

namespace {

bool check_mask(const Execution &exec, const Monitor &monitor, const SubsequenceMask &mask, bool retrofit,
		Verdict &verdict)
{
	++verdict.masks_examined;
	auto kept = mask.indices();
	auto m = monitor.clone();
	m->reset();
	LockDiscipline locks;
	for (auto i : kept) {
		const auto &e = exec.event(i);
		if (retrofit && locks.step(to_index(e.thread), e.op, to_index(e.operand)))
			return false;
		m->step(e.letter);
	}
	if (!m->accepting())
		return false;
	verdict.found = true;
	verdict.witness = mask;
	verdict.match.clear();
	for (auto p : m->match())
		verdict.match.push_back(kept.at(p - 1));
	return true;
}

} // namespace

Verdict predict(const Execution &exec, const Monitor &monitor, const PredictMode &mode)
{
	Verdict verdict;
	verdict.witness = SubsequenceMask(exec.size());
	if (mode.kind == ClosureKind::maz) {
		check_mask(exec, monitor, SubsequenceMask::all(exec.size()), mode.well_formed_retrofit, verdict);
		return verdict;
	}
	if (mode.sampling) {
		for (const auto &m : sample_masks(exec, mode.kind, *mode.sampling))
			if (check_mask(exec, monitor, m, mode.well_formed_retrofit, verdict))
				break;
		return verdict;
	}
	auto visit = [&](const SubsequenceMask &m) {
		return !check_mask(exec, monitor, m, mode.well_formed_retrofit, verdict);
	};
	if (mode.kind == ClosureKind::strong)
		for_each_strong_ideal(exec, kUnboundedArity, visit);
	else
		for_each_rf_ideal(exec, kUnboundedArity, visit);
	return verdict;
}

bool trace_equivalent(const ConcurrentAlphabet &alphabet, std::span<const Letter> u, std::span<const Letter> v)
{
	if (u.size() != v.size())
		return false;
	std::vector<Letter> su(u.begin(), u.end()), sv(v.begin(), v.end());
	std::sort(su.begin(), su.end());
	std::sort(sv.begin(), sv.end());
	if (su != sv)
		return false;
	auto letters = observed_letters(u);
	for (std::size_t x = 0; x < letters.size(); ++x)
		for (std::size_t y = x + 1; y < letters.size(); ++y) {
			auto a = letters[x], b = letters[y];
			if (!alphabet.dependent(a, b))
				continue;
			std::vector<Letter> pu, pv;
			for (auto l : u)
				if (l == a || l == b)
					pu.push_back(l);
			for (auto l : v)
				if (l == a || l == b)
					pv.push_back(l);
			if (pu != pv)
				return false;
		}
	return true;
}

bool strong_prefix_member(const DualAlphabet &alphabet, std::span<const Letter> word,
			  std::span<const Letter> candidate)
{
	auto combined = alphabet.combined();
	bool found = false;
	for_each_strong_ideal(alphabet, word, kUnboundedArity, [&](const SubsequenceMask &m) {
		if (m.count() != candidate.size())
			return true;
		std::vector<Letter> proj;
		for (auto i : m.indices())
			proj.push_back(word[i - 1]);
		found = trace_equivalent(combined, proj, candidate);
		return !found;
	});
	return found;
}

} // namespace tracepred
