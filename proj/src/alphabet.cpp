#include "tracepred/alphabet.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace tracepred {

LetterRelation::LetterRelation(std::size_t letters)
	: n_(letters), stride_((letters + 63) / 64), bits_(letters * ((letters + 63) / 64), 0)
{}

void LetterRelation::add(Letter a, Letter b)
{
	bits_[a * stride_ + (b >> 6)] |= std::uint64_t{1} << (b & 63);
	bits_[b * stride_ + (a >> 6)] |= std::uint64_t{1} << (a & 63);
}

void LetterRelation::remove(Letter a, Letter b)
{
	bits_[a * stride_ + (b >> 6)] &= ~(std::uint64_t{1} << (b & 63));
	bits_[b * stride_ + (a >> 6)] &= ~(std::uint64_t{1} << (a & 63));
}

bool LetterRelation::is_symmetric() const
{
	for (Letter a = 0; a < n_; ++a)
		for (Letter b = a + 1; b < n_; ++b)
			if (contains(a, b) != contains(b, a))
				return false;
	return true;
}

bool LetterRelation::is_reflexive() const
{
	for (Letter a = 0; a < n_; ++a)
		if (!contains(a, a))
			return false;
	return true;
}

bool LetterRelation::is_irreflexive() const
{
	for (Letter a = 0; a < n_; ++a)
		if (contains(a, a))
			return false;
	return true;
}

LetterRelation LetterRelation::operator|(const LetterRelation &other) const
{
	if (other.n_ != n_)
		throw std::invalid_argument("relation size mismatch");
	LetterRelation r = *this;
	for (std::size_t i = 0; i < bits_.size(); ++i)
		r.bits_[i] |= other.bits_[i];
	return r;
}

LetterRelation LetterRelation::operator-(const LetterRelation &other) const
{
	if (other.n_ != n_)
		throw std::invalid_argument("relation size mismatch");
	LetterRelation r = *this;
	for (std::size_t i = 0; i < bits_.size(); ++i)
		r.bits_[i] &= ~other.bits_[i];
	return r;
}

bool LetterRelation::intersects(const LetterRelation &other) const
{
	for (std::size_t i = 0; i < std::min(bits_.size(), other.bits_.size()); ++i)
		if (bits_[i] & other.bits_[i])
			return true;
	return false;
}

namespace {

std::optional<Letter> find_name(std::span<const std::string> names, std::string_view name)
{
	auto it = std::find(names.begin(), names.end(), name);
	if (it == names.end())
		return std::nullopt;
	return static_cast<Letter>(it - names.begin());
}

} // namespace

ConcurrentAlphabet::ConcurrentAlphabet(std::vector<std::string> names, LetterRelation dependent)
	: names_(std::move(names)), dependent_(std::move(dependent))
{
	if (dependent_.size() != names_.size())
		throw std::invalid_argument("dependence relation size does not match alphabet");
	if (!dependent_.is_reflexive() || !dependent_.is_symmetric())
		throw std::invalid_argument("dependence relation must be reflexive and symmetric");
}

std::optional<Letter> ConcurrentAlphabet::find(std::string_view name) const
{
	return find_name(names_, name);
}

DualAlphabet::DualAlphabet(std::vector<std::string> names, LetterRelation strong, LetterRelation weak)
	: names_(std::move(names)), strong_(std::move(strong)), weak_(std::move(weak))
{
	if (strong_.size() != names_.size() || weak_.size() != names_.size())
		throw std::invalid_argument("relation size does not match alphabet");
	if (!strong_.is_reflexive() || !strong_.is_symmetric())
		throw std::invalid_argument("strong dependence must be reflexive and symmetric");
	if (!weak_.is_irreflexive() || !weak_.is_symmetric())
		throw std::invalid_argument("weak dependence must be irreflexive and symmetric");
}

std::optional<Letter> DualAlphabet::find(std::string_view name) const { return find_name(names_, name); }

ConcurrentAlphabet DualAlphabet::combined() const { return {names_, strong_ | weak_}; }

namespace {

std::vector<std::string> label_names(std::span<const Label> letters)
{
	std::vector<std::string> names;
	names.reserve(letters.size());
	for (const auto &l : letters)
		names.push_back(to_string(l));
	return names;
}

bool same_thread(const Label &a, const Label &b) { return a.thread == b.thread; }
bool same_lock(const Label &a, const Label &b)
{
	return is_lock_op(a.op) && is_lock_op(b.op) && a.operand == b.operand;
}
bool conflict(const Label &a, const Label &b)
{
	return is_access(a.op) && is_access(b.op) && a.operand == b.operand &&
	       (a.op == Op::write || b.op == Op::write);
}

} // namespace

ConcurrentAlphabet build_rwl_dependence(std::span<const Label> letters)
{
	LetterRelation dep(letters.size());
	for (Letter a = 0; a < letters.size(); ++a)
		for (Letter b = a; b < letters.size(); ++b) {
			const auto &x = letters[a];
			const auto &y = letters[b];
			if (a == b || same_thread(x, y) || same_lock(x, y) || conflict(x, y))
				dep.add(a, b);
		}
	return {label_names(letters), std::move(dep)};
}

DualAlphabet build_rwl_dual(std::span<const Label> letters)
{
	auto dep = build_rwl_dependence(letters);
	LetterRelation weak(letters.size());
	for (Letter a = 0; a < letters.size(); ++a)
		for (Letter b = a + 1; b < letters.size(); ++b) {
			const auto &x = letters[a];
			const auto &y = letters[b];
			if (same_thread(x, y))
				continue;
			bool lock_pair = same_lock(x, y);
			bool write_pair = is_access(x.op) && x.op == Op::write && y.op == Op::write &&
					  x.operand == y.operand;
			if (lock_pair || write_pair)
				weak.add(a, b);
		}
	auto strong = dep.relation() - weak;
	return {label_names(letters), std::move(strong), std::move(weak)};
}

std::vector<Letter> observed_letters(std::span<const Letter> word)
{
	std::vector<Letter> out(word.begin(), word.end());
	std::sort(out.begin(), out.end());
	out.erase(std::unique(out.begin(), out.end()), out.end());
	return out;
}

namespace {

// Maximum independent set over a small graph given as adjacency bitsets over
// local vertex ids.
class IndependentSetSearch {
public:
	explicit IndependentSetSearch(std::vector<std::vector<std::uint64_t>> adj)
		: adj_(std::move(adj)), words_(adj_.empty() ? 0 : adj_[0].size())
	{}

	std::size_t run()
	{
		std::vector<std::uint64_t> all(words_, 0);
		for (std::size_t v = 0; v < adj_.size(); ++v)
			all[v >> 6] |= std::uint64_t{1} << (v & 63);
		best_ = 0;
		search(all, 0);
		return best_;
	}

private:
	static std::size_t popcount(const std::vector<std::uint64_t> &s)
	{
		std::size_t n = 0;
		for (auto w : s)
			n += static_cast<std::size_t>(std::popcount(w));
		return n;
	}

	// Greedy partition of the candidates into cliques; an independent set takes
	// at most one vertex per clique.
	std::size_t clique_cover_bound(std::vector<std::uint64_t> cand) const
	{
		std::size_t cliques = 0;
		while (popcount(cand)) {
			++cliques;
			std::vector<std::uint64_t> clique_cand = cand;
			while (true) {
				std::size_t v = first(clique_cand);
				if (v == npos)
					break;
				cand[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
				for (std::size_t w = 0; w < words_; ++w)
					clique_cand[w] &= adj_[v][w];
				clique_cand[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
			}
		}
		return cliques;
	}

	static constexpr std::size_t npos = static_cast<std::size_t>(-1);

	std::size_t first(const std::vector<std::uint64_t> &s) const
	{
		for (std::size_t w = 0; w < words_; ++w)
			if (s[w])
				return w * 64 + static_cast<std::size_t>(std::countr_zero(s[w]));
		return npos;
	}

	void search(std::vector<std::uint64_t> cand, std::size_t size)
	{
		if (size > best_)
			best_ = size;
		if (size + popcount(cand) <= best_)
			return;
		if (size + clique_cover_bound(cand) <= best_)
			return;
		// Branch on the candidate with the most candidate neighbours.
		std::size_t pick = npos, best_deg = 0;
		for (std::size_t w = 0; w < words_; ++w) {
			auto bits = cand[w];
			while (bits) {
				std::size_t v = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
				bits &= bits - 1;
				std::size_t deg = 0;
				for (std::size_t k = 0; k < words_; ++k)
					deg += static_cast<std::size_t>(std::popcount(cand[k] & adj_[v][k]));
				if (pick == npos || deg > best_deg) {
					pick = v;
					best_deg = deg;
				}
			}
		}
		auto with = cand;
		for (std::size_t k = 0; k < words_; ++k)
			with[k] &= ~adj_[pick][k];
		with[pick >> 6] &= ~(std::uint64_t{1} << (pick & 63));
		search(std::move(with), size + 1);

		if (best_deg == 0)
			return;
		cand[pick >> 6] &= ~(std::uint64_t{1} << (pick & 63));
		search(std::move(cand), size);
	}

	std::vector<std::vector<std::uint64_t>> adj_;
	std::size_t words_;
	std::size_t best_ = 0;
};

} // namespace

std::size_t width(const DualAlphabet &alphabet, std::span<const Letter> observed)
{
	auto letters = observed_letters(observed);
	auto n = letters.size();
	if (n == 0)
		return 0;
	std::size_t words = (n + 63) / 64;
	std::vector<std::vector<std::uint64_t>> adj(n, std::vector<std::uint64_t>(words, 0));
	for (std::size_t i = 0; i < n; ++i)
		for (std::size_t j = 0; j < n; ++j)
			if (i != j && alphabet.strong(letters[i], letters[j]))
				adj[i][j >> 6] |= std::uint64_t{1} << (j & 63);
	return IndependentSetSearch(std::move(adj)).run();
}

} // namespace tracepred
