#pragma once

#include "tracepred/trace.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tracepred {

/// Binary relation over letters 0..n-1, stored as a bit matrix.
class LetterRelation {
public:
	LetterRelation() = default;
	explicit LetterRelation(std::size_t letters);

	std::size_t size() const { return n_; }
	bool contains(Letter a, Letter b) const
	{
		return (bits_[a * stride_ + (b >> 6)] >> (b & 63)) & 1U;
	}
	/// Adds (a,b) and (b,a).
	void add(Letter a, Letter b);
	void remove(Letter a, Letter b);

	bool is_symmetric() const;
	bool is_reflexive() const;
	bool is_irreflexive() const;

	/// Bitset of letters related to `a` (stride() words).
	std::span<const std::uint64_t> row(Letter a) const { return {&bits_[a * stride_], stride_}; }
	std::size_t stride() const { return stride_; }

	LetterRelation operator|(const LetterRelation &other) const;
	LetterRelation operator-(const LetterRelation &other) const;
	bool intersects(const LetterRelation &other) const;
	friend bool operator==(const LetterRelation &, const LetterRelation &) = default;

private:
	std::size_t n_ = 0;
	std::size_t stride_ = 0;
	std::vector<std::uint64_t> bits_;
};

/// A finite alphabet with a reflexive, symmetric dependence relation.
class ConcurrentAlphabet {
public:
	ConcurrentAlphabet() = default;
	/// Throws std::invalid_argument unless `dependent` is reflexive and symmetric.
	ConcurrentAlphabet(std::vector<std::string> names, LetterRelation dependent);

	std::size_t size() const { return names_.size(); }
	const std::string &name(Letter a) const { return names_.at(a); }
	std::span<const std::string> names() const { return names_; }
	std::optional<Letter> find(std::string_view name) const;

	bool dependent(Letter a, Letter b) const { return dependent_.contains(a, b); }
	const LetterRelation &relation() const { return dependent_; }

private:
	std::vector<std::string> names_;
	LetterRelation dependent_;
};

/// A strong (reflexive, symmetric) and a weak (irreflexive, symmetric)
/// dependence over one alphabet. The two relations may overlap.
class DualAlphabet {
public:
	DualAlphabet() = default;
	DualAlphabet(std::vector<std::string> names, LetterRelation strong, LetterRelation weak);

	std::size_t size() const { return names_.size(); }
	const std::string &name(Letter a) const { return names_.at(a); }
	std::span<const std::string> names() const { return names_; }
	std::optional<Letter> find(std::string_view name) const;

	bool strong(Letter a, Letter b) const { return strong_.contains(a, b); }
	bool weak(Letter a, Letter b) const { return weak_.contains(a, b); }
	bool dependent(Letter a, Letter b) const { return strong(a, b) || weak(a, b); }

	const LetterRelation &strong_relation() const { return strong_; }
	const LetterRelation &weak_relation() const { return weak_; }

	/// (letters, strong ∪ weak)
	ConcurrentAlphabet combined() const;

private:
	std::vector<std::string> names_;
	LetterRelation strong_;
	LetterRelation weak_;
};

/// Same-thread pairs, same-lock pairs, and same-location pairs with at least
/// one write. Letter i of the result is letters[i].
ConcurrentAlphabet build_rwl_dependence(std::span<const Label> letters);

/// Weak: cross-thread same-lock pairs and cross-thread same-location write/write
/// pairs. Strong: the rest of the read/write/lock dependence.
DualAlphabet build_rwl_dual(std::span<const Label> letters);

/// Size of the largest set of observed letters with no two strongly dependent
/// letters (exact, branch and bound).
std::size_t width(const DualAlphabet &alphabet, std::span<const Letter> observed);

/// Distinct letters of a word, sorted.
std::vector<Letter> observed_letters(std::span<const Letter> word);

} // namespace tracepred
