#include "tracepred/mask.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace tracepred {

SubsequenceMask::SubsequenceMask(std::size_t length)
	: length_(length), words_((length + 63) / 64, 0)
{}

SubsequenceMask SubsequenceMask::all(std::size_t length)
{
	SubsequenceMask m(length);
	for (EventIndex i = 1; i <= length; ++i)
		m.keep(i);
	return m;
}

SubsequenceMask SubsequenceMask::from_indices(std::size_t length, std::span<const EventIndex> kept)
{
	SubsequenceMask m(length);
	for (auto i : kept)
		m.keep(i);
	return m;
}

SubsequenceMask SubsequenceMask::from_indices(std::size_t length,
					      std::initializer_list<EventIndex> kept)
{
	return from_indices(length, std::span<const EventIndex>(kept.begin(), kept.size()));
}

void SubsequenceMask::check(EventIndex i) const
{
	if (i < 1 || i > length_)
		throw std::out_of_range("event index " + std::to_string(i) +
					" outside mask of length " + std::to_string(length_));
}

void SubsequenceMask::keep(EventIndex i)
{
	check(i);
	words_[(i - 1) >> 6] |= std::uint64_t{1} << ((i - 1) & 63);
}

void SubsequenceMask::drop(EventIndex i)
{
	check(i);
	words_[(i - 1) >> 6] &= ~(std::uint64_t{1} << ((i - 1) & 63));
}

std::size_t SubsequenceMask::count() const
{
	std::size_t n = 0;
	for (auto w : words_)
		n += static_cast<std::size_t>(std::popcount(w));
	return n;
}

std::vector<EventIndex> SubsequenceMask::indices() const
{
	std::vector<EventIndex> out;
	out.reserve(count());
	for (std::size_t w = 0; w < words_.size(); ++w) {
		auto bits = words_[w];
		while (bits) {
			auto b = static_cast<unsigned>(std::countr_zero(bits));
			out.push_back(static_cast<EventIndex>(w * 64 + b + 1));
			bits &= bits - 1;
		}
	}
	return out;
}

bool SubsequenceMask::intersects(const SubsequenceMask &other) const
{
	auto n = std::min(words_.size(), other.words_.size());
	for (std::size_t w = 0; w < n; ++w)
		if (words_[w] & other.words_[w])
			return true;
	return false;
}

bool SubsequenceMask::is_subset_of(const SubsequenceMask &other) const
{
	for (std::size_t w = 0; w < words_.size(); ++w) {
		auto theirs = w < other.words_.size() ? other.words_[w] : 0;
		if (words_[w] & ~theirs)
			return false;
	}
	return true;
}

SubsequenceMask &SubsequenceMask::operator|=(const SubsequenceMask &other)
{
	if (other.length_ != length_)
		throw std::invalid_argument("mask length mismatch");
	for (std::size_t w = 0; w < words_.size(); ++w)
		words_[w] |= other.words_[w];
	return *this;
}

std::string SubsequenceMask::to_string() const
{
	std::string s = "[";
	bool first = true;
	for (auto i : indices()) {
		if (!first)
			s += ',';
		s += std::to_string(i);
		first = false;
	}
	return s + "]";
}

bool operator<(const SubsequenceMask &a, const SubsequenceMask &b)
{
	if (a.length_ != b.length_)
		return a.length_ < b.length_;
	return a.indices() < b.indices();
}

std::size_t SubsequenceMaskHash::operator()(const SubsequenceMask &m) const noexcept
{
	std::size_t h = std::hash<std::size_t>{}(m.length());
	for (auto w : m.words())
		h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
	return h;
}

} // namespace tracepred
