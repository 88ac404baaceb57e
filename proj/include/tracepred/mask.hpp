#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace tracepred {

/// 1-based position of an event inside an execution. 0 means "no event".
using EventIndex = std::uint32_t;

/// Kept/dropped marking of the events of a host execution.
///
/// A mask is the concrete form of a candidate prefix: the subsequence of the
/// host execution made of the kept events, in host order.
class SubsequenceMask {
public:
	SubsequenceMask() = default;
	explicit SubsequenceMask(std::size_t length);

	static SubsequenceMask all(std::size_t length);
	/// Throws std::out_of_range if an index is outside 1..length.
	static SubsequenceMask from_indices(std::size_t length, std::span<const EventIndex> kept);
	static SubsequenceMask from_indices(std::size_t length, std::initializer_list<EventIndex> kept);

	std::size_t length() const { return length_; }
	std::size_t count() const;
	bool empty() const { return count() == 0; }

	bool contains(EventIndex i) const
	{
		return i >= 1 && i <= length_ && ((words_[(i - 1) >> 6] >> ((i - 1) & 63)) & 1U);
	}
	void keep(EventIndex i);
	void drop(EventIndex i);

	/// Kept indices in increasing order.
	std::vector<EventIndex> indices() const;

	bool intersects(const SubsequenceMask &other) const;
	bool is_subset_of(const SubsequenceMask &other) const;
	SubsequenceMask &operator|=(const SubsequenceMask &other);

	std::span<const std::uint64_t> words() const { return words_; }

	/// "[1,4,5,6]"
	std::string to_string() const;

	friend bool operator==(const SubsequenceMask &, const SubsequenceMask &) = default;
	friend bool operator<(const SubsequenceMask &a, const SubsequenceMask &b);

private:
	void check(EventIndex i) const;

	std::size_t length_ = 0;
	std::vector<std::uint64_t> words_;
};

struct SubsequenceMaskHash {
	std::size_t operator()(const SubsequenceMask &m) const noexcept;
};

} // namespace tracepred
