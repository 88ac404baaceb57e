#include "tracepred/monitor.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace tracepred {

OrderSummary::OrderSummary(const ConcurrentAlphabet &alphabet, std::span<const Letter> tracked)
{
	auto n = alphabet.size();
	auto nb = std::make_shared<std::vector<std::vector<Letter>>>(n);
	for (Letter a = 0; a < n; ++a)
		for (Letter b = 0; b < n; ++b)
			if (alphabet.dependent(a, b))
				(*nb)[a].push_back(b);
	neighbours_ = std::move(nb);
	for (auto t : tracked)
		if (t != kNoLetter && std::find(tracked_.begin(), tracked_.end(), t) == tracked_.end())
			tracked_.push_back(t);
	reset();
}

void OrderSummary::reset()
{
	auto n = neighbours_ ? neighbours_->size() : 0;
	position_ = 0;
	last_.assign(n, 0);
	latest_.assign(n * tracked_.size(), 0);
}

std::size_t OrderSummary::slot(Letter letter) const
{
	auto it = std::find(tracked_.begin(), tracked_.end(), letter);
	return it == tracked_.end() ? npos : static_cast<std::size_t>(it - tracked_.begin());
}

std::vector<std::size_t> OrderSummary::peek(Letter letter) const
{
	auto k = tracked_.size();
	std::vector<std::size_t> v(k, 0);
	for (auto c : (*neighbours_)[letter]) {
		if (last_[c] == 0)
			continue;
		const auto *row = &latest_[c * k];
		for (std::size_t j = 0; j < k; ++j)
			v[j] = std::max(v[j], row[j]);
	}
	if (auto s = slot(letter); s != npos)
		v[s] = position_ + 1;
	return v;
}

const std::vector<std::size_t> &OrderSummary::push(Letter letter)
{
	scratch_ = peek(letter);
	++position_;
	last_[letter] = position_;
	std::copy(scratch_.begin(), scratch_.end(), latest_.begin() + static_cast<std::ptrdiff_t>(letter * tracked_.size()));
	return scratch_;
}

std::vector<std::int64_t> OrderSummary::state_key() const
{
	std::vector<std::int64_t> key;
	key.push_back(static_cast<std::int64_t>(position_));
	for (auto x : last_)
		key.push_back(static_cast<std::int64_t>(x));
	for (auto x : latest_)
		key.push_back(static_cast<std::int64_t>(x));
	return key;
}

std::vector<Label> parse_pattern_labels(std::string_view text)
{
	std::vector<Label> out;
	std::size_t pos = 0;
	while (pos <= text.size()) {
		auto comma = text.find(',', pos);
		auto part = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
		out.push_back(parse_label(part));
		if (comma == std::string_view::npos)
			break;
		pos = comma + 1;
	}
	return out;
}

std::optional<MatchKind> parse_match_kind(std::string_view text)
{
	if (text == "subsequence")
		return MatchKind::subsequence;
	if (text == "adjacent")
		return MatchKind::adjacent;
	return std::nullopt;
}

std::vector<Letter> resolve_pattern(const ConcurrentAlphabet &alphabet, std::span<const Label> labels)
{
	std::vector<Letter> out;
	for (const auto &l : labels)
		out.push_back(alphabet.find(to_string(l)).value_or(kNoLetter));
	return out;
}

namespace {

class PatternMonitor final : public Monitor {
public:
	PatternMonitor(const ConcurrentAlphabet &alphabet, std::span<const Letter> pattern)
		: pattern_(pattern.begin(), pattern.end()), summary_(alphabet, pattern)
	{
		if (pattern_.empty())
			throw std::invalid_argument("pattern must have at least one letter");
		for (auto p : pattern_)
			slots_.push_back(p == kNoLetter ? OrderSummary::npos : summary_.slot(p));
		reset();
	}

	std::unique_ptr<Monitor> clone() const override { return std::make_unique<PatternMonitor>(*this); }

	void reset() override
	{
		summary_.reset();
		partial_.clear();
		partial_.insert(std::vector<std::size_t>(pattern_.size(), 0));
		match_.clear();
	}

	void step(Letter letter) override
	{
		const auto &v = summary_.push(letter);
		if (!match_.empty())
			return;
		auto pos = summary_.position();
		std::vector<std::vector<std::size_t>> grown;
		for (const auto &state : partial_) {
			for (std::size_t k = 0; k < pattern_.size(); ++k) {
				if (pattern_[k] != letter || state[k] != 0)
					continue;
				bool ok = true;
				// a later pattern position must not be filled by an event below this one
				for (std::size_t q = k + 1; q < pattern_.size() && ok; ++q)
					if (state[q] != 0 && v[slots_[q]] >= state[q])
						ok = false;
				if (!ok)
					continue;
				auto next = state;
				next[k] = pos;
				if (std::find(next.begin(), next.end(), 0) == next.end()) {
					match_ = next;
					return;
				}
				grown.push_back(std::move(next));
			}
		}
		for (auto &g : grown)
			partial_.insert(std::move(g));
	}

	bool accepting() const override { return !match_.empty(); }
	bool one_pass() const override { return true; }

	std::vector<std::int64_t> state_key() const override
	{
		auto key = summary_.state_key();
		key.push_back(-1);
		for (const auto &s : partial_) {
			for (auto x : s)
				key.push_back(static_cast<std::int64_t>(x));
			key.push_back(-2);
		}
		for (auto x : match_)
			key.push_back(static_cast<std::int64_t>(x));
		return key;
	}

	std::vector<std::size_t> match() const override { return match_; }

private:
	std::vector<Letter> pattern_;
	std::vector<std::size_t> slots_;
	OrderSummary summary_;
	std::set<std::vector<std::size_t>> partial_;
	std::vector<std::size_t> match_;
};

// An a-event e1 can be placed immediately before a b-event e2 iff e2 is not
// below e1 and no event lies strictly between them. Because same-letter events
// are totally ordered, only the latest a (resp. b) event has to be examined when
// a b (resp. a) event arrives.
class AdjacencyMonitor final : public Monitor {
public:
	AdjacencyMonitor(const ConcurrentAlphabet &alphabet, Letter first, Letter second)
		: first_(first), second_(second)
	{
		if (first == second)
			throw std::invalid_argument("adjacency monitor needs two distinct letters");
		std::vector<Letter> tracked;
		if (first != kNoLetter)
			tracked.push_back(first);
		if (second != kNoLetter)
			tracked.push_back(second);
		summary_ = OrderSummary(alphabet, tracked);
		reset();
	}

	std::unique_ptr<Monitor> clone() const override { return std::make_unique<AdjacencyMonitor>(*this); }

	void reset() override
	{
		summary_.reset();
		match_.clear();
	}

	void step(Letter letter) override
	{
		if (!match_.empty() || first_ == kNoLetter || second_ == kNoLetter) {
			summary_.push(letter);
			return;
		}
		auto v = summary_.peek(letter);
		auto pos = summary_.position() + 1;
		auto a_slot = summary_.slot(first_);
		auto b_slot = summary_.slot(second_);
		if (letter == second_) {
			auto e1 = summary_.last(first_);
			if (e1 != 0) {
				if (v[a_slot] < e1) {
					match_ = {e1, pos};
				} else if (immediately_below(e1, letter)) {
					match_ = {e1, pos};
				}
			}
		} else if (letter == first_) {
			auto e2 = summary_.last(second_);
			if (e2 != 0 && v[b_slot] < e2)
				match_ = {pos, e2};
		}
		summary_.push(letter);
	}

	bool accepting() const override { return !match_.empty(); }
	bool one_pass() const override { return true; }

	std::vector<std::int64_t> state_key() const override
	{
		auto key = summary_.state_key();
		key.push_back(-1);
		for (auto x : match_)
			key.push_back(static_cast<std::int64_t>(x));
		return key;
	}

	std::vector<std::size_t> match() const override { return match_; }

private:
	// e1 is below the incoming event; is it a direct cover?
	bool immediately_below(std::size_t e1, Letter incoming) const
	{
		auto a_slot = summary_.slot(first_);
		for (auto c : summary_.neighbours(incoming)) {
			auto z = summary_.last(c);
			if (z == 0 || z == e1)
				continue;
			if (summary_.latest(c)[a_slot] >= e1)
				return false;
		}
		return true;
	}

	Letter first_;
	Letter second_;
	OrderSummary summary_;
	std::vector<std::size_t> match_;
};

class WellFormednessMonitor final : public Monitor {
public:
	explicit WellFormednessMonitor(std::span<const Label> letters)
	{
		std::unordered_map<std::string, std::uint32_t> threads, locks;
		for (const auto &l : letters) {
			auto t = threads.emplace(l.thread, static_cast<std::uint32_t>(threads.size())).first->second;
			auto d = locks.emplace(l.operand, static_cast<std::uint32_t>(locks.size())).first->second;
			letters_.push_back({t, l.op, d});
		}
	}

	std::unique_ptr<Monitor> clone() const override { return std::make_unique<WellFormednessMonitor>(*this); }

	void reset() override
	{
		locks_.reset();
		violated_ = false;
	}

	void step(Letter letter) override
	{
		if (violated_)
			return;
		const auto &l = letters_.at(letter);
		if (locks_.step(l.thread, l.op, l.operand))
			violated_ = true;
	}

	bool accepting() const override { return !violated_; }
	bool one_pass() const override { return true; }

	std::vector<std::int64_t> state_key() const override
	{
		std::vector<std::int64_t> key{violated_ ? 1 : 0};
		for (auto o : locks_.owners())
			key.push_back(o);
		return key;
	}

private:
	struct Info {
		std::uint32_t thread;
		Op op;
		std::uint32_t operand;
	};
	std::vector<Info> letters_;
	LockDiscipline locks_;
	bool violated_ = false;
};

class ProductMonitor final : public Monitor {
public:
	ProductMonitor(std::unique_ptr<Monitor> a, std::unique_ptr<Monitor> b) : a_(std::move(a)), b_(std::move(b))
	{
		if (!a_ || !b_)
			throw std::invalid_argument("conjoin needs two monitors");
	}

	ProductMonitor(const ProductMonitor &other) : a_(other.a_->clone()), b_(other.b_->clone()) {}

	std::unique_ptr<Monitor> clone() const override { return std::make_unique<ProductMonitor>(*this); }

	void reset() override
	{
		a_->reset();
		b_->reset();
	}

	void step(Letter letter) override
	{
		a_->step(letter);
		b_->step(letter);
	}

	bool accepting() const override { return a_->accepting() && b_->accepting(); }
	bool one_pass() const override { return a_->one_pass() && b_->one_pass(); }

	std::vector<std::int64_t> state_key() const override
	{
		auto key = a_->state_key();
		key.push_back(-7);
		auto kb = b_->state_key();
		key.insert(key.end(), kb.begin(), kb.end());
		return key;
	}

	std::vector<std::size_t> match() const override
	{
		if (!accepting())
			return {};
		auto m = a_->match();
		return m.empty() ? b_->match() : m;
	}

private:
	std::unique_ptr<Monitor> a_;
	std::unique_ptr<Monitor> b_;
};

class ConstantMonitor final : public Monitor {
public:
	explicit ConstantMonitor(bool verdict) : verdict_(verdict) {}
	std::unique_ptr<Monitor> clone() const override { return std::make_unique<ConstantMonitor>(*this); }
	void reset() override {}
	void step(Letter) override {}
	bool accepting() const override { return verdict_; }
	bool one_pass() const override { return true; }
	std::vector<std::int64_t> state_key() const override { return {verdict_ ? 1 : 0}; }

private:
	bool verdict_;
};

} // namespace

std::unique_ptr<Monitor> pattern_monitor(const ConcurrentAlphabet &alphabet, std::span<const Letter> pattern)
{
	return std::make_unique<PatternMonitor>(alphabet, pattern);
}

std::unique_ptr<Monitor> adjacency_monitor(const ConcurrentAlphabet &alphabet, Letter first, Letter second)
{
	return std::make_unique<AdjacencyMonitor>(alphabet, first, second);
}

std::unique_ptr<Monitor> wf_monitor(std::span<const Label> letters)
{
	return std::make_unique<WellFormednessMonitor>(letters);
}

std::unique_ptr<Monitor> conjoin(std::unique_ptr<Monitor> first, std::unique_ptr<Monitor> second)
{
	return std::make_unique<ProductMonitor>(std::move(first), std::move(second));
}

std::unique_ptr<Monitor> accept_all() { return std::make_unique<ConstantMonitor>(true); }
std::unique_ptr<Monitor> reject_all() { return std::make_unique<ConstantMonitor>(false); }

bool run_monitor(const Monitor &monitor, std::span<const Letter> word)
{
	auto m = monitor.clone();
	m->reset();
	for (auto l : word)
		m->step(l);
	return m->accepting();
}

} // namespace tracepred
