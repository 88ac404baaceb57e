#pragma once

// Shared fixtures and generators for the test binaries.

#include "tracepred/alphabet.hpp"
#include "tracepred/monitor.hpp"
#include "tracepred/oracle.hpp"
#include "tracepred/trace.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace tracepred::testing {

inline Execution exec_of(const char *text) { return parse_trace(std::string_view(text)); }

inline Execution sig1()
{
	return exec_of("t1|w|x\nt1|acq|l\nt1|rel|l\nt2|w|x\nt2|acq|l\nt2|rel|l\n");
}
inline Execution sig2()
{
	return exec_of("t1|w|x\nt1|acq|l\nt1|rel|l\nt2|acq|l\nt2|rel|l\nt2|w|x\n");
}
inline Execution sig3()
{
	return exec_of("t1|acq|l1\nt1|acq|l2\nt1|rel|l2\nt1|rel|l1\nt2|acq|l2\nt2|acq|l1\nt2|rel|l1\nt2|rel|l2\n");
}
inline Execution sig4()
{
	return exec_of("t1|w|y\nt1|w|x\nt1|r|x\nt3|r|x\nt2|w|x\nt2|r|x\nt2|r|y\n");
}
// a = t1|w|x, b = t2|w|x, c = t2|w|y: strong {b,c}, weak {a,b}.
inline Execution abacba_trace()
{
	return exec_of("t1|w|x\nt2|w|x\nt1|w|x\nt2|w|y\nt2|w|x\nt1|w|x\n");
}

/// Abstract alphabet {a,b,c} with strong {(b,c)} and weak {(a,b)}.
inline DualAlphabet abc_dual()
{
	LetterRelation strong(3), weak(3);
	for (Letter l = 0; l < 3; ++l)
		strong.add(l, l);
	strong.add(1, 2);
	weak.add(0, 1);
	return {{"a", "b", "c"}, strong, weak};
}

inline std::vector<Letter> word_of(const std::string &s)
{
	std::vector<Letter> w;
	for (char c : s)
		w.push_back(static_cast<Letter>(c - 'a'));
	return w;
}

inline std::string string_of(const std::vector<Letter> &w)
{
	std::string s;
	for (auto l : w)
		s.push_back(static_cast<char>('a' + l));
	return s;
}

/// Every well-formed execution with at most `max_len` events over two threads,
/// two locations and one lock, up to renaming of threads and locations.
inline void for_each_small_execution(std::size_t max_len, const std::function<void(const Execution &)> &visit)
{
	std::vector<Label> seq;
	std::function<void(int, int, int)> rec = [&](int threads, int locations, int owner) {
		visit(Execution::from_labels(seq));
		if (seq.size() == max_len)
			return;
		for (int t = 0; t < std::min(threads + 1, 2); ++t) {
			std::string tn = t == 0 ? "t1" : "t2";
			int nt = std::max(threads, t + 1);
			for (int d = 0; d < std::min(locations + 1, 2); ++d) {
				std::string dn = d == 0 ? "x" : "y";
				int nd = std::max(locations, d + 1);
				for (auto op : {Op::read, Op::write}) {
					seq.push_back({tn, op, dn});
					rec(nt, nd, owner);
					seq.pop_back();
				}
			}
			if (owner < 0) {
				seq.push_back({tn, Op::acquire, "l"});
				rec(nt, locations, t);
				seq.pop_back();
			} else if (owner == t) {
				seq.push_back({tn, Op::release, "l"});
				rec(nt, locations, -1);
				seq.pop_back();
			}
		}
	};
	rec(0, 0, -1);
}

/// A random well-formed execution of exactly `len` events.
inline Execution random_execution(std::mt19937_64 &rng, std::size_t len, int threads, int locations, int locks)
{
	std::vector<Label> seq;
	std::vector<int> owner(static_cast<std::size_t>(locks), -1);
	std::uniform_int_distribution<int> pick_thread(0, threads - 1);
	std::uniform_int_distribution<int> pick_kind(0, 9);
	while (seq.size() < len) {
		int t = pick_thread(rng);
		auto tn = "t" + std::to_string(t + 1);
		int kind = pick_kind(rng);
		if (kind < 7 || locks == 0) {
			std::uniform_int_distribution<int> pick_loc(0, locations - 1);
			auto dn = "x" + std::to_string(pick_loc(rng));
			seq.push_back({tn, kind < 4 ? Op::read : Op::write, dn});
			continue;
		}
		std::uniform_int_distribution<int> pick_lock(0, locks - 1);
		int l = pick_lock(rng);
		auto ln = "l" + std::to_string(l + 1);
		auto &o = owner[static_cast<std::size_t>(l)];
		if (o < 0) {
			o = t;
			seq.push_back({tn, Op::acquire, ln});
		} else if (o == t) {
			o = -1;
			seq.push_back({tn, Op::release, ln});
		}
	}
	return Execution::from_labels(seq);
}

/// Letter words of a closure of `exec`.
inline std::set<std::vector<Letter>> words(const oracle::ClosureSet &set, const Execution &exec)
{
	auto w = exec.word();
	return oracle::words_of(set, w);
}

inline bool contains_subsequence(const std::vector<Letter> &w, const std::vector<Letter> &pattern)
{
	std::size_t k = 0;
	for (auto l : w)
		if (k < pattern.size() && l == pattern[k])
			++k;
	return k == pattern.size();
}

inline bool contains_adjacent(const std::vector<Letter> &w, Letter a, Letter b)
{
	for (std::size_t i = 0; i + 1 < w.size(); ++i)
		if (w[i] == a && w[i + 1] == b)
			return true;
	return false;
}

} // namespace tracepred::testing
