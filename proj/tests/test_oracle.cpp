#include "support.hpp"

#include "tracepred/predict.hpp"

#include <doctest.h>

using namespace tracepred;
using namespace tracepred::testing;
using oracle::Sequence;

namespace {

std::set<std::string> strings(const oracle::ClosureSet &set, const std::vector<Letter> &w)
{
	std::set<std::string> out;
	for (const auto &u : oracle::words_of(set, w))
		out.insert(string_of(u));
	return out;
}

} // namespace

TEST_CASE("equivalence class")
{
	auto dual = abc_dual();
	auto w = word_of("abacba");
	CHECK(strings(oracle::maz_equiv_class(dual.combined(), w), w) == std::set<std::string>{"abacba", "abcaba"});
	CHECK(oracle::maz_equiv_class(dual.combined(), std::vector<Letter>{}).sequences() ==
	      std::vector<Sequence>{Sequence{}});

	auto s1 = sig1();
	auto cls = oracle::maz_equiv_class(build_rwl_dependence(s1.letters()), s1.word());
	CHECK(cls.contains(Sequence{1, 4, 2, 3, 5, 6}));
	CHECK_FALSE(cls.contains(Sequence{4, 1, 2, 3, 5, 6}));
}

TEST_CASE("ideal closure")
{
	auto dual = abc_dual();
	auto w = word_of("abacba");
	auto ideal = strings(oracle::ideal_closure(dual.combined(), w), w);
	CHECK(ideal == std::set<std::string>{"", "a", "ab", "aba", "abac", "abacb", "abacba", "abc", "abca", "abcab",
					     "abcaba"});
	CHECK_FALSE(ideal.count("abcb"));
	auto a = word_of("a");
	CHECK(strings(oracle::ideal_closure(dual.combined(), a), a) == std::set<std::string>{"", "a"});
}

TEST_CASE("strong closure")
{
	auto dual = abc_dual();
	auto w = word_of("abacba");
	auto strong = strings(oracle::strong_closure(dual, w), w);
	CHECK(strong.count("abcb"));
	CHECK(strong.count("bcb"));
	CHECK_FALSE(strong.count("ba"));

	LetterRelation id(2), none(2);
	id.add(0, 0);
	id.add(1, 1);
	DualAlphabet free_ab({"a", "b"}, id, none);
	auto ab = word_of("ab");
	CHECK(strings(oracle::strong_closure(free_ab, ab), ab) == std::set<std::string>{"", "a", "b", "ab", "ba"});
}

TEST_CASE("strong closure contains the ideal closure")
{
	std::mt19937_64 rng(21);
	for (int i = 0; i < 150; ++i) {
		auto e = random_execution(rng, 1 + i % 9, 3, 2, 1);
		auto dual = build_rwl_dual(e.letters());
		auto w = e.word();
		auto strong = oracle::strong_closure(dual, w);
		CHECK(strong.includes(oracle::ideal_closure(dual.combined(), w)));
		CHECK(oracle::rf_closure(e).includes(strong));
	}
}

TEST_CASE("reads-from closure of SIG4")
{
	auto s4 = sig4();
	auto rf = oracle::rf_closure(s4);
	CHECK(rf.contains(Sequence{1, 5, 6, 7}));
	CHECK(rf.contains(Sequence{5, 6, 1, 7}));
	auto rf_wf = oracle::well_formed_subset(rf, s4);
	CHECK_FALSE(rf_wf.contains(Sequence{1, 4, 5, 6, 7}));
	auto strong = oracle::strong_closure(build_rwl_dual(s4.letters()), s4.word());
	CHECK_FALSE(strong.contains(Sequence{1, 5, 6, 7}));
}

TEST_CASE("correct, sync-preserving and conflict-preserving reorderings")
{
	auto s2 = sig2();
	auto cr2 = oracle::correct_reorderings(s2);
	CHECK(cr2.contains(Sequence{4, 5, 1, 6}));
	CHECK(cr2.contains(Sequence{1, 2, 3, 4, 5, 6}));
	auto cp2 = oracle::confp_reorderings(s2);
	CHECK(cp2.contains(Sequence{1, 4, 5, 6}));
	CHECK(cp2.contains(Sequence{}));

	auto s3 = sig3();
	CHECK(oracle::correct_reorderings(s3).contains(Sequence{1, 5}));
	CHECK(oracle::syncp_reorderings(s3).contains(Sequence{1, 5}));

	// reversing two same-lock acquires leaves the sync-preserving set
	auto s1 = sig1();
	CHECK(oracle::correct_reorderings(s1).contains(Sequence{4, 5, 6, 1, 2, 3}));
	CHECK_FALSE(oracle::syncp_reorderings(s1).contains(Sequence{4, 5, 6, 1, 2, 3}));
}

TEST_CASE("closure sets are permutations of event subsets")
{
	std::mt19937_64 rng(4);
	for (int i = 0; i < 120; ++i) {
		auto e = random_execution(rng, 1 + i % 8, 2 + i % 2, 2, 1);
		auto dual = build_rwl_dual(e.letters());
		auto w = e.word();
		std::vector<oracle::ClosureSet> sets{oracle::maz_equiv_class(dual.combined(), w),
						     oracle::ideal_closure(dual.combined(), w),
						     oracle::strong_closure(dual, w),
						     oracle::rf_closure(e),
						     oracle::correct_reorderings(e),
						     oracle::syncp_reorderings(e),
						     oracle::confp_reorderings(e)};
		for (const auto &set : sets)
			for (auto seq : set.sequences()) {
				std::sort(seq.begin(), seq.end());
				CHECK(std::adjacent_find(seq.begin(), seq.end()) == seq.end());
				CHECK((seq.empty() || (seq.front() >= 1 && seq.back() <= e.size())));
			}
		CHECK(sets[5].includes(sets[6]));
		CHECK(sets[4].includes(sets[5]));
	}
}

TEST_CASE("projection of sync-preserving reorderings is conflict-preserving")
{
	std::mt19937_64 rng(8);
	for (int i = 0; i < 120; ++i) {
		auto e = random_execution(rng, 2 + i % 7, 2 + i % 2, 2, 2);
		auto confp = oracle::confp_reorderings(e);
		for (auto seq : oracle::syncp_reorderings(e).sequences()) {
			std::sort(seq.begin(), seq.end());
			CHECK(confp.contains(seq));
		}
	}
}

TEST_CASE("strong closure elements are equivalent to strong ideals")
{
	std::mt19937_64 rng(12);
	for (int i = 0; i < 120; ++i) {
		auto e = random_execution(rng, 1 + i % 8, 2 + i % 2, 2, 1);
		auto dual = build_rwl_dual(e.letters());
		auto combined = dual.combined();
		auto w = e.word();
		auto ideals = enumerate_strong_ideals(dual, w);
		for (const auto &seq : oracle::strong_closure(dual, w).sequences()) {
			SubsequenceMask m(w.size());
			for (auto p : seq)
				m.keep(p);
			CHECK(std::find(ideals.begin(), ideals.end(), m) != ideals.end());
			std::vector<Letter> u, v;
			for (auto p : seq)
				u.push_back(w[p - 1]);
			for (auto p : m.indices())
				v.push_back(w[p - 1]);
			CHECK(trace_equivalent(combined, u, v));
		}
	}
}

TEST_CASE("bound guard")
{
	std::vector<Label> labels(12, Label{"t1", Op::write, "x"});
	auto e = Execution::from_labels(labels);
	CHECK_THROWS_AS(oracle::rf_closure(e), oracle::BoundExceeded);
	CHECK_THROWS_AS(oracle::correct_reorderings(e), oracle::BoundExceeded);
	CHECK_THROWS_AS(oracle::correct_reorderings(e, 20), std::invalid_argument);
	CHECK(oracle::correct_reorderings(e, 12).size() == 13);
	auto dep = build_rwl_dependence(e.letters());
	CHECK_THROWS_AS(oracle::maz_equiv_class(dep, e.word()), oracle::BoundExceeded);
}

TEST_CASE("packing")
{
	Sequence s{3, 1, 15, 2};
	CHECK(oracle::unpack(oracle::pack(s)) == s);
	CHECK(oracle::unpack(oracle::pack(Sequence{})).empty());
}
