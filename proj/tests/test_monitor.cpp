#include "support.hpp"

#include <doctest.h>

#include <numeric>

using namespace tracepred;
using namespace tracepred::testing;

namespace {

ConcurrentAlphabet two_letters(bool dependent)
{
	LetterRelation r(2);
	r.add(0, 0);
	r.add(1, 1);
	if (dependent)
		r.add(0, 1);
	return {{"a", "b"}, r};
}

Letter id(const Execution &e, const char *label) { return *e.find_letter(parse_label(label)); }

// below[i][j]: event i is below event j in the dependence order (reflexive).
std::vector<std::vector<bool>> partial_order(const ConcurrentAlphabet &dep, const std::vector<Letter> &w)
{
	auto n = w.size();
	std::vector<std::vector<bool>> below(n, std::vector<bool>(n, false));
	for (std::size_t j = 0; j < n; ++j) {
		below[j][j] = true;
		for (std::size_t i = 0; i < j; ++i)
			if (dep.dependent(w[i], w[j]))
				for (std::size_t k = 0; k <= i; ++k)
					if (below[k][i])
						below[k][j] = true;
	}
	return below;
}

} // namespace

TEST_CASE("order summary matches the transitive closure")
{
	std::mt19937_64 rng(31);
	for (int trial = 0; trial < 1500; ++trial) {
		auto e = random_execution(rng, 1 + trial % 10, 2 + trial % 2, 2, 1);
		auto dep = build_rwl_dependence(e.letters());
		auto w = e.word();
		auto below = partial_order(dep, w);
		std::vector<Letter> tracked(e.letters().size());
		std::iota(tracked.begin(), tracked.end(), 0);
		OrderSummary summary(dep, tracked);
		for (std::size_t j = 0; j < w.size(); ++j) {
			auto v = summary.push(w[j]);
			CHECK(v[summary.slot(w[j])] == j + 1);
			for (std::size_t i = 0; i <= j; ++i) {
				bool via_summary = v[summary.slot(w[i])] >= i + 1;
				CHECK(via_summary == below[i][j]);
			}
		}
	}
}

TEST_CASE("pattern monitor examples")
{
	auto w = std::vector<Letter>{1, 0}; // b a
	std::vector<Letter> ab{0, 1};
	CHECK(run_monitor(*pattern_monitor(two_letters(false), ab), w));
	CHECK_FALSE(run_monitor(*pattern_monitor(two_letters(true), ab), w));
	std::vector<Letter> a{0};
	CHECK(run_monitor(*pattern_monitor(two_letters(true), a), w));
	std::vector<Letter> missing{kNoLetter};
	CHECK_FALSE(run_monitor(*pattern_monitor(two_letters(true), missing), w));

	auto m = pattern_monitor(two_letters(false), ab);
	for (auto l : w)
		m->step(l);
	CHECK(m->match() == std::vector<std::size_t>{2, 1});
}

TEST_CASE("adjacency monitor examples")
{
	auto s1 = sig1();
	auto d1 = build_rwl_dependence(s1.letters());
	auto w1 = s1.word();
	CHECK(run_monitor(*adjacency_monitor(d1, id(s1, "t1|w|x"), id(s1, "t2|w|x")), w1));

	auto s2 = sig2();
	auto d2 = build_rwl_dependence(s2.letters());
	auto w2 = s2.word();
	CHECK_FALSE(run_monitor(*adjacency_monitor(d2, id(s2, "t1|w|x"), id(s2, "t2|w|x")), w2));

	auto single = exec_of("t1|w|x\n");
	auto ds = build_rwl_dependence(single.letters());
	auto ws = single.word();
	CHECK_FALSE(run_monitor(*adjacency_monitor(ds, 0, kNoLetter), ws));
	CHECK_THROWS_AS(adjacency_monitor(ds, 0, 0), std::invalid_argument);
}

TEST_CASE("well-formedness monitor")
{
	auto s2 = sig2();
	auto m = wf_monitor(s2.letters());
	for (auto l : s2.word()) {
		m->step(l);
		CHECK(m->accepting());
	}
	CHECK(m->one_pass());

	auto bad = exec_of("t1|acq|l\nt2|acq|l\n");
	auto mb = wf_monitor(bad.letters());
	mb->step(0);
	CHECK(mb->accepting());
	mb->step(1);
	CHECK_FALSE(mb->accepting());

	// w(x)@t1, acq@t1, acq@t2, rel@t2, w(x)@t2 over SIG2's letters
	std::vector<Letter> rho{id(s2, "t1|w|x"), id(s2, "t1|acq|l"), id(s2, "t2|acq|l"), id(s2, "t2|rel|l"),
				id(s2, "t2|w|x")};
	auto mr = wf_monitor(s2.letters());
	mr->step(rho[0]);
	mr->step(rho[1]);
	CHECK(mr->accepting());
	mr->step(rho[2]);
	CHECK_FALSE(mr->accepting());
	mr->step(rho[3]);
	mr->step(rho[4]);
	CHECK_FALSE(mr->accepting());
}

TEST_CASE("conjunction")
{
	auto s2 = sig2();
	auto dep = build_rwl_dependence(s2.letters());
	std::vector<Letter> rho2{id(s2, "t2|acq|l"), id(s2, "t2|rel|l"), id(s2, "t1|w|x"), id(s2, "t2|w|x")};
	auto both = conjoin(wf_monitor(s2.letters()), adjacency_monitor(dep, id(s2, "t1|w|x"), id(s2, "t2|w|x")));
	CHECK(run_monitor(*both, rho2));
	CHECK_FALSE(run_monitor(*conjoin(accept_all(), reject_all()), rho2));

	std::mt19937_64 rng(2);
	for (int i = 0; i < 200; ++i) {
		auto e = random_execution(rng, 1 + i % 12, 3, 2, 1);
		auto d = build_rwl_dependence(e.letters());
		std::vector<Letter> pat{e.letter(1), e.letter(static_cast<EventIndex>(e.size()))};
		auto m = pattern_monitor(d, pat);
		auto w = e.word();
		CHECK(run_monitor(*conjoin(m->clone(), accept_all()), w) == run_monitor(*m, w));
		CHECK_FALSE(run_monitor(*conjoin(m->clone(), reject_all()), w));
	}
}

TEST_CASE("monitors agree with the equivalence-class oracle")
{
	std::mt19937_64 rng(41);
	std::size_t accepted = 0, total = 0;
	for (int trial = 0; trial < 800; ++trial) {
		auto e = random_execution(rng, 1 + trial % 8, 2 + trial % 2, 2, 1);
		auto dep = build_rwl_dependence(e.letters());
		auto w = e.word();
		auto cls = words(oracle::maz_equiv_class(dep, w), e);
		std::uniform_int_distribution<EventIndex> pick(1, static_cast<EventIndex>(e.size()));
		for (std::size_t len = 1; len <= 3; ++len) {
			std::vector<Letter> pat;
			for (std::size_t k = 0; k < len; ++k)
				pat.push_back(e.letter(pick(rng)));
			bool expected = std::any_of(cls.begin(), cls.end(),
						    [&](const auto &u) { return contains_subsequence(u, pat); });
			CHECK(run_monitor(*pattern_monitor(dep, pat), w) == expected);
			accepted += expected;
			++total;
		}
		for (Letter a = 0; a < e.letters().size(); ++a)
			for (Letter b = 0; b < e.letters().size(); ++b) {
				if (a == b)
					continue;
				bool expected = std::any_of(cls.begin(), cls.end(),
							    [&](const auto &u) { return contains_adjacent(u, a, b); });
				CHECK(run_monitor(*adjacency_monitor(dep, a, b), w) == expected);
			}
	}
	CHECK(accepted > 0);
	CHECK(accepted < total);
}

TEST_CASE("determinism and monotone acceptance")
{
	std::mt19937_64 rng(43);
	for (int trial = 0; trial < 200; ++trial) {
		auto e = random_execution(rng, 5 + trial % 20, 3, 3, 2);
		auto dep = build_rwl_dependence(e.letters());
		auto w = e.word();
		std::vector<std::unique_ptr<Monitor>> monitors;
		monitors.push_back(pattern_monitor(dep, std::vector<Letter>{w.back(), w.front()}));
		if (w.front() != w.back())
			monitors.push_back(adjacency_monitor(dep, w.back(), w.front()));
		monitors.push_back(wf_monitor(e.letters()));
		for (const auto &m : monitors) {
			auto a = m->clone(), b = m->clone();
			a->reset();
			b->reset();
			bool seen = false;
			for (auto l : w) {
				a->step(l);
				b->step(l);
				CHECK(a->state_key() == b->state_key());
				if (m.get() != monitors.back().get()) {
					if (seen)
						CHECK(a->accepting());
					seen = seen || a->accepting();
				}
			}
		}
	}
}

TEST_CASE("pattern parsing")
{
	auto labels = parse_pattern_labels("t1|w|y,t2|r|y");
	REQUIRE(labels.size() == 2);
	CHECK(labels[1] == Label{"t2", Op::read, "y"});
	CHECK_THROWS_AS(parse_pattern_labels("t1|w|y,"), TraceError);
	CHECK(parse_match_kind("adjacent") == MatchKind::adjacent);
	CHECK_FALSE(parse_match_kind("contiguous"));
	auto s4 = sig4();
	auto dep = build_rwl_dependence(s4.letters());
	auto ids = resolve_pattern(dep, parse_pattern_labels("t1|w|y,t9|r|q"));
	CHECK(ids[0] == id(s4, "t1|w|y"));
	CHECK(ids[1] == kNoLetter);
}
