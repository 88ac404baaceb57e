#include "support.hpp"

#include "tracepred/predict.hpp"

#include <doctest.h>

#include <cmath>

using namespace tracepred;
using namespace tracepred::testing;

namespace {

Letter id(const Execution &e, const char *label) { return *e.find_letter(parse_label(label)); }

SubsequenceMask mask_of(std::size_t n, unsigned bits)
{
	SubsequenceMask m(n);
	for (std::size_t p = 0; p < n; ++p)
		if (bits >> p & 1U)
			m.keep(static_cast<EventIndex>(p + 1));
	return m;
}

std::vector<Letter> kept(const std::vector<Letter> &w, const SubsequenceMask &m)
{
	std::vector<Letter> out;
	for (auto p : m.indices())
		out.push_back(w[p - 1]);
	return out;
}

} // namespace

TEST_CASE("strong mask validity")
{
	auto ab = abacba_trace();
	CHECK(valid_strong_mask(ab, SubsequenceMask::from_indices(6, {1, 2, 4, 5})));
	CHECK_FALSE(valid_strong_mask(ab, SubsequenceMask::from_indices(6, {1, 2, 3, 5})));
	auto s4 = sig4();
	CHECK_FALSE(valid_strong_mask(s4, SubsequenceMask::from_indices(7, {1, 5, 6, 7})));
	CHECK(valid_strong_mask(s4, SubsequenceMask::all(7)));
	CHECK(valid_strong_mask(s4, SubsequenceMask(7)));
	CHECK_THROWS_AS(valid_strong_mask(s4, SubsequenceMask(6)), std::invalid_argument);

	auto dual = abc_dual();
	auto w = word_of("abacba");
	CHECK(valid_strong_mask(dual, w, SubsequenceMask::from_indices(6, {1, 2, 4, 5})));
	CHECK_FALSE(valid_strong_mask(dual, w, SubsequenceMask::from_indices(6, {1, 4})));
}

TEST_CASE("reads-from mask validity")
{
	auto s4 = sig4();
	CHECK(valid_rf_mask(s4, SubsequenceMask::from_indices(7, {1, 5, 6, 7})));
	CHECK_FALSE(valid_rf_mask(s4, SubsequenceMask::from_indices(7, {1, 4, 5, 6, 7})));
	CHECK_FALSE(valid_rf_mask(s4, SubsequenceMask::from_indices(7, {5, 6, 7})));
	CHECK(valid_rf_mask(s4, SubsequenceMask(7)));
	CHECK_THROWS_AS(valid_rf_mask(s4, SubsequenceMask(8)), std::invalid_argument);
}

TEST_CASE("ideal enumeration examples")
{
	auto s3 = sig3();
	auto ideals = enumerate_strong_ideals(s3);
	REQUIRE_FALSE(ideals.empty());
	CHECK(ideals.front().count() == 0);
	CHECK(std::find(ideals.begin(), ideals.end(), SubsequenceMask::from_indices(8, {1, 5})) != ideals.end());

	auto ab = abacba_trace();
	std::size_t valid = 0;
	for (unsigned bits = 0; bits < 64; ++bits)
		valid += valid_strong_mask(ab, mask_of(6, bits));
	CHECK(enumerate_strong_ideals(ab).size() == valid);

	std::size_t visited = for_each_strong_ideal(ab, kUnboundedArity, [](const SubsequenceMask &m) {
		return m.count() < 3;
	});
	CHECK(visited >= 1);
	CHECK(visited < valid);
}

TEST_CASE("ideal enumeration matches brute force")
{
	std::mt19937_64 rng(51);
	for (int trial = 0; trial < 300; ++trial) {
		auto e = random_execution(rng, 1 + trial % 10, 2 + trial % 2, 2, 1);
		auto n = e.size();
		std::set<std::vector<EventIndex>> strong, rf;
		for (unsigned bits = 0; bits < (1U << n); ++bits) {
			auto m = mask_of(n, bits);
			if (valid_strong_mask(e, m))
				strong.insert(m.indices());
			if (valid_rf_mask(e, m))
				rf.insert(m.indices());
		}
		std::set<std::vector<EventIndex>> seen;
		auto count = for_each_strong_ideal(e, kUnboundedArity, [&](const SubsequenceMask &m) {
			CHECK(seen.insert(m.indices()).second);
			return true;
		});
		CHECK(count == strong.size());
		CHECK(seen == strong);

		seen.clear();
		count = for_each_rf_ideal(e, kUnboundedArity, [&](const SubsequenceMask &m) {
			CHECK(seen.insert(m.indices()).second);
			return true;
		});
		CHECK(count == rf.size());
		CHECK(seen == rf);

		// bounded arity yields a growing family of ideals
		std::size_t previous = 0;
		for (std::size_t k = 0; k <= 3; ++k) {
			auto c = for_each_strong_ideal(e, k, [&](const SubsequenceMask &m) {
				CHECK(strong.count(m.indices()));
				return true;
			});
			CHECK(c >= previous);
			double bound = std::pow(static_cast<double>(n + 1), static_cast<double>(k));
			CHECK(static_cast<double>(c) <= bound);
			previous = c;
		}
	}
}

TEST_CASE("prediction examples")
{
	auto s2 = sig2();
	auto d2 = build_rwl_dependence(s2.letters());
	auto race = adjacency_monitor(d2, id(s2, "t1|w|x"), id(s2, "t2|w|x"));
	PredictMode mode;
	auto v = predict(s2, *race, mode);
	CHECK(v.found);
	CHECK(v.witness == SubsequenceMask::from_indices(6, {1, 4, 5, 6}));
	CHECK(v.match == std::vector<EventIndex>{1, 6});
	mode.kind = ClosureKind::maz;
	v = predict(s2, *race, mode);
	CHECK_FALSE(v.found);
	CHECK(v.masks_examined == 1);

	auto s4 = sig4();
	auto d4 = build_rwl_dependence(s4.letters());
	auto adj = adjacency_monitor(d4, id(s4, "t1|w|y"), id(s4, "t2|r|y"));
	mode.kind = ClosureKind::strong;
	CHECK_FALSE(predict(s4, *adj, mode).found);
	mode.kind = ClosureKind::strong_rf;
	v = predict(s4, *adj, mode);
	REQUIRE(v.found);
	CHECK(v.match == std::vector<EventIndex>{1, 7});
	CHECK(v.witness == SubsequenceMask::from_indices(7, {1, 5, 6, 7}));

	// a section of t2 cannot open before t1 releases
	auto s1 = sig1();
	auto d1 = build_rwl_dependence(s1.letters());
	std::vector<Letter> acqs{id(s1, "t2|acq|l"), id(s1, "t1|rel|l")};
	mode.kind = ClosureKind::strong;
	CHECK_FALSE(predict(s1, *pattern_monitor(d1, acqs), mode).found);
	CHECK_FALSE(predict(s1, *reject_all(), mode).found);
	CHECK(predict(s1, *accept_all(), mode).found);
	CHECK(parse_closure_kind("strong-rf") == ClosureKind::strong_rf);
	CHECK(to_string(ClosureKind::maz) == "maz");
	CHECK_FALSE(parse_closure_kind("rf"));
}

TEST_CASE("exhaustive prediction agrees with the closure oracles")
{
	std::mt19937_64 rng(53);
	for (int trial = 0; trial < 250; ++trial) {
		auto e = random_execution(rng, 2 + trial % 7, 2 + trial % 2, 2, 1);
		auto dual = build_rwl_dual(e.letters());
		auto dep = dual.combined();
		auto w = e.word();
		auto strong = words(oracle::well_formed_subset(oracle::strong_closure(dual, w), e), e);
		auto rf = words(oracle::well_formed_subset(oracle::rf_closure(e), e), e);
		std::uniform_int_distribution<EventIndex> pick(1, static_cast<EventIndex>(e.size()));
		std::vector<Letter> pat{e.letter(pick(rng)), e.letter(pick(rng))};
		auto m = pattern_monitor(dep, pat);
		auto any = [&](const auto &set) {
			return std::any_of(set.begin(), set.end(), [&](const auto &u) { return contains_subsequence(u, pat); });
		};
		PredictMode mode;
		auto v = predict(e, *m, mode);
		CHECK(v.found == any(strong));
		if (v.found) {
			CHECK(valid_strong_mask(e, v.witness));
			CHECK(run_monitor(*m, kept(w, v.witness)));
			CHECK(is_well_formed(project(e, v.witness)));
		}
		mode.kind = ClosureKind::strong_rf;
		v = predict(e, *m, mode);
		CHECK(v.found == any(rf));
		if (v.found)
			CHECK(valid_rf_mask(e, v.witness));
	}
}

TEST_CASE("sampling")
{
	auto s2 = sig2();
	Sampling s{7, 20, 0.25};
	auto a = sample_masks(s2, ClosureKind::strong, s);
	auto b = sample_masks(s2, ClosureKind::strong, s);
	REQUIRE(a.size() == 20);
	CHECK(a == b);
	CHECK(a.front() == SubsequenceMask::all(6));
	for (const auto &m : a)
		CHECK(valid_strong_mask(s2, m));
	for (const auto &m : sample_masks(sig4(), ClosureKind::strong_rf, s))
		CHECK(valid_rf_mask(sig4(), m));
	CHECK(sample_masks(s2, ClosureKind::strong, Sampling{1, 5, 0.0}) ==
	      std::vector<SubsequenceMask>(5, SubsequenceMask::all(6)));
	for (const auto &m : sample_masks(s2, ClosureKind::strong, Sampling{1, 5, 1.0}))
		CHECK(valid_strong_mask(s2, m));

	CHECK_THROWS_AS(sample_masks(s2, ClosureKind::maz, s), std::invalid_argument);
	CHECK_THROWS_AS(sample_masks(s2, ClosureKind::strong, Sampling{0, 0, 0.25}), std::invalid_argument);
	CHECK_THROWS_AS(sample_masks(s2, ClosureKind::strong, Sampling{0, 1, 1.5}), std::invalid_argument);
}

TEST_CASE("sampled race prediction over a seed sweep")
{
	auto s2 = sig2();
	auto dep = build_rwl_dependence(s2.letters());
	auto race = adjacency_monitor(dep, id(s2, "t1|w|x"), id(s2, "t2|w|x"));
	std::vector<std::uint64_t> hits;
	for (std::uint64_t seed = 0; seed < 10; ++seed) {
		PredictMode mode;
		mode.sampling = Sampling{seed, 32, 0.25};
		auto v = predict(s2, *race, mode);
		CHECK(v.masks_examined <= 32);
		if (v.found) {
			CHECK(v.witness == SubsequenceMask::from_indices(6, {1, 4, 5, 6}));
			hits.push_back(seed);
		}
	}
	REQUIRE_FALSE(hits.empty());
	CHECK(hits.front() == 0);
}

TEST_CASE("strong prefixes and equivalence")
{
	auto dual = abc_dual();
	auto w = word_of("abacba");
	CHECK(strong_prefix_member(dual, w, word_of("bcb")));
	CHECK(strong_prefix_member(dual, w, word_of("abcb")));
	CHECK(strong_prefix_member(dual, w, word_of("")));
	CHECK_FALSE(strong_prefix_member(dual, w, word_of("ba")));
	CHECK_FALSE(strong_prefix_member(dual, w, word_of("cb")));

	auto combined = dual.combined();
	CHECK(trace_equivalent(combined, word_of("ac"), word_of("ca")));
	CHECK_FALSE(trace_equivalent(combined, word_of("ab"), word_of("ba")));
	CHECK_FALSE(trace_equivalent(combined, word_of("a"), word_of("aa")));

	// every strong ideal of a random word yields a strong prefix
	std::mt19937_64 rng(57);
	for (int trial = 0; trial < 100; ++trial) {
		auto e = random_execution(rng, 1 + trial % 9, 3, 2, 1);
		auto d = build_rwl_dual(e.letters());
		auto ew = e.word();
		for_each_strong_ideal(d, ew, kUnboundedArity, [&](const SubsequenceMask &m) {
			CHECK(strong_prefix_member(d, ew, kept(ew, m)));
			return true;
		});
	}
}
