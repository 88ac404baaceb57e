#include "cli.hpp"

#include "tracepred/alphabet.hpp"
#include "tracepred/confp.hpp"
#include "tracepred/monitor.hpp"
#include "tracepred/oracle.hpp"
#include "tracepred/predict.hpp"
#include "tracepred/trace.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace tracepred::cli {

namespace {

using nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

struct Options {
	std::string input;
	std::string format = "std";
	std::string mode;
	std::string pattern;
	std::string match;
	std::size_t sample = 0;
	std::uint64_t seed = 0;
	std::size_t max_cycle = 2;
	std::string output;
	unsigned threads = 1;
	bool verbose = false;
	bool width = false;
	std::string kind;
	std::size_t bound = oracle::kDefaultBound;
};

TraceFormat parse_format(const std::string &f)
{
	if (f == "std")
		return TraceFormat::std_text;
	if (f == "structured")
		return TraceFormat::structured;
	throw UsageError("unknown format '" + f + "'");
}

Execution load(const Options &o) { return load_trace(o.input, parse_format(o.format)); }

ordered_json index_array(std::span<const EventIndex> xs)
{
	auto a = ordered_json::array();
	for (auto x : xs)
		a.push_back(x);
	return a;
}

ordered_json label_array(const Execution &exec, std::span<const EventIndex> xs)
{
	auto a = ordered_json::array();
	for (auto x : xs)
		a.push_back(to_string(exec.label(x)));
	return a;
}

ordered_json finding(const Execution &exec, std::vector<EventIndex> events, const SubsequenceMask &witness)
{
	ordered_json f;
	f["events"] = index_array(events);
	f["labels"] = label_array(exec, events);
	auto kept = witness.indices();
	f["witness"] = index_array(kept);
	return f;
}

void emit_report(const Options &o, const ordered_json &report, std::ostream &out)
{
	auto text = report.dump(2) + "\n";
	if (o.output.empty()) {
		out << text;
		return;
	}
	std::ofstream f(o.output, std::ios::binary);
	if (!f)
		throw std::runtime_error("cannot write " + o.output);
	f << text;
}

ordered_json report_header(const std::string &command, const std::string &mode, const Execution &exec)
{
	ordered_json r;
	r["schema"] = 1;
	r["command"] = command;
	r["mode"] = mode;
	r["events"] = exec.size();
	return r;
}

int cmd_validate(const Options &o, std::ostream &out)
{
	auto exec = load(o);
	if (auto v = check_well_formed(exec)) {
		out << "violation at event " << v->index << ": " << v->reason << "\n";
		return 1;
	}
	out << exec.size() << " events, " << exec.thread_count() << " threads, well-formed\n";
	return 0;
}

int cmd_stats(const Options &o, std::ostream &out)
{
	auto exec = load(o);
	std::size_t counts[4] = {0, 0, 0, 0};
	for (EventIndex i = 1; i <= exec.size(); ++i)
		++counts[static_cast<int>(exec.event(i).op)];
	ordered_json r;
	r["schema"] = 1;
	r["events"] = exec.size();
	r["threads"] = exec.thread_count();
	r["locks"] = exec.lock_count();
	r["locations"] = exec.location_count();
	r["letters"] = exec.letters().size();
	r["reads"] = counts[0];
	r["writes"] = counts[1];
	r["acquires"] = counts[2];
	r["releases"] = counts[3];
	r["well_formed"] = is_well_formed(exec);
	if (o.width) {
		auto dual = build_rwl_dual(exec.letters());
		r["width"] = width(dual, exec.word());
	}
	emit_report(o, r, out);
	return 0;
}

PredictMode predict_mode(const Options &o)
{
	auto kind = parse_closure_kind(o.mode);
	if (!kind)
		throw UsageError("mode '" + o.mode + "' is not valid here");
	PredictMode mode;
	mode.kind = *kind;
	mode.well_formed_retrofit = true;
	if (o.sample > 0) {
		if (*kind == ClosureKind::maz)
			throw UsageError("--sample needs --mode strong or strong-rf");
		mode.sampling = Sampling{o.seed, o.sample};
	}
	return mode;
}

int cmd_race(const Options &o, std::ostream &out)
{
	auto exec = load(o);
	if (auto v = check_well_formed(exec))
		throw std::invalid_argument("execution is not well-formed at event " + std::to_string(v->index) +
					    ": " + v->reason);
	auto report = report_header("race", o.mode, exec);
	auto findings = ordered_json::array();
	ordered_json counts;

	if (o.mode == "confp") {
		auto analysis = confp_races(exec, o.threads);
		for (const auto &r : analysis.races)
			findings.push_back(finding(exec, {r.first, r.second}, r.witness));
		counts["racing_events"] = analysis.races.size();
		counts["pairs_checked"] = analysis.pairs_checked;
	} else {
		auto mode = predict_mode(o);
		auto alphabet = build_rwl_dependence(exec.letters());
		auto letters = exec.letters();
		struct Hit {
			std::vector<EventIndex> events;
			SubsequenceMask witness;
		};
		std::vector<Hit> hits;
		std::size_t examined = 0, pairs = 0;
		for (Letter a = 0; a < letters.size(); ++a)
			for (Letter b = a + 1; b < letters.size(); ++b) {
				const auto &x = letters[a], &y = letters[b];
				if (x.thread == y.thread || !is_access(x.op) || !is_access(y.op) ||
				    x.operand != y.operand || (x.op != Op::write && y.op != Op::write))
					continue;
				++pairs;
				for (auto [p, q] : {std::pair{a, b}, std::pair{b, a}}) {
					auto monitor = adjacency_monitor(alphabet, p, q);
					auto v = predict(exec, *monitor, mode);
					examined += v.masks_examined;
					if (v.found) {
						auto ev = v.match;
						std::sort(ev.begin(), ev.end());
						hits.push_back({ev, v.witness});
						break;
					}
				}
			}
		std::sort(hits.begin(), hits.end(), [](const Hit &l, const Hit &r) {
			return std::pair(l.events[1], l.events[0]) < std::pair(r.events[1], r.events[0]);
		});
		for (const auto &h : hits)
			findings.push_back(finding(exec, h.events, h.witness));
		counts["racing_letter_pairs"] = hits.size();
		counts["letter_pairs_checked"] = pairs;
		counts["masks_examined"] = examined;
	}
	report["findings"] = findings;
	report["counts"] = counts;
	emit_report(o, report, out);
	return findings.empty() ? 0 : 1;
}

int cmd_deadlock(const Options &o, std::ostream &out)
{
	if (o.mode != "confp")
		throw UsageError("deadlock analysis requires --mode confp");
	auto exec = load(o);
	auto analysis = confp_deadlocks(exec, o.max_cycle, o.threads);
	auto report = report_header("deadlock", o.mode, exec);
	auto findings = ordered_json::array();
	std::set<std::vector<std::string>> seen;
	for (const auto &d : analysis.deadlocks) {
		if (!o.verbose && !seen.insert(d.signature).second)
			continue;
		auto f = finding(exec, d.pattern.acquires, d.witness);
		auto locks = ordered_json::array();
		for (auto l : d.pattern.locks)
			locks.push_back(exec.operand_name(l));
		f["locks"] = locks;
		findings.push_back(f);
	}
	report["findings"] = findings;
	report["counts"] = {{"distinct_deadlocks", analysis.distinct}, {"instances", analysis.deadlocks.size()}};
	emit_report(o, report, out);
	return findings.empty() ? 0 : 1;
}

int cmd_pattern(const Options &o, std::ostream &out)
{
	if (o.mode == "confp")
		throw UsageError("--mode confp is only available for race and deadlock analysis");
	if (o.pattern.empty())
		throw UsageError("--pattern is required");
	auto kind = parse_match_kind(o.match);
	if (!kind)
		throw UsageError("--match must be 'adjacent' or 'subsequence'");
	auto labels = parse_pattern_labels(o.pattern);
	auto mode = predict_mode(o);
	auto exec = load(o);

	auto alphabet = build_rwl_dependence(exec.letters());
	auto letters = resolve_pattern(alphabet, labels);
	std::unique_ptr<Monitor> monitor;
	if (*kind == MatchKind::adjacent) {
		if (labels.size() != 2)
			throw UsageError("adjacent matching takes exactly two labels");
		if (labels[0] == labels[1])
			throw UsageError("adjacent matching needs two distinct labels");
		monitor = adjacency_monitor(alphabet, letters[0], letters[1]);
	} else {
		monitor = pattern_monitor(alphabet, letters);
	}
	auto verdict = predict(exec, *monitor, mode);

	auto report = report_header("pattern", o.mode, exec);
	report["pattern"] = o.pattern;
	report["match"] = o.match;
	if (mode.sampling)
		report["sampling"] = {{"budget", o.sample}, {"seed", o.seed}};
	auto findings = ordered_json::array();
	if (verdict.found)
		findings.push_back(finding(exec, verdict.match, verdict.witness));
	report["findings"] = findings;
	report["counts"] = {{"masks_examined", verdict.masks_examined}};
	emit_report(o, report, out);
	return verdict.found ? 1 : 0;
}

int cmd_oracle(const Options &o, std::ostream &out)
{
	if (o.bound > oracle::kMaxBound)
		throw UsageError("--bound may not exceed " + std::to_string(oracle::kMaxBound));
	auto exec = load(o);
	auto word = exec.word();
	oracle::ClosureSet set;
	if (o.kind == "equiv")
		set = oracle::maz_equiv_class(build_rwl_dependence(exec.letters()), word, o.bound);
	else if (o.kind == "ideal")
		set = oracle::ideal_closure(build_rwl_dependence(exec.letters()), word, o.bound);
	else if (o.kind == "strong")
		set = oracle::strong_closure(build_rwl_dual(exec.letters()), word, o.bound);
	else if (o.kind == "rf")
		set = oracle::rf_closure(exec, o.bound);
	else if (o.kind == "creorder")
		set = oracle::correct_reorderings(exec, o.bound);
	else if (o.kind == "syncp")
		set = oracle::syncp_reorderings(exec, o.bound);
	else if (o.kind == "confp")
		set = oracle::confp_reorderings(exec, o.bound);
	else
		throw UsageError("unknown closure kind '" + o.kind + "'");
	for (const auto &seq : set.sequences()) {
		out << '[';
		for (std::size_t i = 0; i < seq.size(); ++i)
			out << (i ? "," : "") << seq[i];
		out << "]\n";
	}
	return 0;
}

void add_input(CLI::App *cmd, Options &o)
{
	cmd->add_option("--input", o.input, "Trace file")->required()->check(CLI::ExistingFile);
	cmd->add_option("--format", o.format, "Trace format")
		->check(CLI::IsMember({"std", "structured"}))
		->capture_default_str();
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
	CLI::App app{"Predictive analysis of concurrent execution traces", "tracepred"};
	app.require_subcommand(1);
	Options o;

	auto *trace = app.add_subcommand("trace", "Trace utilities");
	trace->require_subcommand(1);
	auto *validate = trace->add_subcommand("validate", "Check lock discipline");
	add_input(validate, o);
	auto *stats = trace->add_subcommand("stats", "Print trace statistics as JSON");
	add_input(stats, o);
	stats->add_flag("--width", o.width, "Also compute the strong-dependence width");

	auto *analyze = app.add_subcommand("analyze", "Predictive analyses");
	analyze->require_subcommand(1);
	auto *race = analyze->add_subcommand("race", "Data races");
	auto *deadlock = analyze->add_subcommand("deadlock", "Deadlocks (confp mode)");
	auto *pattern = analyze->add_subcommand("pattern", "Event patterns");
	std::string race_mode = "confp", deadlock_mode = "confp", pattern_mode = "strong-rf";
	for (auto [cmd, mode] : {std::pair{race, &race_mode}, std::pair{deadlock, &deadlock_mode},
				 std::pair{pattern, &pattern_mode}}) {
		add_input(cmd, o);
		cmd->add_option("--mode", *mode, "Reordering semantics")
			->check(CLI::IsMember({"maz", "strong", "strong-rf", "confp"}))
			->capture_default_str();
		cmd->add_option("--output", o.output, "Write the report here instead of stdout");
		cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1u, 256u))
			->capture_default_str();
		cmd->add_flag("--verbose", o.verbose, "List every confirmed instance");
	}
	for (auto *cmd : {race, pattern}) {
		cmd->add_option("--sample", o.sample, "Sampled prefixes (0 = exhaustive)")->capture_default_str();
		cmd->add_option("--seed", o.seed, "Sampling seed")->capture_default_str();
	}
	pattern->add_option("--pattern", o.pattern, "Comma-separated labels, e.g. t1|w|y,t2|r|y");
	pattern->add_option("--match", o.match, "adjacent | subsequence")->required();
	deadlock->add_option("--max-cycle", o.max_cycle, "Longest lock cycle")
		->check(CLI::Range(std::size_t{2}, std::size_t{64}))
		->capture_default_str();

	auto *oracle_cmd = app.add_subcommand("oracle", "Brute-force reference closures");
	oracle_cmd->require_subcommand(1);
	auto *closure = oracle_cmd->add_subcommand("closure", "Print a closure set");
	add_input(closure, o);
	closure->add_option("--kind", o.kind, "equiv|ideal|strong|rf|creorder|syncp|confp")
		->required()
		->check(CLI::IsMember({"equiv", "ideal", "strong", "rf", "creorder", "syncp", "confp"}));
	closure->add_option("--bound", o.bound, "Refuse longer traces")->capture_default_str();

	try {
		std::vector<std::string> reversed(args.rbegin(), args.rend());
		app.parse(reversed);
	} catch (const CLI::ParseError &e) {
		auto code = app.exit(e, out, err);
		return code == 0 ? 0 : 2;
	}

	auto started = std::chrono::steady_clock::now();
	int code = 2;
	try {
		if (validate->parsed())
			code = cmd_validate(o, out);
		else if (stats->parsed())
			code = cmd_stats(o, out);
		else if (race->parsed())
			o.mode = race_mode, code = cmd_race(o, out);
		else if (deadlock->parsed())
			o.mode = deadlock_mode, code = cmd_deadlock(o, out);
		else if (pattern->parsed())
			o.mode = pattern_mode, code = cmd_pattern(o, out);
		else if (closure->parsed())
			code = cmd_oracle(o, out);
	} catch (const std::exception &e) {
		err << "error: " << e.what() << "\n";
		return 2;
	}
	if (race->parsed() || deadlock->parsed() || pattern->parsed()) {
		auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
		err << "elapsed_ms " << ms << "\n";
	}
	return code;
}

} // namespace tracepred::cli
