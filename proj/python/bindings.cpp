#include "cli.hpp"
#include "tracepred/confp.hpp"
#include "tracepred/oracle.hpp"
#include "tracepred/predict.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace tracepred;

namespace {

Execution load(const std::string &text, const std::string &format)
{
	if (format == "std")
		return parse_trace(text, TraceFormat::std_text);
	if (format == "structured")
		return parse_trace(text, TraceFormat::structured);
	throw std::invalid_argument("format must be 'std' or 'structured'");
}

py::tuple run_cli(const std::vector<std::string> &args)
{
	std::ostringstream out, err;
	int code;
	{
		py::gil_scoped_release release;
		code = cli::run(args, out, err);
	}
	return py::make_tuple(code, out.str(), err.str());
}

std::optional<py::tuple> well_formed_violation(const std::string &text, const std::string &format)
{
	auto v = check_well_formed(load(text, format));
	if (!v)
		return std::nullopt;
	return py::make_tuple(v->index, v->reason);
}

py::list races(const std::string &text, unsigned threads, const std::string &format)
{
	auto exec = load(text, format);
	RaceAnalysis a;
	{
		py::gil_scoped_release release;
		a = confp_races(exec, threads);
	}
	py::list out;
	for (const auto &r : a.races) {
		py::dict d;
		d["first"] = r.first;
		d["second"] = r.second;
		d["witness"] = r.witness.indices();
		out.append(d);
	}
	return out;
}

py::list deadlocks(const std::string &text, std::size_t max_cycle, unsigned threads, const std::string &format)
{
	auto exec = load(text, format);
	DeadlockAnalysis a;
	{
		py::gil_scoped_release release;
		a = confp_deadlocks(exec, max_cycle, threads);
	}
	py::list out;
	for (const auto &r : a.deadlocks) {
		std::vector<std::string> locks;
		for (auto l : r.pattern.locks)
			locks.push_back(exec.operand_name(l));
		py::dict d;
		d["acquires"] = r.pattern.acquires;
		d["locks"] = locks;
		d["witness"] = r.witness.indices();
		out.append(d);
	}
	return out;
}

std::optional<py::dict> predict_pattern(const std::string &text, const std::vector<std::string> &pattern,
					const std::string &match, const std::string &mode, std::size_t sample,
					std::uint64_t seed, const std::string &format)
{
	auto exec = load(text, format);
	auto kind = parse_closure_kind(mode);
	if (!kind)
		throw std::invalid_argument("mode must be 'maz', 'strong' or 'strong-rf'");
	auto match_kind = parse_match_kind(match);
	if (!match_kind)
		throw std::invalid_argument("match must be 'adjacent' or 'subsequence'");
	std::vector<Label> labels;
	for (const auto &p : pattern)
		labels.push_back(parse_label(p));
	auto alphabet = build_rwl_dependence(exec.letters());
	auto letters = resolve_pattern(alphabet, labels);
	std::unique_ptr<Monitor> monitor;
	if (*match_kind == MatchKind::adjacent) {
		if (letters.size() != 2 || labels[0] == labels[1])
			throw std::invalid_argument("adjacent matching takes two distinct labels");
		monitor = adjacency_monitor(alphabet, letters[0], letters[1]);
	} else {
		monitor = pattern_monitor(alphabet, letters);
	}
	PredictMode pm;
	pm.kind = *kind;
	if (sample > 0)
		pm.sampling = Sampling{seed, sample};
	Verdict v;
	{
		py::gil_scoped_release release;
		v = predict(exec, *monitor, pm);
	}
	if (!v.found)
		return std::nullopt;
	py::dict d;
	d["match"] = v.match;
	d["witness"] = v.witness.indices();
	d["masks_examined"] = v.masks_examined;
	return d;
}

std::vector<std::vector<EventIndex>> closure(const std::string &text, const std::string &kind, std::size_t bound,
					     const std::string &format)
{
	auto exec = load(text, format);
	auto word = exec.word();
	oracle::ClosureSet set;
	if (kind == "equiv")
		set = oracle::maz_equiv_class(build_rwl_dependence(exec.letters()), word, bound);
	else if (kind == "ideal")
		set = oracle::ideal_closure(build_rwl_dependence(exec.letters()), word, bound);
	else if (kind == "strong")
		set = oracle::strong_closure(build_rwl_dual(exec.letters()), word, bound);
	else if (kind == "rf")
		set = oracle::rf_closure(exec, bound);
	else if (kind == "creorder")
		set = oracle::correct_reorderings(exec, bound);
	else if (kind == "syncp")
		set = oracle::syncp_reorderings(exec, bound);
	else if (kind == "confp")
		set = oracle::confp_reorderings(exec, bound);
	else
		throw std::invalid_argument("unknown closure kind '" + kind + "'");
	std::vector<std::vector<EventIndex>> out;
	for (const auto &seq : set.sequences())
		out.emplace_back(seq.begin(), seq.end());
	return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
	m.doc() = "Predictive analysis of concurrent traces";
	py::register_exception<TraceError>(m, "TraceError", PyExc_ValueError);
	py::register_exception<oracle::BoundExceeded>(m, "BoundExceeded", PyExc_ValueError);

	m.def("run_cli", &run_cli, py::arg("args"), "Run the command-line tool; returns (exit_code, stdout, stderr).");
	m.def("well_formed_violation", &well_formed_violation, py::arg("text"), py::arg("format") = "std",
	      "None for a well-formed trace, else (event_index, reason).");
	m.def("races", &races, py::arg("text"), py::arg("threads") = 1, py::arg("format") = "std");
	m.def("deadlocks", &deadlocks, py::arg("text"), py::arg("max_cycle") = 2, py::arg("threads") = 1,
	      py::arg("format") = "std");
	m.def("predict_pattern", &predict_pattern, py::arg("text"), py::arg("pattern"),
	      py::arg("match") = "subsequence", py::arg("mode") = "strong-rf", py::arg("sample") = 0,
	      py::arg("seed") = 0, py::arg("format") = "std");
	m.def("closure", &closure, py::arg("text"), py::arg("kind"), py::arg("bound") = oracle::kDefaultBound,
	      py::arg("format") = "std");
}
