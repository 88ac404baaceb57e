#include "tracepred/trace.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

namespace tracepred {

namespace {

std::string_view trim(std::string_view s)
{
	auto b = s.find_first_not_of(" \t\r");
	if (b == std::string_view::npos)
		return {};
	auto e = s.find_last_not_of(" \t\r");
	return s.substr(b, e - b + 1);
}

// Checks the lock/location namespace split, reporting the first conflicting use.
void check_operand_kinds(std::span<const Label> labels, std::span<const std::size_t> lines)
{
	std::unordered_map<std::string, bool> is_lock;
	for (std::size_t k = 0; k < labels.size(); ++k) {
		const auto &l = labels[k];
		bool lock = is_lock_op(l.op);
		auto [it, inserted] = is_lock.emplace(l.operand, lock);
		if (!inserted && it->second != lock)
			throw TraceError("operand '" + l.operand + "' used as both lock and location",
					 lines.empty() ? 0 : lines[k]);
	}
}

} // namespace

std::string_view op_token(Op op)
{
	switch (op) {
	case Op::read:
		return "r";
	case Op::write:
		return "w";
	case Op::acquire:
		return "acq";
	case Op::release:
		return "rel";
	}
	return "?";
}

std::optional<Op> parse_op(std::string_view token)
{
	if (token == "r")
		return Op::read;
	if (token == "w")
		return Op::write;
	if (token == "acq")
		return Op::acquire;
	if (token == "rel")
		return Op::release;
	return std::nullopt;
}

std::string to_string(const Label &label)
{
	std::string s = label.thread;
	s += '|';
	s += op_token(label.op);
	s += '|';
	s += label.operand;
	return s;
}

Label parse_label(std::string_view text)
{
	text = trim(text);
	auto p1 = text.find('|');
	auto p2 = p1 == std::string_view::npos ? p1 : text.find('|', p1 + 1);
	if (p2 == std::string_view::npos || text.find('|', p2 + 1) != std::string_view::npos)
		throw TraceError("expected <thread>|<op>|<operand>, got '" + std::string(text) + "'");
	auto thread = trim(text.substr(0, p1));
	auto op = trim(text.substr(p1 + 1, p2 - p1 - 1));
	auto operand = trim(text.substr(p2 + 1));
	if (thread.empty() || operand.empty())
		throw TraceError("empty thread or operand in '" + std::string(text) + "'");
	auto parsed = parse_op(op);
	if (!parsed)
		throw TraceError("unknown operation '" + std::string(op) + "'");
	return Label{std::string(thread), *parsed, std::string(operand)};
}

Execution Execution::from_labels(std::span<const Label> labels)
{
	check_operand_kinds(labels, {});

	Execution exec;
	std::unordered_map<std::string, std::uint32_t> threads;
	std::unordered_map<std::string, std::uint32_t> operands;
	exec.events_.reserve(labels.size());
	for (const auto &l : labels) {
		auto [t, tnew] = threads.emplace(l.thread, static_cast<std::uint32_t>(threads.size()));
		if (tnew)
			exec.thread_names_.push_back(l.thread);
		auto [d, dnew] = operands.emplace(l.operand, static_cast<std::uint32_t>(operands.size()));
		if (dnew) {
			exec.operand_names_.push_back(l.operand);
			exec.operand_is_lock_.push_back(is_lock_op(l.op));
		}
		auto key = to_string(l);
		auto [lt, lnew] = exec.letter_ids_.emplace(key, static_cast<Letter>(exec.letters_.size()));
		if (lnew)
			exec.letters_.push_back(l);
		exec.events_.push_back(Event{ThreadId{t->second}, l.op, OperandId{d->second}, lt->second});
	}
	exec.derive();
	return exec;
}

void Execution::derive()
{
	auto n = events_.size();
	thread_events_.assign(thread_names_.size(), {});
	lock_events_.assign(operand_names_.size(), {});
	thread_pred_.assign(n + 1, 0);
	thread_pos_.assign(n + 1, 0);
	rf_.assign(n + 1, 0);
	held_.assign(n + 1, {});
	match_rel_.assign(n + 1, 0);

	std::vector<EventIndex> last_write(operand_names_.size(), 0);
	std::vector<std::vector<OperandId>> held_now(thread_names_.size());
	// open_acq[thread][lock] for matching releases
	std::vector<std::unordered_map<std::uint32_t, EventIndex>> open_acq(thread_names_.size());

	for (EventIndex i = 1; i <= n; ++i) {
		const auto &e = events_[i - 1];
		auto t = to_index(e.thread);
		auto d = to_index(e.operand);
		auto &po = thread_events_[t];
		thread_pred_[i] = po.empty() ? 0 : po.back();
		thread_pos_[i] = po.size();
		po.push_back(i);
		held_[i] = held_now[t];

		switch (e.op) {
		case Op::read:
			rf_[i] = last_write[d];
			break;
		case Op::write:
			last_write[d] = i;
			break;
		case Op::acquire: {
			lock_events_[d].push_back(i);
			auto &h = held_now[t];
			if (std::find(h.begin(), h.end(), e.operand) == h.end()) {
				h.insert(std::upper_bound(h.begin(), h.end(), e.operand), e.operand);
			}
			open_acq[t][d] = i;
			break;
		}
		case Op::release: {
			lock_events_[d].push_back(i);
			auto &h = held_now[t];
			h.erase(std::remove(h.begin(), h.end(), e.operand), h.end());
			auto it = open_acq[t].find(d);
			if (it != open_acq[t].end()) {
				match_rel_[it->second] = i;
				open_acq[t].erase(it);
			}
			break;
		}
		}
	}
}

Label Execution::label(EventIndex i) const { return letters_.at(event(i).letter); }

std::vector<Label> Execution::labels() const
{
	std::vector<Label> out;
	out.reserve(events_.size());
	for (const auto &e : events_)
		out.push_back(letters_[e.letter]);
	return out;
}

std::vector<Letter> Execution::word() const
{
	std::vector<Letter> w;
	w.reserve(events_.size());
	for (const auto &e : events_)
		w.push_back(e.letter);
	return w;
}

std::optional<Letter> Execution::find_letter(const Label &label) const
{
	auto it = letter_ids_.find(to_string(label));
	if (it == letter_ids_.end())
		return std::nullopt;
	return it->second;
}

std::size_t Execution::lock_count() const
{
	return static_cast<std::size_t>(std::count(operand_is_lock_.begin(), operand_is_lock_.end(), true));
}

std::size_t Execution::location_count() const { return operand_names_.size() - lock_count(); }

std::optional<EventIndex> Execution::reads_from(EventIndex i) const
{
	if (event(i).op != Op::read || rf_.at(i) == 0)
		return std::nullopt;
	return rf_[i];
}

Execution parse_trace(std::string_view text, TraceFormat format)
{
	std::vector<Label> labels;
	std::vector<std::size_t> lines;

	if (format == TraceFormat::std_text) {
		std::size_t line_no = 0;
		std::size_t pos = 0;
		while (pos <= text.size()) {
			auto nl = text.find('\n', pos);
			auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
			++line_no;
			auto body = trim(line);
			if (!body.empty() && body.front() != '#') {
				try {
					labels.push_back(parse_label(body));
				} catch (const TraceError &err) {
					throw TraceError(err.what(), line_no);
				}
				lines.push_back(line_no);
			}
			if (nl == std::string_view::npos)
				break;
			pos = nl + 1;
		}
	} else {
		nlohmann::json doc;
		try {
			doc = nlohmann::json::parse(text);
		} catch (const nlohmann::json::exception &err) {
			throw TraceError(std::string("structured trace: ") + err.what());
		}
		if (!doc.is_array())
			throw TraceError("structured trace must be an array of records");
		std::size_t record = 0;
		for (const auto &rec : doc) {
			++record;
			auto field = [&](const char *key) -> std::string {
				if (!rec.is_object() || !rec.contains(key) || !rec[key].is_string())
					throw TraceError(std::string("record missing string field '") + key + "'", record);
				return rec[key].get<std::string>();
			};
			auto t = field("t");
			auto op = field("op");
			auto d = field("d");
			auto parsed = parse_op(op);
			if (!parsed)
				throw TraceError("unknown operation '" + op + "'", record);
			if (t.empty() || d.empty())
				throw TraceError("empty thread or operand", record);
			labels.push_back(Label{std::move(t), *parsed, std::move(d)});
			lines.push_back(record);
		}
	}

	check_operand_kinds(labels, lines);
	return Execution::from_labels(labels);
}

Execution parse_trace(std::istream &in, TraceFormat format)
{
	std::ostringstream buf;
	buf << in.rdbuf();
	return parse_trace(buf.str(), format);
}

Execution load_trace(const std::filesystem::path &path, TraceFormat format)
{
	std::ifstream in(path);
	if (!in)
		throw std::runtime_error("cannot open trace file '" + path.string() + "'");
	return parse_trace(in, format);
}

std::string render_trace(const Execution &exec, TraceFormat format)
{
	if (format == TraceFormat::structured) {
		auto arr = nlohmann::json::array();
		for (const auto &l : exec.labels())
			arr.push_back({{"t", l.thread}, {"op", op_token(l.op)}, {"d", l.operand}});
		return arr.dump() + "\n";
	}
	std::string out;
	for (const auto &l : exec.labels()) {
		out += to_string(l);
		out += '\n';
	}
	return out;
}

std::optional<std::string> LockDiscipline::step(std::uint32_t thread, Op op, std::uint32_t lock,
						std::string_view lock_name)
{
	if (!is_lock_op(op))
		return std::nullopt;
	if (lock >= owner_.size())
		owner_.resize(lock + 1, kFree);
	auto name = lock_name.empty() ? std::to_string(lock) : std::string(lock_name);
	if (op == Op::acquire) {
		if (owner_[lock] != kFree)
			return "lock " + name + " already held";
		owner_[lock] = thread + 1;
		return std::nullopt;
	}
	if (owner_[lock] != thread + 1)
		return "release without acquire";
	owner_[lock] = kFree;
	return std::nullopt;
}

std::optional<WfViolation> check_well_formed(const Execution &exec)
{
	LockDiscipline locks;
	for (EventIndex i = 1; i <= exec.size(); ++i) {
		const auto &e = exec.event(i);
		if (auto why = locks.step(to_index(e.thread), e.op, to_index(e.operand),
					  exec.operand_name(e.operand)))
			return WfViolation{i, *why};
	}
	return std::nullopt;
}

bool is_well_formed(const Execution &exec) { return !check_well_formed(exec).has_value(); }

std::vector<std::pair<EventIndex, std::optional<EventIndex>>> reads_from(const Execution &exec)
{
	std::vector<std::pair<EventIndex, std::optional<EventIndex>>> out;
	for (EventIndex i = 1; i <= exec.size(); ++i)
		if (exec.event(i).op == Op::read)
			out.emplace_back(i, exec.reads_from(i));
	return out;
}

std::vector<OperandId> held_locks_at(const Execution &exec, EventIndex i)
{
	if (i < 1 || i > exec.size())
		throw std::out_of_range("event index " + std::to_string(i) + " out of range 1.." +
					std::to_string(exec.size()));
	auto h = exec.held_locks(i);
	return {h.begin(), h.end()};
}

Execution project(const Execution &exec, const SubsequenceMask &mask)
{
	if (mask.length() != exec.size())
		throw std::invalid_argument("mask length " + std::to_string(mask.length()) +
					    " does not match execution length " + std::to_string(exec.size()));
	std::vector<Label> kept;
	for (auto i : mask.indices())
		kept.push_back(exec.label(i));
	return Execution::from_labels(kept);
}

bool enabled_in(const Execution &exec, const SubsequenceMask &mask, std::span<const EventIndex> targets)
{
	if (mask.length() != exec.size())
		throw std::invalid_argument("mask length does not match execution length");
	for (auto e : targets)
		if (mask.contains(e))
			throw std::invalid_argument("target event " + std::to_string(e) + " is kept by the mask");
	for (auto e : targets)
		for (auto p = exec.thread_predecessor(e); p != 0; p = exec.thread_predecessor(p))
			if (!mask.contains(p))
				return false;
	return true;
}

std::vector<EventIndex> thread_predecessors(const Execution &exec, EventIndex i)
{
	auto po = exec.thread_events(exec.event(i).thread);
	return {po.begin(), po.begin() + static_cast<std::ptrdiff_t>(exec.thread_position(i))};
}

bool conflicting(const Execution &exec, EventIndex a, EventIndex b)
{
	const auto &x = exec.event(a);
	const auto &y = exec.event(b);
	return is_access(x.op) && is_access(y.op) && x.operand == y.operand &&
	       (x.op == Op::write || y.op == Op::write);
}

} // namespace tracepred
