#include "dca/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace dca {
namespace {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<Entry> entries;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_error(int line, const std::string& reason) {
  throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": " + reason);
}

std::vector<Section> split_sections(std::string_view text) {
  std::vector<Section> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') parse_error(line_no, "unterminated section header");
      out.push_back({std::string(trim(line.substr(1, line.size() - 2))), line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_error(line_no, "expected key = value");
    if (out.empty()) parse_error(line_no, "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) parse_error(line_no, "empty key");
    if (value.empty()) parse_error(line_no, "empty value for '" + key + "'");
    for (const Entry& e : out.back().entries)
      if (e.key == key)
        parse_error(line_no, "duplicate key '" + key + "' (first on line " + std::to_string(e.line) + ")");
    out.back().entries.push_back({key, value, line_no});
  }
  return out;
}

double to_number(const Entry& e) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || std::isnan(v))
    parse_error(e.line, "'" + e.key + "' is not a number: " + e.value);
  return v;
}

std::uint64_t to_unsigned(const Entry& e) {
  std::uint64_t v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    parse_error(e.line, "'" + e.key + "' is not a non-negative integer: " + e.value);
  return v;
}

bool to_bool(const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  parse_error(e.line, "'" + e.key + "' is not a boolean: " + e.value);
}

double positive(const Entry& e) {
  const double v = to_number(e);
  if (!(v > 0.0)) parse_error(e.line, "'" + e.key + "' must be > 0");
  return v;
}

double nonnegative(const Entry& e) {
  const double v = to_number(e);
  if (!(v >= 0.0)) parse_error(e.line, "'" + e.key + "' must be >= 0");
  return v;
}

double unit_interval(const Entry& e) {
  const double v = to_number(e);
  if (!(v > 0.0 && v <= 1.0)) parse_error(e.line, "'" + e.key + "' must be in (0, 1]");
  return v;
}

Protocol to_protocol(const Entry& e) {
  for (Protocol p : {Protocol::Fast, Protocol::Reno, Protocol::Vegas})
    if (e.value == to_string(p)) return p;
  parse_error(e.line, "unknown protocol '" + e.value + "'");
}

RemedySet to_remedies(const Entry& e) {
  RemedySet out;
  if (e.value == "none") return out;
  std::string_view rest = e.value;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view name = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    bool found = false;
    for (unsigned i = 0; i < kRemedyCount; ++i) {
      const auto r = static_cast<Remedy>(i);
      if (name == to_string(r)) {
        out.insert(r);
        found = true;
      }
    }
    if (!found) parse_error(e.line, "unknown remedy '" + std::string(name) + "'");
  }
  return out;
}

using Handler = std::function<void(const Entry&)>;

void apply(const Section& s, const std::map<std::string, Handler>& handlers) {
  for (const Entry& e : s.entries) {
    const auto it = handlers.find(e.key);
    if (it == handlers.end())
      throw Error(ErrorCode::UnknownKey, "line " + std::to_string(e.line) + ": '" + e.key +
                                             "' in [" + s.name + "]");
    it->second(e);
  }
}

std::vector<FlowConfig> parse_flow(const Section& s) {
  FlowConfig f;
  std::uint64_t count = 1;
  double spacing = 0.0;
  const std::map<std::string, Handler> h = {
      {"protocol", [&](const Entry& e) { f.protocol = to_protocol(e); }},
      {"alpha", [&](const Entry& e) { f.alpha = positive(e); }},
      {"gamma", [&](const Entry& e) { f.gamma = unit_interval(e); }},
      {"w0", [&](const Entry& e) { f.w0 = positive(e); }},
      {"update_interval",
       [&](const Entry& e) {
         f.update_interval = e.value == "rtt" ? UpdateInterval::every_rtt()
                                              : UpdateInterval::fixed(positive(e));
       }},
      {"start", [&](const Entry& e) { f.start_time = nonnegative(e); }},
      {"fwd_prop", [&](const Entry& e) { f.fwd_prop_delay = positive(e); }},
      {"bwd_prop", [&](const Entry& e) { f.bwd_prop_delay = positive(e); }},
      {"remedies", [&](const Entry& e) { f.remedies = to_remedies(e); }},
      {"mu", [&](const Entry& e) { f.mu = positive(e); }},
      {"vegas_alpha", [&](const Entry& e) { f.vegas_alpha = nonnegative(e); }},
      {"vegas_beta", [&](const Entry& e) { f.vegas_beta = nonnegative(e); }},
      {"pause_cap", [&](const Entry& e) { f.remedy.pause_cap = positive(e); }},
      {"probe_burst", [&](const Entry& e) { f.remedy.probe_burst = nonnegative(e); }},
      {"oracle_older_flows",
       [&](const Entry& e) { f.remedy.oracle_older_flows = static_cast<int>(to_unsigned(e)); }},
      {"oracle_capacity", [&](const Entry& e) { f.remedy.oracle_capacity = positive(e); }},
      {"adapt_gain", [&](const Entry& e) { f.remedy.adapt_gain = unit_interval(e); }},
      {"adapt_every_rtts",
       [&](const Entry& e) {
         f.remedy.adapt_every_rtts = to_number(e);
         if (!(f.remedy.adapt_every_rtts >= 1.0)) parse_error(e.line, "'adapt_every_rtts' must be >= 1");
       }},
      {"alpha_min", [&](const Entry& e) { f.remedy.alpha_min = positive(e); }},
      {"alpha_max", [&](const Entry& e) { f.remedy.alpha_max = positive(e); }},
      {"count",
       [&](const Entry& e) {
         count = to_unsigned(e);
         if (count == 0) parse_error(e.line, "'count' must be >= 1");
       }},
      {"start_spacing", [&](const Entry& e) { spacing = nonnegative(e); }},
  };
  apply(s, h);
  std::vector<FlowConfig> out;
  for (std::uint64_t i = 0; i < count; ++i) {
    FlowConfig copy = f;
    copy.start_time = f.start_time + static_cast<double>(i) * spacing;
    out.push_back(copy);
  }
  return out;
}

LinkConfig parse_link(const Section& s) {
  LinkConfig l;
  RedConfig red;
  bool has_red_keys = false;
  int red_line = s.line;
  bool has_min = false;
  bool has_max = false;
  const auto red_key = [&](const Entry& e) {
    has_red_keys = true;
    red_line = e.line;
  };
  const std::map<std::string, Handler> h = {
      {"capacity", [&](const Entry& e) { l.capacity = positive(e); }},
      {"buffer", [&](const Entry& e) { l.buffer = positive(e); }},
      {"discipline",
       [&](const Entry& e) {
         if (e.value == "drop-tail") l.discipline = Discipline::DropTail;
         else if (e.value == "red") l.discipline = Discipline::Red;
         else parse_error(e.line, "unknown discipline '" + e.value + "'");
       }},
      {"min_th", [&](const Entry& e) { red.min_th = nonnegative(e); has_min = true; red_key(e); }},
      {"max_th", [&](const Entry& e) { red.max_th = positive(e); has_max = true; red_key(e); }},
      {"avg_weight", [&](const Entry& e) { red.avg_weight = unit_interval(e); red_key(e); }},
  };
  apply(s, h);
  if (l.discipline == Discipline::Red) {
    if (!has_min || !has_max) parse_error(s.line, "[" + s.name + "] red needs min_th and max_th");
    l.red = red;
  } else if (has_red_keys) {
    parse_error(red_line, "RED parameters need discipline = red");
  }
  if (l.capacity == 0.0) parse_error(s.line, "[" + s.name + "] needs capacity");
  if (l.buffer == 0.0) parse_error(s.line, "[" + s.name + "] needs buffer");
  return l;
}

CrossTraffic parse_cross(const Section& s) {
  CrossTraffic c;
  const std::map<std::string, Handler> h = {
      {"target",
       [&](const Entry& e) {
         if (e.value == "fwd") c.target = LinkDir::Fwd;
         else if (e.value == "bwd") c.target = LinkDir::Bwd;
         else parse_error(e.line, "target must be fwd or bwd");
       }},
      {"rate", [&](const Entry& e) { c.rate = nonnegative(e); }},
      {"on", [&](const Entry& e) { c.on_time = nonnegative(e); }},
      {"off", [&](const Entry& e) { c.off_time = nonnegative(e); }},
  };
  apply(s, h);
  if (!(c.off_time > c.on_time)) parse_error(s.line, "[cross] needs off > on");
  return c;
}

RenoConfig parse_reno(const Section& s) {
  RenoConfig r;
  const std::map<std::string, Handler> h = {
      {"kappa", [&](const Entry& e) { r.kappa = positive(e); }},
      {"beta_exponent", [&](const Entry& e) { r.beta_exponent = to_number(e); }},
      {"additive_increase", [&](const Entry& e) { r.additive_increase = positive(e); }},
      {"multiplicative_decrease",
       [&](const Entry& e) {
         r.multiplicative_decrease = to_number(e);
         if (!(r.multiplicative_decrease > 0.0 && r.multiplicative_decrease < 1.0))
           parse_error(e.line, "'multiplicative_decrease' must be in (0, 1)");
       }},
  };
  apply(s, h);
  return r;
}

void parse_sim(const Section& s, ScenarioSpec& spec) {
  bool has_start = false;
  bool has_end = false;
  bool has_duration = false;
  const std::map<std::string, Handler> h = {
      {"duration", [&](const Entry& e) { spec.duration = positive(e); has_duration = true; }},
      {"step", [&](const Entry& e) { spec.step = positive(e); }},
      {"sample_every", [&](const Entry& e) { spec.sample_every = positive(e); }},
      {"measure_start", [&](const Entry& e) { spec.measure_start = nonnegative(e); has_start = true; }},
      {"measure_end", [&](const Entry& e) { spec.measure_end = nonnegative(e); has_end = true; }},
      {"seed", [&](const Entry& e) { spec.seed = to_unsigned(e); }},
      {"ack_ratio", [&](const Entry& e) { spec.ack_ratio = nonnegative(e); }},
      {"red_random", [&](const Entry& e) { spec.red_random = to_bool(e); }},
  };
  apply(s, h);
  if (!has_duration) parse_error(s.line, "[sim] needs duration");
  if (!has_end) spec.measure_end = spec.duration;
  if (!has_start) spec.measure_start = spec.duration / 2.0;
}

std::string number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_link(std::ostringstream& os, const char* name, const LinkConfig& l) {
  os << '[' << name << "]\n";
  os << "capacity = " << number(l.capacity) << '\n';
  os << "buffer = " << number(l.buffer) << '\n';
  os << "discipline = " << to_string(l.discipline) << '\n';
  if (l.red) {
    os << "min_th = " << number(l.red->min_th) << '\n';
    os << "max_th = " << number(l.red->max_th) << '\n';
    os << "avg_weight = " << number(l.red->avg_weight) << '\n';
  }
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view text) {
  const std::vector<Section> sections = split_sections(text);
  ScenarioSpec spec;
  bool has_fwd = false;
  bool has_bwd = false;
  bool has_sim = false;
  bool has_reno = false;
  for (const Section& s : sections) {
    const auto once = [&](bool& seen) {
      if (seen) parse_error(s.line, "duplicate section [" + s.name + "]");
      seen = true;
    };
    if (s.name == "flow") {
      for (FlowConfig& f : parse_flow(s)) spec.flows.push_back(std::move(f));
    } else if (s.name == "fwd_link") {
      once(has_fwd);
      spec.fwd_link = parse_link(s);
    } else if (s.name == "bwd_link") {
      once(has_bwd);
      spec.bwd_link = parse_link(s);
    } else if (s.name == "sim") {
      once(has_sim);
      parse_sim(s, spec);
    } else if (s.name == "cross") {
      spec.cross_traffic.push_back(parse_cross(s));
    } else if (s.name == "reno") {
      once(has_reno);
      spec.reno = parse_reno(s);
    } else {
      parse_error(s.line, "unknown section [" + s.name + "]");
    }
  }
  if (spec.flows.empty()) throw Error(ErrorCode::MissingSection, "[flow]");
  if (!has_fwd) throw Error(ErrorCode::MissingSection, "[fwd_link]");
  if (!has_sim) throw Error(ErrorCode::MissingSection, "[sim]");
  if (!has_bwd) spec.bwd_link = spec.fwd_link;
  for (std::size_t i = 0; i < spec.flows.size(); ++i) spec.flows[i].id = static_cast<int>(i);
  return spec;
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string format_scenario(const ScenarioSpec& spec) {
  std::ostringstream os;
  for (const FlowConfig& f : spec.flows) {
    os << "[flow]\n";
    os << "protocol = " << to_string(f.protocol) << '\n';
    os << "alpha = " << number(f.alpha) << '\n';
    os << "gamma = " << number(f.gamma) << '\n';
    os << "w0 = " << number(f.w0) << '\n';
    os << "update_interval = "
       << (f.update_interval.per_rtt ? std::string("rtt") : number(f.update_interval.seconds)) << '\n';
    os << "start = " << number(f.start_time) << '\n';
    os << "fwd_prop = " << number(f.fwd_prop_delay) << '\n';
    os << "bwd_prop = " << number(f.bwd_prop_delay) << '\n';
    std::string rem;
    for (unsigned i = 0; i < kRemedyCount; ++i) {
      const auto r = static_cast<Remedy>(i);
      if (!f.remedies.contains(r)) continue;
      if (!rem.empty()) rem += ',';
      rem += to_string(r);
    }
    os << "remedies = " << (rem.empty() ? "none" : rem) << '\n';
    os << "mu = " << number(f.mu) << '\n';
    os << "vegas_alpha = " << number(f.vegas_alpha) << '\n';
    os << "vegas_beta = " << number(f.vegas_beta) << '\n';
    os << "pause_cap = " << number(f.remedy.pause_cap) << '\n';
    os << "probe_burst = " << number(f.remedy.probe_burst) << '\n';
    if (f.remedy.oracle_older_flows)
      os << "oracle_older_flows = " << *f.remedy.oracle_older_flows << '\n';
    if (f.remedy.oracle_capacity) os << "oracle_capacity = " << number(*f.remedy.oracle_capacity) << '\n';
    os << "adapt_gain = " << number(f.remedy.adapt_gain) << '\n';
    os << "adapt_every_rtts = " << number(f.remedy.adapt_every_rtts) << '\n';
    os << "alpha_min = " << number(f.remedy.alpha_min) << '\n';
    os << "alpha_max = " << number(f.remedy.alpha_max) << '\n';
  }
  write_link(os, "fwd_link", spec.fwd_link);
  write_link(os, "bwd_link", spec.bwd_link);
  for (const CrossTraffic& c : spec.cross_traffic) {
    os << "[cross]\n";
    os << "target = " << to_string(c.target) << '\n';
    os << "rate = " << number(c.rate) << '\n';
    os << "on = " << number(c.on_time) << '\n';
    os << "off = " << number(c.off_time) << '\n';
  }
  os << "[reno]\n";
  os << "kappa = " << number(spec.reno.kappa) << '\n';
  os << "beta_exponent = " << number(spec.reno.beta_exponent) << '\n';
  os << "additive_increase = " << number(spec.reno.additive_increase) << '\n';
  os << "multiplicative_decrease = " << number(spec.reno.multiplicative_decrease) << '\n';
  os << "[sim]\n";
  os << "duration = " << number(spec.duration) << '\n';
  os << "step = " << number(spec.step) << '\n';
  os << "sample_every = " << number(spec.sample_every) << '\n';
  os << "measure_start = " << number(spec.measure_start) << '\n';
  os << "measure_end = " << number(spec.measure_end) << '\n';
  os << "seed = " << spec.seed << '\n';
  os << "ack_ratio = " << number(spec.ack_ratio) << '\n';
  os << "red_random = " << (spec.red_random ? "true" : "false") << '\n';
  return os.str();
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string spec_hash(const ScenarioSpec& spec) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(format_scenario(spec))));
  return buf;
}

}  // namespace dca
