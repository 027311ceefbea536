/* Copyright 2026 The tlmsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "tlmsim/traces.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace tlmsim {

namespace {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '#') ++i;
    out.push_back(Token{line.substr(start, i - start), start + 1});
  }
  return out;
}

std::optional<std::uint64_t> parse_uint(std::string_view s) {
  if (s.empty()) return std::nullopt;
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    s.remove_prefix(2);
  }
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::uint8_t parse_register(const Token& tok, std::size_t line) {
  if (tok.text.size() < 3 || tok.text.substr(0, 2) != "$r") {
    throw TraceError("expected register reference, got '" + std::string(tok.text) + "'", line, tok.column);
  }
  auto idx = parse_uint(tok.text.substr(2));
  if (!idx || *idx >= kRegisterCount) {
    throw TraceError("invalid register '" + std::string(tok.text) + "'", line, tok.column);
  }
  return static_cast<std::uint8_t>(*idx);
}

bool is_label_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '-' || c == '.';
}

bool valid_label(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!is_label_char(c)) return false;
  }
  return true;
}

TraceArg parse_arg(const Token& tok, std::size_t line) {
  const std::string_view t = tok.text;
  if (t.front() == '$') return RegRef{parse_register(tok, line)};
  if (t.front() == '@') {
    if (!valid_label(t.substr(1))) throw TraceError("invalid label '" + std::string(t) + "'", line, tok.column);
    return LabelRef{std::string(t.substr(1))};
  }
  auto v = parse_uint(t);
  if (!v || *v > 0xFFFFFFFFull) {
    throw TraceError("invalid integer argument '" + std::string(t) + "'", line, tok.column);
  }
  return static_cast<std::uint32_t>(*v);
}

Tick parse_ticks(const std::vector<Token>& toks, std::size_t line) {
  if (toks.size() != 2) {
    throw TraceError("'" + std::string(toks[0].text) + "' takes exactly one tick count", line,
                     toks[0].column);
  }
  auto v = parse_uint(toks[1].text);
  if (!v) {
    throw TraceError("invalid tick count '" + std::string(toks[1].text) + "'", line, toks[1].column);
  }
  return *v;
}

SyscallStep parse_syscall(const std::vector<Token>& toks, std::size_t line) {
  if (toks.size() < 2) throw TraceError("syscall name missing", line, toks[0].column);
  const auto call = syscall_from_name(toks[1].text);
  if (!call) {
    throw TraceError("unknown syscall '" + std::string(toks[1].text) + "'", line, toks[1].column);
  }
  SyscallStep step;
  step.call = *call;
  std::size_t end = toks.size();
  if (end >= 4 && toks[end - 2].text == "->") {
    step.result_reg = parse_register(toks[end - 1], line);
    end -= 2;
  }
  for (std::size_t i = 2; i < end; ++i) {
    if (toks[i].text == "->") throw TraceError("'->' must be followed by one register", line, toks[i].column);
    step.args.push_back(parse_arg(toks[i], line));
  }
  if (step.args.size() != syscall_arity(step.call)) {
    throw TraceError(std::string(to_string(step.call)) + " expects " +
                         std::to_string(syscall_arity(step.call)) + " argument(s), got " +
                         std::to_string(step.args.size()),
                     line, toks[1].column);
  }
  return step;
}

void print_arg(std::ostream& os, const TraceArg& a) {
  if (auto v = std::get_if<std::uint32_t>(&a)) {
    os << *v;
  } else if (auto r = std::get_if<RegRef>(&a)) {
    os << "$r" << static_cast<unsigned>(r->index);
  } else {
    os << '@' << std::get<LabelRef>(a).name;
  }
}

}  // namespace

std::string_view to_string(Syscall s) {
  switch (s) {
    case Syscall::RcsvSpwn: return "rcsv-spwn";
    case Syscall::RcsvExit: return "rcsv-exit";
    case Syscall::JoinInit: return "join-init";
    case Syscall::JoinFree: return "join-free";
    case Syscall::JoinWait: return "join-wait";
    case Syscall::JoinExit: return "join-exit";
  }
  return "?";
}

std::optional<Syscall> syscall_from_name(std::string_view name) {
  for (auto s : {Syscall::RcsvSpwn, Syscall::RcsvExit, Syscall::JoinInit, Syscall::JoinFree,
                 Syscall::JoinWait, Syscall::JoinExit}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::size_t syscall_arity(Syscall s) { return s == Syscall::RcsvSpwn ? 3 : 1; }

bool is_terminating(Syscall s) { return s == Syscall::RcsvExit || s == Syscall::JoinExit; }

Tick TraceProgram::compute_ticks() const {
  Tick total = 0;
  for (const auto& step : steps) {
    if (auto c = std::get_if<ComputeStep>(&step)) total += c->ticks;
    if (auto m = std::get_if<MemStep>(&step)) total += m->ticks;
  }
  return total;
}

void validate(const TraceProgram& program) {
  const std::string who = program.name.empty() ? "trace" : "trace '" + program.name + "'";
  if (program.steps.empty()) throw TraceError(who + " is empty");
  for (std::size_t i = 0; i < program.steps.size(); ++i) {
    const auto* sc = std::get_if<SyscallStep>(&program.steps[i]);
    if (!sc) continue;
    if (sc->args.size() != syscall_arity(sc->call)) {
      throw TraceError(who + " step " + std::to_string(i) + ": arity mismatch for " +
                       std::string(to_string(sc->call)));
    }
    if (sc->result_reg && *sc->result_reg >= kRegisterCount) {
      throw TraceError(who + " step " + std::to_string(i) + ": register out of range");
    }
    for (const auto& a : sc->args) {
      if (auto r = std::get_if<RegRef>(&a); r && r->index >= kRegisterCount) {
        throw TraceError(who + " step " + std::to_string(i) + ": register out of range");
      }
    }
    if (is_terminating(sc->call) && i + 1 != program.steps.size()) {
      throw TraceError(who + " step " + std::to_string(i) + ": steps after terminating syscall");
    }
  }
  const auto* last = std::get_if<SyscallStep>(&program.steps.back());
  if (!last || !is_terminating(last->call)) {
    throw TraceError(who + " does not end with rcsv-exit or join-exit");
  }
}

std::vector<TraceProgram> parse_trace_file(std::string_view text) {
  std::vector<TraceProgram> programs;
  std::vector<std::size_t> header_lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    ++line_no;
    const auto toks = tokenize(line);
    if (!toks.empty()) {
      const std::string_view head = toks[0].text;
      if (head == "task") {
        if (toks.size() != 2 || toks[1].text.size() < 2 || toks[1].text.back() != ':' ||
            !valid_label(toks[1].text.substr(0, toks[1].text.size() - 1))) {
          throw TraceError("expected 'task <label>:'", line_no, toks[0].column);
        }
        programs.push_back(TraceProgram{std::string(toks[1].text.substr(0, toks[1].text.size() - 1)), {}});
        header_lines.push_back(line_no);
      } else {
        if (programs.empty()) {
          programs.emplace_back();
          header_lines.push_back(line_no);
        }
        auto& steps = programs.back().steps;
        if (head == "compute") {
          steps.emplace_back(ComputeStep{parse_ticks(toks, line_no)});
        } else if (head == "mem") {
          steps.emplace_back(MemStep{parse_ticks(toks, line_no)});
        } else if (head == "syscall") {
          steps.emplace_back(parse_syscall(toks, line_no));
        } else {
          throw TraceError("unknown step '" + std::string(head) + "'", line_no, toks[0].column);
        }
      }
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  for (std::size_t i = 0; i < programs.size(); ++i) {
    try {
      validate(programs[i]);
    } catch (const TraceError& e) {
      throw TraceError(e.what(), header_lines[i], 1);
    }
  }
  return programs;
}

TraceProgram parse_trace(std::string_view text) {
  auto programs = parse_trace_file(text);
  if (programs.empty()) throw TraceError("trace is empty");
  if (programs.size() > 1) throw TraceError("expected a single trace, found " + std::to_string(programs.size()));
  return std::move(programs.front());
}

std::string print_trace(const TraceProgram& program) {
  std::ostringstream os;
  if (!program.name.empty()) os << "task " << program.name << ":\n";
  for (const auto& step : program.steps) {
    if (auto c = std::get_if<ComputeStep>(&step)) {
      os << "compute " << c->ticks << '\n';
    } else if (auto m = std::get_if<MemStep>(&step)) {
      os << "mem " << m->ticks << '\n';
    } else {
      const auto& s = std::get<SyscallStep>(step);
      os << "syscall " << to_string(s.call);
      for (const auto& a : s.args) {
        os << ' ';
        print_arg(os, a);
      }
      if (s.result_reg) os << " -> $r" << static_cast<unsigned>(*s.result_reg);
      os << '\n';
    }
  }
  return os.str();
}

TraceProgram resolve_labels(const TraceProgram& program,
                            const std::function<std::uint32_t(const std::string&)>& resolver) {
  TraceProgram out = program;
  for (auto& step : out.steps) {
    if (auto s = std::get_if<SyscallStep>(&step)) {
      for (auto& a : s->args) {
        if (auto l = std::get_if<LabelRef>(&a)) a = resolver(l->name);
      }
    }
  }
  return out;
}

FamilyId TraceLibrary::add_family(std::vector<TraceProgram> variants) {
  if (variants.empty()) throw TraceError("trace family must not be empty");
  for (const auto& p : variants) validate(p);
  families_.push_back(std::move(variants));
  return static_cast<FamilyId>(families_.size() - 1);
}

const TraceProgram& TraceLibrary::program(FamilyId family, std::uint32_t variant) const {
  if (family >= families_.size()) throw TraceError("unknown trace family " + std::to_string(family));
  const auto& f = families_[family];
  return f[variant % f.size()];
}

std::size_t TraceLibrary::family_size(FamilyId family) const {
  if (family >= families_.size()) throw TraceError("unknown trace family " + std::to_string(family));
  return families_[family].size();
}

Tick AppBundle::sequential_ticks() const {
  Tick total = 0;
  for (const auto& c : children) total += c.compute_ticks();
  return total;
}

TraceProgram make_parent_trace(std::uint32_t n) {
  const std::uint8_t r0 = 0;
  TraceProgram p;
  p.name = "parent";
  p.steps.emplace_back(SyscallStep{Syscall::JoinInit, {n}, r0});
  p.steps.emplace_back(SyscallStep{Syscall::RcsvSpwn, {LabelRef{"child"}, RegRef{r0}, n}, std::nullopt});
  p.steps.emplace_back(SyscallStep{Syscall::JoinWait, {RegRef{r0}}, std::nullopt});
  p.steps.emplace_back(SyscallStep{Syscall::JoinFree, {RegRef{r0}}, std::nullopt});
  p.steps.emplace_back(SyscallStep{Syscall::RcsvExit, {std::uint32_t{0}}, std::nullopt});
  return p;
}

TraceProgram make_child_trace(Tick length) {
  TraceProgram c;
  c.name = "child";
  c.steps.emplace_back(ComputeStep{length});
  c.steps.emplace_back(SyscallStep{Syscall::JoinExit, {RegRef{0}}, std::nullopt});
  return c;
}

AppBundle gen_independent(std::uint32_t n, Tick length) {
  if (n == 0) throw ConfigError("benchmark needs at least one child task");
  AppBundle app;
  app.parent = make_parent_trace(n);
  app.children.assign(n, make_child_trace(length));
  return app;
}

void BenchmarkSpec::validate() const {
  if (n == 0) throw ConfigError("n must be >= 1");
  if (!(duty > 0.0 && duty <= 1.0)) throw ConfigError("duty must lie in (0, 1]");
  if (kind == BenchmarkKind::Interference && !(lambda_mean > 0.0)) {
    throw ConfigError("lambda_mean must be positive");
  }
}

std::vector<Tick> draw_child_lengths(const BenchmarkSpec& spec, Rng& rng) {
  std::vector<Tick> lengths(spec.n, spec.max_len);
  if (spec.len_dist == LengthDist::Uniform95) {
    const auto lo = static_cast<Tick>(std::ceil(0.95 * static_cast<double>(spec.max_len)));
    for (auto& l : lengths) l = rng.between(lo, spec.max_len);
  }
  return lengths;
}

std::vector<Injection> gen_interference_schedule(const BenchmarkSpec& spec, Tick sim_length,
                                                 std::uint32_t k, Rng& rng) {
  spec.validate();
  if (k == 0) throw ConfigError("k must be positive");
  const double stop = spec.duty * static_cast<double>(sim_length);
  std::vector<Injection> out;
  Tick t = 0;
  while (static_cast<double>(t) < stop) {
    Injection inj;
    inj.at = t;
    inj.gmn = static_cast<std::uint32_t>(rng.below(k));
    inj.app.parent = make_parent_trace(spec.n);
    inj.app.children.reserve(spec.n);
    for (Tick len : draw_child_lengths(spec, rng)) inj.app.children.push_back(make_child_trace(len));
    out.push_back(std::move(inj));
    t += spec.arrival == ArrivalDist::Poisson ? rng.poisson(spec.lambda_mean) : rng.exponential(spec.lambda_mean);
  }
  return out;
}

}  // namespace tlmsim
