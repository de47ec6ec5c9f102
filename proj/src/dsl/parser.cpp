#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "addt/dsl.hpp"
#include "lexer.hpp"
#include "schema.hpp"

namespace addt::dsl {

std::string format_diagnostic(const Diagnostic& d, std::string_view file) {
  std::ostringstream os;
  if (!file.empty()) os << file << ':';
  os << d.line << ':' << d.column << ": "
     << (d.severity == Severity::error ? "error" : "warning") << ": " << d.message;
  return os.str();
}

std::string_view to_string(BehaviorKind k) {
  switch (k) {
    case BehaviorKind::cruise: return "cruise";
    case BehaviorKind::emergency_brake: return "emergency_brake";
    case BehaviorKind::cut_in: return "cut_in";
    case BehaviorKind::stop: return "stop";
  }
  return "cruise";
}

std::string_view to_string(MissionKind k) {
  switch (k) {
    case MissionKind::follow: return "follow";
    case MissionKind::turn: return "turn";
    case MissionKind::overtake: return "overtake";
  }
  return "follow";
}

std::string_view to_string(FaultKind k) {
  switch (k) {
    case FaultKind::sensor_drop: return "sensor.drop";
    case FaultKind::sensor_shift: return "sensor.shift";
    case FaultKind::sensor_noise: return "sensor.noise";
    case FaultKind::compute_bitflip: return "compute.bitflip";
  }
  return "sensor.drop";
}

std::optional<Param> FaultDecl::param(const std::string& key) const {
  const auto it = fields.find(key);
  if (it == fields.end()) return std::nullopt;
  if (const auto* p = std::get_if<Param>(&it->second)) return *p;
  return std::nullopt;
}

std::optional<std::string> FaultDecl::ident(const std::string& key) const {
  const auto it = fields.find(key);
  if (it == fields.end()) return std::nullopt;
  if (const auto* i = std::get_if<Ident>(&it->second)) return i->name;
  return std::nullopt;
}

double FaultDecl::number_or(const std::string& key, double fallback) const {
  const auto p = param(key);
  return p && !p->is_var() ? p->value : fallback;
}

bool ParseResult::has_errors() const {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::error; });
}

namespace {

using detail::Token;
using detail::TokenKind;

struct Value {
  enum class Kind { number, string, identifier, variable, list } kind = Kind::number;
  double number = 0.0;
  std::string text;
  std::vector<Value> items;
  SourcePos pos;
};

std::string_view describe(const Value& v) {
  switch (v.kind) {
    case Value::Kind::number: return "number";
    case Value::Kind::string: return "string";
    case Value::Kind::identifier: return "identifier";
    case Value::Kind::variable: return "$variable";
    case Value::Kind::list: return "list";
  }
  return "value";
}

struct Entry {
  std::string key;
  Value value;
  SourcePos pos;
};

struct SyntaxError {};

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(detail::tokenize(text)) {}

  ParseResult run() {
    ScenarioSpec spec;
    bool have_name = false, have_road = false, have_ego = false, have_mission = false;
    while (peek().kind != TokenKind::end) {
      try {
        const Token& kw = peek();
        if (kw.kind != TokenKind::identifier) {
          error(kw.pos, "unexpected " + token_desc(kw) + ", expected a block keyword");
          throw SyntaxError{};
        }
        const std::string word = kw.text;
        const SourcePos pos = kw.pos;
        next();
        if (word == "scenario") {
          const Token& name = expect(TokenKind::string, "scenario name string");
          if (have_name) error(pos, "duplicate 'scenario' declaration");
          spec.name = name.text;
          spec.pos = pos;
          have_name = true;
        } else if (word == "road") {
          auto entries = block();
          if (have_road) error(pos, "duplicate 'road' block");
          spec.road = build_road(entries, pos);
          have_road = true;
        } else if (word == "ego") {
          auto entries = block();
          if (have_ego) error(pos, "duplicate 'ego' block");
          spec.ego = build_vehicle(entries, pos, "ego", true);
          have_ego = true;
        } else if (word == "agent") {
          const Token& name = expect(TokenKind::identifier, "agent name");
          const std::string agent_name = name.text;
          auto entries = block();
          spec.agents.push_back(build_vehicle(entries, pos, agent_name, false));
        } else if (word == "mission") {
          const Token kind = expect(TokenKind::identifier, "mission kind");
          auto entries = block();
          if (have_mission) error(pos, "duplicate 'mission' block");
          spec.mission = build_mission(kind, entries, pos);
          have_mission = true;
        } else if (word == "fault") {
          const Token kind = expect(TokenKind::identifier, "fault kind");
          auto entries = block();
          if (auto f = build_fault(kind, entries, pos)) spec.faults.push_back(std::move(*f));
        } else if (word == "sweep") {
          spec.sweeps.push_back(sweep(pos));
        } else {
          error(pos, "unknown block '" + word + "'");
          throw SyntaxError{};
        }
      } catch (const SyntaxError&) {
        synchronize();
      }
    }
    const SourcePos end = peek().pos;
    if (!have_name) error(end, "missing 'scenario \"name\"' declaration");
    if (!have_road) error(end, "missing 'road' block");
    if (!have_ego) error(end, "missing 'ego' block");
    if (!have_mission) error(end, "missing 'mission' block");

    ParseResult result;
    result.diagnostics = std::move(diags_);
    if (!result.has_errors()) {
      auto more = validate(spec);
      result.diagnostics.insert(result.diagnostics.end(), more.begin(), more.end());
      if (!result.has_errors()) result.spec = std::move(spec);
    }
    return result;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& next() {
    const Token& t = toks_[i_];
    if (t.kind != TokenKind::end) ++i_;
    return t;
  }

  static std::string token_desc(const Token& t) {
    if (t.kind == TokenKind::invalid) return t.text;
    if (t.kind == TokenKind::end) return "end of input";
    return std::string(detail::describe(t.kind)) + " '" + t.text + "'";
  }

  void error(SourcePos pos, std::string msg) {
    diags_.push_back({Severity::error, pos.line, pos.column, std::move(msg)});
  }

  const Token& expect(TokenKind kind, std::string_view what) {
    const Token& t = peek();
    if (t.kind != kind) {
      error(t.pos, "syntax error: expected " + std::string(what) + ", got " + token_desc(t));
      throw SyntaxError{};
    }
    return next();
  }

  /// Skip to the next top-level block keyword.
  void synchronize() {
    static const std::set<std::string> keywords = {"scenario", "road", "ego",  "agent",
                                                   "mission",  "fault", "sweep"};
    int depth = 0;
    while (peek().kind != TokenKind::end) {
      const Token& t = peek();
      if (t.kind == TokenKind::lbrace) ++depth;
      if (t.kind == TokenKind::rbrace) {
        next();
        if (--depth <= 0) return;
        continue;
      }
      if (depth <= 0 && t.kind == TokenKind::identifier && keywords.count(t.text) &&
          i_ > 0 && toks_[i_ - 1].kind != TokenKind::colon) {
        return;
      }
      next();
    }
  }

  std::vector<Entry> block() {
    expect(TokenKind::lbrace, "'{'");
    std::vector<Entry> entries;
    while (peek().kind != TokenKind::rbrace) {
      const Token& key = expect(TokenKind::identifier, "key");
      Entry e;
      e.key = key.text;
      e.pos = key.pos;
      expect(TokenKind::colon, "':'");
      e.value = value();
      entries.push_back(std::move(e));
      if (peek().kind == TokenKind::comma) {
        next();
        continue;
      }
      if (peek().kind != TokenKind::rbrace) {
        error(peek().pos, "syntax error: expected ',' or '}', got " + token_desc(peek()));
        throw SyntaxError{};
      }
    }
    next();
    return entries;
  }

  Value value() {
    const Token& t = peek();
    Value v;
    v.pos = t.pos;
    switch (t.kind) {
      case TokenKind::number:
        v.kind = Value::Kind::number;
        v.number = t.number;
        next();
        return v;
      case TokenKind::string:
        v.kind = Value::Kind::string;
        v.text = t.text;
        next();
        return v;
      case TokenKind::identifier:
        v.kind = Value::Kind::identifier;
        v.text = t.text;
        next();
        return v;
      case TokenKind::variable:
        v.kind = Value::Kind::variable;
        v.text = t.text;
        next();
        return v;
      case TokenKind::lbracket: {
        next();
        v.kind = Value::Kind::list;
        while (peek().kind != TokenKind::rbracket) {
          v.items.push_back(value());
          if (peek().kind == TokenKind::comma) {
            next();
            continue;
          }
          if (peek().kind != TokenKind::rbracket) {
            error(peek().pos, "syntax error: expected ',' or ']', got " + token_desc(peek()));
            throw SyntaxError{};
          }
        }
        next();
        return v;
      }
      default:
        error(t.pos, "syntax error: expected a value, got " + token_desc(t));
        throw SyntaxError{};
    }
  }

  SweepAxis sweep(SourcePos pos) {
    SweepAxis axis;
    axis.pos = pos;
    axis.var = expect(TokenKind::identifier, "sweep variable name").text;
    const Token& in = expect(TokenKind::identifier, "'in'");
    if (in.text != "in") {
      error(in.pos, "syntax error: expected 'in', got '" + in.text + "'");
      throw SyntaxError{};
    }
    const Value list = value();
    if (list.kind != Value::Kind::list) {
      error(list.pos, "type mismatch: sweep values must be a list, got " +
                          std::string(describe(list)));
      return axis;
    }
    for (const auto& item : list.items) {
      if (item.kind != Value::Kind::number) {
        error(item.pos, "type mismatch: sweep values must be numbers, got " +
                            std::string(describe(item)));
        continue;
      }
      axis.values.push_back(item.number);
    }
    return axis;
  }

  // --- typed conversion --------------------------------------------------

  /// Checks unknown and duplicate keys, and required presence. Returns the
  /// entries keyed by name.
  std::map<std::string, const Entry*> index(const std::vector<Entry>& entries,
                                            const detail::BlockSchema& schema, SourcePos pos,
                                            std::string_view block_name) {
    std::map<std::string, const Entry*> out;
    for (const auto& e : entries) {
      const auto* field = schema.find(e.key);
      if (!field) {
        error(e.pos, "unknown key '" + e.key + "' in " + std::string(block_name) + " block");
        continue;
      }
      if (out.count(e.key)) {
        error(e.pos, "duplicate key '" + e.key + "' in " + std::string(block_name) + " block");
        continue;
      }
      out[e.key] = &e;
    }
    for (const auto& f : schema.fields) {
      if (f.required && !out.count(f.key)) {
        error(pos, "missing required key '" + f.key + "' in " + std::string(block_name) +
                       " block");
      }
    }
    return out;
  }

  std::optional<Param> number(const std::map<std::string, const Entry*>& idx,
                              const std::string& key) {
    const auto it = idx.find(key);
    if (it == idx.end()) return std::nullopt;
    const Value& v = it->second->value;
    Param p;
    p.pos = v.pos;
    if (v.kind == Value::Kind::number) {
      p.value = v.number;
      return p;
    }
    if (v.kind == Value::Kind::variable) {
      p.var = v.text;
      return p;
    }
    error(v.pos, "type mismatch: '" + key + "' expects a number, got " +
                     std::string(describe(v)));
    return std::nullopt;
  }

  std::optional<Ident> identifier(const std::map<std::string, const Entry*>& idx,
                                  const std::string& key,
                                  const std::vector<std::string>& allowed) {
    const auto it = idx.find(key);
    if (it == idx.end()) return std::nullopt;
    const Value& v = it->second->value;
    if (v.kind != Value::Kind::identifier) {
      error(v.pos, "type mismatch: '" + key + "' expects an identifier, got " +
                       std::string(describe(v)));
      return std::nullopt;
    }
    if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v.text) == allowed.end()) {
      std::string opts;
      for (const auto& a : allowed) opts += (opts.empty() ? "" : "|") + a;
      error(v.pos, "invalid value '" + v.text + "' for '" + key + "' (expected " + opts + ")");
      return std::nullopt;
    }
    return Ident{v.text, v.pos};
  }

  RoadDecl build_road(const std::vector<Entry>& entries, SourcePos pos) {
    const auto idx = index(entries, detail::road_schema(), pos, "road");
    RoadDecl road;
    road.pos = pos;
    if (auto p = number(idx, "lanes")) road.lanes = *p;
    if (auto p = number(idx, "lane_width")) road.lane_width = *p;
    if (const auto it = idx.find("segments"); it != idx.end()) {
      const Value& list = it->second->value;
      if (list.kind != Value::Kind::list) {
        error(list.pos, "type mismatch: 'segments' expects a list of [length, curvature] pairs");
      } else {
        for (const auto& seg : list.items) {
          if (seg.kind != Value::Kind::list || seg.items.size() != 2) {
            error(seg.pos, "type mismatch: each segment must be [length, curvature]");
            continue;
          }
          SegmentDecl s;
          bool ok = true;
          Param* slots[2] = {&s.length, &s.curvature};
          for (int k = 0; k < 2; ++k) {
            const Value& item = seg.items[k];
            slots[k]->pos = item.pos;
            if (item.kind == Value::Kind::number) {
              slots[k]->value = item.number;
            } else if (item.kind == Value::Kind::variable) {
              slots[k]->var = item.text;
            } else {
              error(item.pos, "type mismatch: segment values must be numbers, got " +
                                  std::string(describe(item)));
              ok = false;
            }
          }
          if (ok) road.segments.push_back(s);
        }
      }
    }
    return road;
  }

  VehicleDecl build_vehicle(const std::vector<Entry>& entries, SourcePos pos,
                            const std::string& name, bool is_ego) {
    const auto& schema = is_ego ? detail::ego_schema() : detail::agent_schema();
    const auto idx = index(entries, schema, pos, is_ego ? "ego" : "agent");
    VehicleDecl v;
    v.name = name;
    v.pos = pos;
    if (auto p = number(idx, "lane")) v.lane = *p;
    if (auto p = number(idx, "s")) v.s = *p;
    if (auto p = number(idx, "speed")) v.speed = *p;
    v.length = number(idx, "length");
    v.width = number(idx, "width");
    v.wheelbase = number(idx, "wheelbase");
    if (!is_ego) {
      if (auto b = identifier(idx, "behavior", detail::behavior_names())) {
        v.behavior = *detail::behavior_from(b->name);
      }
      v.at = number(idx, "at");
      v.decel = number(idx, "decel");
      v.target_lane = number(idx, "target_lane");
      v.duration = number(idx, "duration");
    }
    return v;
  }

  MissionDecl build_mission(const Token& kind, const std::vector<Entry>& entries,
                            SourcePos pos) {
    MissionDecl m;
    m.pos = pos;
    if (auto k = detail::mission_from(kind.text)) {
      m.kind = *k;
    } else {
      error(kind.pos, "unknown mission kind '" + kind.text + "' (expected follow|turn|overtake)");
    }
    const auto idx = index(entries, detail::mission_schema(), pos, "mission");
    if (auto p = number(idx, "target_s")) m.target_s = *p;
    if (auto p = number(idx, "timeout")) m.timeout = *p;
    m.speed = number(idx, "speed");
    m.lane = number(idx, "lane");
    return m;
  }

  std::optional<FaultDecl> build_fault(const Token& kind, const std::vector<Entry>& entries,
                                       SourcePos pos) {
    const auto fk = detail::fault_from(kind.text);
    if (!fk) {
      error(kind.pos, "unknown fault kind '" + kind.text +
                          "' (expected sensor.drop|sensor.shift|sensor.noise|compute.bitflip)");
      return std::nullopt;
    }
    FaultDecl f;
    f.kind = *fk;
    f.pos = pos;
    const auto& schema = detail::fault_schema(*fk);
    const auto idx = index(entries, schema, pos, std::string("fault ") + kind.text);
    for (const auto& field : schema.fields) {
      if (!idx.count(field.key)) continue;
      switch (field.type) {
        case detail::FieldType::number:
          if (auto p = number(idx, field.key)) f.fields[field.key] = *p;
          break;
        case detail::FieldType::identifier:
          if (auto id = identifier(idx, field.key, field.allowed)) f.fields[field.key] = *id;
          break;
        case detail::FieldType::identifier_or_number: {
          const Value& v = idx.at(field.key)->value;
          if (v.kind == Value::Kind::identifier) {
            f.fields[field.key] = Ident{v.text, v.pos};
          } else if (auto p = number(idx, field.key)) {
            f.fields[field.key] = *p;
          }
          break;
        }
      }
    }
    return f;
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  std::vector<Diagnostic> diags_;
};

}  // namespace

ParseResult parse_scenario(std::string_view text) { return Parser(text).run(); }

}  // namespace addt::dsl
