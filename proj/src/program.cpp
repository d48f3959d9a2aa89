#include "jetweil/program.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace jetweil {

const std::string& Program::slot_name(Slot s) const {
  if (s < n_inputs()) return input_names_[s];
  return nodes_.at(s - n_inputs()).name;
}

// ---------------------------------------------------------------------------
// ProgramBuilder

ProgramBuilder::ProgramBuilder(std::size_t n_inputs) {
  program_.input_names_.reserve(n_inputs);
  for (std::size_t i = 0; i < n_inputs; ++i) {
    program_.input_names_.push_back("x" + std::to_string(i));
  }
}

ProgramBuilder::ProgramBuilder(std::vector<std::string> input_names) {
  program_.input_names_ = std::move(input_names);
}

Slot ProgramBuilder::input(std::size_t i) const {
  if (i >= program_.n_inputs()) throw DimensionMismatch("input index out of range");
  return static_cast<Slot>(i);
}

Slot ProgramBuilder::add(PrimitiveKind op, std::span<const Slot> operands, double payload,
                         std::string name) {
  if (static_cast<int>(operands.size()) != arity(op)) {
    std::ostringstream os;
    os << keyword(op) << " takes " << arity(op) << " operand(s), got " << operands.size();
    throw DimensionMismatch(os.str());
  }
  const std::size_t next = program_.slot_count();
  for (Slot s : operands) {
    if (s >= next) throw Error("operand refers to a slot that is not yet defined");
  }
  if (op == PrimitiveKind::div) {
    const Slot r = add(PrimitiveKind::recip, {operands[1]});
    return add(PrimitiveKind::mul, {operands[0], r}, 0.0, std::move(name));
  }
  Node node;
  node.op = op;
  for (std::size_t i = 0; i < operands.size(); ++i) node.operands[i] = operands[i];
  if (op == PrimitiveKind::const_val || op == PrimitiveKind::pow_const) node.payload = payload;
  node.name = std::move(name);
  program_.nodes_.push_back(std::move(node));
  return static_cast<Slot>(next);
}

void ProgramBuilder::output(Slot s) {
  if (s >= program_.slot_count()) throw Error("output refers to an undefined slot");
  program_.outputs_.push_back(s);
}

Program ProgramBuilder::build() && {
  std::unordered_set<std::string> taken(program_.input_names_.begin(),
                                        program_.input_names_.end());
  if (taken.size() != program_.input_names_.size()) throw Error("duplicate input name");
  for (const Node& n : program_.nodes_) {
    if (n.name.empty()) continue;
    if (!taken.insert(n.name).second) throw Error("duplicate node name: " + n.name);
  }
  for (std::size_t k = 0; k < program_.nodes_.size(); ++k) {
    Node& n = program_.nodes_[k];
    if (!n.name.empty()) continue;
    std::string fresh = "_n" + std::to_string(k);
    while (taken.count(fresh)) fresh += '_';
    taken.insert(fresh);
    n.name = std::move(fresh);
  }
  return std::move(program_);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::string kind_label(ParseError::Kind k) {
  switch (k) {
    case ParseError::Kind::syntax: return "syntax error";
    case ParseError::Kind::undefined_name: return "undefined name";
    case ParseError::Kind::use_before_definition: return "use before definition";
    case ParseError::Kind::arity_mismatch: return "arity mismatch";
    case ParseError::Kind::duplicate_name: return "duplicate name";
  }
  return "error";
}

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

struct Line {
  std::size_t number;  // 1-based
  std::vector<Token> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);

    Line line{line_no, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r')) ++i;
      if (i >= raw.size()) break;
      std::size_t j = i;
      while (j < raw.size() && raw[j] != ' ' && raw[j] != '\t' && raw[j] != '\r') ++j;
      line.tokens.push_back({raw.substr(i, j - i), i + 1});
      i = j;
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    pos = end + 1;
  }
  return lines;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  const auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  const auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s[0])) return false;
  for (char c : s.substr(1)) {
    if (!alpha(c) && !digit(c)) return false;
  }
  return true;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lines_(tokenize(text)) {}

  Program run() {
    if (lines_.empty()) fail(ParseError::Kind::syntax, 1, 1, "empty program: expected 'input'");

    // names assigned anywhere, for distinguishing forward references
    for (const Line& l : lines_) {
      if (l.tokens.size() >= 2 && l.tokens[1].text == "=") {
        later_.emplace(std::string(l.tokens[0].text), l.number);
      }
    }

    std::size_t i = 0;
    if (lines_[0].tokens[0].text != "input") {
      // an output line alone still gets name diagnostics, e.g. "output z"
      if (lines_[0].tokens[0].text == "output" && lines_.size() == 1) {
        ProgramBuilder empty(std::vector<std::string>{});
        builder_.emplace(std::move(empty));
        parse_output(lines_[0]);
      }
      fail(ParseError::Kind::syntax, lines_[0].number, lines_[0].tokens[0].column,
           "program must start with an 'input' line");
    }
    parse_inputs(lines_[0]);
    ++i;

    bool saw_output = false;
    for (; i < lines_.size(); ++i) {
      const Line& l = lines_[i];
      if (saw_output) {
        fail(ParseError::Kind::syntax, l.number, l.tokens[0].column,
             "statement after the 'output' line");
      }
      const auto head = l.tokens[0].text;
      if (head == "output") {
        parse_output(l);
        saw_output = true;
      } else if (head == "input") {
        fail(ParseError::Kind::syntax, l.number, l.tokens[0].column,
             "only one 'input' line is allowed, and it must come first");
      } else {
        parse_assignment(l);
      }
    }
    if (!saw_output) {
      const Line& l = lines_.back();
      fail(ParseError::Kind::syntax, l.number, l.tokens.back().column,
           "missing 'output' line");
    }
    return std::move(*builder_).build();
  }

 private:
  [[noreturn]] static void fail(ParseError::Kind kind, std::size_t line, std::size_t col,
                                const std::string& detail) {
    throw ParseError(kind, line, col, detail);
  }

  void declare(const Token& t, std::size_t line, Slot slot) {
    if (!is_identifier(t.text) || t.text == "input" || t.text == "output") {
      fail(ParseError::Kind::syntax, line, t.column,
           "invalid identifier '" + std::string(t.text) + "'");
    }
    auto [it, inserted] = scope_.emplace(std::string(t.text), slot);
    if (!inserted) {
      fail(ParseError::Kind::duplicate_name, line, t.column,
           "'" + std::string(t.text) + "' is already defined");
    }
  }

  Slot resolve(const Token& t, std::size_t line) const {
    if (!is_identifier(t.text)) {
      fail(ParseError::Kind::syntax, line, t.column,
           "expected a name, got '" + std::string(t.text) + "'");
    }
    const std::string name(t.text);
    if (auto it = scope_.find(name); it != scope_.end()) return it->second;
    if (auto it = later_.find(name); it != later_.end()) {
      fail(ParseError::Kind::use_before_definition, line, t.column,
           "'" + name + "' is used before its definition on line " +
               std::to_string(it->second));
    }
    fail(ParseError::Kind::undefined_name, line, t.column, "'" + name + "' is not defined");
  }

  static double literal(const Token& t, std::size_t line) {
    std::string_view s = t.text;
    if (!s.empty() && s[0] == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      fail(ParseError::Kind::syntax, line, t.column,
           "expected a finite real literal, got '" + std::string(t.text) + "'");
    }
    return v;
  }

  void parse_inputs(const Line& l) {
    std::vector<std::string> names;
    for (std::size_t k = 1; k < l.tokens.size(); ++k) {
      declare(l.tokens[k], l.number, static_cast<Slot>(k - 1));
      names.emplace_back(l.tokens[k].text);
    }
    builder_.emplace(std::move(names));
  }

  void parse_output(const Line& l) {
    if (l.tokens.size() < 2) {
      fail(ParseError::Kind::syntax, l.number, l.tokens[0].column,
           "'output' needs at least one name");
    }
    for (std::size_t k = 1; k < l.tokens.size(); ++k) {
      builder_->output(resolve(l.tokens[k], l.number));
    }
  }

  void parse_assignment(const Line& l) {
    const auto& tk = l.tokens;
    if (tk.size() < 3 || tk[1].text != "=") {
      fail(ParseError::Kind::syntax, l.number, tk[0].column,
           "expected 'name = op args...'");
    }
    const auto op = kind_from_keyword(tk[2].text);
    if (!op) {
      fail(ParseError::Kind::syntax, l.number, tk[2].column,
           "unknown primitive '" + std::string(tk[2].text) + "'");
    }
    const std::size_t nargs = tk.size() - 3;
    const std::size_t expected =
        *op == PrimitiveKind::const_val ? 1 : (*op == PrimitiveKind::pow_const ? 2 : arity(*op));
    if (nargs != expected) {
      fail(ParseError::Kind::arity_mismatch, l.number, tk[2].column,
           std::string(keyword(*op)) + " expects " + std::to_string(expected) +
               " argument(s), got " + std::to_string(nargs));
    }

    std::vector<Slot> operands;
    double payload = 0.0;
    if (*op == PrimitiveKind::const_val) {
      payload = literal(tk[3], l.number);
    } else if (*op == PrimitiveKind::pow_const) {
      operands.push_back(resolve(tk[3], l.number));
      payload = literal(tk[4], l.number);
    } else {
      for (std::size_t k = 3; k < tk.size(); ++k) operands.push_back(resolve(tk[k], l.number));
    }

    // declare after resolving so "x = sin x" is a use-before-definition
    const Token& lhs = tk[0];
    if (scope_.count(std::string(lhs.text))) {
      fail(ParseError::Kind::duplicate_name, l.number, lhs.column,
           "'" + std::string(lhs.text) + "' is already defined");
    }
    const Slot slot = builder_->add(*op, operands, payload, std::string(lhs.text));
    declare(lhs, l.number, slot);
    later_.erase(std::string(lhs.text));
  }

  std::vector<Line> lines_;
  std::unordered_map<std::string, Slot> scope_;
  std::unordered_map<std::string, std::size_t> later_;
  std::optional<ProgramBuilder> builder_;
};

}  // namespace

ParseError::ParseError(Kind kind, std::size_t line, std::size_t column, const std::string& detail)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
            kind_label(kind) + ": " + detail),
      kind_(kind),
      line_(line),
      column_(column) {}

Program parse_program(std::string_view text) { return Parser(text).run(); }

Program load_program(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open program file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

namespace {

std::string format_literal(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string print_program(const Program& prog) {
  std::ostringstream os;
  os << "input";
  for (const auto& n : prog.input_names()) os << ' ' << n;
  os << '\n';
  for (const Node& node : prog.nodes()) {
    os << node.name << " = " << keyword(node.op);
    if (node.op == PrimitiveKind::const_val) {
      os << ' ' << format_literal(node.payload);
    } else {
      for (Slot s : node.args()) os << ' ' << prog.slot_name(s);
      if (node.op == PrimitiveKind::pow_const) os << ' ' << format_literal(node.payload);
    }
    os << '\n';
  }
  os << "output";
  for (Slot s : prog.outputs()) os << ' ' << prog.slot_name(s);
  os << '\n';
  return os.str();
}

}  // namespace jetweil
