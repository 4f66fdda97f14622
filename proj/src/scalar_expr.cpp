#include "gchs/scalar_expr.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <unordered_map>

namespace gchs {

ScalarExpr::ScalarExpr(std::vector<Node> nodes, int dim)
    : nodes_(std::make_shared<const std::vector<Node>>(std::move(nodes))), dim_(dim) {}

ScalarExpr ScalarExpr::constant(double value, int dim) {
  Node node;
  node.op = Op::Const;
  node.value = value;
  return ScalarExpr({node}, dim);
}

ScalarExpr ScalarExpr::variable(int index, int dim) {
  if (index < 0 || index >= dim) throw StructureError("variable index out of range");
  Node node;
  node.op = Op::Var;
  node.var = index;
  return ScalarExpr({node}, dim);
}

bool ScalarExpr::is_constant() const {
  for (const Node& node : *nodes_)
    if (node.op == Op::Var) return false;
  return true;
}

namespace {

const char* function_name(ScalarExpr::Op op) {
  using Op = ScalarExpr::Op;
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Tanh: return "tanh";
    default: return "";
  }
}

char binary_symbol(ScalarExpr::Op op) {
  using Op = ScalarExpr::Op;
  switch (op) {
    case Op::Add: return '+';
    case Op::Sub: return '-';
    case Op::Mul: return '*';
    case Op::Div: return '/';
    case Op::Pow: return '^';
    default: return '?';
  }
}

void print_node(const std::vector<ScalarExpr::Node>& nodes, int idx, const std::vector<std::string>& names,
                std::string& out) {
  using Op = ScalarExpr::Op;
  const auto& node = nodes[idx];
  switch (node.op) {
    case Op::Const: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", node.value);
      if (node.value < 0) {
        out += '(';
        out += buf;
        out += ')';
      } else {
        out += buf;
      }
      return;
    }
    case Op::Var:
      out += names[node.var];
      return;
    case Op::Neg:
      out += "(-";
      print_node(nodes, node.lhs, names, out);
      out += ')';
      return;
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Log:
    case Op::Sqrt:
    case Op::Tanh:
      out += function_name(node.op);
      out += '(';
      print_node(nodes, node.lhs, names, out);
      out += ')';
      return;
    default:
      out += '(';
      print_node(nodes, node.lhs, names, out);
      out += binary_symbol(node.op);
      print_node(nodes, node.rhs, names, out);
      out += ')';
      return;
  }
}

class Parser {
 public:
  Parser(std::string_view text, int n, std::span<const std::string> names) : text_(text), n_(n) {
    for (int i = 0; i < n; ++i) vars_["x" + std::to_string(i + 1)] = i;
    if (n % 2 == 0) {
      const int m = n / 2;
      for (int i = 0; i < m; ++i) {
        vars_["q" + std::to_string(i + 1)] = i;
        vars_["p" + std::to_string(i + 1)] = m + i;
      }
    }
    if (!names.empty()) {
      if (static_cast<int>(names.size()) != n)
        throw ParseError("expected " + std::to_string(n) + " variable names", 0);
      std::unordered_map<std::string, int> seen;
      for (int i = 0; i < n; ++i) {
        if (!seen.emplace(names[i], i).second) throw ParseError("duplicate variable name '" + names[i] + "'", 0);
        vars_[names[i]] = i;
      }
    }
  }

  ScalarExpr run() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    parse_sum();
    skip_space();
    if (pos_ < text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return ScalarExpr(std::move(nodes_), n_);
  }

 private:
  using Op = ScalarExpr::Op;
  using Node = ScalarExpr::Node;

  int push(Node node) {
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size()) - 1;
  }
  int push_unary(Op op, int a) {
    Node node;
    node.op = op;
    node.lhs = a;
    return push(node);
  }
  int push_binary(Op op, int a, int b) {
    Node node;
    node.op = op;
    node.lhs = a;
    node.rhs = b;
    return push(node);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int parse_sum() {
    int lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = push_binary(Op::Add, lhs, parse_product());
      } else if (accept('-')) {
        lhs = push_binary(Op::Sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  int parse_product() {
    int lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = push_binary(Op::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = push_binary(Op::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    if (accept('-')) return push_unary(Op::Neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    if (accept('^')) return push_binary(Op::Pow, base, parse_unary());
    return base;
  }

  int parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      int inner = parse_sum();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  int parse_number() {
    const std::size_t start = pos_;
    std::string buf(text_.substr(pos_));
    char* end = nullptr;
    const double value = std::strtod(buf.c_str(), &end);
    if (end == buf.c_str()) throw ParseError("malformed number", start);
    pos_ += static_cast<std::size_t>(end - buf.c_str());
    Node node;
    node.op = Op::Const;
    node.value = value;
    return push(node);
  }

  int parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));

    static const std::unordered_map<std::string, Op> functions = {
        {"sin", Op::Sin}, {"cos", Op::Cos},   {"exp", Op::Exp},
        {"log", Op::Log}, {"sqrt", Op::Sqrt}, {"tanh", Op::Tanh}};
    if (auto fn = functions.find(name); fn != functions.end()) {
      if (!accept('(')) throw ParseError("expected '(' after " + name, pos_);
      int arg = parse_sum();
      int arity = 1;
      while (accept(',')) {
        parse_sum();
        ++arity;
      }
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      if (arity != 1)
        throw ParseError(name + " takes 1 argument, got " + std::to_string(arity), start);
      return push_unary(fn->second, arg);
    }

    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') throw ParseError("unknown function '" + name + "'", start);

    if (auto var = vars_.find(name); var != vars_.end()) {
      Node node;
      node.op = Op::Var;
      node.var = var->second;
      return push(node);
    }
    if (name == "pi" || name == "e") {
      Node node;
      node.op = Op::Const;
      node.value = name == "pi" ? std::numbers::pi : std::numbers::e;
      return push(node);
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }

  std::string_view text_;
  int n_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, int> vars_;
};

}  // namespace

std::vector<std::string> default_names(int n) {
  std::vector<std::string> names;
  names.reserve(n);
  if (n % 2 == 0) {
    for (int i = 0; i < n / 2; ++i) names.push_back("q" + std::to_string(i + 1));
    for (int i = 0; i < n / 2; ++i) names.push_back("p" + std::to_string(i + 1));
  } else {
    for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
  }
  return names;
}

std::string ScalarExpr::to_string(std::span<const std::string> names) const {
  std::vector<std::string> labels = names.empty() ? default_names(dim_)
                                                  : std::vector<std::string>(names.begin(), names.end());
  std::string out;
  print_node(*nodes_, static_cast<int>(nodes_->size()) - 1, labels, out);
  return out;
}

ScalarExpr parse(std::string_view text, int n, std::span<const std::string> names) {
  if (n < 1 || n > kMaxDim) throw StructureError("dimension must be in 1.." + std::to_string(kMaxDim));
  return Parser(text, n, names).run();
}

}  // namespace gchs
