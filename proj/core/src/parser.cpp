#include "tensorkernel/parser.hpp"

#include <cctype>
#include <sstream>

namespace tk {

namespace {

enum class Tok {
  end,
  name,       // A, g, u1 or backslash commands like \gamma
  number,     // 123
  lbrace,
  rbrace,
  lparen,
  rparen,
  caret,
  under,
  plus,
  minus,
  star,
  slash,
  comma,
  semicolon,
  dot,
  dotdot,
  coloncolon,
  assign,     // :=
  arrow,      // ->
  at,         // @
  atat,       // @@
  bang,       // ! or !! with optional depth, see bangs/depth fields
  hash,
  percent,
  equals,
};

struct Token {
  Tok kind = Tok::end;
  std::string text;
  int bangs = 0;
  std::optional<int> depth;
  SourceSpan span;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(&src) { advance(); }

  const Token& peek() const { return tok_; }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }
  bool at(Tok k) const { return tok_.kind == k; }

 private:
  void advance() {
    while (pos_ < src_->size() &&
           std::isspace(static_cast<unsigned char>((*src_)[pos_])))
      bump();
    tok_ = Token{};
    tok_.span.line = line_;
    tok_.span.column = col_;
    tok_.span.begin = pos_;
    if (pos_ >= src_->size()) {
      tok_.kind = Tok::end;
      return;
    }
    char c = (*src_)[pos_];
    if (c == '\\') {
      std::size_t start = pos_;
      bump();
      while (pos_ < src_->size() && std::isalpha(static_cast<unsigned char>((*src_)[pos_])))
        bump();
      tok_.kind = Tok::name;
      tok_.text = src_->substr(start, pos_ - start);
      if (tok_.text.size() == 1)
        throw SyntaxError("stray backslash", tok_.span);
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_->size() &&
             std::isalnum(static_cast<unsigned char>((*src_)[pos_])))
        bump();
      tok_.kind = Tok::name;
      tok_.text = src_->substr(start, pos_ - start);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_->size() &&
             std::isdigit(static_cast<unsigned char>((*src_)[pos_])))
        bump();
      tok_.kind = Tok::number;
      tok_.text = src_->substr(start, pos_ - start);
    } else {
      switch (c) {
        case '{': tok_.kind = Tok::lbrace; bump(); break;
        case '}': tok_.kind = Tok::rbrace; bump(); break;
        case '(': tok_.kind = Tok::lparen; bump(); break;
        case ')': tok_.kind = Tok::rparen; bump(); break;
        case '^': tok_.kind = Tok::caret; bump(); break;
        case '_': tok_.kind = Tok::under; bump(); break;
        case '+': tok_.kind = Tok::plus; bump(); break;
        case '*': tok_.kind = Tok::star; bump(); break;
        case '/': tok_.kind = Tok::slash; bump(); break;
        case ',': tok_.kind = Tok::comma; bump(); break;
        case ';': tok_.kind = Tok::semicolon; bump(); break;
        case '#': tok_.kind = Tok::hash; bump(); break;
        case '%': tok_.kind = Tok::percent; bump(); break;
        case '=': tok_.kind = Tok::equals; bump(); break;
        case '-':
          bump();
          if (pos_ < src_->size() && (*src_)[pos_] == '>') {
            bump();
            tok_.kind = Tok::arrow;
          } else {
            tok_.kind = Tok::minus;
          }
          break;
        case '.':
          bump();
          if (pos_ < src_->size() && (*src_)[pos_] == '.') {
            bump();
            tok_.kind = Tok::dotdot;
          } else {
            tok_.kind = Tok::dot;
          }
          break;
        case ':':
          bump();
          if (pos_ < src_->size() && (*src_)[pos_] == ':') {
            bump();
            tok_.kind = Tok::coloncolon;
          } else if (pos_ < src_->size() && (*src_)[pos_] == '=') {
            bump();
            tok_.kind = Tok::assign;
          } else {
            throw SyntaxError("unexpected ':'", tok_.span);
          }
          break;
        case '@':
          bump();
          if (pos_ < src_->size() && (*src_)[pos_] == '@') {
            bump();
            tok_.kind = Tok::atat;
          } else {
            tok_.kind = Tok::at;
          }
          break;
        case '!': {
          tok_.kind = Tok::bang;
          tok_.bangs = 0;
          while (pos_ < src_->size() && (*src_)[pos_] == '!') {
            ++tok_.bangs;
            bump();
          }
          if (pos_ < src_->size() &&
              std::isdigit(static_cast<unsigned char>((*src_)[pos_]))) {
            std::size_t start = pos_;
            while (pos_ < src_->size() &&
                   std::isdigit(static_cast<unsigned char>((*src_)[pos_])))
              bump();
            tok_.depth = std::stoi(src_->substr(start, pos_ - start));
          }
          break;
        }
        default:
          throw SyntaxError(std::string("unexpected character '") + c + "'", tok_.span);
      }
    }
    tok_.span.end = pos_;
  }

  void bump() {
    if ((*src_)[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string* src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

class Parser {
 public:
  Parser(const std::string& src, PropertyTable& table) : lex_(src), table_(table) {}

  Statement statement() {
    Statement st;
    st.span = lex_.peek().span;
    if (lex_.at(Tok::end)) {
      st.kind = Statement::Kind::empty;
      return st;
    }
    if (lex_.at(Tok::at)) {
      st.kind = Statement::Kind::algorithm;
      st.algo = algorithm_call();
      expect(Tok::semicolon, "';'");
      return st;
    }
    if (lex_.at(Tok::coloncolon)) {
      // ::PostDefaultRules(...)
      lex_.next();
      st.kind = Statement::Kind::property;
      st.prop = global_property();
      expect(Tok::dot, "'.'");
      return st;
    }
    if (lex_.at(Tok::name) && lex_.peek().text == "show") {
      lex_.next();
      Token t = expect(Tok::name, "property keyword");
      if (t.text != "properties")
        throw SyntaxError("unknown show command", t.span);
      expect(Tok::semicolon, "';'");
      st.kind = Statement::Kind::show_properties;
      return st;
    }
    if (is_property_decl()) {
      st.kind = Statement::Kind::property;
      st.prop = property_decl();
      expect(Tok::dot, "'.'");
      return st;
    }
    // Assignment / rule / bare expression.
    if (lex_.at(Tok::name)) {
      Lexer save = lex_;
      Token name = lex_.next();
      if (lex_.at(Tok::assign)) {
        lex_.next();
        Expr lhs = expression();
        if (lex_.at(Tok::arrow)) {
          lex_.next();
          Expr rhs = expression();
          st.kind = Statement::Kind::rule;
          st.name = name.text;
          st.expression = lhs;
          st.rule_rhs = rhs;
        } else {
          st.kind = Statement::Kind::assign;
          st.name = name.text;
          st.expression = lhs;
          validate(st.expression, st.span);
        }
        expect(Tok::semicolon, "';'");
        return st;
      }
      lex_ = save;
    }
    st.kind = Statement::Kind::expr;
    st.expression = expression();
    validate(st.expression, st.span);
    expect(Tok::semicolon, "';'");
    return st;
  }

  Expr expression() {
    std::vector<Expr> terms;
    bool negative = false;
    if (lex_.at(Tok::minus)) {
      negative = true;
      lex_.next();
    } else if (lex_.at(Tok::plus)) {
      lex_.next();
    }
    terms.push_back(term(negative));
    while (lex_.at(Tok::plus) || lex_.at(Tok::minus)) {
      bool neg = lex_.at(Tok::minus);
      lex_.next();
      terms.push_back(term(neg));
    }
    return normalize(Expr::sum(std::move(terms)));
  }

 private:
  Token expect(Tok k, const std::string& what) {
    if (!lex_.at(k))
      throw SyntaxError("expected " + what, lex_.peek().span);
    return lex_.next();
  }

  bool is_property_decl() {
    // Lookahead for '::' before any ':=' / terminator at depth 0.
    Lexer probe = lex_;
    int depth = 0;
    while (!probe.at(Tok::end)) {
      Token t = probe.next();
      if (t.kind == Tok::lbrace || t.kind == Tok::lparen) ++depth;
      if (t.kind == Tok::rbrace || t.kind == Tok::rparen) --depth;
      if (depth == 0) {
        if (t.kind == Tok::coloncolon) return true;
        if (t.kind == Tok::assign || t.kind == Tok::semicolon) return false;
      }
    }
    return false;
  }

  AlgorithmStmt algorithm_call() {
    AlgorithmStmt out;
    expect(Tok::at, "'@'");
    Token name = expect(Tok::name, "algorithm name");
    out.call.name = name.text;
    if (lex_.at(Tok::bang)) {
      Token b = lex_.next();
      out.call.bangs = b.bangs;
      out.call.depth = b.depth;
    }
    expect(Tok::lparen, "'('");
    if (lex_.at(Tok::percent)) {
      lex_.next();
      out.target = "%";
    } else if (lex_.at(Tok::number)) {
      out.target = lex_.next().text;
    } else {
      out.target = expect(Tok::name, "target register").text;
    }
    expect(Tok::rparen, "')'");
    // Optional extra argument groups.
    while (lex_.at(Tok::lparen) || lex_.at(Tok::lbrace)) {
      if (lex_.at(Tok::lbrace)) {
        lex_.next();
        Token a = expect(Tok::name, "argument");
        out.call.args.push_back(a.text);
        expect(Tok::rbrace, "'}'");
        continue;
      }
      lex_.next();
      if (lex_.at(Tok::at)) {
        lex_.next();
        expect(Tok::lparen, "'('");
        out.rule_ref = expect(Tok::name, "rule name").text;
        expect(Tok::rparen, "')'");
      } else {
        Expr lhs = expression();
        expect(Tok::arrow, "'->'");
        Expr rhs = expression();
        out.inline_rule = {lhs, rhs};
      }
      expect(Tok::rparen, "')'");
    }
    return out;
  }

  // --- property declarations ---

  PropertyDeclData global_property() {
    PropertyDeclData d;
    Token name = expect(Tok::name, "property name");
    d.prop_name = name.text;
    if (d.prop_name != "PostDefaultRules")
      throw UnknownProperty("unknown global property '" + d.prop_name + "'");
    expect(Tok::lparen, "'('");
    while (!lex_.at(Tok::rparen)) {
      expect(Tok::atat, "'@@'");
      AlgoCall call;
      call.name = expect(Tok::name, "algorithm name").text;
      if (lex_.at(Tok::bang)) {
        Token b = lex_.next();
        call.bangs = b.bangs;
        call.depth = b.depth;
      }
      expect(Tok::lparen, "'('");
      expect(Tok::percent, "'%'");
      expect(Tok::rparen, "')'");
      d.post_rules.push_back(call);
      if (lex_.at(Tok::comma)) lex_.next();
    }
    expect(Tok::rparen, "')'");
    return d;
  }

  PropertyDeclData property_decl() {
    PropertyDeclData d;
    if (lex_.at(Tok::lbrace)) {
      lex_.next();
      while (!lex_.at(Tok::rbrace)) {
        Token n = expect(Tok::name, "name");
        if (lex_.at(Tok::hash)) {
          lex_.next();
          d.family_list.push_back(n.text);
        } else {
          d.name_list.push_back(n.text);
        }
        if (lex_.at(Tok::comma)) lex_.next();
      }
      expect(Tok::rbrace, "'}'");
    } else {
      parse_pattern(d);
    }
    expect(Tok::coloncolon, "'::'");
    Token pname = expect(Tok::name, "property name");
    d.prop_name = pname.text;
    if (lex_.at(Tok::lparen)) {
      lex_.next();
      property_args(d);
      expect(Tok::rparen, "')'");
    }
    return d;
  }

  // Pattern forms: g_{a b} | \gamma_{#} | \partial_{#} | \nabla{#}
  //              | g_{a}^{b} | \nabla_{e}{R_{a b c d}} | R_{a b c d}
  void parse_pattern(PropertyDeclData& d) {
    Token head = expect(Tok::name, "head");
    TensorFactor f;
    f.head = head.text;
    while (lex_.at(Tok::caret) || lex_.at(Tok::under)) {
      Variance v = lex_.next().kind == Tok::caret ? Variance::upper : Variance::lower;
      expect(Tok::lbrace, "'{'");
      if (lex_.at(Tok::hash)) {
        lex_.next();
        d.pattern_variadic = true;
      } else {
        while (lex_.at(Tok::name)) {
          Token n = lex_.next();
          f.slots.push_back(IndexSlot{n.text, v, ""});
        }
      }
      expect(Tok::rbrace, "'}'");
    }
    if (lex_.at(Tok::lbrace)) {
      lex_.next();
      if (lex_.at(Tok::hash)) {
        lex_.next();
        d.pattern_variadic = true;
        expect(Tok::rbrace, "'}'");
      } else {
        PropertyDeclData inner;
        parse_pattern(inner);
        d.inner_pattern = inner.pattern;
        expect(Tok::rbrace, "'}'");
      }
    }
    d.pattern = f;
  }

  void property_args(PropertyDeclData& d) {
    if (d.prop_name == "Indices") {
      if (lex_.at(Tok::name)) d.set_name = lex_.next().text;
      return;
    }
    if (d.prop_name == "Integer") {
      Token lo = expect(Tok::number, "range start");
      expect(Tok::dotdot, "'..'");
      Token hi = expect(Tok::number, "range end");
      d.range = {std::stoi(lo.text), std::stoi(hi.text)};
      return;
    }
    if (d.prop_name == "GammaMatrix") {
      Token key = expect(Tok::name, "metric=");
      if (key.text != "metric") throw SyntaxError("expected metric=", key.span);
      expect(Tok::equals, "'='");
      d.gamma_metric = expect(Tok::name, "metric head").text;
      return;
    }
    if (d.prop_name == "TableauSymmetry") {
      TableauSpec spec;
      for (int part = 0; part < 2; ++part) {
        Token key = expect(Tok::name, "shape= or indices=");
        expect(Tok::equals, "'='");
        expect(Tok::lbrace, "'{'");
        std::vector<int>& dst = (key.text == "shape") ? spec.shape : spec.slot_order;
        if (key.text != "shape" && key.text != "indices")
          throw SyntaxError("expected shape= or indices=", key.span);
        while (lex_.at(Tok::number)) {
          dst.push_back(std::stoi(lex_.next().text));
          if (lex_.at(Tok::comma)) lex_.next();
        }
        expect(Tok::rbrace, "'}'");
        if (lex_.at(Tok::comma)) lex_.next();
      }
      d.tableau = spec;
      return;
    }
    throw SyntaxError("property '" + d.prop_name + "' takes no arguments",
                      lex_.peek().span);
  }

  // --- expressions ---

  Expr term(bool negative) {
    std::vector<Expr> factors;
    Rational coeff = negative ? -1 : 1;
    bool any = false;
    while (lex_.at(Tok::number) || lex_.at(Tok::lparen) || lex_.at(Tok::name) ||
           lex_.at(Tok::star)) {
      any = true;
      if (lex_.at(Tok::star)) {
        lex_.next();  // explicit product sign is permitted
        continue;
      }
      if (lex_.at(Tok::number)) {
        Token n = lex_.next();
        Rational r(Integer(n.text));
        if (lex_.at(Tok::slash)) {
          lex_.next();
          Token den = expect(Tok::number, "denominator");
          r /= Rational(Integer(den.text));
        }
        coeff *= r;
      } else if (lex_.at(Tok::lparen)) {
        lex_.next();
        Expr inner = expression();
        expect(Tok::rparen, "')'");
        if (inner.is_scalar()) {
          coeff *= inner.scalar_value();
        } else {
          factors.push_back(inner);
        }
      } else {
        factors.push_back(Expr::factor(tensor()));
      }
    }
    if (!any) throw SyntaxError("expected expression", lex_.peek().span);
    return Expr::product(coeff, std::move(factors));
  }

  TensorFactor tensor() {
    Token head = expect(Tok::name, "tensor head");
    TensorFactor f;
    f.head = head.text;
    while (lex_.at(Tok::caret) || lex_.at(Tok::under)) {
      Variance v = lex_.next().kind == Tok::caret ? Variance::upper : Variance::lower;
      expect(Tok::lbrace, "'{'");
      bool any = false;
      while (lex_.at(Tok::name)) {
        Token n = lex_.next();
        IndexSlot slot{n.text, v, ""};
        auto set = table_.resolve_index(n.text);
        if (!set)
          throw SyntaxError("index '" + n.text + "' is not in any declared index set",
                            n.span);
        slot.set = *set;
        f.slots.push_back(std::move(slot));
        any = true;
      }
      if (!any) throw SyntaxError("empty index group", lex_.peek().span);
      expect(Tok::rbrace, "'}'");
    }
    if (lex_.at(Tok::lbrace) && table_.is_derivative_head(f.head)) {
      lex_.next();
      TensorFactor inner = tensor();
      expect(Tok::rbrace, "'}'");
      DerivOp op{f.head, f.slots};
      inner.derivs.insert(inner.derivs.begin(), op);
      return inner;
    }
    const HeadEntry* e = table_.head_entry(f.head);
    if (!e || !e->variadic)
      table_.note_head_use(f.head, static_cast<int>(f.slots.size()));
    return f;
  }

  void validate(const Expr& e, SourceSpan span) {
    try {
      free_indices(e);
    } catch (const FreeIndexMismatch&) {
      throw;
    } catch (const Error& err) {
      throw SyntaxError(err.what(), span);
    }
  }

  Lexer lex_;
  PropertyTable& table_;
};

}  // namespace

Statement parse_statement(const std::string& text, PropertyTable& table) {
  Parser p(text, table);
  return p.statement();
}

Expr parse_expression(const std::string& text, PropertyTable& table) {
  Parser p(text, table);
  return p.expression();
}

std::vector<std::string> split_statements(const std::string& text) {
  // Drop comment lines first.
  std::string kept;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::size_t i = line.find_first_not_of(" \t");
    if (i != std::string::npos && line[i] == '#') continue;
    kept += line;
    kept += '\n';
  }

  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    char c = kept[i];
    if (c == '{' || c == '(') ++depth;
    if (c == '}' || c == ')') --depth;
    cur += c;
    if (depth == 0 && (c == ';' || (c == '.' && (i + 1 >= kept.size() || kept[i + 1] != '.') &&
                                    (i == 0 || kept[i - 1] != '.')))) {
      std::size_t b = cur.find_first_not_of(" \t\n");
      if (b != std::string::npos) out.push_back(cur.substr(b));
      cur.clear();
    }
  }
  std::size_t b = cur.find_first_not_of(" \t\n");
  if (b != std::string::npos) out.push_back(cur.substr(b));
  return out;
}

}  // namespace tk
