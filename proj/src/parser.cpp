#include "pita/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <map>

namespace pita {

namespace {

enum class Tok {
  Name, Var, Int, Float, Quoted,
  LParen, RParen, LBrack, RBrack,
  Comma, Semi, Bar, Colon, ColonDash, Period,
  NegOp, NeqOp, EqOp, Slash, End,
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Name: return "name";
    case Tok::Var: return "variable";
    case Tok::Int: return "integer";
    case Tok::Float: return "float";
    case Tok::Quoted: return "quoted atom";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Bar: return "'|'";
    case Tok::Colon: return "':'";
    case Tok::ColonDash: return "':-'";
    case Tok::Period: return "'.'";
    case Tok::NegOp: return "'\\+'";
    case Tok::NeqOp: return "'\\='";
    case Tok::EqOp: return "'='";
    case Tok::Slash: return "'/'";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Lexer {
  std::string_view text;
  size_t pos = 0;
  int line = 1, col = 1;

  Tok tok = Tok::End;
  std::string lexeme;
  int64_t ival = 0;
  double fval = 0.0;
  int tok_line = 1, tok_col = 1;

  explicit Lexer(std::string_view t) : text(t) { next(); }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, tok_line, tok_col); }

  char peek(size_t ahead = 0) const {
    return pos + ahead < text.size() ? text[pos + ahead] : '\0';
  }

  char take() {
    char c = text[pos++];
    if (c == '\n') { line++; col = 1; } else { col++; }
    return c;
  }

  void skip_layout() {
    for (;;) {
      char c = peek();
      if (c == '%') {
        while (pos < text.size() && peek() != '\n') take();
      } else if (std::isspace(static_cast<unsigned char>(c)) && c != '\0') {
        take();
      } else {
        return;
      }
    }
  }

  void scan_number(bool negative) {
    std::string s;
    if (negative) s += '-';
    while (std::isdigit(static_cast<unsigned char>(peek()))) s += take();
    bool flt = false;
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      flt = true;
      s += take();
      while (std::isdigit(static_cast<unsigned char>(peek()))) s += take();
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (std::isdigit(static_cast<unsigned char>(peek(1))) ||
         ((peek(1) == '+' || peek(1) == '-') &&
          std::isdigit(static_cast<unsigned char>(peek(2)))))) {
      flt = true;
      s += take();
      if (peek() == '+' || peek() == '-') s += take();
      while (std::isdigit(static_cast<unsigned char>(peek()))) s += take();
    }
    lexeme = s;
    if (flt) {
      tok = Tok::Float;
      fval = strtod(s.c_str(), nullptr);
    } else {
      tok = Tok::Int;
      errno = 0;
      ival = strtoll(s.c_str(), nullptr, 10);
      if (errno == ERANGE) throw ParseError("integer literal out of range", tok_line, tok_col);
    }
  }

  void next() {
    skip_layout();
    tok_line = line;
    tok_col = col;
    if (pos >= text.size()) { tok = Tok::End; return; }
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c))) { scan_number(false); return; }
    if (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      take();
      scan_number(true);
      return;
    }
    if (c == '_' || std::isupper(static_cast<unsigned char>(c))) {
      lexeme.clear();
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') lexeme += take();
      tok = Tok::Var;
      return;
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      lexeme.clear();
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') lexeme += take();
      tok = Tok::Name;
      return;
    }
    if (c == '\'') {
      take();
      lexeme.clear();
      for (;;) {
        if (pos >= text.size()) throw ParseError("unterminated quoted atom", tok_line, tok_col);
        char d = take();
        if (d == '\\' && pos < text.size()) {
          char e = take();
          switch (e) {
            case 'n': lexeme += '\n'; break;
            case 't': lexeme += '\t'; break;
            default: lexeme += e; break;
          }
        } else if (d == '\'') {
          break;
        } else {
          lexeme += d;
        }
      }
      tok = Tok::Quoted;
      return;
    }
    take();
    switch (c) {
      case '(': tok = Tok::LParen; return;
      case ')': tok = Tok::RParen; return;
      case '[': tok = Tok::LBrack; return;
      case ']': tok = Tok::RBrack; return;
      case ',': tok = Tok::Comma; return;
      case ';': tok = Tok::Semi; return;
      case '|': tok = Tok::Bar; return;
      case '.': tok = Tok::Period; return;
      case '=': tok = Tok::EqOp; return;
      case '/': tok = Tok::Slash; return;
      case ':':
        if (peek() == '-') { take(); tok = Tok::ColonDash; return; }
        tok = Tok::Colon;
        return;
      case '\\':
        if (peek() == '+') { take(); tok = Tok::NegOp; return; }
        if (peek() == '=') { take(); tok = Tok::NeqOp; return; }
        throw ParseError("unexpected '\\'", tok_line, tok_col);
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", tok_line, tok_col);
    }
  }
};

int64_t pow10_checked(int e, const Lexer& lx) {
  int64_t v = 1;
  for (int i = 0; i < e; ++i) {
    if (v > INT64_MAX / 10) lx.fail("annotation requires too much precision");
    v *= 10;
  }
  return v;
}

// Exact rational value of a decimal lexeme like "0.52" or "1e-3".
Rational decimal_to_rational(const std::string& s, const Lexer& lx) {
  int64_t mant = 0;
  int frac = 0, exp = 0;
  size_t i = 0;
  bool neg = false;
  if (i < s.size() && s[i] == '-') { neg = true; i++; }
  auto push_digit = [&](char d) {
    if (mant > (INT64_MAX - (d - '0')) / 10) lx.fail("annotation requires too much precision");
    mant = mant * 10 + (d - '0');
  };
  for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) push_digit(s[i]);
  if (i < s.size() && s[i] == '.') {
    i++;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
      push_digit(s[i]);
      frac++;
    }
  }
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    i++;
    bool eneg = false;
    if (s[i] == '+' || s[i] == '-') eneg = (s[i++] == '-');
    int e = 0;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
      e = e * 10 + (s[i] - '0');
      if (e > 30) lx.fail("annotation exponent out of range");
    }
    exp = eneg ? -e : e;
  }
  if (neg) mant = -mant;
  int e = exp - frac;
  if (e >= 0) return Rational(mant * pow10_checked(e, lx), 1);
  return Rational(mant, pow10_checked(-e, lx));
}

struct ClauseCtx {
  std::map<std::string, int32_t> vars;
  std::vector<std::string> names;

  int32_t lookup(const std::string& name) {
    if (name == "_") {
      names.push_back("_");
      return static_cast<int32_t>(names.size() - 1);
    }
    auto it = vars.find(name);
    if (it != vars.end()) return it->second;
    int32_t id = static_cast<int32_t>(names.size());
    names.push_back(name);
    vars.emplace(name, id);
    return id;
  }
};

struct Parser {
  Lexer lx;
  Program& p;
  bool poss;

  Parser(std::string_view text, Program& prog, bool poss_mode)
      : lx(text), p(prog), poss(poss_mode) {}

  void expect(Tok t) {
    if (lx.tok != t)
      lx.fail(std::string("expected ") + tok_name(t) + ", found " + tok_name(lx.tok));
    lx.next();
  }

  const Term* parse_term(ClauseCtx& ctx) {
    switch (lx.tok) {
      case Tok::Var: {
        int32_t id = ctx.lookup(lx.lexeme);
        lx.next();
        return p.arena.var(id);
      }
      case Tok::Int: {
        int64_t v = lx.ival;
        lx.next();
        return p.arena.integer(v);
      }
      case Tok::Float: {
        double v = lx.fval;
        lx.next();
        return p.arena.real(v);
      }
      case Tok::Name:
      case Tok::Quoted: {
        Sym f = p.syms.intern(lx.lexeme);
        lx.next();
        if (lx.tok != Tok::LParen) return p.arena.atom(f);
        lx.next();
        std::vector<const Term*> args;
        args.push_back(parse_term(ctx));
        while (lx.tok == Tok::Comma) {
          lx.next();
          args.push_back(parse_term(ctx));
        }
        expect(Tok::RParen);
        return p.arena.compound(f, std::move(args));
      }
      case Tok::LBrack: {
        lx.next();
        if (lx.tok == Tok::RBrack) {
          lx.next();
          return p.arena.atom(p.sym_nil);
        }
        std::vector<const Term*> elems;
        elems.push_back(parse_term(ctx));
        while (lx.tok == Tok::Comma) {
          lx.next();
          elems.push_back(parse_term(ctx));
        }
        const Term* tail = p.arena.atom(p.sym_nil);
        if (lx.tok == Tok::Bar) {
          lx.next();
          tail = parse_term(ctx);
        }
        expect(Tok::RBrack);
        for (size_t i = elems.size(); i-- > 0;)
          tail = p.arena.compound(p.sym_dot, {elems[i], tail});
        return tail;
      }
      default:
        lx.fail(std::string("expected a term, found ") + tok_name(lx.tok));
    }
  }

  const Term* require_atom(const Term* t, const char* where) {
    if (t == nullptr || !t->is_compound())
      lx.fail(std::string("expected an atom in ") + where);
    return t;
  }

  Rational parse_annotation() {
    if (lx.tok == Tok::Int) {
      int64_t num = lx.ival;
      lx.next();
      int64_t den = 1;
      if (lx.tok == Tok::Slash) {
        lx.next();
        if (lx.tok != Tok::Int) lx.fail("expected denominator after '/'");
        den = lx.ival;
        if (den == 0) lx.fail("zero denominator in annotation");
        lx.next();
      }
      return check_range(Rational(num, den));
    }
    if (lx.tok == Tok::Float) {
      Rational r = decimal_to_rational(lx.lexeme, lx);
      lx.next();
      return check_range(r);
    }
    lx.fail("expected an annotation value");
  }

  Rational check_range(Rational r) {
    if (!(Rational::zero() < r) || Rational::one() < r)
      lx.fail("annotation " + r.str() + " out of range (0,1]");
    return r;
  }

  Literal parse_literal(ClauseCtx& ctx) {
    if (lx.tok == Tok::NegOp) {
      lx.next();
      const Term* a = require_atom(parse_term(ctx), "negative literal");
      if (p.is_builtin(a)) lx.fail("cannot negate a built-in");
      return Literal{true, a};
    }
    const Term* t = parse_term(ctx);
    if (lx.tok == Tok::EqOp || lx.tok == Tok::NeqOp) {
      Sym f = lx.tok == Tok::EqOp ? p.sym_eq : p.sym_neq;
      lx.next();
      const Term* rhs = parse_term(ctx);
      return Literal{false, p.arena.compound(f, {t, rhs})};
    }
    return Literal{false, require_atom(t, "body literal")};
  }

  void parse_directive() {
    if (lx.tok != Tok::Name || lx.lexeme != "table") lx.fail("unknown directive");
    lx.next();
    if (lx.tok != Tok::Name && lx.tok != Tok::Quoted) lx.fail("expected predicate name");
    Sym f = p.syms.intern(lx.lexeme);
    lx.next();
    expect(Tok::Slash);
    if (lx.tok != Tok::Int || lx.ival < 0) lx.fail("expected arity");
    p.table_directives.insert(Pred{f, static_cast<uint32_t>(lx.ival)});
    lx.next();
    expect(Tok::Period);
  }

  void parse_clause() {
    ClauseCtx ctx;
    AnnotatedClause c;
    c.id = static_cast<int>(p.clauses.size()) + 1;

    std::vector<bool> annotated;
    for (;;) {
      const Term* atom = require_atom(parse_term(ctx), "clause head");
      if (p.is_builtin(atom)) lx.fail("built-in cannot be a clause head");
      Rational ann = Rational::one();
      bool has_ann = false;
      if (lx.tok == Tok::Colon) {
        lx.next();
        ann = parse_annotation();
        has_ann = true;
      }
      c.heads.push_back({atom, ann});
      annotated.push_back(has_ann);
      if (lx.tok != Tok::Semi) break;
      lx.next();
    }
    if (c.heads.size() > 1) {
      if (poss)
        lx.fail("AnnotatedMultiHeadInPossMode: possibilistic clauses have exactly one head");
      for (bool has_ann : annotated)
        if (!has_ann) lx.fail("every head of a disjunction needs an annotation");
    }

    if (lx.tok == Tok::ColonDash) {
      lx.next();
      c.body.push_back(parse_literal(ctx));
      while (lx.tok == Tok::Comma) {
        lx.next();
        c.body.push_back(parse_literal(ctx));
      }
    }
    expect(Tok::Period);

    Rational sum = Rational::zero();
    for (const auto& h : c.heads) {
      sum = sum + h.ann;
      if (Rational::one() < sum) {
        // exact arithmetic: treat anything within 1e-9 of 1 as 1
        if ((sum - Rational::one()).to_double() > 1e-9)
          lx.fail("head annotations sum to " + sum.str() + " > 1");
        sum = Rational::one();
      }
    }
    c.null_mass = Rational::one() - sum;
    c.nvars = static_cast<int32_t>(ctx.names.size());
    c.var_names = std::move(ctx.names);
    c.vc.resize(c.nvars);
    for (int32_t i = 0; i < c.nvars; ++i) c.vc[i] = i;
    p.clauses.push_back(std::move(c));
  }

  void run() {
    while (lx.tok != Tok::End) {
      if (lx.tok == Tok::ColonDash) {
        lx.next();
        parse_directive();
      } else {
        parse_clause();
      }
    }
    p.index_clauses();
  }
};

}  // namespace

Program parse_program(std::string_view text, bool poss_mode) {
  Program p;
  Parser parser(text, p, poss_mode);
  parser.run();
  return p;
}

const Term* parse_query(Program& p, std::string_view text) {
  Parser parser(text, p, false);
  ClauseCtx ctx;
  const Term* t = parser.parse_term(ctx);
  if (parser.lx.tok == Tok::Period) parser.lx.next();
  if (parser.lx.tok != Tok::End) parser.lx.fail("a query is a single atom");
  if (!t->is_compound()) parser.lx.fail("a query is a single atom");
  return t;
}

std::string clause_to_string(const AnnotatedClause& c, const SymbolTable& syms) {
  std::string out;
  for (size_t i = 0; i < c.heads.size(); ++i) {
    if (i) out += " ; ";
    out += term_to_string(c.heads[i].atom, syms, &c.var_names);
    if (c.heads.size() > 1 || !(c.heads[i].ann == Rational::one())) {
      out += ":";
      out += c.heads[i].ann.str();
    }
  }
  if (!c.body.empty()) {
    out += " :- ";
    for (size_t i = 0; i < c.body.size(); ++i) {
      if (i) out += ", ";
      if (c.body[i].negated) out += "\\+ ";
      out += term_to_string(c.body[i].atom, syms, &c.var_names);
    }
  }
  out += ".";
  return out;
}

std::string program_to_string(const Program& p) {
  std::string out;
  for (const Pred& d : p.table_directives)
    out += ":- table " + p.syms.name(d.functor) + "/" + std::to_string(d.arity) + ".\n";
  for (const auto& c : p.clauses) {
    out += clause_to_string(c, p.syms);
    out += "\n";
  }
  return out;
}

}  // namespace pita
