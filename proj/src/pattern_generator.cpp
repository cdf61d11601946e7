#include "arat/pattern_generator.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <variant>
#include <vector>

#include "arat/values.hpp"

namespace arat {

namespace {

using CharSet = std::vector<char>;

CharSet printable() {
  CharSet s;
  for (char c = 32; c < 127; ++c) s.push_back(c);
  return s;
}

CharSet digits() {
  CharSet s;
  for (char c = '0'; c <= '9'; ++c) s.push_back(c);
  return s;
}

CharSet word_chars() {
  CharSet s = digits();
  for (char c = 'a'; c <= 'z'; ++c) s.push_back(c);
  for (char c = 'A'; c <= 'Z'; ++c) s.push_back(c);
  s.push_back('_');
  return s;
}

CharSet space_chars() { return {' ', '\t'}; }

CharSet complement(const CharSet& excluded) {
  CharSet out;
  std::array<bool, 256> banned{};
  for (char c : excluded) banned[static_cast<unsigned char>(c)] = true;
  for (char c : printable())
    if (!banned[static_cast<unsigned char>(c)]) out.push_back(c);
  return out;
}

void normalize(CharSet& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

}  // namespace

struct PatternGenerator::Node {
  struct Chars {
    CharSet choices;
  };
  struct Sequence {
    std::vector<std::unique_ptr<Node>> items;
  };
  struct Alternation {
    std::vector<std::unique_ptr<Node>> branches;
  };
  struct Repeat {
    std::unique_ptr<Node> item;
    int min = 0;
    int max = 0;
  };
  std::variant<Chars, Sequence, Alternation, Repeat> body;
};

namespace {

using Node = PatternGenerator::Node;

class Parser {
 public:
  explicit Parser(std::string_view p) : p_(p) {}

  std::unique_ptr<Node> parse() {
    auto node = alternation();
    if (pos_ != p_.size()) fail("unbalanced ')'");
    return node;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw UnsatisfiablePattern("pattern '" + std::string(p_) + "': " + why);
  }

  bool at_end() const { return pos_ >= p_.size(); }
  char peek() const { return p_[pos_]; }

  std::unique_ptr<Node> alternation() {
    Node::Alternation alt;
    alt.branches.push_back(sequence());
    while (!at_end() && peek() == '|') {
      ++pos_;
      alt.branches.push_back(sequence());
    }
    if (alt.branches.size() == 1) return std::move(alt.branches.front());
    return std::make_unique<Node>(Node{std::move(alt)});
  }

  std::unique_ptr<Node> sequence() {
    Node::Sequence seq;
    while (!at_end() && peek() != '|' && peek() != ')') {
      auto atom_node = atom();
      if (!atom_node) continue;
      seq.items.push_back(quantified(std::move(atom_node)));
    }
    return std::make_unique<Node>(Node{std::move(seq)});
  }

  std::unique_ptr<Node> chars(CharSet set) {
    normalize(set);
    if (set.empty()) fail("empty character class");
    return std::make_unique<Node>(Node{Node::Chars{std::move(set)}});
  }

  // Returns nullptr for zero-width assertions that are simply skipped.
  std::unique_ptr<Node> atom() {
    const char c = p_[pos_++];
    switch (c) {
      case '^':
      case '$':
        return nullptr;
      case '.':
        return chars(printable());
      case '[':
        return chars(char_class());
      case '(':
        return group();
      case '\\': {
        if (at_end()) fail("trailing backslash");
        const char e = p_[pos_];
        if (e == 'b' || e == 'B') {
          ++pos_;
          return nullptr;
        }
        return chars(escape());
      }
      case '*':
      case '+':
      case '?':
        fail("quantifier without operand");
      default:
        return chars({c});
    }
  }

  std::unique_ptr<Node> group() {
    if (!at_end() && peek() == '?') {
      ++pos_;
      if (at_end()) fail("incomplete group");
      const char kind = p_[pos_];
      if (kind == ':') {
        ++pos_;
      } else if (kind == '<' && pos_ + 1 < p_.size() && p_[pos_ + 1] != '=' && p_[pos_ + 1] != '!') {
        auto close = p_.find('>', pos_);
        if (close == std::string_view::npos) fail("unterminated group name");
        pos_ = close + 1;
      } else {
        fail("lookaround is not supported");
      }
    }
    auto inner = alternation();
    if (at_end() || peek() != ')') fail("missing ')'");
    ++pos_;
    return inner;
  }

  int hex_value(std::size_t digits_count) {
    if (pos_ + digits_count > p_.size()) fail("truncated hex escape");
    int v = 0;
    for (std::size_t i = 0; i < digits_count; ++i) {
      const char h = p_[pos_++];
      if (!std::isxdigit(static_cast<unsigned char>(h))) fail("bad hex escape");
      v = v * 16 + (std::isdigit(static_cast<unsigned char>(h)) ? h - '0'
                                                                : std::tolower(h) - 'a' + 10);
    }
    return v;
  }

  // Escape after the backslash; pos_ points at the escaped character.
  CharSet escape() {
    const char e = p_[pos_++];
    switch (e) {
      case 'd': return digits();
      case 'D': return complement(digits());
      case 'w': return word_chars();
      case 'W': return complement(word_chars());
      case 's': return space_chars();
      case 'S': return complement(space_chars());
      case 't': return {'\t'};
      case 'n': return {'\n'};
      case 'r': return {'\r'};
      case 'f': return {'\f'};
      case 'v': return {'\v'};
      case '0': return {'\0'};
      case 'x': return {static_cast<char>(hex_value(2))};
      case 'u': {
        const int v = hex_value(4);
        if (v > 127) fail("non-ASCII escape");
        return {static_cast<char>(v)};
      }
      default:
        if (e >= '1' && e <= '9') fail("backreferences are not supported");
        return {e};
    }
  }

  CharSet char_class() {
    bool negated = false;
    if (!at_end() && peek() == '^') {
      negated = true;
      ++pos_;
    }
    CharSet set;
    bool first = true;
    while (true) {
      if (at_end()) fail("unterminated character class");
      char c = p_[pos_];
      if (c == ']' && !first) {
        ++pos_;
        break;
      }
      first = false;
      ++pos_;
      CharSet item;
      if (c == '\\') {
        if (at_end()) fail("trailing backslash");
        if (p_[pos_] == 'b') {
          ++pos_;
          item = {'\b'};
        } else {
          item = escape();
        }
      } else {
        item = {c};
      }
      const bool range = item.size() == 1 && pos_ + 1 < p_.size() && p_[pos_] == '-' &&
                         p_[pos_ + 1] != ']';
      if (range) {
        ++pos_;
        char hi = p_[pos_++];
        if (hi == '\\') {
          if (at_end()) fail("trailing backslash");
          CharSet esc = escape();
          if (esc.size() != 1) fail("class escape as range bound");
          hi = esc.front();
        }
        const char lo = item.front();
        if (lo > hi) fail("inverted range");
        for (int x = lo; x <= hi; ++x) set.push_back(static_cast<char>(x));
      } else {
        set.insert(set.end(), item.begin(), item.end());
      }
    }
    return negated ? complement(set) : set;
  }

  bool parse_int(int& out) {
    const std::size_t start = pos_;
    long v = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (peek() - '0');
      if (v > 1000) fail("repetition count too large");
      ++pos_;
    }
    out = static_cast<int>(v);
    return pos_ > start;
  }

  std::unique_ptr<Node> quantified(std::unique_ptr<Node> item) {
    if (at_end()) return item;
    int min = 0;
    int max = 0;
    const char q = peek();
    if (q == '*') {
      ++pos_;
      min = 0;
      max = PatternGenerator::kUnboundedExtra;
    } else if (q == '+') {
      ++pos_;
      min = 1;
      max = 1 + PatternGenerator::kUnboundedExtra;
    } else if (q == '?') {
      ++pos_;
      min = 0;
      max = 1;
    } else if (q == '{') {
      const std::size_t save = pos_;
      ++pos_;
      if (!parse_int(min)) {
        pos_ = save;  // a literal '{'
        return item;
      }
      max = min;
      if (!at_end() && peek() == ',') {
        ++pos_;
        if (!parse_int(max)) max = min + PatternGenerator::kUnboundedExtra;
      }
      if (at_end() || peek() != '}') {
        pos_ = save;
        return item;
      }
      ++pos_;
      if (max < min) fail("inverted repetition bounds");
    } else {
      return item;
    }
    if (!at_end() && peek() == '?') ++pos_;  // lazy makes no difference here
    return std::make_unique<Node>(Node{Node::Repeat{std::move(item), min, max}});
  }

  std::string_view p_;
  std::size_t pos_ = 0;
};

void emit(const Node& node, Rng& rng, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Node::Chars>) {
          out.push_back(n.choices[rng.index(n.choices.size())]);
        } else if constexpr (std::is_same_v<T, Node::Sequence>) {
          for (const auto& item : n.items) emit(*item, rng, out);
        } else if constexpr (std::is_same_v<T, Node::Alternation>) {
          emit(*n.branches[rng.index(n.branches.size())], rng, out);
        } else {
          const auto count = rng.uniform_int(n.min, n.max);
          for (std::int64_t i = 0; i < count; ++i) emit(*n.item, rng, out);
        }
      },
      node.body);
}

}  // namespace

PatternGenerator::PatternGenerator(std::string_view pattern) : root_(Parser(pattern).parse()) {}
PatternGenerator::~PatternGenerator() = default;
PatternGenerator::PatternGenerator(PatternGenerator&&) noexcept = default;
PatternGenerator& PatternGenerator::operator=(PatternGenerator&&) noexcept = default;

std::string PatternGenerator::generate(Rng& rng) const {
  std::string out;
  emit(*root_, rng, out);
  return out;
}

}  // namespace arat
