#include "core/program.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <unordered_set>

namespace wsp {

namespace {

struct OpcodeName {
  Opcode op;
  const char* name;
};

constexpr OpcodeName kOpcodes[] = {
    {Opcode::COPY, "COPY"}, {Opcode::ADD, "ADD"}, {Opcode::MUL, "MUL"},
    {Opcode::MAX, "MAX"},   {Opcode::MIN, "MIN"}, {Opcode::SUB, "SUB"},
    {Opcode::DIV, "DIV"},   {Opcode::DEL, "DEL"}, {Opcode::SYNC, "SYNC"},
};

}  // namespace

const char* opcode_name(Opcode op) {
  for (const auto& e : kOpcodes)
    if (e.op == op) return e.name;
  return "?";
}

std::optional<Opcode> opcode_from_name(std::string_view name) {
  for (const auto& e : kOpcodes)
    if (name == e.name) return e.op;
  return std::nullopt;
}

std::optional<DType> dtype_from_name(std::string_view name) {
  if (name == "u8") return DType{"u8", 1};
  if (name == "f32") return DType{"f32", 4};
  if (name == "f64") return DType{"f64", 8};
  return std::nullopt;
}

uint64_t ArrayView::elem_count() const {
  uint64_t n = 1;
  for (int64_t s : shape) n *= static_cast<uint64_t>(s);
  return n;
}

int64_t ArrayView::min_address() const {
  int64_t a = offset;
  for (size_t i = 0; i < shape.size(); ++i)
    if (strides[i] < 0) a += (shape[i] - 1) * strides[i];
  return a;
}

int64_t ArrayView::max_address() const {
  int64_t a = offset;
  for (size_t i = 0; i < shape.size(); ++i)
    if (strides[i] > 0) a += (shape[i] - 1) * strides[i];
  return a;
}

void ArrayView::normalize() {
  assert(shape.size() == strides.size());
  for (size_t i = 0; i < shape.size(); ++i)
    if (shape[i] == 1) strides[i] = 1;
}

ParseError::ParseError(std::string kind, uint32_t line, uint32_t col,
                       const std::string& detail)
    : std::runtime_error("line " + std::to_string(line) + ", col " +
                         std::to_string(col) + ": " + kind +
                         (detail.empty() ? "" : ": " + detail)),
      kind_(std::move(kind)),
      line_(line),
      col_(col) {}

uint32_t Program::intern_view(ArrayView v) {
  v.normalize();
  for (uint32_t i = 0; i < views_.size(); ++i)
    if (views_[i] == v) return i;
  views_.push_back(std::move(v));
  return static_cast<uint32_t>(views_.size() - 1);
}

std::optional<uint32_t> Program::base_by_name(std::string_view name) const {
  for (uint32_t i = 0; i < bases.size(); ++i)
    if (bases[i].name == name) return i;
  return std::nullopt;
}

uint64_t Program::view_bytes(uint32_t id) const {
  const ArrayView& v = views_[id];
  return v.elem_count() * bases[v.base].dtype.size;
}

namespace {

// Addresses of a view, deduplicated. Only used when the total stays small.
void enumerate_addresses(const ArrayView& v, std::vector<int64_t>& out) {
  out.clear();
  out.push_back(v.offset);
  for (size_t d = 0; d < v.shape.size(); ++d) {
    size_t n = out.size();
    for (int64_t i = 1; i < v.shape[d]; ++i)
      for (size_t k = 0; k < n; ++k) out.push_back(out[k] + i * v.strides[d]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

// Exact intersection test for two 1-D arithmetic progressions
// a + i*s (0<=i<n) and b + j*t (0<=j<m), s,t != 0.
bool progressions_intersect(int64_t a, int64_t s, int64_t n, int64_t b,
                            int64_t t, int64_t m) {
  if (s < 0) {
    a += (n - 1) * s;
    s = -s;
  }
  if (t < 0) {
    b += (m - 1) * t;
    t = -t;
  }
  // Solve a + i*s == b + j*t with 0<=i<n, 0<=j<m.
  int64_t g = std::gcd(s, t);
  int64_t d = b - a;
  if (d % g != 0) return false;
  // General solution: i = i0 + (t/g)*k. Find i0 via extended gcd, tracking
  // the coefficient of s so that s*x0 == g (mod t) at termination.
  int64_t x0 = 1, x1 = 0, r0 = s, r1 = t;
  while (r1 != 0) {
    int64_t q = r0 / r1;
    int64_t r2 = r0 - q * r1;
    int64_t x2 = x0 - q * x1;
    r0 = r1;
    r1 = r2;
    x0 = x1;
    x1 = x2;
  }
  // r0 == g, x0 satisfies s*x0 ≡ g (mod t).
  __int128 i0 = static_cast<__int128>(x0) * (d / g);
  int64_t step = t / g;
  // Reduce i0 into [0, step).
  int64_t i0m = static_cast<int64_t>(i0 % step);
  if (i0m < 0) i0m += step;
  // Smallest i >= 0 congruent to i0 mod step is i0m; j must land in range.
  for (int64_t i = i0m; i < n; i += step) {
    int64_t num = a + i * s - b;
    if (num < 0) continue;
    int64_t j = num / t;
    if (num % t == 0 && j < m) return true;
    if (j >= m) break;
  }
  return false;
}

// A view is "separable" when its dims, ordered by decreasing |stride|, form a
// positional system: each coarser stride exceeds the total span of the finer
// dims. Then every address decomposes uniquely and membership is testable by
// digit extraction.
struct SeparableView {
  int64_t offset;
  std::vector<std::pair<int64_t, int64_t>> dims;  // (stride>0, extent), coarse->fine
  bool ok = false;
};

SeparableView make_separable(const ArrayView& v) {
  SeparableView s;
  s.offset = v.min_address();
  std::vector<std::pair<int64_t, int64_t>> d;
  for (size_t i = 0; i < v.shape.size(); ++i)
    if (v.shape[i] > 1) d.emplace_back(std::abs(v.strides[i]), v.shape[i]);
  std::sort(d.begin(), d.end(), [](auto& a, auto& b) { return a.first > b.first; });
  int64_t span = 0;
  for (size_t i = d.size(); i-- > 0;) {
    if (d[i].first <= span) return s;  // digits interfere
    span += d[i].first * (d[i].second - 1);
  }
  s.dims = std::move(d);
  s.ok = true;
  return s;
}

bool separable_contains(const SeparableView& s, int64_t addr) {
  int64_t r = addr - s.offset;
  if (r < 0) return false;
  for (const auto& [stride, extent] : s.dims) {
    int64_t q = r / stride;
    if (q >= extent) q = extent - 1;
    r -= q * stride;
  }
  return r == 0;
}

constexpr uint64_t kEnumerationBudget = 1'000'000;

bool views_overlap_impl(const Program& p, const ArrayView& a, const ArrayView& b) {
  if (a.base != b.base) return false;
  if (a.max_address() < b.min_address() || b.max_address() < a.min_address())
    return false;
  if (a == b) return true;
  (void)p;
  if (a.shape.size() == 1 && b.shape.size() == 1)
    return progressions_intersect(a.offset, a.strides[0], a.shape[0], b.offset,
                                  b.strides[0], b.shape[0]);
  uint64_t total = a.elem_count() + b.elem_count();
  if (total <= kEnumerationBudget) {
    std::vector<int64_t> av, bv;
    enumerate_addresses(a, av);
    enumerate_addresses(b, bv);
    std::vector<int64_t> both;
    std::set_intersection(av.begin(), av.end(), bv.begin(), bv.end(),
                          std::back_inserter(both));
    return !both.empty();
  }
  // Large multi-dim: enumerate the smaller side if the larger admits exact
  // membership tests.
  const ArrayView& small = a.elem_count() <= b.elem_count() ? a : b;
  const ArrayView& large = a.elem_count() <= b.elem_count() ? b : a;
  SeparableView sep = make_separable(large);
  if (sep.ok && small.elem_count() <= kEnumerationBudget) {
    std::vector<int64_t> sv;
    enumerate_addresses(small, sv);
    for (int64_t addr : sv)
      if (separable_contains(sep, addr)) return true;
    return false;
  }
  throw std::runtime_error(
      "views_overlap: views too large for exact analysis (non-separable "
      "multi-dimensional strides)");
}

}  // namespace

bool views_overlap(const Program& p, const ArrayView& a, const ArrayView& b) {
  return views_overlap_impl(p, a, b);
}

bool Program::views_overlap(uint32_t a, uint32_t b) const {
  assert(finalized_);
  return overlap_[static_cast<size_t>(a) * views_.size() + b];
}

void Program::finalize() {
  // View bounds.
  for (uint32_t i = 0; i < views_.size(); ++i) {
    const ArrayView& v = views_[i];
    const BaseArray& ba = bases[v.base];
    if (v.min_address() < 0 ||
        v.max_address() >= static_cast<int64_t>(ba.nelem))
      throw ParseError("out-of-bounds view", 0, 0,
                       "view of base '" + ba.name + "' addresses [" +
                           std::to_string(v.min_address()) + ", " +
                           std::to_string(v.max_address()) + "] outside 0.." +
                           std::to_string(ba.nelem - 1));
  }

  first_encounter_.assign(bases.size(), UINT32_MAX);
  del_at_.assign(bases.size(), UINT32_MAX);
  std::vector<uint32_t> first_write(bases.size(), UINT32_MAX);

  for (uint32_t i = 0; i < instructions.size(); ++i) {
    Instruction& ins = instructions[i];
    uint32_t line = ins.line ? ins.line : i + 1;
    auto touch = [&](uint32_t base) {
      if (first_encounter_[base] == UINT32_MAX) first_encounter_[base] = i;
      if (del_at_[base] != UINT32_MAX)
        throw ParseError("use-after-DEL", line, 1,
                         "base '" + bases[base].name + "' was deleted at line " +
                             std::to_string(instructions[del_at_[base]].line));
    };

    if (!is_elementwise(ins.opcode)) {
      if (ins.opcode == Opcode::DEL && del_at_[ins.base] != UINT32_MAX)
        throw ParseError("duplicate DEL", line, 1,
                         "base '" + bases[ins.base].name + "'");
      touch(ins.base);
      if (ins.opcode == Opcode::DEL) del_at_[ins.base] = i;
      continue;
    }

    if (ins.operands.empty() || ins.operands[0].kind != Operand::Kind::view)
      throw ParseError("syntax error", line, 1, "missing output operand");
    const ArrayView& out = views_[ins.operands[0].view];

    for (size_t k = 1; k < ins.operands.size(); ++k) {
      const Operand& op = ins.operands[k];
      if (op.kind != Operand::Kind::view) continue;
      const ArrayView& in = views_[op.view];
      if (in.shape != out.shape)
        throw ParseError("shape mismatch", line, 1,
                         "operand " + std::to_string(k) +
                             " shape differs from output shape");
      if (first_write[in.base] == UINT32_MAX || first_write[in.base] >= i)
        throw ParseError("read-before-write", line, 1,
                         "base '" + bases[in.base].name + "'");
      // Data-parallel rule: an overlapping (input, output) pair must be
      // identical views.
      if (op.view != ins.operands[0].view &&
          views_overlap_impl(*this, in, out))
        throw ParseError("overlap violation", line, 1,
                         "input overlaps output without being identical");
      touch(in.base);
    }
    // Output encounter is checked after inputs so a read of the base being
    // created here is reported as read-before-write.
    touch(out.base);
    if (first_write[out.base] == UINT32_MAX) first_write[out.base] = i;
  }

  // Overlap table.
  size_t n = views_.size();
  overlap_.assign(n * n, false);
  for (size_t i = 0; i < n; ++i) {
    overlap_[i * n + i] = true;
    for (size_t j = i + 1; j < n; ++j) {
      bool o = views_overlap_impl(*this, views_[i], views_[j]);
      overlap_[i * n + j] = o;
      overlap_[j * n + i] = o;
    }
  }
  finalized_ = true;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Cursor {
  const std::string& text;
  size_t pos = 0;
  uint32_t line = 1;
  uint32_t line_start = 0;

  uint32_t col() const { return static_cast<uint32_t>(pos - line_start) + 1; }
};

bool is_name_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
bool is_name_char(char c) { return is_name_start(c) || (c >= '0' && c <= '9'); }

struct LineToken {
  std::string text;
  uint32_t col = 0;
};

// Splits one logical line into tokens: words, numbers, and the punctuation
// , [ ] :
std::vector<LineToken> tokenize_line(const std::string& line, uint32_t lineno) {
  std::vector<LineToken> out;
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    uint32_t col = static_cast<uint32_t>(i) + 1;
    if (is_name_start(c)) {
      size_t j = i;
      while (j < line.size() && is_name_char(line[j])) ++j;
      out.push_back({line.substr(i, j - i), col});
      i = j;
    } else if ((c >= '0' && c <= '9') || c == '.' ||
               ((c == '-' || c == '+') && i + 1 < line.size() &&
                ((line[i + 1] >= '0' && line[i + 1] <= '9') ||
                 line[i + 1] == '.'))) {
      size_t j = i + 1;
      while (j < line.size() &&
             ((line[j] >= '0' && line[j] <= '9') || line[j] == '.' ||
              line[j] == 'e' || line[j] == 'E' ||
              ((line[j] == '+' || line[j] == '-') &&
               (line[j - 1] == 'e' || line[j - 1] == 'E'))))
        ++j;
      out.push_back({line.substr(i, j - i), col});
      i = j;
    } else if (c == ',' || c == '[' || c == ']' || c == ':') {
      out.push_back({std::string(1, c), col});
      ++i;
    } else {
      throw ParseError("syntax error", lineno, col,
                       std::string("unexpected character '") + c + "'");
    }
  }
  return out;
}

class LineParser {
 public:
  LineParser(std::vector<LineToken> toks, uint32_t lineno)
      : toks_(std::move(toks)), line_(lineno) {}

  bool done() const { return idx_ >= toks_.size(); }
  const LineToken& peek() const {
    static LineToken eol{"", 0};
    return done() ? eol : toks_[idx_];
  }
  LineToken next() {
    if (done())
      throw ParseError("syntax error", line_, eol_col(), "unexpected end of line");
    return toks_[idx_++];
  }
  void expect(const char* tok) {
    LineToken t = next();
    if (t.text != tok)
      throw ParseError("syntax error", line_, t.col,
                       "expected '" + std::string(tok) + "', got '" + t.text + "'");
  }
  bool accept(const char* tok) {
    if (!done() && toks_[idx_].text == tok) {
      ++idx_;
      return true;
    }
    return false;
  }
  uint32_t eol_col() const {
    return toks_.empty() ? 1 : toks_.back().col + static_cast<uint32_t>(toks_.back().text.size());
  }
  uint32_t line() const { return line_; }

 private:
  std::vector<LineToken> toks_;
  size_t idx_ = 0;
  uint32_t line_;
};

int64_t parse_int(const LineToken& t, uint32_t line) {
  int64_t v = 0;
  auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
  if (ec != std::errc{} || p != t.text.data() + t.text.size())
    throw ParseError("syntax error", line, t.col, "expected integer, got '" + t.text + "'");
  return v;
}

double parse_double(const LineToken& t, uint32_t line) {
  double v = 0;
  auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
  if (ec != std::errc{} || p != t.text.data() + t.text.size())
    throw ParseError("syntax error", line, t.col, "expected number, got '" + t.text + "'");
  return v;
}

bool token_is_number(const std::string& s) {
  return !s.empty() && (s[0] == '-' || s[0] == '+' || s[0] == '.' ||
                        (s[0] >= '0' && s[0] <= '9'));
}

struct SliceDim {
  std::optional<int64_t> start, stop, step;
};

// One slice dimension: [start?][:stop?[:step?]] with python-style defaults.
SliceDim parse_slice_dim(LineParser& lp) {
  SliceDim d;
  if (lp.peek().text != ":" && token_is_number(lp.peek().text))
    d.start = parse_int(lp.next(), lp.line());
  if (!lp.accept(":")) return d;  // bare index not supported; ':' required
  if (lp.peek().text != ":" && lp.peek().text != "," && lp.peek().text != "]" &&
      token_is_number(lp.peek().text))
    d.stop = parse_int(lp.next(), lp.line());
  if (lp.accept(":")) {
    if (lp.peek().text != "," && lp.peek().text != "]" &&
        token_is_number(lp.peek().text))
      d.step = parse_int(lp.next(), lp.line());
  }
  return d;
}

ArrayView view_from_slices(const std::vector<SliceDim>& dims, uint32_t base,
                           uint64_t nelem, uint32_t line, uint32_t col) {
  ArrayView v;
  v.base = base;
  int64_t n = static_cast<int64_t>(nelem);
  for (const SliceDim& d : dims) {
    int64_t step = d.step.value_or(1);
    if (step < 1)
      throw ParseError("syntax error", line, col, "slice step must be >= 1");
    int64_t start = d.start.value_or(0);
    int64_t stop = d.stop.value_or(n);
    if (start < 0) start += n;
    if (stop < 0) stop += n;
    start = std::clamp<int64_t>(start, 0, n);
    stop = std::clamp<int64_t>(stop, 0, n);
    int64_t extent = stop > start ? (stop - start + step - 1) / step : 0;
    if (extent < 1)
      throw ParseError("syntax error", line, col, "empty slice");
    v.offset += start;
    v.shape.push_back(extent);
    v.strides.push_back(step);
  }
  v.normalize();
  return v;
}

}  // namespace

Program parse_program(const std::string& text) {
  Program prog;
  std::map<std::string, uint32_t, std::less<>> base_ids;

  uint32_t lineno = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;

    std::vector<LineToken> toks = tokenize_line(line, lineno);
    if (toks.empty()) continue;
    LineParser lp(std::move(toks), lineno);

    LineToken head = lp.next();
    if (head.text == "array") {
      LineToken name = lp.next();
      if (!is_name_start(name.text[0]))
        throw ParseError("syntax error", lineno, name.col, "expected base name");
      if (base_ids.count(name.text))
        throw ParseError("syntax error", lineno, name.col,
                         "base '" + name.text + "' already declared");
      int64_t nelem = parse_int(lp.next(), lineno);
      if (nelem < 1)
        throw ParseError("syntax error", lineno, name.col, "nelem must be >= 1");
      LineToken dt = lp.next();
      auto dtype = dtype_from_name(dt.text);
      if (!dtype)
        throw ParseError("syntax error", lineno, dt.col,
                         "unknown dtype '" + dt.text + "'");
      if (!lp.done())
        throw ParseError("syntax error", lineno, lp.peek().col, "trailing tokens");
      base_ids[name.text] = static_cast<uint32_t>(prog.bases.size());
      prog.bases.push_back({name.text, static_cast<uint64_t>(nelem), *dtype});
      continue;
    }

    auto opcode = opcode_from_name(head.text);
    if (!opcode)
      throw ParseError("syntax error", lineno, head.col,
                       "unknown opcode '" + head.text + "'");

    Instruction ins;
    ins.opcode = *opcode;
    ins.line = lineno;

    auto lookup_base = [&](const LineToken& t) -> uint32_t {
      auto it = base_ids.find(t.text);
      if (it == base_ids.end())
        throw ParseError("undeclared base", lineno, t.col, "'" + t.text + "'");
      return it->second;
    };

    if (!is_elementwise(*opcode)) {
      LineToken name = lp.next();
      if (!is_name_start(name.text[0]))
        throw ParseError("syntax error", lineno, name.col, "expected base name");
      ins.base = lookup_base(name);
      if (!lp.done())
        throw ParseError("syntax error", lineno, lp.peek().col,
                         std::string(opcode_name(*opcode)) + " takes a bare base name");
      prog.instructions.push_back(std::move(ins));
      continue;
    }

    bool first = true;
    while (true) {
      LineToken t = lp.next();
      if (token_is_number(t.text)) {
        if (first)
          throw ParseError("syntax error", lineno, t.col,
                           "output operand must be a view");
        ins.operands.push_back(Operand::make_literal(parse_double(t, lineno)));
      } else if (is_name_start(t.text[0])) {
        uint32_t base = lookup_base(t);
        ArrayView v;
        if (lp.accept("[")) {
          std::vector<SliceDim> dims;
          dims.push_back(parse_slice_dim(lp));
          while (lp.accept(",")) dims.push_back(parse_slice_dim(lp));
          lp.expect("]");
          v = view_from_slices(dims, base, prog.bases[base].nelem, lineno, t.col);
        } else {
          v.base = base;
          v.offset = 0;
          v.shape = {static_cast<int64_t>(prog.bases[base].nelem)};
          v.strides = {1};
        }
        ins.operands.push_back(Operand::make_view(prog.intern_view(std::move(v))));
      } else {
        throw ParseError("syntax error", lineno, t.col,
                         "expected operand, got '" + t.text + "'");
      }
      first = false;
      if (lp.done()) break;
      lp.expect(",");
    }
    if (ins.operands.empty())
      throw ParseError("syntax error", lineno, head.col, "missing operands");
    prog.instructions.push_back(std::move(ins));
  }

  prog.finalize();
  return prog;
}

// ---------------------------------------------------------------------------
// Canonical serialization

namespace {

std::string format_number(double v) {
  if (v == static_cast<int64_t>(v) && std::abs(v) < 9e15) {
    return std::to_string(static_cast<int64_t>(v));
  }
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

std::string serialize_view(const Program& p, uint32_t id,
                           const std::vector<std::string>& names) {
  const ArrayView& v = p.view(id);
  const BaseArray& b = p.bases[v.base];
  std::string out = names.empty() ? b.name : names[v.base];
  bool whole = v.offset == 0 && v.shape.size() == 1 &&
               v.shape[0] == static_cast<int64_t>(b.nelem) && v.strides[0] == 1;
  if (whole) return out;
  out += '[';
  for (size_t d = 0; d < v.shape.size(); ++d) {
    int64_t start = d == 0 ? v.offset : 0;
    int64_t stop = start + (v.shape[d] - 1) * v.strides[d] + 1;
    if (d) out += ", ";
    out += std::to_string(start);
    out += ':';
    out += std::to_string(stop);
    out += ':';
    out += std::to_string(v.strides[d]);
  }
  out += ']';
  return out;
}

std::string serialize_impl(const Program& p, const std::vector<std::string>& names) {
  std::string out;
  std::vector<uint32_t> order(p.bases.size());
  for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return (names.empty() ? p.bases[a].name : names[a]) <
           (names.empty() ? p.bases[b].name : names[b]);
  });
  for (uint32_t b : order) {
    out += "array ";
    out += names.empty() ? p.bases[b].name : names[b];
    out += ' ';
    out += std::to_string(p.bases[b].nelem);
    out += ' ';
    out += p.bases[b].dtype.name;
    out += '\n';
  }
  for (const Instruction& ins : p.instructions) {
    out += opcode_name(ins.opcode);
    out += ' ';
    if (!is_elementwise(ins.opcode)) {
      out += names.empty() ? p.bases[ins.base].name : names[ins.base];
    } else {
      for (size_t k = 0; k < ins.operands.size(); ++k) {
        if (k) out += ", ";
        const Operand& op = ins.operands[k];
        if (op.kind == Operand::Kind::literal)
          out += format_number(op.literal);
        else
          out += serialize_view(p, op.view, names);
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string serialize_program(const Program& p) { return serialize_impl(p, {}); }

std::string fingerprint_text(const Program& p) {
  // Rename bases in first-use order: a0, a1, ...
  std::vector<std::string> names(p.bases.size());
  uint32_t next = 0;
  std::vector<uint32_t> order;
  for (const Instruction& ins : p.instructions) {
    if (!is_elementwise(ins.opcode)) {
      order.push_back(ins.base);
    } else {
      for (const Operand& op : ins.operands)
        if (op.kind == Operand::Kind::view) order.push_back(p.view(op.view).base);
    }
  }
  for (uint32_t b : order)
    if (names[b].empty()) names[b] = "a" + std::to_string(next++);
  for (auto& n : names)
    if (n.empty()) n = "a" + std::to_string(next++);
  return serialize_impl(p, names);
}

}  // namespace wsp
