#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wsp {

enum class Opcode : uint8_t {
  COPY,
  ADD,
  MUL,
  MAX,
  MIN,
  SUB,
  DIV,
  DEL,
  SYNC,
};

const char* opcode_name(Opcode op);
std::optional<Opcode> opcode_from_name(std::string_view name);

inline bool is_elementwise(Opcode op) {
  return op != Opcode::DEL && op != Opcode::SYNC;
}

struct DType {
  std::string name;
  uint32_t size = 1;  // bytes per element

  bool operator==(const DType&) const = default;
};

// Supported dtypes: u8 (1), f32 (4), f64 (8).
std::optional<DType> dtype_from_name(std::string_view name);

struct BaseArray {
  std::string name;
  uint64_t nelem = 0;
  DType dtype;
};

// Strided window onto a 1-D base array. Addresses are
//   offset + sum_i idx_i * strides_i,  0 <= idx_i < shape_i.
// Normalized form: shape/strides non-empty, extents >= 1, and extent-1
// dimensions carry stride 1 so identity comparison is well defined.
struct ArrayView {
  uint32_t base = 0;
  int64_t offset = 0;
  std::vector<int64_t> shape;
  std::vector<int64_t> strides;

  bool operator==(const ArrayView&) const = default;

  uint64_t elem_count() const;
  int64_t min_address() const;
  int64_t max_address() const;

  void normalize();
};

struct Operand {
  enum class Kind : uint8_t { view, literal } kind = Kind::view;
  uint32_t view = 0;     // index into Program::views
  double literal = 0.0;

  static Operand make_view(uint32_t id) { return {Kind::view, id, 0.0}; }
  static Operand make_literal(double v) { return {Kind::literal, 0, v}; }
};

struct Instruction {
  Opcode opcode = Opcode::COPY;
  std::vector<Operand> operands;  // element-wise: operands[0] is the output view
  uint32_t base = 0;              // DEL/SYNC target
  uint32_t line = 0;              // 1-based source line, 0 if synthetic

  bool has_output() const { return is_elementwise(opcode) && !operands.empty(); }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string kind, uint32_t line, uint32_t col, const std::string& detail);

  const std::string& kind() const { return kind_; }
  uint32_t line() const { return line_; }
  uint32_t col() const { return col_; }

 private:
  std::string kind_;
  uint32_t line_;
  uint32_t col_;
};

class Program {
 public:
  std::vector<BaseArray> bases;
  std::vector<Instruction> instructions;

  // Interned, normalized views. Equal views share an id, so identity
  // comparison on ids is exact within one Program.
  uint32_t intern_view(ArrayView v);
  const ArrayView& view(uint32_t id) const { return views_[id]; }
  uint32_t view_count() const { return static_cast<uint32_t>(views_.size()); }

  std::optional<uint32_t> base_by_name(std::string_view name) const;

  // Validates the whole program and freezes it: checks view bounds, the
  // single-writer rules (read-before-write, use-after-DEL, duplicate DEL),
  // per-instruction shape agreement and operand aliasing, then precomputes
  // the pairwise view-overlap table. Throws ParseError.
  void finalize();
  bool finalized() const { return finalized_; }

  bool views_overlap(uint32_t a, uint32_t b) const;
  bool views_identical(uint32_t a, uint32_t b) const { return a == b; }

  uint64_t view_bytes(uint32_t id) const;

  // First-encounter instruction for each base, and DEL positions.
  // first_encounter[b] / del_at[b] == UINT32_MAX when absent.
  const std::vector<uint32_t>& first_encounter() const { return first_encounter_; }
  const std::vector<uint32_t>& del_at() const { return del_at_; }

 private:
  std::vector<ArrayView> views_;
  std::vector<bool> overlap_;  // view_count * view_count
  std::vector<uint32_t> first_encounter_;
  std::vector<uint32_t> del_at_;
  bool finalized_ = false;

  friend Program parse_program(const std::string& text);
};

// Exact overlap test on raw views (same semantics as Program::views_overlap
// but usable before interning). Exposed for tests.
bool views_overlap(const Program& p, const ArrayView& a, const ArrayView& b);

Program parse_program(const std::string& text);

// Canonical text form: declarations sorted by base name, normalized slices,
// one instruction per line. parse(serialize(p)) == p for finalized programs.
std::string serialize_program(const Program& p);

// Canonical serialization with bases renamed positionally (first-use order).
// This is the cache-fingerprint payload: insensitive to base naming.
std::string fingerprint_text(const Program& p);

}  // namespace wsp
