// Copyright 2026 The lorentz-encode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lorentz/common.hpp"
#include "lorentz/statevector.hpp"

namespace lorentz {

enum class GateKind { kUnitary, kQft, kBarrier };

/// One circuit element. For kUnitary, `target` is the acted-on wire and
/// `matrix` the 2x2 payload; for kQft, the transform covers qubits
/// [target, target + span). Controls apply to both.
struct Gate {
  GateKind kind = GateKind::kUnitary;
  std::string label;
  unsigned target = 0;
  unsigned span = 1;
  bool inverse = false;
  std::vector<Control> controls;
  Mat2 matrix = gates::identity();

  static Gate unitary(std::string label, unsigned target, const Mat2& m,
                      std::vector<Control> controls = {}) {
    Gate g;
    g.kind = GateKind::kUnitary;
    g.label = std::move(label);
    g.target = target;
    g.matrix = m;
    g.controls = std::move(controls);
    return g;
  }

  static Gate qft(unsigned first, unsigned count, bool inverse = false,
                  std::vector<Control> controls = {}) {
    Gate g;
    g.kind = GateKind::kQft;
    g.label = inverse ? "qft_dg" : "qft";
    g.target = first;
    g.span = count;
    g.inverse = inverse;
    g.controls = std::move(controls);
    return g;
  }

  static Gate barrier(std::string label = "barrier") {
    Gate g;
    g.kind = GateKind::kBarrier;
    g.label = std::move(label);
    return g;
  }

  /// Wires touched by the gate, controls included.
  std::vector<unsigned> qubits() const {
    std::vector<unsigned> q;
    if (kind == GateKind::kUnitary) q.push_back(target);
    if (kind == GateKind::kQft)
      for (unsigned i = 0; i < span; ++i) q.push_back(target + i);
    for (const auto& c : controls) q.push_back(c.qubit);
    return q;
  }

  Gate adjoint_gate() const {
    Gate g = *this;
    if (kind == GateKind::kUnitary) {
      g.matrix = adjoint(matrix);
      if (!label.empty() && label.back() == '~')
        g.label.pop_back();
      else
        g.label += '~';
    } else if (kind == GateKind::kQft) {
      g.inverse = !inverse;
      g.label = g.inverse ? "qft_dg" : "qft";
    }
    return g;
  }
};

/// Which wires play which role. Data wires are always [0, n_data).
struct RegisterLayout {
  unsigned n_data = 0;
  unsigned dim = 1;
  std::vector<unsigned> ancillae;
  std::optional<unsigned> ar_ancilla;

  /// Wires that must read 0 for the success branch.
  std::vector<unsigned> success_qubits() const {
    std::vector<unsigned> q = ancillae;
    if (ar_ancilla) q.push_back(*ar_ancilla);
    return q;
  }
};

/// Named half-open gate range [begin, end).
struct Block {
  std::string name;
  std::size_t begin = 0;
  std::size_t end = 0;
};

class Circuit {
 public:
  explicit Circuit(unsigned n_qubits, RegisterLayout layout = {})
      : n_qubits_(n_qubits), layout_(std::move(layout)) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) throw std::invalid_argument("circuit width");
    if (layout_.n_data == 0) layout_.n_data = n_qubits;
  }

  unsigned n_qubits() const { return n_qubits_; }
  const RegisterLayout& layout() const { return layout_; }
  RegisterLayout& layout() { return layout_; }
  const std::vector<Gate>& gates() const { return gates_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  double global_phase() const { return global_phase_; }
  bool empty() const { return gates_.empty(); }

  Circuit& add(Gate g) {
    check_gate(g);
    gates_.push_back(std::move(g));
    return *this;
  }

  Circuit& add_global_phase(double phi) {
    global_phase_ = std::remainder(global_phase_ + phi, 2.0 * kPi);
    return *this;
  }

  void open_block(std::string name) {
    open_.push_back(blocks_.size());
    blocks_.push_back({std::move(name), gates_.size(), gates_.size()});
  }

  void close_block() {
    if (open_.empty()) throw std::logic_error("no open block");
    blocks_[open_.back()].end = gates_.size();
    open_.pop_back();
  }

  /// Appends every gate of `other` (wires map identically). Non-empty
  /// `name` wraps the appended range in a block; inner blocks are kept.
  Circuit& append(const Circuit& other, const std::string& name = {}) {
    if (other.n_qubits_ > n_qubits_) throw std::invalid_argument("appended circuit is wider");
    if (!other.open_.empty()) throw std::logic_error("appending a circuit with open blocks");
    const std::size_t offset = gates_.size();
    if (!name.empty()) open_block(name);
    for (const auto& b : other.blocks_) blocks_.push_back({b.name, b.begin + offset, b.end + offset});
    for (const auto& g : other.gates_) add(g);
    add_global_phase(other.global_phase_);
    if (!name.empty()) close_block();
    return *this;
  }

  /// Gate-wise inverse: reversed order, adjoint payloads.
  Circuit inverse() const {
    Circuit out(n_qubits_, layout_);
    const std::size_t n = gates_.size();
    for (std::size_t i = n; i-- > 0;) out.gates_.push_back(gates_[i].adjoint_gate());
    for (const auto& b : blocks_) out.blocks_.push_back({b.name + "~", n - b.end, n - b.begin});
    out.global_phase_ = -global_phase_;
    std::stable_sort(out.blocks_.begin(), out.blocks_.end(), [](const Block& x, const Block& y) {
      return x.begin != y.begin ? x.begin < y.begin : x.end > y.end;
    });
    return out;
  }

  /// Every gate gains `extra` controls. A global phase turns into a phase
  /// gate on the control pattern.
  Circuit controlled_by(const std::vector<Control>& extra) const {
    Circuit out(n_qubits_, layout_);
    out.blocks_ = blocks_;
    for (const auto& g : gates_) {
      Gate c = g;
      if (c.kind != GateKind::kBarrier) c.controls.insert(c.controls.end(), extra.begin(), extra.end());
      out.add(std::move(c));
    }
    if (global_phase_ != 0.0) {
      if (extra.empty()) {
        out.global_phase_ = global_phase_;
      } else {
        const Control head = extra.front();
        std::vector<Control> rest(extra.begin() + 1, extra.end());
        const Mat2 m = head.polarity ? gates::phase(global_phase_)
                                     : Mat2{std::polar(1.0, global_phase_), cplx{0}, cplx{0}, cplx{1}};
        out.add(Gate::unitary("gphase", head.qubit, m, std::move(rest)));
      }
    }
    return out;
  }

  /// Checks wire ranges, payload unitarity and block nesting.
  void validate() const {
    for (const auto& g : gates_) check_gate(g);
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const Block& a = blocks_[i];
      if (a.begin > a.end || a.end > gates_.size()) throw std::logic_error("block out of range");
      for (std::size_t j = i + 1; j < blocks_.size(); ++j) {
        const Block& b = blocks_[j];
        const bool disjoint = a.end <= b.begin || b.end <= a.begin;
        const bool a_in_b = b.begin <= a.begin && a.end <= b.end;
        const bool b_in_a = a.begin <= b.begin && b.end <= a.end;
        if (!(disjoint || a_in_b || b_in_a)) throw std::logic_error("blocks overlap without nesting");
      }
    }
  }

  /// Number of top-level, uncontrolled QFT gates on exactly `count` wires
  /// starting at `first`.
  std::size_t count_qft(unsigned first, unsigned count) const {
    return static_cast<std::size_t>(std::count_if(gates_.begin(), gates_.end(), [&](const Gate& g) {
      return g.kind == GateKind::kQft && g.controls.empty() && g.target == first && g.span == count;
    }));
  }

 private:
  void check_gate(const Gate& g) const {
    if (g.kind == GateKind::kBarrier) return;
    std::uint64_t seen = 0;
    for (unsigned q : g.qubits()) {
      if (q >= n_qubits_) throw std::out_of_range("gate wire outside circuit");
      const std::uint64_t bit = std::uint64_t{1} << q;
      if (seen & bit) throw std::invalid_argument("gate wires overlap");
      seen |= bit;
    }
    if (g.kind == GateKind::kQft && g.span == 0) throw std::invalid_argument("empty QFT");
    if (g.kind == GateKind::kUnitary && !is_unitary(g.matrix))
      throw std::invalid_argument("gate payload is not unitary: " + g.label);
  }

  unsigned n_qubits_;
  RegisterLayout layout_;
  std::vector<Gate> gates_;
  std::vector<Block> blocks_;
  std::vector<std::size_t> open_;
  double global_phase_ = 0.0;
};

inline void apply_gate(const Gate& g, QuantumState& state) {
  switch (g.kind) {
    case GateKind::kUnitary:
      state.apply_controlled(g.controls, g.target, g.matrix);
      break;
    case GateKind::kQft:
      state.apply_qft(g.target, g.span, g.inverse, g.controls);
      break;
    case GateKind::kBarrier:
      break;
  }
}

inline QuantumState& apply_circuit(const Circuit& c, QuantumState& state) {
  if (state.n_qubits() != c.n_qubits()) throw std::invalid_argument("state/circuit width mismatch");
  for (const auto& g : c.gates()) apply_gate(g, state);
  state.apply_global_phase(c.global_phase());
  return state;
}

/// Runs `c` on |0...0>.
inline QuantumState simulate(const Circuit& c) {
  QuantumState s = QuantumState::zero(c.n_qubits());
  apply_circuit(c, s);
  return s;
}

/// Textbook H / controlled-phase / SWAP network for a QFT gate. Extra
/// controls of the block are attached to every emitted gate (the SWAP
/// centre CNOT only, which is enough for a controlled SWAP).
inline std::vector<Gate> expand_qft(const Gate& g) {
  if (g.kind != GateKind::kQft) return {g};
  const unsigned n = g.span, f = g.target;
  std::vector<Gate> seq;
  auto with = [&](std::vector<Control> base) {
    base.insert(base.end(), g.controls.begin(), g.controls.end());
    return base;
  };
  for (unsigned q = n; q-- > 0;) {
    seq.push_back(Gate::unitary("h", f + q, gates::h(), with({})));
    for (unsigned p = q; p-- > 0;) {
      const double theta = 2.0 * kPi / static_cast<double>(std::uint64_t{1} << (q - p + 1));
      seq.push_back(Gate::unitary("cp", f + q, gates::phase(theta), with({{f + p, true}})));
    }
  }
  for (unsigned q = 0; q < n / 2; ++q) {
    const unsigned a = f + q, b = f + n - 1 - q;
    seq.push_back(Gate::unitary("cx", a, gates::x(), {{b, true}}));
    seq.push_back(Gate::unitary("cx", b, gates::x(), with({{a, true}})));
    seq.push_back(Gate::unitary("cx", a, gates::x(), {{b, true}}));
  }
  if (g.inverse) {
    std::vector<Gate> inv;
    for (std::size_t i = seq.size(); i-- > 0;) inv.push_back(seq[i].adjoint_gate());
    return inv;
  }
  return seq;
}

/// Same circuit with every QFT block replaced by its gate network.
inline Circuit decompose(const Circuit& c) {
  Circuit out(c.n_qubits(), c.layout());
  for (const auto& g : c.gates())
    for (auto& e : expand_qft(g)) out.add(std::move(e));
  out.add_global_phase(c.global_phase());
  return out;
}

struct CircuitMetrics {
  std::size_t depth = 0;
  std::size_t one_qubit = 0;
  std::size_t cnot = 0;
  std::size_t multi_controlled = 0;  // every controlled gate other than a plain CNOT

  std::size_t total() const { return one_qubit + cnot + multi_controlled; }
};

/// Cost (in layers) charged for one gate with `n_controls` controls: the
/// linear-depth bound max(1, n_controls).
inline std::size_t gate_cost(std::size_t n_controls) { return std::max<std::size_t>(1, n_controls); }

inline bool is_plain_cnot(const Gate& g) {
  const Mat2 x = gates::x();
  if (g.controls.size() != 1 || !g.controls[0].polarity) return false;
  for (std::size_t i = 0; i < 4; ++i)
    if (std::abs(g.matrix[i] - x[i]) > 1e-14) return false;
  return true;
}

/// Layered depth by greedy left alignment plus exact gate counts. QFT blocks
/// are charged through their textbook decomposition.
inline CircuitMetrics metrics(const Circuit& c) {
  CircuitMetrics m;
  std::vector<std::size_t> ready(c.n_qubits(), 0);
  for (const auto& top : c.gates()) {
    if (top.kind == GateKind::kBarrier) {
      const std::size_t t = *std::max_element(ready.begin(), ready.end());
      std::fill(ready.begin(), ready.end(), t);
      continue;
    }
    for (const auto& g : expand_qft(top)) {
      const auto wires = g.qubits();
      std::size_t start = 0;
      for (unsigned q : wires) start = std::max(start, ready[q]);
      const std::size_t finish = start + gate_cost(g.controls.size());
      for (unsigned q : wires) ready[q] = finish;
      m.depth = std::max(m.depth, finish);
      if (g.controls.empty())
        ++m.one_qubit;
      else if (is_plain_cnot(g))
        ++m.cnot;
      else
        ++m.multi_controlled;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Text format, one gate per line:
//
//   lorentz-circuit 1
//   qubits 7
//   layout data=4 dim=1 anc=4,5 ar=6
//   phase 0
//   block ancilla_prep
//   gate ry t=5 c=- m=0.7,0,-0.7,0,0.7,0,0.7,0
//   endblock
//   qft qft t=0:4 inv=0 c=4:1
//   barrier barrier
//   end
//
// Controls are q:p with p = 0 for anti-controls; '-' when there are none.
// Doubles carry 17 significant digits.

namespace detail {

inline std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::string fmt_controls(const std::vector<Control>& cs) {
  if (cs.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(cs[i].qubit) + ':' + (cs[i].polarity ? '1' : '0');
  }
  return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string field(const std::string& token, const std::string& key) {
  if (token.rfind(key + "=", 0) != 0) throw std::runtime_error("expected field " + key + " in '" + token + "'");
  return token.substr(key.size() + 1);
}

inline std::vector<Control> parse_controls(const std::string& s) {
  std::vector<Control> cs;
  if (s == "-") return cs;
  for (const auto& item : split(s, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) throw std::runtime_error("bad control '" + item + "'");
    cs.push_back({static_cast<unsigned>(std::stoul(parts[0])), parts[1] == "1"});
  }
  return cs;
}

}  // namespace detail

inline void write_circuit(std::ostream& os, const Circuit& c) {
  const auto& lay = c.layout();
  os << "lorentz-circuit 1\n";
  os << "qubits " << c.n_qubits() << '\n';
  os << "layout data=" << lay.n_data << " dim=" << lay.dim << " anc=";
  if (lay.ancillae.empty()) os << '-';
  for (std::size_t i = 0; i < lay.ancillae.size(); ++i) os << (i ? "," : "") << lay.ancillae[i];
  os << " ar=" << (lay.ar_ancilla ? std::to_string(*lay.ar_ancilla) : "-") << '\n';
  os << "phase " << detail::fmt_double(c.global_phase()) << '\n';

  // Block boundaries as begin/end events, outer blocks first.
  const auto& blocks = c.blocks();
  std::vector<std::size_t> idx(blocks.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return blocks[a].begin != blocks[b].begin ? blocks[a].begin < blocks[b].begin
                                              : blocks[a].end > blocks[b].end;
  });
  std::vector<std::size_t> stack;
  std::size_t next = 0;
  const auto& gs = c.gates();
  for (std::size_t gi = 0; gi <= gs.size(); ++gi) {
    while (!stack.empty() && blocks[stack.back()].end == gi) {
      os << "endblock\n";
      stack.pop_back();
    }
    while (next < idx.size() && blocks[idx[next]].begin == gi) {
      os << "block " << blocks[idx[next]].name << '\n';
      stack.push_back(idx[next]);
      ++next;
      while (!stack.empty() && blocks[stack.back()].end == gi) {
        os << "endblock\n";
        stack.pop_back();
      }
    }
    if (gi == gs.size()) break;
    const Gate& g = gs[gi];
    switch (g.kind) {
      case GateKind::kUnitary:
        os << "gate " << g.label << " t=" << g.target << " c=" << detail::fmt_controls(g.controls) << " m=";
        for (std::size_t k = 0; k < 4; ++k)
          os << (k ? "," : "") << detail::fmt_double(g.matrix[k].real()) << ','
             << detail::fmt_double(g.matrix[k].imag());
        os << '\n';
        break;
      case GateKind::kQft:
        os << "qft " << g.label << " t=" << g.target << ':' << g.span << " inv=" << (g.inverse ? 1 : 0)
           << " c=" << detail::fmt_controls(g.controls) << '\n';
        break;
      case GateKind::kBarrier:
        os << "barrier " << g.label << '\n';
        break;
    }
  }
  os << "end\n";
}

inline std::string to_text(const Circuit& c) {
  std::ostringstream os;
  write_circuit(os, c);
  return os.str();
}

inline Circuit read_circuit(std::istream& is) {
  std::string line;
  auto next_line = [&]() -> std::string {
    if (!std::getline(is, line)) throw std::runtime_error("unexpected end of circuit text");
    return line;
  };
  if (next_line() != "lorentz-circuit 1") throw std::runtime_error("missing circuit header");
  std::istringstream q(next_line());
  std::string kw;
  unsigned n = 0;
  q >> kw >> n;
  if (kw != "qubits") throw std::runtime_error("expected qubits line");

  RegisterLayout lay;
  {
    std::istringstream ls(next_line());
    std::string d, dm, an, ar;
    ls >> kw >> d >> dm >> an >> ar;
    if (kw != "layout") throw std::runtime_error("expected layout line");
    lay.n_data = static_cast<unsigned>(std::stoul(detail::field(d, "data")));
    lay.dim = static_cast<unsigned>(std::stoul(detail::field(dm, "dim")));
    const std::string anc = detail::field(an, "anc");
    if (anc != "-")
      for (const auto& s : detail::split(anc, ',')) lay.ancillae.push_back(static_cast<unsigned>(std::stoul(s)));
    const std::string arv = detail::field(ar, "ar");
    if (arv != "-") lay.ar_ancilla = static_cast<unsigned>(std::stoul(arv));
  }
  Circuit c(n, lay);
  {
    std::istringstream ps(next_line());
    std::string phase;
    ps >> kw >> phase;
    if (kw != "phase") throw std::runtime_error("expected phase line");
    c.add_global_phase(std::stod(phase));
  }
  while (true) {
    std::istringstream ls(next_line());
    ls >> kw;
    if (kw == "end") break;
    if (kw == "block") {
      std::string name;
      ls >> name;
      c.open_block(name);
    } else if (kw == "endblock") {
      c.close_block();
    } else if (kw == "barrier") {
      std::string label;
      ls >> label;
      c.add(Gate::barrier(label));
    } else if (kw == "gate") {
      std::string label, t, cs, m;
      ls >> label >> t >> cs >> m;
      const auto vals = detail::split(detail::field(m, "m"), ',');
      if (vals.size() != 8) throw std::runtime_error("gate matrix needs 8 numbers");
      Mat2 mat;
      for (std::size_t k = 0; k < 4; ++k) mat[k] = cplx{std::stod(vals[2 * k]), std::stod(vals[2 * k + 1])};
      c.add(Gate::unitary(label, static_cast<unsigned>(std::stoul(detail::field(t, "t"))), mat,
                          detail::parse_controls(detail::field(cs, "c"))));
    } else if (kw == "qft") {
      std::string label, t, inv, cs;
      ls >> label >> t >> inv >> cs;
      const auto range = detail::split(detail::field(t, "t"), ':');
      if (range.size() != 2) throw std::runtime_error("qft range must be first:count");
      Gate g = Gate::qft(static_cast<unsigned>(std::stoul(range[0])), static_cast<unsigned>(std::stoul(range[1])),
                         detail::field(inv, "inv") == "1", detail::parse_controls(detail::field(cs, "c")));
      g.label = label;
      c.add(std::move(g));
    } else {
      throw std::runtime_error("unknown circuit line '" + line + "'");
    }
  }
  c.validate();
  return c;
}

inline Circuit from_text(const std::string& text) {
  std::istringstream is(text);
  return read_circuit(is);
}

}  // namespace lorentz
