//===- synthetic.cpp - Synthetic LLVM IR generator -------------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "xflow/synthetic.hpp"

#include "xflow/random.hpp"

#include <fmt/format.h>

#include <array>
#include <map>
#include <vector>

namespace xflow {
namespace {

constexpr std::array<std::string_view, 6> kTypes = {"i8",  "i16",   "i32",
                                                     "i64", "float", "double"};

bool is_float(std::string_view t) { return t == "float" || t == "double"; }

int int_bits(std::string_view t) {
  return t == "i8" ? 8 : t == "i16" ? 16 : t == "i32" ? 32 : 64;
}

std::string zero_of(std::string_view t) {
  return is_float(t) ? "0.000000e+00" : "0";
}

class Generator {
public:
  Generator(std::uint64_t seed, std::string prefix)
      : rng_(seed), p_(std::move(prefix)) {}

  std::size_t statements() const { return stmts_; }
  std::string take() { return std::move(out_); }

  void preamble() {
    for (auto t : kTypes)
      line("%struct.pair.{0} = type {{ {0}, {0} }}", t);
    line("");
    line("@.str = private unnamed_addr constant [4 x i8] c\"%d\\0A\\00\", "
         "align 1");
    line("");
    line("declare i32 @printf(i8*, ...)");
    line("declare i8* @malloc(i64)");
    line("declare void @free(i8*)");
    for (auto t : kTypes)
      line("declare void @use.{0}({0})", t);
    line("");
  }

  void globals() {
    for (auto t : kTypes) {
      line("@{}g.{} = global {} {}, align 4", p_, t, t, zero_of(t));
      ++stmts_;
    }
    line("");
  }

  void function(std::size_t index, std::size_t min_ops, std::size_t max_ops) {
    t_ = std::string(kTypes[pick(kTypes.size())]);
    name_ = fmt::format("@{}f{}", p_, index);
    counter_ = 0;
    pool_.clear();
    auto shape = pick(4);
    auto ops = [&] { return min_ops + pick(max_ops - min_ops + 1); };

    if (shape == 3) {
      line("define void {}({}* %p, {} %a) {{", name_, t_, t_);
    } else {
      line("define {0} {1}({0} %a, {0} %b, {0}* %p) {{", t_, name_);
      pool_[t_].push_back("%b");
    }
    ++stmts_;
    pool_[t_].push_back("%a");
    line("entry:");
    stmt("%s = alloca %struct.pair.{}, align 8", t_);
    stmt("%vv = alloca <2 x {}>, align 8", t_);
    emit_ops(ops() / 2 + 1);

    switch (shape) {
    case 0:
      emit_ops(ops());
      stmt("ret {} {}", t_, value());
      break;
    case 1: {
      stmt("%c = {}", compare(value(), value()));
      stmt("br i1 %c, label %then, label %else");
      auto saved = pool_;
      line("then:");
      emit_ops(ops() / 2 + 1);
      auto x = value(true);
      stmt("br label %merge");
      pool_ = saved;
      line("else:");
      emit_ops(ops() / 2 + 1);
      auto y = value(true);
      stmt("br label %merge");
      pool_ = saved;
      line("merge:");
      stmt("%m = phi {} [ {}, %then ], [ {}, %else ]", t_, x, y);
      pool_[t_].push_back("%m");
      emit_ops(ops() / 2);
      stmt("ret {} {}", t_, value());
      break;
    }
    case 2: {
      auto init = value(true);
      stmt("br label %loop");
      line("loop:");
      stmt("%i = phi i32 [ 0, %entry ], [ %i.next, %loop ]");
      stmt("%acc = phi {} [ {}, %entry ], [ %acc.next, %loop ]", t_, init);
      pool_[t_].push_back("%acc");
      emit_ops(ops());
      stmt("%acc.next = {} {} %acc, {}", arith_op(), t_, value());
      stmt("%i.next = add nsw i32 %i, 1");
      stmt("%cmp = icmp slt i32 %i.next, {}", 4 + pick(60));
      stmt("br i1 %cmp, label %loop, label %exit");
      line("exit:");
      stmt("ret {} %acc.next", t_);
      break;
    }
    default:
      emit_ops(ops());
      stmt("store {} {}, {}* %p, align 4", t_, value(true), t_);
      stmt("ret void");
      break;
    }
    line("}}");
    line("");
    defined_.push_back({name_, t_, shape == 3});
  }

  // Functions alternating between two disjoint statement families.
  void family_function(std::size_t index, bool ints, std::size_t ops) {
    t_ = ints ? "i32" : "double";
    name_ = fmt::format("@{}{}{}", p_, ints ? "int" : "fp", index);
    counter_ = 0;
    pool_.clear();
    line("define {0} {1}({0} %a, {0} %b) {{", t_, name_);
    ++stmts_;
    pool_[t_] = {"%a", "%b"};
    line("entry:");
    for (std::size_t i = 0; i < ops; ++i) {
      auto r = fresh();
      stmt("{} = {} {} {}, {}", r, arith_op(), t_, value(), value());
      pool_[t_].push_back(r);
    }
    stmt("ret {} {}", t_, pool_[t_].back());
    line("}}");
    line("");
  }

private:
  template <class... A> void line(fmt::format_string<A...> f, A &&...args) {
    out_ += fmt::format(f, std::forward<A>(args)...);
    out_ += '\n';
  }

  template <class... A> void stmt(fmt::format_string<A...> f, A &&...args) {
    out_ += "  ";
    line(f, std::forward<A>(args)...);
    ++stmts_;
  }

  std::size_t pick(std::size_t n) { return uniform_below(rng_, n); }
  bool coin(double p = 0.5) { return uniform01(rng_) < p; }

  std::string fresh() { return fmt::format("%v{}", counter_++); }

  std::string immediate(std::string_view t) {
    if (is_float(t))
      return fmt::format("{:.6e}", 0.5 * static_cast<double>(1 + pick(16)));
    return std::to_string(1 + pick(int_bits(t) == 8 ? 100 : 1000));
  }

  // An SSA value of the function type, or an immediate.
  std::string value(bool ssa_only = false) {
    auto &vals = pool_[t_];
    if (vals.empty() || (!ssa_only && coin(0.25)))
      return ssa_only && !vals.empty() ? vals.back() : immediate(t_);
    // Prefer recent values, which makes data chains longer.
    auto n = vals.size();
    auto back = std::min<std::size_t>(n, 4);
    return vals[n - 1 - pick(back)];
  }

  std::string arith_op() {
    if (is_float(t_)) {
      static constexpr std::array<std::string_view, 4> ops = {"fadd", "fsub",
                                                              "fmul", "fdiv"};
      std::string op(ops[pick(ops.size())]);
      return coin(0.3) ? op + " fast" : op;
    }
    static constexpr std::array<std::string_view, 7> ops = {
        "add", "sub", "mul", "and", "or", "xor", "shl"};
    std::string op(ops[pick(ops.size())]);
    bool wraps = op == "add" || op == "sub" || op == "mul" || op == "shl";
    if (wraps && coin(0.4))
      op += " nsw";
    return op;
  }

  std::string compare(const std::string &x, const std::string &y) {
    if (is_float(t_))
      return fmt::format("fcmp olt {} {}, {}", t_, x, y);
    return fmt::format("icmp slt {} {}, {}", t_, x, y);
  }

  void define(const std::string &name) { pool_[t_].push_back(name); }

  void emit_ops(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
      emit_op();
  }

  void emit_op() {
    const std::string &T = t_;
    switch (pick(12)) {
    case 0:
    case 1:
    case 2: {
      auto r = fresh();
      stmt("{} = {} {} {}, {}", r, arith_op(), T, value(true), value());
      define(r);
      break;
    }
    case 3: {
      if (coin()) {
        auto r = fresh();
        stmt("{} = load {}, {}* %p, align 4", r, T, T);
        define(r);
      } else {
        stmt("store {} {}, {}* %p, align 4", T, value(true), T);
      }
      break;
    }
    case 4: {
      if (coin()) {
        auto r = fresh();
        stmt("{} = load {}, {}* @{}g.{}, align 4", r, T, T, p_, T);
        define(r);
      } else {
        stmt("store {} {}, {}* @{}g.{}, align 4", T, value(true), T, p_, T);
      }
      break;
    }
    case 5: {
      // Struct and vector aggregates in memory, side by side.
      bool vec = coin();
      std::string agg = vec ? fmt::format("<2 x {}>", T)
                            : fmt::format("%struct.pair.{}", T);
      std::string base = vec ? "%vv" : "%s";
      auto g = fresh();
      stmt("{} = getelementptr inbounds {}, {}* {}, i32 0, i32 {}", g, agg, agg,
           base, pick(2));
      if (coin()) {
        auto r = fresh();
        stmt("{} = load {}, {}* {}, align 4", r, T, T, g);
        define(r);
      } else {
        stmt("store {} {}, {}* {}, align 4", T, value(true), T, g);
      }
      if (coin(0.3)) {
        auto w = fresh();
        stmt("{} = load {}, {}* {}, align 8", w, agg, agg, base);
        stmt("store {} {}, {}* {}, align 8", agg, w, agg, base);
      }
      break;
    }
    case 6: {
      auto v0 = fresh(), v1 = fresh(), e = fresh();
      stmt("{} = insertelement <2 x {}> undef, {} {}, i32 0", v0, T, T,
           value(true));
      stmt("{} = {} <2 x {}> {}, {}", v1, arith_op(), T, v0, v0);
      stmt("{} = extractelement <2 x {}> {}, i32 {}", e, T, v1, pick(2));
      define(e);
      break;
    }
    case 7: {
      // Round trip through a wider or narrower type.
      auto x = value(true);
      auto a = fresh(), b = fresh();
      if (is_float(T)) {
        bool up = T == "float";
        std::string_view other = up ? "double" : "float";
        stmt("{} = {} {} {} to {}", a, up ? "fpext" : "fptrunc", T, x, other);
        stmt("{} = {} {} {} to {}", b, up ? "fptrunc" : "fpext", other, a, T);
      } else if (T == "i64" || coin()) {
        std::string_view other = T == "i8" ? "i16" : "i8";
        if (int_bits(other) < int_bits(T)) {
          stmt("{} = trunc {} {} to {}", a, T, x, other);
          stmt("{} = {} {} {} to {}", b, coin() ? "sext" : "zext", other, a, T);
        } else {
          stmt("{} = {} {} {} to {}", a, coin() ? "sext" : "zext", T, x, other);
          stmt("{} = trunc {} {} to {}", b, other, a, T);
        }
      } else {
        stmt("{} = {} {} {} to i64", a, coin() ? "sext" : "zext", T, x);
        stmt("{} = trunc i64 {} to {}", b, a, T);
      }
      define(b);
      break;
    }
    case 8: {
      const Defined *callee = nullptr;
      for (std::size_t tries = 0; tries < 4 && !defined_.empty(); ++tries) {
        const auto &d = defined_[pick(defined_.size())];
        if (d.type == T && !d.void_ret) {
          callee = &d;
          break;
        }
      }
      if (callee) {
        auto r = fresh();
        stmt("{} = call {} {}({} {}, {} {}, {}* %p)", r, T, callee->name, T,
             value(true), T, value(), T);
        define(r);
      } else {
        stmt("call void @use.{}({} {})", T, T, value(true));
      }
      break;
    }
    case 9: {
      if (T == "i32" && coin()) {
        auto r = fresh();
        stmt("{} = call i32 (i8*, ...) @printf(i8* getelementptr inbounds "
             "([4 x i8], [4 x i8]* @.str, i64 0, i64 0), i32 {})",
             r, value(true));
      } else {
        stmt("call void @use.{}({} {})", T, T, value(true));
      }
      break;
    }
    case 10: {
      auto m = fresh(), q = fresh();
      stmt("{} = call i8* @malloc(i64 {})", m, 8 * (1 + pick(32)));
      stmt("{} = bitcast i8* {} to {}*", q, m, T);
      stmt("store {} {}, {}* {}, align 4", T, value(true), T, q);
      stmt("call void @free(i8* {})", m);
      break;
    }
    default: {
      auto c = fresh(), s = fresh();
      stmt("{} = {}", c, compare(value(true), value()));
      stmt("{} = select i1 {}, {} {}, {} {}", s, c, T, value(true), T,
           value());
      define(s);
      break;
    }
    }
  }

  struct Defined {
    std::string name;
    std::string type;
    bool void_ret;
  };

  Rng rng_;
  std::string p_;
  std::string out_;
  std::size_t stmts_ = 0;
  std::string t_;
  std::string name_;
  std::size_t counter_ = 0;
  std::map<std::string, std::vector<std::string>> pool_;
  std::vector<Defined> defined_;
};

} // namespace

std::string synthetic_module(const SynthOptions &opts) {
  Generator g(opts.seed, opts.prefix);
  if (opts.preamble)
    g.preamble();
  g.globals();
  for (std::size_t i = 0; i < opts.functions; ++i)
    g.function(i, opts.min_ops, std::max(opts.min_ops, opts.max_ops));
  return g.take();
}

std::string synthetic_module_of_size(std::size_t statements, std::uint64_t seed,
                                     const std::string &prefix,
                                     bool preamble) {
  Generator g(seed, prefix);
  if (preamble)
    g.preamble();
  g.globals();
  for (std::size_t i = 0; g.statements() < statements; ++i)
    g.function(i, 8, 24);
  return g.take();
}

std::string two_family_module(std::uint64_t seed, std::size_t functions,
                              std::size_t ops) {
  Generator g(seed, "");
  for (std::size_t i = 0; i < functions; ++i)
    g.family_function(i, i % 2 == 0, ops);
  return g.take();
}

} // namespace xflow
