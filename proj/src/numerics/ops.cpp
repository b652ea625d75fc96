#include "tshsr/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tshsr/errors.hpp"

namespace tshsr::num {
namespace {

Tape& tape_of(const Var& a) {
  if (!a.valid()) throw ContractError("operation on an unbound Var");
  return *a.tape();
}

Tape& tape_of(const Var& a, const Var& b) {
  Tape& t = tape_of(a);
  if (b.tape() != &t) throw ContractError("operation mixes values from different tapes");
  return t;
}

bool is_single(const Shape& s) { return shape_numel(s) == 1; }

// Row-broadcast check; returns the period of the second operand (0 = equal shapes).
std::size_t broadcast_period(const Shape& a, const Shape& b, const char* op) {
  if (a == b) return 0;
  if (a.size() == 2) {
    const bool vec = b.size() == 1 && b[0] == a[1];
    const bool row = b.size() == 2 && b[0] == 1 && b[1] == a[1];
    if (vec || row) return a[1];
  }
  throw DimensionError(std::string(op) + ": shapes " + shape_str(a) + " and " + shape_str(b) +
                       " are not equal and not a row broadcast");
}

// Elementwise binary op with local derivatives df/da and df/db.
template <class F, class Da, class Db>
Var binary(const Var& a, const Var& b, const char* name, F f, Da da, Db db) {
  Tape& t = tape_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const std::size_t period = broadcast_period(av.shape(), bv.shape(), name);
  auto bidx = [period](std::size_t i) { return period ? i % period : i; };

  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i], bv[bidx(i)]);

  return t.push(std::move(out), {a, b}, [a, b, period, da, db](std::span<const double> g, GradBuffer& grads) {
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    auto ga = grads(a);
    auto gb = grads(b);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::size_t j = period ? i % period : i;
      if (!ga.empty()) ga[i] += g[i] * da(av[i], bv[j]);
      if (!gb.empty()) gb[j] += g[i] * db(av[i], bv[j]);
    }
  });
}

// Elementwise unary op; the derivative sees both the input x and the output y.
template <class F, class D>
Var unary(const Var& a, F f, D d) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i]);
  const std::size_t self = t.size();
  Tape* tp = &t;
  return t.push(std::move(out), {a}, [a, self, tp, d](std::span<const double> g, GradBuffer& grads) {
    auto ga = grads(a);
    if (ga.empty()) return;
    const Tensor& x = a.value();
    const Tensor& y = tp->value(self);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * d(x[i], y[i]);
  });
}

double sigmoid_value(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct AxisSplit {
  std::size_t outer, n, inner;
  Shape out_shape;
};

AxisSplit split_axis(const Shape& s, std::optional<std::size_t> axis, const char* op) {
  if (!axis) return {1, shape_numel(s), 1, {}};
  if (*axis >= s.size()) {
    throw DimensionError(std::string(op) + ": axis " + std::to_string(*axis) + " invalid for shape " + shape_str(s));
  }
  AxisSplit r{1, s[*axis], 1, {}};
  for (std::size_t i = 0; i < *axis; ++i) r.outer *= s[i];
  for (std::size_t i = *axis + 1; i < s.size(); ++i) r.inner *= s[i];
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i != *axis) r.out_shape.push_back(s[i]);
  }
  return r;
}

const Tensor& require_matrix(const Var& a, const char* op) {
  const Tensor& v = a.value();
  if (v.rank() != 2) throw DimensionError(std::string(op) + " needs a matrix, got " + shape_str(v.shape()));
  return v;
}

}  // namespace

Var add(const Var& a, const Var& b) {
  return binary(
      a, b, "add", [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
      [](double, double) { return 1.0; });
}

Var sub(const Var& a, const Var& b) {
  return binary(
      a, b, "sub", [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
      [](double, double) { return -1.0; });
}

Var mul(const Var& a, const Var& b) {
  return binary(
      a, b, "mul", [](double x, double y) { return x * y; }, [](double, double y) { return y; },
      [](double x, double) { return x; });
}

Var div(const Var& a, const Var& b) {
  return binary(
      a, b, "div", [](double x, double y) { return x / y; }, [](double, double y) { return 1.0 / y; },
      [](double x, double y) { return -x / (y * y); });
}

Var square(const Var& a) {
  return unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Var sigmoid(const Var& a) {
  return unary(a, sigmoid_value, [](double, double y) { return y * (1.0 - y); });
}

Var exp(const Var& a) {
  return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var relu(const Var& a) {
  return unary(a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var tanh(const Var& a) {
  return unary(a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var scale(const Var& a, double c) {
  return unary(a, [c](double x) { return c * x; }, [c](double, double) { return c; });
}

Var shift(const Var& a, double c) {
  return unary(a, [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

Var elementwise(Elementwise op, const Var& a) {
  switch (op) {
    case Elementwise::square: return square(a);
    case Elementwise::sigmoid: return sigmoid(a);
    case Elementwise::exp: return exp(a);
    case Elementwise::relu: return relu(a);
    case Elementwise::tanh: return tanh(a);
    default: throw ContractError("binary elementwise op called with one operand");
  }
}

Var elementwise(Elementwise op, const Var& a, const Var& b) {
  switch (op) {
    case Elementwise::add: return add(a, b);
    case Elementwise::sub: return sub(a, b);
    case Elementwise::mul: return mul(a, b);
    case Elementwise::div: return div(a, b);
    default: throw ContractError("unary elementwise op called with two operands");
  }
}

Var mul_scalar(const Var& a, const Var& s) {
  Tape& t = tape_of(a, s);
  if (!is_single(s.shape())) throw DimensionError("mul_scalar needs a single-element factor, got " + shape_str(s.shape()));
  const Tensor& av = a.value();
  const double c = s.value()[0];
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * c;
  return t.push(std::move(out), {a, s}, [a, s](std::span<const double> g, GradBuffer& grads) {
    const Tensor& av = a.value();
    const double c = s.value()[0];
    auto ga = grads(a);
    auto gs = grads(s);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!ga.empty()) ga[i] += g[i] * c;
      if (!gs.empty()) gs[0] += g[i] * av[i];
    }
  });
}

Var div_scalar(const Var& a, const Var& s) {
  Tape& t = tape_of(a, s);
  if (!is_single(s.shape())) throw DimensionError("div_scalar needs a single-element divisor, got " + shape_str(s.shape()));
  const Tensor& av = a.value();
  const double c = s.value()[0];
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] / c;
  return t.push(std::move(out), {a, s}, [a, s](std::span<const double> g, GradBuffer& grads) {
    const Tensor& av = a.value();
    const double c = s.value()[0];
    auto ga = grads(a);
    auto gs = grads(s);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!ga.empty()) ga[i] += g[i] / c;
      if (!gs.empty()) gs[0] -= g[i] * av[i] / (c * c);
    }
  });
}

Var reduce(Reduction op, const Var& a, std::optional<std::size_t> axis) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  const AxisSplit sp = split_axis(av.shape(), axis, "reduce");
  Tensor out(sp.out_shape);
  // Index of the winning element for max.
  std::vector<std::size_t> arg;
  if (op == Reduction::max) arg.resize(out.size());

  for (std::size_t o = 0; o < sp.outer; ++o) {
    for (std::size_t in = 0; in < sp.inner; ++in) {
      const std::size_t base = o * sp.n * sp.inner + in;
      const std::size_t dst = o * sp.inner + in;
      double acc = 0.0;
      switch (op) {
        case Reduction::sum:
        case Reduction::mean:
          for (std::size_t k = 0; k < sp.n; ++k) acc += av[base + k * sp.inner];
          if (op == Reduction::mean) acc /= static_cast<double>(sp.n);
          break;
        case Reduction::l2norm:
          for (std::size_t k = 0; k < sp.n; ++k) acc += av[base + k * sp.inner] * av[base + k * sp.inner];
          acc = std::sqrt(acc);
          break;
        case Reduction::max: {
          std::size_t best = base;
          for (std::size_t k = 1; k < sp.n; ++k) {
            if (av[base + k * sp.inner] > av[best]) best = base + k * sp.inner;
          }
          arg[dst] = best;
          acc = av[best];
          break;
        }
      }
      out[dst] = acc;
    }
  }

  const std::size_t self = t.size();
  Tape* tp = &t;
  return t.push(std::move(out), {a},
                [a, op, sp, arg = std::move(arg), self, tp](std::span<const double> g, GradBuffer& grads) {
                  auto ga = grads(a);
                  if (ga.empty()) return;
                  const Tensor& av = a.value();
                  const Tensor& y = tp->value(self);
                  for (std::size_t o = 0; o < sp.outer; ++o) {
                    for (std::size_t in = 0; in < sp.inner; ++in) {
                      const std::size_t base = o * sp.n * sp.inner + in;
                      const std::size_t dst = o * sp.inner + in;
                      switch (op) {
                        case Reduction::sum:
                          for (std::size_t k = 0; k < sp.n; ++k) ga[base + k * sp.inner] += g[dst];
                          break;
                        case Reduction::mean:
                          for (std::size_t k = 0; k < sp.n; ++k) {
                            ga[base + k * sp.inner] += g[dst] / static_cast<double>(sp.n);
                          }
                          break;
                        case Reduction::l2norm:
                          if (y[dst] > 0.0) {
                            for (std::size_t k = 0; k < sp.n; ++k) {
                              ga[base + k * sp.inner] += g[dst] * av[base + k * sp.inner] / y[dst];
                            }
                          }
                          break;
                        case Reduction::max:
                          ga[arg[dst]] += g[dst];
                          break;
                      }
                    }
                  }
                });
}

Var sum(const Var& a, std::optional<std::size_t> axis) { return reduce(Reduction::sum, a, axis); }
Var mean(const Var& a, std::optional<std::size_t> axis) { return reduce(Reduction::mean, a, axis); }
Var l2norm(const Var& a, std::optional<std::size_t> axis) { return reduce(Reduction::l2norm, a, axis); }
Var max(const Var& a, std::optional<std::size_t> axis) { return reduce(Reduction::max, a, axis); }

Var matmul(const Var& a, const Var& b) {
  Tape& t = tape_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rank() != 2 || bv.rank() != 2 || av.cols() != bv.rows()) {
    throw DimensionError("matmul: incompatible shapes " + shape_str(av.shape()) + " and " + shape_str(bv.shape()));
  }
  const std::size_t r = av.rows(), s = av.cols(), c = bv.cols();
  Tensor out({r, c});
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t k = 0; k < s; ++k) {
      const double aik = av[i * s + k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < c; ++j) out[i * c + j] += aik * bv[k * c + j];
    }
  }
  return t.push(std::move(out), {a, b}, [a, b, r, s, c](std::span<const double> g, GradBuffer& grads) {
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    if (auto ga = grads(a); !ga.empty()) {
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t k = 0; k < s; ++k) {
          double acc = 0.0;
          for (std::size_t j = 0; j < c; ++j) acc += g[i * c + j] * bv[k * c + j];
          ga[i * s + k] += acc;
        }
      }
    }
    if (auto gb = grads(b); !gb.empty()) {
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t k = 0; k < s; ++k) {
          const double aik = av[i * s + k];
          for (std::size_t j = 0; j < c; ++j) gb[k * c + j] += aik * g[i * c + j];
        }
      }
    }
  });
}

Var transpose(const Var& a) {
  Tape& t = tape_of(a);
  const Tensor& av = require_matrix(a, "transpose");
  const std::size_t r = av.rows(), c = av.cols();
  Tensor out({c, r});
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = av[i * c + j];
  }
  return t.push(std::move(out), {a}, [a, r, c](std::span<const double> g, GradBuffer& grads) {
    auto ga = grads(a);
    if (ga.empty()) return;
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += g[j * r + i];
    }
  });
}

Var reshape(const Var& a, Shape shape) {
  Tape& t = tape_of(a);
  Tensor out = a.value().reshaped(std::move(shape));
  return t.push(std::move(out), {a}, [a](std::span<const double> g, GradBuffer& grads) {
    auto ga = grads(a);
    if (ga.empty()) return;
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

Var conv2d_3x3(const Var& input, const Var& kernel, const Var& bias) {
  Tape& t = tape_of(input, kernel);
  tape_of(input, bias);
  const Tensor& x = require_matrix(input, "conv2d_3x3");
  const Tensor& k = kernel.value();
  if (k.shape() != Shape{3, 3}) throw DimensionError("conv2d_3x3: kernel must be [3x3], got " + shape_str(k.shape()));
  if (!is_single(bias.shape())) throw DimensionError("conv2d_3x3: bias must be a scalar, got " + shape_str(bias.shape()));
  const std::size_t h = x.rows(), w = x.cols();
  const double b = bias.value()[0];

  // Visits every (output, kernel tap, input) triple that lies inside the zero-padded input.
  auto taps = [h, w](auto&& fn) {
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        for (std::size_t u = 0; u < 3; ++u) {
          if (i + u < 1 || i + u - 1 >= h) continue;
          for (std::size_t v = 0; v < 3; ++v) {
            if (j + v < 1 || j + v - 1 >= w) continue;
            fn(i * w + j, u * 3 + v, (i + u - 1) * w + (j + v - 1));
          }
        }
      }
    }
  };

  Tensor out = Tensor::full({h, w}, b);
  taps([&](std::size_t o, std::size_t kk, std::size_t in) { out[o] += k[kk] * x[in]; });

  return t.push(std::move(out), {input, kernel, bias},
                [input, kernel, bias, taps](std::span<const double> g, GradBuffer& grads) {
                  const Tensor& x = input.value();
                  const Tensor& k = kernel.value();
                  auto gx = grads(input);
                  auto gk = grads(kernel);
                  auto gb = grads(bias);
                  taps([&](std::size_t o, std::size_t kk, std::size_t in) {
                    if (!gx.empty()) gx[in] += g[o] * k[kk];
                    if (!gk.empty()) gk[kk] += g[o] * x[in];
                  });
                  if (!gb.empty()) {
                    for (double v : g) gb[0] += v;
                  }
                });
}

Var softmax(const Var& a, std::size_t axis) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  if (av.rank() < 1 || av.rank() > 2) throw DimensionError("softmax needs a vector or matrix, got " + shape_str(av.shape()));
  const AxisSplit sp = split_axis(av.shape(), axis, "softmax");
  Tensor out(av.shape());
  for (std::size_t o = 0; o < sp.outer; ++o) {
    for (std::size_t in = 0; in < sp.inner; ++in) {
      const std::size_t base = o * sp.n * sp.inner + in;
      double m = av[base];
      for (std::size_t k = 1; k < sp.n; ++k) m = std::max(m, av[base + k * sp.inner]);
      double z = 0.0;
      for (std::size_t k = 0; k < sp.n; ++k) {
        const double e = std::exp(av[base + k * sp.inner] - m);
        out[base + k * sp.inner] = e;
        z += e;
      }
      for (std::size_t k = 0; k < sp.n; ++k) out[base + k * sp.inner] /= z;
    }
  }
  const std::size_t self = t.size();
  Tape* tp = &t;
  return t.push(std::move(out), {a}, [a, sp, self, tp](std::span<const double> g, GradBuffer& grads) {
    auto ga = grads(a);
    if (ga.empty()) return;
    const Tensor& y = tp->value(self);
    for (std::size_t o = 0; o < sp.outer; ++o) {
      for (std::size_t in = 0; in < sp.inner; ++in) {
        const std::size_t base = o * sp.n * sp.inner + in;
        double dot = 0.0;
        for (std::size_t k = 0; k < sp.n; ++k) dot += g[base + k * sp.inner] * y[base + k * sp.inner];
        for (std::size_t k = 0; k < sp.n; ++k) {
          const std::size_t idx = base + k * sp.inner;
          ga[idx] += y[idx] * (g[idx] - dot);
        }
      }
    }
  });
}

Var normalize_rows(const Var& a) {
  Tape& t = tape_of(a);
  const Tensor& av = require_matrix(a, "normalize_rows");
  const std::size_t r = av.rows(), c = av.cols();
  Tensor out({r, c});
  std::vector<double> norms(r, 0.0);
  for (std::size_t i = 0; i < r; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < c; ++j) acc += av[i * c + j] * av[i * c + j];
    norms[i] = std::sqrt(acc);
    if (norms[i] > 0.0) {
      for (std::size_t j = 0; j < c; ++j) out[i * c + j] = av[i * c + j] / norms[i];
    }
  }
  const std::size_t self = t.size();
  Tape* tp = &t;
  return t.push(std::move(out), {a},
                [a, r, c, norms = std::move(norms), self, tp](std::span<const double> g, GradBuffer& grads) {
                  auto ga = grads(a);
                  if (ga.empty()) return;
                  const Tensor& y = tp->value(self);
                  for (std::size_t i = 0; i < r; ++i) {
                    if (norms[i] <= 0.0) continue;
                    double dot = 0.0;
                    for (std::size_t j = 0; j < c; ++j) dot += g[i * c + j] * y[i * c + j];
                    for (std::size_t j = 0; j < c; ++j) {
                      ga[i * c + j] += (g[i * c + j] - y[i * c + j] * dot) / norms[i];
                    }
                  }
                });
}

Var row(const Var& a, std::size_t i) {
  Tape& t = tape_of(a);
  const Tensor& av = require_matrix(a, "row");
  if (i >= av.rows()) throw DimensionError("row: index " + std::to_string(i) + " out of range for " + shape_str(av.shape()));
  const std::size_t c = av.cols();
  Tensor out({c}, std::vector<double>(av.data().begin() + i * c, av.data().begin() + (i + 1) * c));
  return t.push(std::move(out), {a}, [a, i, c](std::span<const double> g, GradBuffer& grads) {
    auto ga = grads(a);
    if (ga.empty()) return;
    for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += g[j];
  });
}

Var gather_rows(const Var& table, std::span<const std::uint32_t> ids) {
  Tape& t = tape_of(table);
  const Tensor& tv = require_matrix(table, "gather_rows");
  if (ids.empty()) throw DimensionError("gather_rows: no ids");
  const std::size_t c = tv.cols();
  Tensor out({ids.size(), c});
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] >= tv.rows()) {
      throw InputError("gather_rows: id " + std::to_string(ids[r]) + " out of range for " + shape_str(tv.shape()));
    }
    std::copy_n(tv.data().begin() + ids[r] * c, c, out.data().begin() + r * c);
  }
  std::vector<std::uint32_t> idv(ids.begin(), ids.end());
  return t.push(std::move(out), {table}, [table, c, idv = std::move(idv)](std::span<const double> g, GradBuffer& grads) {
    auto gt = grads(table);
    if (gt.empty()) return;
    for (std::size_t r = 0; r < idv.size(); ++r) {
      for (std::size_t j = 0; j < c; ++j) gt[idv[r] * c + j] += g[r * c + j];
    }
  });
}

Var stack(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("stack: nothing to stack");
  Tape& t = tape_of(parts[0]);
  const Shape inner = parts[0].shape();
  const std::size_t n = shape_numel(inner);
  Shape shape{parts.size()};
  shape.insert(shape.end(), inner.begin(), inner.end());
  Tensor out(shape);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    tape_of(parts[0], parts[p]);
    if (parts[p].shape() != inner) {
      throw DimensionError("stack: shape " + shape_str(parts[p].shape()) + " differs from " + shape_str(inner));
    }
    const auto& d = parts[p].value().data();
    std::copy(d.begin(), d.end(), out.data().begin() + p * n);
  }
  std::vector<Var> pv(parts.begin(), parts.end());
  return t.push(std::move(out), parts, [pv, n](std::span<const double> g, GradBuffer& grads) {
    for (std::size_t p = 0; p < pv.size(); ++p) {
      auto gp = grads(pv[p]);
      if (gp.empty()) continue;
      for (std::size_t j = 0; j < n; ++j) gp[j] += g[p * n + j];
    }
  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("concat_rows: nothing to concatenate");
  Tape& t = tape_of(parts[0]);
  auto cols_of = [](const Shape& s) -> std::size_t {
    if (s.size() == 1) return s[0];
    if (s.size() == 2) return s[1];
    throw DimensionError("concat_rows: needs vectors or matrices, got " + shape_str(s));
  };
  const std::size_t c = cols_of(parts[0].shape());
  std::size_t total = 0;
  for (const auto& p : parts) {
    tape_of(parts[0], p);
    if (cols_of(p.shape()) != c) {
      throw DimensionError("concat_rows: column count mismatch " + shape_str(parts[0].shape()) + " vs " +
                           shape_str(p.shape()));
    }
    total += p.value().size();
  }
  Tensor out({total / c, c});
  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (const auto& p : parts) {
    offsets.push_back(off);
    const auto& d = p.value().data();
    std::copy(d.begin(), d.end(), out.data().begin() + off);
    off += d.size();
  }
  std::vector<Var> pv(parts.begin(), parts.end());
  return t.push(std::move(out), parts, [pv, offsets](std::span<const double> g, GradBuffer& grads) {
    for (std::size_t p = 0; p < pv.size(); ++p) {
      auto gp = grads(pv[p]);
      if (gp.empty()) continue;
      for (std::size_t j = 0; j < gp.size(); ++j) gp[j] += g[offsets[p] + j];
    }
  });
}

}  // namespace tshsr::num
