#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tshsr/numerics/tape.hpp"

// Differentiable operations on tape values. Every op records its backprop
// closure when the tape is recording and any input needs a gradient.
//
// Broadcast rule for binary elementwise ops: shapes must be equal, or the first
// operand is a matrix [r x c] and the second a row vector [c] or [1 x c] that is
// applied to every row. Anything else raises DimensionError.

namespace tshsr::num {

enum class Elementwise { add, mul, sub, div, square, sigmoid, exp, relu, tanh };
enum class Reduction { sum, mean, l2norm, max };

Var elementwise(Elementwise op, const Var& a);
Var elementwise(Elementwise op, const Var& a, const Var& b);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);
Var square(const Var& a);
Var sigmoid(const Var& a);
Var exp(const Var& a);
Var relu(const Var& a);
Var tanh(const Var& a);

/// a * c for a compile-time-constant factor.
Var scale(const Var& a, double c);
/// a + c elementwise.
Var shift(const Var& a, double c);
/// a * s where s holds a single value.
Var mul_scalar(const Var& a, const Var& s);
/// a / s where s holds a single value.
Var div_scalar(const Var& a, const Var& s);

/// Reduction along `axis`, or over everything (rank-0 result) when no axis is given.
/// Max routes its gradient to the first maximal entry.
Var reduce(Reduction op, const Var& a, std::optional<std::size_t> axis = std::nullopt);
Var sum(const Var& a, std::optional<std::size_t> axis = std::nullopt);
Var mean(const Var& a, std::optional<std::size_t> axis = std::nullopt);
Var l2norm(const Var& a, std::optional<std::size_t> axis = std::nullopt);
Var max(const Var& a, std::optional<std::size_t> axis = std::nullopt);

Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
Var reshape(const Var& a, Shape shape);

/// Single-channel 3x3 cross-correlation, stride 1, zero padding 1 (same-shape output).
Var conv2d_3x3(const Var& input, const Var& kernel, const Var& bias);

/// Softmax along `axis` of a matrix (or the only axis of a vector).
Var softmax(const Var& a, std::size_t axis);
/// Each row divided by its l2 norm; all-zero rows stay zero.
Var normalize_rows(const Var& a);

/// Row `i` of a matrix as a vector.
Var row(const Var& a, std::size_t i);
/// Rows of `table` selected by `ids`, as an [ids.size() x cols] matrix.
Var gather_rows(const Var& table, std::span<const std::uint32_t> ids);
/// Stacks equally-shaped values along a new leading axis.
Var stack(std::span<const Var> parts);
/// Concatenates matrices [r_i x c] and vectors [c] (as single rows) vertically.
Var concat_rows(std::span<const Var> parts);

}  // namespace tshsr::num
