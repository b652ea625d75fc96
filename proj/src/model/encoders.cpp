#include "tshsr/model/encoders.hpp"

#include <string>
#include <vector>

#include "tshsr/errors.hpp"
#include "tshsr/numerics/ops.hpp"

namespace tshsr::model {

using num::Var;

ImageLocalFeatures project_image(num::Tape& tape, const num::ParamStore& params, const num::Tensor& raw) {
  const Var w = tape.bind(params, names::kImageW);
  const Var b = tape.bind(params, names::kImageB);
  if (raw.rank() != 2 || raw.cols() != w.shape()[0]) {
    throw DimensionError("project_image: regions of shape " + num::shape_str(raw.shape()) + " but projection expects width " +
                         std::to_string(w.shape()[0]));
  }
  return {num::add(num::matmul(tape.constant(raw), w), b)};
}

namespace {

// One direction of the GRU over the embedded sequence; states are returned in
// sequence order regardless of traversal direction.
std::vector<Var> run_gru(num::Tape& tape, const num::ParamStore& params, const Var& X, const char* dir, bool reverse) {
  auto p = [&](char kind, char gate) { return tape.bind(params, names::gru(dir, kind, gate)); };
  const Var xz = num::add(num::matmul(X, p('w', 'z')), p('b', 'z'));
  const Var xr = num::add(num::matmul(X, p('w', 'r')), p('b', 'r'));
  const Var xn = num::add(num::matmul(X, p('w', 'n')), p('b', 'n'));
  const Var uz = p('u', 'z'), ur = p('u', 'r'), un = p('u', 'n');

  const std::size_t L = X.shape()[0];
  const std::size_t d = uz.shape()[0];
  std::vector<Var> states(L);
  Var h = tape.constant(num::Tensor({1, d}));
  for (std::size_t step = 0; step < L; ++step) {
    const std::size_t t = reverse ? L - 1 - step : step;
    const Var z = num::sigmoid(num::add(num::matmul(h, uz), num::row(xz, t)));
    const Var r = num::sigmoid(num::add(num::matmul(h, ur), num::row(xr, t)));
    const Var n = num::tanh(num::add(num::matmul(num::mul(r, h), un), num::row(xn, t)));
    // h' = (1 - z) * h + z * n
    h = num::add(h, num::mul(z, num::sub(n, h)));
    states[t] = h;
  }
  return states;
}

}  // namespace

TextLocalFeatures encode_text(num::Tape& tape, const num::ParamStore& params, std::span<const std::uint32_t> tokens,
                              std::size_t max_length) {
  if (tokens.empty()) throw InputError("encode_text: empty token sequence");
  if (tokens.size() > max_length) {
    throw InputError("encode_text: " + std::to_string(tokens.size()) + " tokens exceed max length " +
                     std::to_string(max_length));
  }
  const Var embed = tape.bind(params, names::kEmbed);
  const std::size_t vocab = embed.shape()[0];
  for (auto id : tokens) {
    if (id >= vocab) {
      throw InputError("encode_text: token id " + std::to_string(id) + " outside vocabulary of size " +
                       std::to_string(vocab));
    }
  }
  const Var X = num::gather_rows(embed, tokens);
  const auto fwd = run_gru(tape, params, X, "fwd", false);
  const auto bwd = run_gru(tape, params, X, "bwd", true);
  const Var T = num::scale(num::add(num::concat_rows(fwd), num::concat_rows(bwd)), 0.5);
  return {T};
}

GlobalFeature global_feature(const Var& X) {
  const Var q = num::mean(X, 0);
  return {num::mean(num::mul(X, q), 0)};
}

}  // namespace tshsr::model
