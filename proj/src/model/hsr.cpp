#include "tshsr/model/hsr.hpp"

#include <array>

#include "tshsr/errors.hpp"
#include "tshsr/model/config.hpp"
#include "tshsr/numerics/ops.hpp"

namespace tshsr::model {

using num::Var;

SimilarityNodeSet make_node_set(const Var& local, const Var& global, Stream stream) {
  const std::array<Var, 2> parts{local, global};
  return {num::concat_rows(parts), stream};
}

RelationMatrix relation_matrix(num::Tape& tape, const num::ParamStore& params, std::size_t layer,
                               const SimilarityNodeSet& nodes) {
  if (nodes.S.shape().size() != 2 || nodes.nodes() < 2) {
    throw DimensionError("relation_matrix: need at least two nodes, got " + num::shape_str(nodes.S.shape()));
  }
  const Var wp = tape.bind(params, names::hsr(layer, "w_p"));
  const Var wq = tape.bind(params, names::hsr(layer, "w_q"));
  const Var ep = num::matmul(nodes.S, num::transpose(wp));
  const Var eq = num::matmul(nodes.S, num::transpose(wq));
  return {num::matmul(ep, num::transpose(eq)), false};
}

RelationMatrix gate_relations(num::Tape& tape, const num::ParamStore& params, std::size_t layer,
                              const RelationMatrix& relations) {
  if (relations.gated) throw ContractError("gate_relations: relation matrix is already gated");
  const Var kernel = tape.bind(params, names::hsr(layer, "gate_kernel"));
  const Var bias = tape.bind(params, names::hsr(layer, "gate_bias"));
  const Var gate = num::sigmoid(num::conv2d_3x3(relations.R, kernel, bias));
  return {num::mul(relations.R, gate), true};
}

SimilarityNodeSet reason_step(num::Tape& tape, const num::ParamStore& params, std::size_t layer,
                              const SimilarityNodeSet& nodes, const ReasoningOptions& options) {
  RelationMatrix rel = relation_matrix(tape, params, layer, nodes);
  if (options.hierarchical) rel = gate_relations(tape, params, layer, rel);
  Var edges = rel.R;
  if (options.row_softmax) edges = num::softmax(edges, 1);

  const Var wg = tape.bind(params, names::hsr(layer, "w_g"));
  const Var wr = tape.bind(params, names::hsr(layer, "w_r"));
  const Var aggregated = num::matmul(num::matmul(edges, nodes.S), num::transpose(wg));
  const Var update = num::matmul(aggregated, num::transpose(wr));
  return {num::add(update, nodes.S), nodes.stream};
}

Var reason(num::Tape& tape, const num::ParamStore& params, const SimilarityNodeSet& nodes, std::size_t steps,
           const ReasoningOptions& options) {
  if (steps < 1) throw ConfigError("reason: at least one reasoning step is required");
  SimilarityNodeSet current = nodes;
  for (std::size_t layer = 0; layer < steps; ++layer) current = reason_step(tape, params, layer, current, options);
  return num::row(current.S, current.nodes() - 1);
}

}  // namespace tshsr::model
