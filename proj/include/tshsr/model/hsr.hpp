#pragma once

#include <cstddef>

#include "tshsr/numerics/tape.hpp"

// Hierarchical similarity reasoning: a graph over similarity vectors whose
// edges are bilinear affinities, gated by a 3x3 convolution over the relation
// matrix, followed by a residual node update. Layers are stacked with
// independent parameters named hsr.<layer>.*.

namespace tshsr::model {

enum class Stream { i2t, t2i };

/// Node matrix [N x m]: local similarity rows followed by the global node as the last row.
struct SimilarityNodeSet {
  num::Var S;
  Stream stream;

  std::size_t nodes() const { return S.shape()[0]; }
  std::size_t dim() const { return S.shape()[1]; }
};

struct RelationMatrix {
  num::Var R;  // [N x N]
  bool gated = false;
};

struct ReasoningOptions {
  bool hierarchical = true;
  bool row_softmax = false;
};

/// Stacks local rows [n x m] and the global vector [m] into an (n+1)-node set.
SimilarityNodeSet make_node_set(const num::Var& local, const num::Var& global, Stream stream);

/// R_pq = (W_p S_p) . (W_q S_q) for all ordered node pairs.
RelationMatrix relation_matrix(num::Tape& tape, const num::ParamStore& params, std::size_t layer,
                               const SimilarityNodeSet& nodes);

/// R' = R * sigmoid(conv3x3(R)). Throws ContractError if R is already gated.
RelationMatrix gate_relations(num::Tape& tape, const num::ParamStore& params, std::size_t layer,
                              const RelationMatrix& relations);

/// S* = ((R' S) W_g^T) W_r^T + S. Without the hierarchical gate, R is used in place of R'.
SimilarityNodeSet reason_step(num::Tape& tape, const num::ParamStore& params, std::size_t layer,
                              const SimilarityNodeSet& nodes, const ReasoningOptions& options = {});

/// Applies `steps` reasoning layers and reads out the global node (last row) as [m].
/// Throws ConfigError if steps == 0.
num::Var reason(num::Tape& tape, const num::ParamStore& params, const SimilarityNodeSet& nodes, std::size_t steps,
                const ReasoningOptions& options = {});

}  // namespace tshsr::model
