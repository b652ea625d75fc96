#include "tshsr/data/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "tshsr/errors.hpp"

namespace tshsr::data {

Dataset gen_synthetic(const SyntheticSpec& spec) {
  if (spec.pairs == 0 || spec.regions == 0 || spec.raw_dim == 0 || spec.length == 0 || spec.vocab_size == 0 ||
      spec.captions_per_image == 0) {
    throw ConfigError("gen_synthetic: all counts must be at least 1");
  }
  if (!(spec.signal_strength >= 0.0 && spec.signal_strength <= 1.0)) {
    throw ConfigError("gen_synthetic: signal_strength must lie in [0, 1]");
  }
  const double s = spec.signal_strength;

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> any_token(0, static_cast<std::uint32_t>(spec.vocab_size - 1));

  std::mt19937_64 world(spec.world_seed);
  std::vector<std::vector<double>> prototypes(spec.vocab_size, std::vector<double>(spec.raw_dim));
  for (auto& p : prototypes) {
    for (auto& v : p) v = normal(world);
  }

  // Separate streams keep region noise and caption noise independent of each other.
  std::mt19937_64 latent_rng(spec.seed);
  std::mt19937_64 region_rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  std::mt19937_64 caption_rng(spec.seed ^ 0xc2b2ae3d27d4eb4fULL);

  Dataset ds;
  ds.name = "synthetic";
  ds.regions = spec.regions;
  ds.raw_dim = spec.raw_dim;
  ds.vocab_size = spec.vocab_size;
  ds.max_length = spec.length;

  std::vector<std::uint32_t> pool(spec.vocab_size);
  std::iota(pool.begin(), pool.end(), 0u);

  for (std::size_t p = 0; p < spec.pairs; ++p) {
    std::vector<std::uint32_t> concepts(spec.length);
    if (spec.length <= spec.vocab_size) {
      // Distinct concepts: partial Fisher-Yates over the vocabulary.
      for (std::size_t j = 0; j < spec.length; ++j) {
        std::uniform_int_distribution<std::size_t> pick(j, spec.vocab_size - 1);
        std::swap(pool[j], pool[pick(latent_rng)]);
        concepts[j] = pool[j];
      }
    } else {
      for (auto& c : concepts) c = any_token(latent_rng);
    }

    FeatureBundle b;
    b.image_id = "syn-" + std::to_string(spec.seed) + "-" + std::to_string(p);
    b.regions = num::Tensor({spec.regions, spec.raw_dim});
    for (std::size_t k = 0; k < spec.regions; ++k) {
      const auto& proto = prototypes[concepts[k % spec.length]];
      for (std::size_t j = 0; j < spec.raw_dim; ++j) {
        const double v = s * proto[j] + (1.0 - s) * normal(region_rng);
        b.regions.at(k, j) = static_cast<double>(static_cast<float>(v));
      }
    }
    for (std::size_t c = 0; c < spec.captions_per_image; ++c) {
      TokenSeq caption(spec.length);
      for (std::size_t j = 0; j < spec.length; ++j) {
        const bool from_latent = coin(caption_rng) < s;
        const std::uint32_t noise = any_token(caption_rng);
        caption[j] = from_latent ? concepts[j] : noise;
      }
      b.captions.push_back(std::move(caption));
    }
    ds.bundles.push_back(std::move(b));
  }
  return ds;
}

}  // namespace tshsr::data
