#include "grablab/reductions.hpp"

#include <algorithm>

#include "grablab/errors.hpp"
#include "grablab/rng.hpp"

namespace grablab {

namespace {

uint64_t center_entropy(const View& view, uint64_t salt) {
  uint64_t h = mix2(salt, view.ids[0]);
  for (uint8_t b : view.private_bits[0]) h = mix2(h, b + 2);
  return h;
}

std::vector<int> center_ports(const View& view) {
  std::vector<int> out;
  for (int p = 0; p < view.ball.delta; ++p)
    if (view.center_ports[p]) out.push_back(p);
  return out;
}

}  // namespace

AlgorithmDescriptor matching_to_grabbing(const AlgorithmDescriptor& matching_alg) {
  if (matching_alg.kind != ProblemKind::matching)
    throw UsageError("matching_to_grabbing needs a matching algorithm");
  AlgorithmDescriptor alg;
  alg.name = matching_alg.name + "+grab";
  alg.radius = matching_alg.radius;
  alg.kind = ProblemKind::grabbing;
  alg.bound = matching_alg.bound;
  int b = matching_alg.bound;
  auto inner = matching_alg.rule;
  alg.rule = [inner, b](const View& view) {
    std::vector<int> raw = inner(view);
    std::vector<int> claimed, free;
    for (int p : center_ports(view)) {
      if (p < static_cast<int>(raw.size()) && raw[p] == kLabelM)
        claimed.push_back(p);
      else
        free.push_back(p);
    }
    // Overfull: drop the largest-indexed extras (ports are scanned in order,
    // so `claimed` is already sorted ascending).
    while (static_cast<int>(claimed.size()) > b) {
      free.push_back(claimed.back());
      claimed.pop_back();
    }
    // Top up to exactly b with distinct random ports.
    int need = b - static_cast<int>(claimed.size());
    if (need > static_cast<int>(free.size()))
      throw RuleViolation("degree below b at the center");
    SplitRng rng(center_entropy(view, 0x746f70ULL), {});
    for (int i = 0; i < need; ++i) {
      size_t j = i + rng.below(free.size() - i);
      std::swap(free[i], free[j]);
      claimed.push_back(free[i]);
    }
    std::vector<int> out(view.ball.delta, kLabelU);
    for (int p : claimed) out[p] = kLabelM;
    return out;
  };
  return alg;
}

namespace {

AlgorithmDescriptor coloring_to_grabbing_impl(const AlgorithmDescriptor& coloring_alg,
                                              int fixed_chi) {
  if (coloring_alg.kind != ProblemKind::edge_coloring)
    throw UsageError("coloring_to_grabbing needs an edge-coloring algorithm");
  int palette = coloring_alg.bound;
  if (palette < 1) throw DomainError("palette must be >= 1");
  if (fixed_chi > palette) throw DomainError("fixed color outside palette");
  AlgorithmDescriptor alg;
  alg.name = coloring_alg.name + "+grab";
  alg.radius = coloring_alg.radius;
  alg.kind = ProblemKind::grabbing;
  alg.bound = 1;
  auto inner = coloring_alg.rule;
  alg.rule = [inner, palette, fixed_chi](const View& view) {
    int chi = fixed_chi;
    if (chi < 1) {  // sample the color class from the shared bits
      uint64_t h = 0x636f6cULL;
      for (uint8_t b : view.shared_bits) h = mix2(h, b + 2);
      chi = 1 + static_cast<int>(splitmix64(h) % static_cast<uint64_t>(palette));
    }
    std::vector<int> colors = inner(view);
    std::vector<int> out(view.ball.delta, kLabelU);
    for (int p : center_ports(view))
      if (p < static_cast<int>(colors.size()) && colors[p] == chi) {
        out[p] = kLabelM;  // lowest chi-colored port
        return out;
      }
    std::vector<int> ports = center_ports(view);
    if (ports.empty()) throw RuleViolation("isolated center cannot grab");
    SplitRng rng(center_entropy(view, 0x66616cULL), {});
    out[ports[rng.below(ports.size())]] = kLabelM;
    return out;
  };
  return alg;
}

}  // namespace

AlgorithmDescriptor coloring_to_grabbing(const AlgorithmDescriptor& coloring_alg) {
  return coloring_to_grabbing_impl(coloring_alg, 0);
}

AlgorithmDescriptor coloring_to_grabbing_fixed_color(const AlgorithmDescriptor& coloring_alg,
                                                     int chi) {
  if (chi < 1) throw DomainError("color classes are 1-based");
  return coloring_to_grabbing_impl(coloring_alg, chi);
}

}  // namespace grablab
