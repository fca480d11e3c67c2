#ifndef MTEAD_TESTS_DETECTOR_CASES_H_
#define MTEAD_TESTS_DETECTOR_CASES_H_

// Tiny end-to-end detector instance (D=8, T=12, N=3) for finite-difference
// checks. Projections are randomized so every path carries gradient.

#include "gradcheck.h"
#include "mtead/detector.h"
#include "mtead/ops.h"

namespace mtead::testing {

inline DetectorConfig TinyDetectorConfig() {
  DetectorConfig c;
  c.feat_dim = 5;
  c.cnn_layers = 2;
  c.cnn_channels = 4;
  c.cnn_kernel = 3;
  c.rep_dim = 6;
  c.model_dim = 8;
  c.hidden = 3;
  c.mixer_layers = 1;
  c.num_blocks = 3;
  c.chunk_frames = 0;
  return c;
}

inline GradCheckResult DetectorEndToEndGradCheck(std::uint64_t seed) {
  Rng rng(seed);
  ParameterSet params;
  const auto cfg = TinyDetectorConfig();
  const auto det = Detector::Create(&params, "det", cfg, &rng);
  for (const auto &[name, t] : params.items()) {
    if (name.find("_proj") != std::string::npos) {
      Tensor w = t;
      FillUniform(&w, -0.5, 0.5, &rng);
    }
  }
  Tensor feats({12, cfg.feat_dim});
  FillNormal(&feats, 0, 1, &rng);
  Tensor reps({3, cfg.rep_dim});
  FillNormal(&reps, 0, 1, &rng);
  Tensor labels({12, 3});
  for (auto &v : labels.data()) v = static_cast<double>(rng() % 2);
  std::vector<Tensor> leaves = {feats, reps};
  for (const auto &[name, t] : params.items()) leaves.push_back(t);
  return CheckGradients(leaves, [&](Graph *g) {
    return BinaryCrossEntropy(g, det.Forward(g, feats, reps), labels);
  });
}

}  // namespace mtead::testing

#endif  // MTEAD_TESTS_DETECTOR_CASES_H_
