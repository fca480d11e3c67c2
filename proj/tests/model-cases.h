#ifndef MTEAD_TESTS_MODEL_CASES_H_
#define MTEAD_TESTS_MODEL_CASES_H_

// Small models and feature inputs shared by checkpoint, training and
// acceptance tests.

#include "mtead/model.h"

namespace mtead::testing {

inline ModelConfig TinyModelConfig(std::uint64_t seed = 1) {
  ModelConfig c;
  c.extractor.input_dim = 20;
  c.extractor.channels = {4, 8};
  c.extractor.attention_dim = 4;
  c.extractor.fit_frames = 60;
  c.detector.feat_dim = 20;
  c.detector.cnn_layers = 2;
  c.detector.cnn_channels = 4;
  c.detector.cnn_kernel = 3;
  c.detector.model_dim = 8;
  c.detector.hidden = 4;
  c.detector.mixer_layers = 1;
  c.detector.num_blocks = 2;
  c.detector.chunk_frames = 80;
  c.seed = seed;
  return c;
}

inline FeatureSequence RandomFeatures(std::size_t frames, std::size_t dim, Rng *rng) {
  FeatureSequence f;
  f.frames = Matrix(frames, dim);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double &x : f.frames.data()) x = n(*rng);
  return f;
}

inline std::vector<SpeakerRep> RandomReps(std::size_t n, Rng *rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<SpeakerRep> reps(n);
  for (std::size_t i = 0; i < n; ++i) {
    reps[i].vector.resize(kRepDim);
    for (double &x : reps[i].vector) x = d(*rng);
    reps[i].speaker_id = "s" + std::to_string(i);
  }
  return reps;
}

}  // namespace mtead::testing

#endif  // MTEAD_TESTS_MODEL_CASES_H_
