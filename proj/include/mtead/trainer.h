// Copyright 2026 The MTEAD Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MTEAD_TRAINER_H_
#define MTEAD_TRAINER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mtead/model.h"
#include "mtead/pipeline.h"
#include "mtead/simulator.h"

namespace mtead {

struct TrainConfig {
  RepMode mode = RepMode::kZvector;
  std::size_t batch_size = 8;
  double noam_factor = 0.1;
  std::size_t warmup = 1000;
  std::size_t max_steps = 2000;
  std::size_t chunk_frames = 500;
  // Probability of taking a speaker's representation from its global
  // enrollment signal rather than its in-session frames.
  double rep_source_global_ratio = 0.0;
  double global_enroll_s = 5.0;
  std::size_t checkpoint_every = 0;  // 0: only at the end
  std::uint64_t seed = 0;
  ModelConfig model;  // architecture; rep_mode follows `mode`

  void Validate() const;
  ModelConfig EffectiveModelConfig() const;
};

// -sum_{t,n} [y log p + (1 - y) log(1 - p)], p clamped to [1e-7, 1 - 1e-7].
// Throws ShapeError when the shapes differ.
Tensor BceLoss(Graph *g, const Tensor &posteriors, const Tensor &labels);

// A session ready for training: CMVN-normalized MFCCs and ground-truth
// labels (N x T, speakers by first onset).
struct TrainingSession {
  std::string id;
  FeatureSequence feats;
  SpeakerMask labels;
  SegmentList truth;
  std::vector<SpeakerRep> external;  // external mode, one per labels speaker
};

TrainingSession PrepareSession(const std::string &id, const AudioSignal &audio, const SegmentList &truth);
std::vector<TrainingSession> LoadTrainingSessions(const std::vector<ManifestEntry> &entries);

// Features of each simulated speaker's dedicated enrollment signal, built on
// first use from the voice encoded in the speaker id.
class EnrollmentCache {
 public:
  explicit EnrollmentCache(double seconds = 5.0) : seconds_(seconds) {}
  const Matrix &Get(const std::string &speaker_id);

 private:
  double seconds_;
  std::map<std::string, Matrix> cache_;
};

struct TrainingExample {
  Matrix feats;   // chunk x F
  Matrix labels;  // chunk x N
  std::vector<std::string> speakers;
  std::vector<Matrix> extractor_inputs;  // zvector mode: fit_frames x F each
  std::vector<bool> used_global;
  std::vector<SpeakerRep> reps;  // external mode
};

// Random chunk of chunk_frames (cyclically padded when the session is
// shorter) plus per-speaker representation inputs drawn per the G/L ratio.
// External mode takes G reps from `global_external`, keyed by speaker id.
TrainingExample MakeTrainingExample(const TrainingSession &session, const TrainConfig &config,
                                    EnrollmentCache *enrollment, Rng *rng,
                                    const std::map<std::string, SpeakerRep> *global_external = nullptr);

class Trainer {
 public:
  Trainer(const TrainConfig &config, std::vector<TrainingSession> sessions);
  // Resumes from a checkpoint's model and optimizer state.
  Trainer(const TrainConfig &config, std::vector<TrainingSession> sessions, Model model,
          const TensorList &state);

  // One optimizer step over batch_size examples; returns the summed loss.
  // Throws DataError naming the step on a non-finite loss.
  double Step();
  void Train(std::size_t steps,
             const std::function<void(std::int64_t step, double loss)> &on_step = {});

  Model &model() { return model_; }
  const Model &model() const { return model_; }
  const OptimizerState &optimizer() const { return optim_; }
  std::int64_t step() const { return optim_.step; }
  const std::vector<TrainingSession> &sessions() const { return sessions_; }
  TensorList ToTensors() const;

  // Loss of one example under the current parameters, without updating.
  double ExampleLoss(const TrainingExample &ex) const;
  // Example stream of step `step`, exposed for inspection.
  TrainingExample SampleExample(std::int64_t step, std::size_t index);

 private:
  void FillExternalReps();
  Tensor ExampleForward(Graph *g, const TrainingExample &ex) const;

  TrainConfig config_;
  std::vector<TrainingSession> sessions_;
  Model model_;
  ParameterSet trainable_;
  OptimizerState optim_;
  EnrollmentCache enrollment_;
  std::map<std::string, SpeakerRep> global_external_;
};

// Trains for config.max_steps, writing `checkpoint_path` every
// checkpoint_every steps and at the end, after calibrating the AHC
// threshold on the training sessions. Returns the final checkpoint.
TensorList Fit(const std::vector<TrainingSession> &sessions, const TrainConfig &config,
               const std::string &checkpoint_path = "",
               const std::function<void(std::int64_t, double)> &on_step = {});

// Sets the model's AHC threshold to the grid value minimizing mean DER of
// first-stage masks on `sessions`.
void CalibrateAhcThreshold(Model *model, const std::vector<TrainingSession> &sessions);

// Mean DER (collar 0.25) of `model` on `sessions` using ground-truth masks.
double TrainingSetDer(const Model &model, const std::vector<TrainingSession> &sessions);

}  // namespace mtead

#endif  // MTEAD_TRAINER_H_
