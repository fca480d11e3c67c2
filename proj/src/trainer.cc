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

#include "mtead/trainer.h"

#include <cmath>
#include <utility>

#include "mtead/error.h"
#include "mtead/ops.h"
#include "mtead/scoring.h"

namespace mtead {

namespace {

constexpr std::uint64_t kDataStream = 0x7a11;
// Synthesis variant of enrollment signals, disjoint from utterance variants.
constexpr int kEnrollmentVariant = 1 << 20;

std::size_t UniformIndex(std::size_t n, Rng *rng) {
  const auto i = static_cast<std::size_t>(Uniform01(rng) * static_cast<double>(n));
  return std::min(i, n - 1);
}

}  // namespace

void TrainConfig::Validate() const {
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (!(rep_source_global_ratio >= 0.0 && rep_source_global_ratio <= 1.0)) {
    throw ConfigError("train: rep_source_global_ratio must lie in [0, 1]");
  }
  if (!(noam_factor > 0.0)) throw ConfigError("train: noam_factor must be positive");
  if (warmup < 1) throw ConfigError("train: warmup must be >= 1");
  if (chunk_frames < 1) throw ConfigError("train: chunk_frames must be >= 1");
  if (!(global_enroll_s > 0.0)) throw ConfigError("train: global_enroll_s must be positive");
}

ModelConfig TrainConfig::EffectiveModelConfig() const {
  ModelConfig m = model;
  m.rep_mode = mode;
  m.seed = seed;
  return m;
}

Tensor BceLoss(Graph *g, const Tensor &posteriors, const Tensor &labels) {
  if (posteriors.dims() != labels.dims()) {
    throw ShapeError("bce: posteriors " + ShapeToString(posteriors.dims()) + " vs labels " +
                     ShapeToString(labels.dims()));
  }
  return BinaryCrossEntropy(g, posteriors, labels);
}

TrainingSession PrepareSession(const std::string &id, const AudioSignal &audio,
                               const SegmentList &truth) {
  TrainingSession s;
  s.id = id;
  s.feats = SessionFeatures(audio);
  s.truth = truth;
  s.labels = SegmentsToMask(truth, s.feats.frame_shift_s, s.feats.num_frames());
  if (s.labels.num_speakers() == 0) throw DataError("session " + id + " has no speakers");
  return s;
}

std::vector<TrainingSession> LoadTrainingSessions(const std::vector<ManifestEntry> &entries) {
  if (entries.empty()) throw DataError("train: empty manifest");
  std::vector<TrainingSession> out;
  out.reserve(entries.size());
  for (const auto &e : entries) {
    const auto rttm = ReadRttm(e.rttm_path);
    const auto it = rttm.find(e.session_id);
    if (it == rttm.end()) {
      throw DataError("rttm " + e.rttm_path + " has no segments for " + e.session_id);
    }
    out.push_back(PrepareSession(e.session_id, ReadWav(e.wav_path), it->second));
  }
  return out;
}

const Matrix &EnrollmentCache::Get(const std::string &speaker_id) {
  auto it = cache_.find(speaker_id);
  if (it != cache_.end()) return it->second;
  const auto voice = VoiceFromSpeakerId(speaker_id);
  if (!voice) {
    throw DataError("no global enrollment signal for speaker " + speaker_id +
                    " (not a simulated speaker id)");
  }
  const AudioSignal audio = SynthSpeakerSignal(*voice, seconds_, kEnrollmentVariant);
  return cache_.emplace(speaker_id, SessionFeatures(audio).frames).first->second;
}

TrainingExample MakeTrainingExample(const TrainingSession &session, const TrainConfig &config,
                                    EnrollmentCache *enrollment, Rng *rng,
                                    const std::map<std::string, SpeakerRep> *global_external) {
  const std::size_t total = session.feats.num_frames();
  const std::size_t n = session.labels.num_speakers();
  if (n == 0) throw DataError("session " + session.id + " has no speakers");
  if (total == 0) throw DataError("session " + session.id + " has no frames");
  const std::size_t len = config.chunk_frames;
  const std::size_t dim = session.feats.dim();
  const std::size_t start = total > len ? UniformIndex(total - len + 1, rng) : 0;

  TrainingExample ex;
  ex.feats = Matrix(len, dim);
  ex.labels = Matrix(len, n);
  ex.speakers = session.labels.speakers;
  for (std::size_t t = 0; t < len; ++t) {
    const std::size_t src = (start + t) % total;
    const auto row = session.feats.frames.Row(src);
    std::copy(row.begin(), row.end(), ex.feats.Row(t).begin());
    for (std::size_t k = 0; k < n; ++k) ex.labels(t, k) = session.labels.mask(k, src);
  }

  const std::size_t fit = config.model.extractor.fit_frames;
  for (std::size_t k = 0; k < n; ++k) {
    const std::string &spk = session.labels.speakers[k];
    const bool global = Uniform01(rng) < config.rep_source_global_ratio;
    ex.used_global.push_back(global);
    if (config.mode == RepMode::kZvector) {
      ex.extractor_inputs.push_back(
          global ? FitFrames(enrollment->Get(spk), fit, rng)
                 : FitActiveFrames(session.feats.frames, session.labels.mask.Row(k), fit, rng));
      continue;
    }
    if (global) {
      if (!global_external || !global_external->count(spk)) {
        throw DataError("no global external rep for speaker " + spk);
      }
      ex.reps.push_back(global_external->at(spk));
    } else {
      if (session.external.size() != n) {
        throw DataError("session " + session.id + " lacks external reps");
      }
      ex.reps.push_back(session.external[k]);
    }
  }
  return ex;
}

Trainer::Trainer(const TrainConfig &config, std::vector<TrainingSession> sessions)
    : config_(config),
      sessions_(std::move(sessions)),
      model_((config.Validate(), config.EffectiveModelConfig())),
      trainable_(model_.TrainableParams()),
      optim_(OptimizerState::ForParameters(
          trainable_, {}, {config.noam_factor, config.model.detector.model_dim, config.warmup})),
      enrollment_(config.global_enroll_s) {
  if (sessions_.empty()) throw DataError("train: no sessions");
  FillExternalReps();
}

Trainer::Trainer(const TrainConfig &config, std::vector<TrainingSession> sessions, Model model,
                 const TensorList &state)
    : config_(config),
      sessions_(std::move(sessions)),
      model_(std::move(model)),
      trainable_(model_.TrainableParams()),
      optim_(OptimizerFromTensors(
          state, trainable_, {}, {config.noam_factor, model_.config().detector.model_dim, config.warmup})),
      enrollment_(config.global_enroll_s) {
  config_.Validate();
  if (sessions_.empty()) throw DataError("train: no sessions");
  if (model_.config().rep_mode != config_.mode) {
    throw ConfigError("train: checkpoint rep mode " + RepModeName(model_.config().rep_mode) +
                      " differs from configured " + RepModeName(config_.mode));
  }
  config_.model = model_.config();
  FillExternalReps();
}

void Trainer::FillExternalReps() {
  if (config_.mode != RepMode::kExternal) return;
  for (auto &s : sessions_) {
    if (s.external.empty()) {
      for (std::size_t k = 0; k < s.labels.num_speakers(); ++k) {
        s.external.push_back(
            AveragedWindowRep(s.feats, s.labels.mask.Row(k), model_.extractor(), s.labels.speakers[k]));
      }
    }
    if (s.external.size() != s.labels.num_speakers()) {
      throw DataError("session " + s.id + ": external reps do not match its speakers");
    }
    if (config_.rep_source_global_ratio <= 0.0) continue;
    for (const auto &spk : s.labels.speakers) {
      if (global_external_.count(spk)) continue;
      FeatureSequence enroll;
      enroll.frames = enrollment_.Get(spk);
      const std::vector<double> all(enroll.num_frames(), 1.0);
      global_external_.emplace(spk, AveragedWindowRep(enroll, all, model_.extractor(), spk));
    }
  }
}

TrainingExample Trainer::SampleExample(std::int64_t step, std::size_t index) {
  Rng rng(MixSeed(MixSeed(MixSeed(config_.seed, kDataStream), static_cast<std::uint64_t>(step)),
                  index));
  const TrainingSession &s = sessions_[UniformIndex(sessions_.size(), &rng)];
  return MakeTrainingExample(s, config_, &enrollment_, &rng, &global_external_);
}

Tensor Trainer::ExampleForward(Graph *g, const TrainingExample &ex) const {
  Tensor reps;
  if (config_.mode == RepMode::kZvector) {
    std::vector<Tensor> rows;
    rows.reserve(ex.extractor_inputs.size());
    for (const auto &m : ex.extractor_inputs) {
      rows.push_back(model_.extractor().Forward(g, MatrixToTensor(m)));
    }
    reps = ConcatRows(g, rows);
  } else {
    reps = StackReps(ex.reps);
  }
  const Tensor post = model_.detector().Forward(g, MatrixToTensor(ex.feats), reps);
  return BceLoss(g, post, MatrixToTensor(ex.labels));
}

double Trainer::ExampleLoss(const TrainingExample &ex) const {
  return ExampleForward(nullptr, ex).item();
}

double Trainer::Step() {
  const std::int64_t next = optim_.step + 1;
  trainable_.ZeroGrad();
  double total = 0.0;
  for (std::size_t i = 0; i < config_.batch_size; ++i) {
    const TrainingExample ex = SampleExample(next, i);
    Graph g;
    const Tensor loss = ExampleForward(&g, ex);
    const double v = loss.item();
    if (!std::isfinite(v)) {
      throw DataError("train: non-finite loss at step " + std::to_string(next));
    }
    total += v;
    g.Backward(loss);
  }
  const double lr = NoamLr(next, config_.noam_factor, optim_.noam.model_dim, config_.warmup);
  AdamStep(&optim_, &trainable_, lr);
  return total;
}

void Trainer::Train(std::size_t steps,
                    const std::function<void(std::int64_t step, double loss)> &on_step) {
  for (std::size_t i = 0; i < steps; ++i) {
    const double loss = Step();
    if (on_step) on_step(optim_.step, loss);
  }
}

TensorList Trainer::ToTensors() const {
  TensorList extra;
  extra.AddScalar("train/batch_size", static_cast<double>(config_.batch_size));
  extra.AddScalar("train/noam_factor", config_.noam_factor);
  extra.AddScalar("train/warmup", static_cast<double>(config_.warmup));
  extra.AddScalar("train/max_steps", static_cast<double>(config_.max_steps));
  extra.AddScalar("train/chunk_frames", static_cast<double>(config_.chunk_frames));
  extra.AddScalar("train/rep_source_global_ratio", config_.rep_source_global_ratio);
  extra.AddScalar("train/global_enroll_s", config_.global_enroll_s);
  return ModelToTensors(model_, &optim_, &extra);
}

double TrainingSetDer(const Model &model, const std::vector<TrainingSession> &sessions) {
  if (sessions.empty()) throw DataError("no sessions to score");
  double sum = 0.0;
  for (const auto &s : sessions) {
    const SegmentList hyp = Diarize(s.feats, s.labels, model, s.id);
    sum += ScoreDer(s.truth, hyp).der;
  }
  return sum / static_cast<double>(sessions.size());
}

void CalibrateAhcThreshold(Model *model, const std::vector<TrainingSession> &sessions) {
  std::vector<AhcCalibrationItem> items;
  for (const auto &s : sessions) {
    if (s.feats.num_frames() * s.feats.frame_shift_s < 1.5) continue;
    items.push_back({WindowEmbeddings(s.feats, model->extractor()), s.feats.num_frames(),
                     s.feats.frame_shift_s, s.truth});
  }
  if (items.empty()) return;
  model->mutable_config().ahc_threshold = CalibrateThreshold(items, DefaultThresholdGrid());
}

TensorList Fit(const std::vector<TrainingSession> &sessions, const TrainConfig &config,
               const std::string &checkpoint_path,
               const std::function<void(std::int64_t, double)> &on_step) {
  Trainer trainer(config, sessions);
  for (std::size_t i = 0; i < config.max_steps; ++i) {
    const double loss = trainer.Step();
    if (on_step) on_step(trainer.step(), loss);
    const bool last = i + 1 == config.max_steps;
    if (!last && config.checkpoint_every > 0 && trainer.step() % config.checkpoint_every == 0 &&
        !checkpoint_path.empty()) {
      WriteCheckpoint(checkpoint_path, trainer.ToTensors());
    }
  }
  CalibrateAhcThreshold(&trainer.model(), trainer.sessions());
  TensorList out = trainer.ToTensors();
  if (!checkpoint_path.empty()) WriteCheckpoint(checkpoint_path, out);
  return out;
}

}  // namespace mtead
