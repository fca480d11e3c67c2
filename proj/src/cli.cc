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

#include "mtead/cli.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "mtead/config.h"
#include "mtead/error.h"
#include "mtead/fmat.h"
#include "mtead/pipeline.h"
#include "mtead/scoring.h"
#include "mtead/trainer.h"

namespace mtead {

namespace {

namespace fs = std::filesystem;

struct SimulateArgs {
  std::string out_dir;
  int sessions = 1;
  std::vector<int> speakers = {2};
  double beta = 3.0;
  std::uint64_t seed = 0;
  int utterances = 10;
  double min_utt = 1.0;
  double max_utt = 4.0;
};

struct TrainArgs {
  std::string manifest;
  std::string config;
  std::string mode;
  std::string embeddings;
  std::string out;
  std::size_t log_every = 100;
};

struct EmbedArgs {
  std::string manifest;
  std::string ckpt;
  std::string config;
  std::string out;
};

struct AhcArgs {
  std::string wav;
  std::string ckpt;
  std::optional<double> threshold;
  std::optional<std::size_t> num_speakers;
  std::string id;
  std::string out;
};

struct InferArgs {
  std::string wav;
  std::string ckpt;
  std::string init_rttm;
  std::string ideal_rttm;
  std::string id;
  std::string out;
  double threshold = 0.5;
  std::size_t median = 11;
};

struct ScoreArgs {
  std::string ref;
  std::string hyp;
  double collar = 0.25;
  bool no_overlap = false;
};

std::string RecordingId(const std::string &explicit_id, const std::string &wav) {
  return explicit_id.empty() ? fs::path(wav).stem().string() : explicit_id;
}

// The segments of `id`, or of the only recording in the file.
SegmentList PickRecording(const std::map<std::string, SegmentList> &rttm, const std::string &id,
                          const std::string &path) {
  const auto it = rttm.find(id);
  if (it != rttm.end()) return it->second;
  if (rttm.size() == 1) return rttm.begin()->second;
  throw DataError(path + ": no segments for recording " + id);
}

void RunSimulate(const SimulateArgs &a, std::ostream &out) {
  fs::create_directories(a.out_dir);
  std::vector<ManifestEntry> entries;
  for (int i = 0; i < a.sessions; ++i) {
    SimConfig c;
    c.num_speakers = a.speakers[static_cast<std::size_t>(i) % a.speakers.size()];
    c.beta_s = a.beta;
    c.utterances_per_speaker = a.utterances;
    c.utterance_min_s = a.min_utt;
    c.utterance_max_s = a.max_utt;
    c.seed = a.seed + static_cast<std::uint64_t>(i);
    const Session s = SimulateSession(c);
    const std::string wav = s.id + ".wav";
    const std::string rttm = s.id + ".rttm";
    WriteWav((fs::path(a.out_dir) / wav).string(), s.audio);
    WriteRttmFile((fs::path(a.out_dir) / rttm).string(), s.truth);
    entries.push_back({s.id, wav, rttm, c.num_speakers, c.beta_s, c.seed});
  }
  const std::string manifest = (fs::path(a.out_dir) / "manifest.tsv").string();
  WriteManifest(manifest, entries);
  out << "wrote " << entries.size() << " sessions to " << manifest << "\n";
}

void AttachEmbeddings(const std::string &path, std::vector<TrainingSession> *sessions) {
  const auto table = LoadExternalEmbeddings(path);
  for (auto &s : *sessions) {
    s.external.clear();
    for (const auto &spk : s.labels.speakers) {
      const auto it = table.find(spk);
      if (it == table.end()) throw DataError(path + ": no embedding for speaker " + spk);
      s.external.push_back(it->second);
    }
  }
}

void RunTrain(const TrainArgs &a, std::ostream &out) {
  TrainConfig config = a.config.empty() ? TrainConfig{} : ReadTrainConfig(a.config);
  if (!a.mode.empty()) config.mode = ParseRepMode(a.mode);
  if (!a.embeddings.empty() && config.mode != RepMode::kExternal) {
    throw ConfigError("--embeddings requires --mode external");
  }
  auto sessions = LoadTrainingSessions(ReadManifest(a.manifest));
  if (!a.embeddings.empty()) AttachEmbeddings(a.embeddings, &sessions);
  const auto log = [&](std::int64_t step, double loss) {
    if (a.log_every > 0 && step % static_cast<std::int64_t>(a.log_every) == 0) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "step %lld loss %.4f\n", static_cast<long long>(step), loss);
      out << buf << std::flush;
    }
  };
  const TensorList ckpt = Fit(sessions, config, a.out, log);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%zu steps, ahc threshold %.2f", config.max_steps,
                ConfigFromTensors(ckpt).ahc_threshold);
  out << "wrote " << a.out << " (" << buf << ")\n";
}

void RunEmbed(const EmbedArgs &a, std::ostream &out) {
  const Model model = a.ckpt.empty() ? Model(ReadTrainConfig(a.config).EffectiveModelConfig())
                                     : LoadModel(a.ckpt);
  std::vector<SpeakerRep> reps;
  std::set<std::string> seen;
  for (const auto &s : LoadTrainingSessions(ReadManifest(a.manifest))) {
    for (std::size_t k = 0; k < s.labels.num_speakers(); ++k) {
      const std::string &spk = s.labels.speakers[k];
      if (!seen.insert(spk).second) {
        throw DataError("speaker " + spk + " appears in more than one session");
      }
      reps.push_back(AveragedWindowRep(s.feats, s.labels.mask.Row(k), model.extractor(), spk));
    }
  }
  SaveExternalEmbeddings(a.out, reps);
  out << "wrote " << reps.size() << " embeddings to " << a.out << "\n";
}

void RunAhc(const AhcArgs &a, std::ostream &out) {
  const Model model = LoadModel(a.ckpt);
  const FeatureSequence feats = SessionFeatures(ReadWav(a.wav));
  AhcConfig cfg = AhcConfig::Threshold(model.config().ahc_threshold);
  if (a.threshold) cfg = AhcConfig::Threshold(*a.threshold);
  if (a.num_speakers) cfg = AhcConfig::Oracle(*a.num_speakers);
  const SegmentList segs = AhcSegments(feats, model, cfg, RecordingId(a.id, a.wav));
  WriteRttmFile(a.out, segs);
  out << "wrote " << segs.size() << " segments to " << a.out << "\n";
}

void RunInfer(const InferArgs &a, std::ostream &out) {
  const Model model = LoadModel(a.ckpt);
  const FeatureSequence feats = SessionFeatures(ReadWav(a.wav));
  const std::string id = RecordingId(a.id, a.wav);
  const std::string &mask_path = a.ideal_rttm.empty() ? a.init_rttm : a.ideal_rttm;
  const SegmentList init = PickRecording(ReadRttm(mask_path), id, mask_path);
  const SegmentList segs =
      Diarize(feats, InitMask(init, feats), model, id, a.threshold, a.median);
  WriteRttmFile(a.out, segs);
  out << "wrote " << segs.size() << " segments to " << a.out << "\n";
}

void RunScore(const ScoreArgs &a, std::ostream &out) {
  const ScoreReport r = ScoreRecordings(ReadRttm(a.ref), ReadRttm(a.hyp), a.collar, !a.no_overlap);
  out << FormatReport(r) << "\n";
}

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Speaker diarization with per-speaker detection", "mtead"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto *simulate = app.add_subcommand("simulate", "Simulate multi-speaker sessions");
  simulate->add_option("--out", sim.out_dir, "Output directory")->required();
  simulate->add_option("--sessions", sim.sessions, "Number of sessions")->check(CLI::PositiveNumber);
  simulate->add_option("--speakers", sim.speakers, "Speakers per session, cycled")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  simulate->add_option("--beta", sim.beta, "Mean pause between a speaker's utterances (s)")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--seed", sim.seed, "Seed of the first session; session i uses seed+i");
  simulate->add_option("--utterances", sim.utterances, "Utterances per speaker")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--min-utt", sim.min_utt, "Shortest utterance (s)")->check(CLI::PositiveNumber);
  simulate->add_option("--max-utt", sim.max_utt, "Longest utterance (s)")->check(CLI::PositiveNumber);

  std::string feat_wav, feat_out;
  auto *featurize = app.add_subcommand("featurize", "Write CMVN-normalized MFCCs as FMAT");
  featurize->add_option("--wav", feat_wav, "Input WAV")->required();
  featurize->add_option("--out", feat_out, "Output FMAT")->required();

  TrainArgs tr;
  auto *train = app.add_subcommand("train", "Train a model on a manifest");
  train->add_option("--manifest", tr.manifest, "Session manifest")->required();
  train->add_option("--config", tr.config, "JSON training config");
  train->add_option("--mode", tr.mode, "Representation mode")
      ->check(CLI::IsMember({"zvector", "external"}));
  train->add_option("--embeddings", tr.embeddings, "External embeddings (FMAT plus .ids)");
  train->add_option("--out", tr.out, "Output checkpoint")->required();
  train->add_option("--log-every", tr.log_every, "Loss report interval in steps (0: silent)");

  EmbedArgs em;
  auto *embed = app.add_subcommand("embed", "Write window-averaged speaker embeddings");
  embed->add_option("--manifest", em.manifest, "Session manifest")->required();
  auto *embed_ckpt = embed->add_option("--ckpt", em.ckpt, "Checkpoint providing the extractor");
  auto *embed_cfg = embed->add_option("--config", em.config, "Config of a freshly initialized model");
  embed_ckpt->excludes(embed_cfg);
  embed->add_option("--out", em.out, "Output embeddings")->required();

  AhcArgs ah;
  auto *ahc = app.add_subcommand("ahc", "First-stage clustering diarization");
  ahc->add_option("--wav", ah.wav, "Input WAV")->required();
  ahc->add_option("--ckpt", ah.ckpt, "Checkpoint")->required();
  auto *ahc_thr = ahc->add_option("--threshold", ah.threshold, "Cosine distance stopping threshold");
  auto *ahc_k = ahc->add_option("--num-speakers", ah.num_speakers, "Oracle number of clusters")
                    ->check(CLI::PositiveNumber);
  ahc_thr->excludes(ahc_k);
  ahc->add_option("--id", ah.id, "Recording id (default: WAV file stem)");
  ahc->add_option("--out", ah.out, "Output RTTM")->required();

  InferArgs in;
  auto *infer = app.add_subcommand("infer", "Second-stage detection from speaker masks");
  infer->add_option("--wav", in.wav, "Input WAV")->required();
  infer->add_option("--ckpt", in.ckpt, "Checkpoint")->required();
  auto *init_opt = infer->add_option("--init-rttm", in.init_rttm, "First-stage RTTM");
  auto *ideal_opt =
      infer->add_option("--ideal-rttm", in.ideal_rttm, "Reference RTTM used as the masks instead");
  infer->add_option("--id", in.id, "Recording id (default: WAV file stem)");
  infer->add_option("--threshold", in.threshold, "Posterior threshold")->check(CLI::Range(0.0, 1.0));
  infer->add_option("--median", in.median, "Median filter width in frames (odd)");
  infer->add_option("--out", in.out, "Output RTTM")->required();

  ScoreArgs sc;
  auto *score = app.add_subcommand("score", "DER and JER of a hypothesis RTTM");
  score->add_option("--ref", sc.ref, "Reference RTTM")->required();
  score->add_option("--hyp", sc.hyp, "Hypothesis RTTM")->required();
  score->add_option("--collar", sc.collar, "No-score collar (s)")->check(CLI::NonNegativeNumber);
  score->add_flag("--no-overlap", sc.no_overlap, "Skip overlapped reference speech");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (infer->parsed() && init_opt->count() == 0 && ideal_opt->count() == 0) {
      throw CLI::RequiredError("--init-rttm or --ideal-rttm");
    }
    if (embed->parsed() && embed_ckpt->count() == 0 && embed_cfg->count() == 0) {
      throw CLI::RequiredError("--ckpt or --config");
    }
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    const CLI::App *sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) RunSimulate(sim, out);
    if (featurize->parsed()) {
      const FeatureSequence f = SessionFeatures(ReadWav(feat_wav));
      WriteFmat(feat_out, f.frames);
      out << "wrote " << f.num_frames() << " x " << f.dim() << " features to " << feat_out << "\n";
    }
    if (train->parsed()) RunTrain(tr, out);
    if (embed->parsed()) RunEmbed(em, out);
    if (ahc->parsed()) RunAhc(ah, out);
    if (infer->parsed()) RunInfer(in, out);
    if (score->parsed()) RunScore(sc, out);
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace mtead
