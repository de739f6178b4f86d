#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mvn/config.hpp"
#include "mvn/pipeline.hpp"

namespace mvn {

FrameSpec frame_spec_from(const RunConfig& cfg);
SceneSampleParams scene_params_from(const RunConfig& cfg);
TrainConfig train_config_from(const RunConfig& cfg);
EvalConfig eval_config_from(const RunConfig& cfg);
bool per_frame_shuffle_from(const RunConfig& cfg);
CorpusBanks banks_from(const RunConfig& cfg);
std::unique_ptr<ExampleSource> source_from(const RunConfig& cfg);

// Command bodies behind the CLI subcommands (also exposed to python).
// Each writes its artifacts plus the fully resolved config under out_dir.
namespace cmd {

// dataset manifest (+ optional multi-channel WAV dump)
void gen_data(const RunConfig& cfg, const std::string& out_dir);

// scene files (+ optional rendered impulse-response cache)
void simulate(const RunConfig& cfg, const std::string& out_dir);

// checkpoint.bin, resume.bin, training_curve.csv
void train_run(const RunConfig& cfg, const std::string& out_dir);

// report_raw.csv + report_agg.csv; several checkpoints get a model column
void eval_run(const RunConfig& cfg, const std::vector<std::string>& checkpoint_paths,
              const std::string& out_dir);

// one SVG per scheme found in the report rows
std::vector<std::string> plot(const std::vector<std::string>& csv_paths,
                              const std::string& out_dir, int width = 640,
                              int height = 420);

}  // namespace cmd

}  // namespace mvn
