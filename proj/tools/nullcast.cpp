#include <iostream>

#include "nullcast/harness.hpp"

int main(int argc, char** argv) {
  using namespace nullcast;
  try {
    const Command cmd = parse_command_line(argc, argv);
    if (cmd.help) {
      std::cout << cmd.help_text;
      return 0;
    }
    if (cmd.list) {
      for (Experiment e : all_experiments()) std::cout << to_string(e) << "\t" << describe(e) << "\n";
      return 0;
    }
    const ExperimentConfig& cfg = cmd.config;
    const ExperimentOutput out = run_experiment(cfg);
    write_csv(out.aggregate, cfg.output_path);
    if (cfg.raw && !out.raw.columns.empty()) write_csv(out.raw, cfg.output_path + ".raw.csv");
    std::cerr << to_string(cfg.experiment) << ": " << out.aggregate.rows.size() << " rows -> " << cfg.output_path
              << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "nullcast: " << e.what() << "\n";
    if (e.code() == ErrorCode::IoError) return 3;
    if (e.code() == ErrorCode::ConfigInvalid) return 2;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "nullcast: " << e.what() << "\n";
    return 1;
  }
}
