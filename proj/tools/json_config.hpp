#pragma once

#include <string>
#include <vector>

#include <CLI11.hpp>

namespace mvsis::cli {

/// Reads CLI defaults from a JSON document. Top-level keys name flags of the
/// active subcommand; an object under a subcommand's name applies to that
/// subcommand only. An object given for "model" is passed through as inline
/// model text. Flags on the command line win over the file.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(std::string section) : section_(std::move(section)) {}

  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;

 private:
  std::string section_;
};

}  // namespace mvsis::cli
