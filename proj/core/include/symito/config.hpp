#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "symito/harness.hpp"

namespace symito {

/// Configuration problems exit the CLI with code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parsed run configuration: the experiment plus output settings.
struct RunConfig {
  ExperimentConfig exp;
  std::string out_dir = "out";
  bool quiet = false;

  /// Canonical serialized form; reruns with the same canonical text are
  /// byte-identical.
  std::string canonical_text() const;
  std::uint64_t hash() const;  // FNV-1a over canonical_text
};

/// Flat INI-style text: [section] headers, key = value lines, '#' comments.
/// Every key is schema-checked; an unknown key raises ConfigError naming it.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

FunctionDescriptor parse_function(const std::string& s);
Function2 parse_function2(const std::string& s);
ProcessKind parse_process_kind(const std::string& s);

std::uint64_t fnv1a(const std::string& bytes);

}  // namespace symito
