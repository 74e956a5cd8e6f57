#ifndef ALO_INSTANCE_H_
#define ALO_INSTANCE_H_

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "alo/model.h"

namespace alo {

// Two-mode truncated Gaussian for one size class. Masses are drawn with equal
// weight from N(mode_low, sigma) and N(mode_high, sigma), kept when strictly
// inside (lower, upper) before and after scaling by 20/N and rounding.
struct SizeClassParams {
  double mode_low = 0;
  double mode_high = 0;
  double sigma = 0;
  double lower = 0;
  double upper = 0;

  friend bool operator==(const SizeClassParams&,
                         const SizeClassParams&) = default;
};

std::array<SizeClassParams, 3> DefaultSizeClasses();

struct GeneratorConfig {
  int n1 = 0;
  int n2 = 0;
  int n3 = 0;
  int bin_count = 20;
  std::uint64_t seed = 0;
  std::array<SizeClassParams, 3> classes = DefaultSizeClasses();

  void Validate() const;

  friend bool operator==(const GeneratorConfig&,
                         const GeneratorConfig&) = default;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Provenance {
  enum class Kind { kReference, kGenerated, kFile };
  Kind kind = Kind::kFile;
  std::optional<GeneratorConfig> generator;  // kGenerated only
  std::string source;                        // kFile only, may be empty

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Instance {
  AircraftSpec spec;
  Payload payload;
  Provenance provenance;

  friend bool operator==(const Instance&, const Instance&) = default;
};

// Seed of the random stream used for size class `size` (1..3):
// splitmix64(seed + size * 0x9E3779B97F4A7C15), feeding std::mt19937_64.
std::uint64_t SizeClassStreamSeed(std::uint64_t seed, int size);

// Ids are 1..n1 for size 1, then size 2, then size 3. Deterministic in
// (config). Throws GenerationError when a truncation window cannot be filled
// within 10^6 extra draws.
Payload GenerateMasses(const GeneratorConfig& config);

struct SizeSplit {
  int n1 = 0;
  int n2 = 0;
  int n3 = 0;

  friend bool operator==(const SizeSplit&, const SizeSplit&) = default;
};

// n/2, n/3, n/6 apportioned with the largest-remainder rule.
SizeSplit SplitSizes(int n);

// Aircraft constants of the reference data set with the given bin count.
AircraftSpec DefaultAircraft(int bin_count);

Instance AirbusReferenceInstance();

Instance GenerateInstance(const GeneratorConfig& config);

// JSON instance schema "alo-instance/1"; see docs/formats.md.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

std::string SaveInstance(const Instance& instance);
Instance LoadInstance(std::string_view document);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throw IoError.
std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view content);

}  // namespace alo

#endif  // ALO_INSTANCE_H_
