#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace pscat {

inline constexpr std::string_view kVersion = "1.0.0";

std::uint64_t fnv1a64(std::string_view data);

// Run manifest: the full configuration plus software version. Its hash is
// stamped into every file a run writes.
struct Manifest {
  nlohmann::json config;
  std::string version{kVersion};
  std::string hash;

  explicit Manifest(nlohmann::json cfg);
  nlohmann::json to_json() const;
};

std::string format_real(double v);

// CSV with a leading "# manifest_hash: ..." comment line, 17 significant
// digits for reals.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const Manifest& manifest,
            const std::vector<std::string>& header);

  CsvWriter& cell(double v);
  CsvWriter& cell(std::int64_t v);
  CsvWriter& cell(std::size_t v) { return cell(static_cast<std::int64_t>(v)); }
  CsvWriter& cell(int v) { return cell(static_cast<std::int64_t>(v)); }
  CsvWriter& cell(bool v) { return cell(static_cast<std::int64_t>(v ? 1 : 0)); }
  CsvWriter& cell(std::string_view v);
  void end_row();

 private:
  void sep();
  std::ofstream out_;
  bool first_ = true;
};

// Pretty JSON with "manifest_hash" added at the top level.
void write_json(const std::filesystem::path& path, const Manifest& manifest,
                nlohmann::json body);

}  // namespace pscat
