#include "pscat/report.hpp"

#include <cmath>
#include <cstdio>

#include "pscat/errors.hpp"

namespace pscat {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Manifest::Manifest(nlohmann::json cfg) : config(std::move(cfg)) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(config.dump() + "|" + version)));
  hash = buf;
}

nlohmann::json Manifest::to_json() const {
  return {{"config", config}, {"version", version}, {"manifest_hash", hash}};
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const Manifest& manifest,
                     const std::vector<std::string>& header)
    : out_(path) {
  if (!out_) throw ConfigError("cannot write " + path.string());
  out_ << "# manifest_hash: " << manifest.hash << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) {
    out_ << (i ? "," : "") << header[i];
  }
  out_ << '\n';
}

void CsvWriter::sep() {
  if (!first_) out_ << ',';
  first_ = false;
}

CsvWriter& CsvWriter::cell(double v) {
  sep();
  out_ << format_real(v);
  return *this;
}

CsvWriter& CsvWriter::cell(std::int64_t v) {
  sep();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view v) {
  sep();
  out_ << v;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

void write_json(const std::filesystem::path& path, const Manifest& manifest,
                nlohmann::json body) {
  body["manifest_hash"] = manifest.hash;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << body.dump(2) << '\n';
}

}  // namespace pscat
