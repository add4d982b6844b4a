#pragma once
#include <cstdint>
#include <string>
#include <vector>

// Artifact plumbing. All numbers go through std::to_chars: locale-proof,
// shortest round-trip, so identical runs produce byte-identical files.
namespace mfrac {

std::string fmt_double(double x);
std::string fmt_int(long long x);

struct CsvWriter {
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void header(const std::vector<std::string>& cols);
    void cell(const std::string& s);
    void cell(double x);
    void cell(long long x);
    void cell(int x);
    void end_row();
    void close();

  private:
    void* os_; // std::ofstream, kept out of the header
    bool first_ = true;
};

uint64_t fnv1a_file(const std::string& path);
std::string hex64(uint64_t x);

// "<name> fnv64=<hex>" per artifact, preceded by the resolved config
void write_manifest(const std::string& dir, const std::string& resolved_config_json,
                    const std::vector<std::string>& artifact_names);

} // namespace mfrac
