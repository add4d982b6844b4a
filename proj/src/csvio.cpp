#include "mfrac/csvio.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace mfrac {

std::string fmt_double(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string fmt_int(long long x) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path) {
    auto* os = new std::ofstream(path, std::ios::binary); // binary: no newline translation anywhere
    if (!*os) {
        delete os;
        throw std::runtime_error("csv: cannot open '" + path + "' for writing");
    }
    os_ = os;
}

CsvWriter::~CsvWriter() { close(); }

void CsvWriter::close() {
    if (os_) {
        delete static_cast<std::ofstream*>(os_);
        os_ = nullptr;
    }
}

void CsvWriter::header(const std::vector<std::string>& cols) {
    auto& os = *static_cast<std::ofstream*>(os_);
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) os << ',';
        os << cols[i];
    }
    os << '\n';
    first_ = true;
}

void CsvWriter::cell(const std::string& s) {
    auto& os = *static_cast<std::ofstream*>(os_);
    if (!first_) os << ',';
    os << s;
    first_ = false;
}

void CsvWriter::cell(double x) { cell(fmt_double(x)); }
void CsvWriter::cell(long long x) { cell(fmt_int(x)); }
void CsvWriter::cell(int x) { cell(fmt_int(x)); }

void CsvWriter::end_row() {
    auto& os = *static_cast<std::ofstream*>(os_);
    os << '\n';
    first_ = true;
}

uint64_t fnv1a_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("hash: cannot open '" + path + "'");
    uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 14];
    while (is) {
        is.read(buf, sizeof buf);
        std::streamsize got = is.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

std::string hex64(uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return std::string(buf);
}

void write_manifest(const std::string& dir, const std::string& resolved_config_json,
                    const std::vector<std::string>& artifact_names) {
    std::ofstream os(dir + "/manifest.txt", std::ios::binary);
    if (!os) throw std::runtime_error("manifest: cannot open '" + dir + "/manifest.txt'");
    os << "config " << resolved_config_json << '\n';
    for (const std::string& name : artifact_names)
        os << "artifact " << name << " fnv64=" << hex64(fnv1a_file(dir + "/" + name)) << '\n';
}

} // namespace mfrac
