#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cutsim {

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

// CSV writer with a documented header line; every cell is round-trip exact.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& cells);
    void flush();

private:
    std::string buffer_;
    std::filesystem::path path_;
    size_t columns_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

// Flat key = value config text with '#' comments.
using KeyValueMap = std::map<std::string, std::string>;
KeyValueMap read_key_values(const std::filesystem::path& path);
void write_key_values(const std::filesystem::path& path, const KeyValueMap& kv);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace cutsim
