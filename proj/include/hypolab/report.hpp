#ifndef HYPOLAB_REPORT_HPP
#define HYPOLAB_REPORT_HPP

#include <string>
#include <vector>

namespace hypolab {

/// Shortest round-trip-exact decimal rendering (17 significant digits).
std::string format_double(double v);

/// CSV with a header row; numeric cells should be pre-formatted with
/// format_double so outputs are diffable across runs.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Write text to a file, creating parent directories.
void write_text_file(const std::string& path, const std::string& text);

std::string read_text_file(const std::string& path);

}  // namespace hypolab

#endif
