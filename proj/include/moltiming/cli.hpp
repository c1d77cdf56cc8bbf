#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "moltiming/channels.hpp"

namespace moltiming::cli {

enum ExitCode : int { ok = 0, usage = 2, numeric = 3, io = 4 };

/// Runs one command line. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Channel presets: built-ins overlaid by the file named in MOLTIMING_CONFIG,
/// or ./channels.ini when that variable is unset.
std::map<std::string, channels::ChannelSpec> load_presets();

/// Reads [name] sections with keys d, D, v, dim_scale. Throws std::runtime_error
/// if the file cannot be read or a value does not parse.
std::map<std::string, channels::ChannelSpec> read_preset_file(const std::string& path);

/// "1,3,15", "1:20" (integer step 1) or "0.5:4:0.5".
std::vector<double> parse_number_list(const std::string& text);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace moltiming::cli
