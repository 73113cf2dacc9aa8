#pragma once

// The qva command line: verb dispatch, defaults, and the JSON report.

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qva/verify.h"

namespace qva::cli {

enum Exit { kPass = 0, kFail = 1, kInconclusive = 2, kUsage = 3 };

struct Options {
  std::string verb;
  std::string spec_path;
  std::map<std::string, int> ints;  // only the flags the user gave
  std::optional<std::string> a, b;  // generator names for pair verbs
  std::optional<std::string> out;
  bool timings = false;
};

// Effective parameters of a verb: user flags over defaults; the window
// default comes from QVA_DEFAULT_WINDOW when set.
std::map<std::string, int> effective_params(const Options& opt);
int default_window();

const std::vector<std::string>& verbs();

struct Report {
  std::string verb;
  std::string spec_path;
  std::string spec_hash;
  std::map<std::string, int> params;
  std::vector<CheckReport> checks;
  Status status = Status::pass;
  double seconds = 0;
};

// FNV-1a 64 of the bytes, as 16 hex digits.
std::string fnv1a64(const std::string& bytes);

std::string to_json(const Report& r, bool timings);
int exit_code(Status s);

// Runs one parsed command against spec text already read from disk.
Report run(const Options& opt, const std::string& spec_text);

// Full entry point: parses argv, runs, prints to out (and --out), returns the
// process exit status.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qva::cli
