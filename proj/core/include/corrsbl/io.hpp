#pragma once

#include <map>
#include <string>

#include "corrsbl/linmodel.hpp"

namespace corrsbl {

// Plain-text numeric CSV, one row per line, no header. A sidecar key-value
// file at <path>.meta records rows= and cols=; the reader validates against
// it when present, the writer always emits it.
MatrixXd read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const MatrixXd& m);

// Flat key=value file: one assignment per line, '#' starts a comment, blank
// lines ignored. Duplicate keys are an error.
std::map<std::string, std::string> read_key_value_file(
    const std::string& path);

// Inserts or overwrites key from one "key=value" assignment string.
void apply_assignment(std::map<std::string, std::string>& config,
                      const std::string& assignment);

}  // namespace corrsbl
