#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "gamp/dataset.hpp"

namespace gamp {

// libsvm sparse text: "<label> <idx>:<val> ..." with 1-based ascending indices.
// Labels 1/+1 map to +1; -1 and 0 (0/1 convention) map to -1. Anything else is a DomainError.
// Malformed lines raise ParseError carrying the 1-based line number.
// num_features overrides the inferred N (max index); it must be >= the max index seen.
Dataset read_libsvm(std::istream& in, std::optional<Index> num_features = std::nullopt);
Dataset read_libsvm(const std::filesystem::path& path, std::optional<Index> num_features = std::nullopt);

void write_libsvm(std::ostream& out, const Dataset& data);
void write_libsvm(const std::filesystem::path& path, const Dataset& data);

// Dense CSV, one example per line: label first, then N feature values. No header.
Dataset read_csv(std::istream& in);
Dataset read_csv(const std::filesystem::path& path);

void write_csv(std::ostream& out, const Dataset& data);
void write_csv(const std::filesystem::path& path, const Dataset& data);

}  // namespace gamp
