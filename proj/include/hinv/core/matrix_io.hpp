#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Dense>

namespace hinv::io {

/// Row-major CSV, 17 significant digits, no header.
void write_csv(const std::filesystem::path& path, const Eigen::MatrixXd& mat);
[[nodiscard]] Eigen::MatrixXd read_csv(const std::filesystem::path& path);
[[nodiscard]] std::string to_csv(const Eigen::MatrixXd& mat);
[[nodiscard]] Eigen::MatrixXd parse_csv(const std::string& text);

/// Binary layout: "HINV", u32 rows, u32 cols, rows*cols f64 row-major; all little-endian.
void write_binary(const std::filesystem::path& path, const Eigen::MatrixXd& mat);
[[nodiscard]] Eigen::MatrixXd read_binary(const std::filesystem::path& path);
[[nodiscard]] std::string to_binary(const Eigen::MatrixXd& mat);
[[nodiscard]] Eigen::MatrixXd parse_binary(const std::string& bytes);

/// Dispatches on the ".bin" extension, CSV otherwise.
[[nodiscard]] Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
[[nodiscard]] std::string read_text(const std::filesystem::path& path);

}  // namespace hinv::io
