#include "hinv/core/matrix_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "hinv/core/error.hpp"

namespace hinv::io {

namespace {

constexpr char kMagic[4] = {'H', 'I', 'N', 'V'};

template <typename T>
void put_le(std::string& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(const std::string& in, std::size_t offset) {
    if (offset + sizeof(T) > in.size()) throw InvalidArgument("binary matrix: truncated payload");
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, in.data() + offset, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string to_csv(const Eigen::MatrixXd& mat) {
    std::string out;
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
        for (Eigen::Index j = 0; j < mat.cols(); ++j) {
            if (j > 0) out += ',';
            out += format_double(mat(i, j));
        }
        out += '\n';
    }
    return out;
}

Eigen::MatrixXd parse_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const auto comma = line.find(',', pos);
            const auto end = comma == std::string::npos ? line.size() : comma;
            std::string field = line.substr(pos, end - pos);
            const auto first = field.find_first_not_of(" \t");
            const auto last = field.find_last_not_of(" \t");
            field = first == std::string::npos ? "" : field.substr(first, last - first + 1);
            double v = 0.0;
            const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
            if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size())
                throw InvalidArgument("csv: bad number '" + field + "' on line " +
                                      std::to_string(lineno));
            row.push_back(v);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw InvalidArgument("csv: ragged row on line " + std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return Eigen::MatrixXd(0, 0);
    Eigen::MatrixXd mat(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return mat;
}

std::string to_binary(const Eigen::MatrixXd& mat) {
    std::string out(kMagic, 4);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(mat.rows()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(mat.cols()));
    for (Eigen::Index i = 0; i < mat.rows(); ++i)
        for (Eigen::Index j = 0; j < mat.cols(); ++j) put_le<double>(out, mat(i, j));
    return out;
}

Eigen::MatrixXd parse_binary(const std::string& bytes) {
    if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw InvalidArgument("binary matrix: missing HINV magic");
    const auto rows = get_le<std::uint32_t>(bytes, 4);
    const auto cols = get_le<std::uint32_t>(bytes, 8);
    const std::size_t expected = 12 + std::size_t{rows} * cols * sizeof(double);
    if (bytes.size() != expected) throw InvalidArgument("binary matrix: payload size mismatch");
    Eigen::MatrixXd mat(rows, cols);
    std::size_t off = 12;
    for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t j = 0; j < cols; ++j, off += sizeof(double))
            mat(i, j) = get_le<double>(bytes, off);
    return mat;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw InvalidArgument("write failed for '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_csv(const std::filesystem::path& path, const Eigen::MatrixXd& mat) {
    write_text(path, to_csv(mat));
}

Eigen::MatrixXd read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path)); }

void write_binary(const std::filesystem::path& path, const Eigen::MatrixXd& mat) {
    write_text(path, to_binary(mat));
}

Eigen::MatrixXd read_binary(const std::filesystem::path& path) {
    return parse_binary(read_text(path));
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
    return path.extension() == ".bin" ? read_binary(path) : read_csv(path);
}

}  // namespace hinv::io
