#include "gwire/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "gwire/error.hpp"

namespace gwire::io {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
    out << text;
    if (!out) fail(ErrorCode::io, "failed writing '" + path + "'");
}

nlohmann::json read_json(const std::string& path) {
    const std::string text = read_text(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        fail(ErrorCode::invalid_input, path + ":" + std::to_string(line) + ": invalid JSON (" + e.what() + ")");
    }
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string strip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
    return s.substr(b);
}

} // namespace

CsvMatrix parse_csv_matrix(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    CsvMatrix out;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty()) continue;
        for (auto& h : split(line)) out.header.push_back(strip(h));
        break;
    }
    if (out.header.empty()) fail(ErrorCode::invalid_input, source + ": empty CSV (a header line is required)");
    const std::size_t cols = out.header.size();

    std::vector<double> data;
    Index rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != cols)
            fail(ErrorCode::shape, source + ":" + std::to_string(lineno) + ": expected " + std::to_string(cols) +
                                       " columns, got " + std::to_string(cells.size()));
        for (std::size_t c = 0; c < cols; ++c) {
            const std::string cell = strip(cells[c]);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
                fail(ErrorCode::invalid_input, source + ":" + std::to_string(lineno) + ": non-numeric value '" + cell +
                                                   "' in column '" + out.header[c] + "'");
            data.push_back(v);
        }
        ++rows;
    }
    out.values = Matrix(rows, static_cast<Index>(cols));
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < static_cast<Index>(cols); ++c)
            out.values(r, c) = data[static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(c)];
    if (!all_finite(out.values)) fail(ErrorCode::invalid_input, source + ": non-finite values");
    return out;
}

CsvMatrix read_csv_matrix(const std::string& path) { return parse_csv_matrix(read_text(path), path); }

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string csv_matrix(const Matrix& m, const std::vector<std::string>& header) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
    out += '\n';
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) out += (c ? "," : "") + format_double(m(r, c));
        out += '\n';
    }
    return out;
}

void write_csv_matrix(const std::string& path, const Matrix& m, const std::vector<std::string>& header) {
    write_text(path, csv_matrix(m, header));
}

std::string triplets(const Matrix& m) {
    std::string out = "row,col,value\n";
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < m.cols(); ++c)
            if (m(r, c) != 0.0) out += std::to_string(r) + "," + std::to_string(c) + "," + format_double(m(r, c)) + "\n";
    return out;
}

std::string sha256_file(const std::string& path) {
    const std::string bytes = read_text(path);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        fail(ErrorCode::io, "SHA-256 failed for '" + path + "'");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

} // namespace gwire::io
