#include "semno/artifact.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "semno/error.hpp"

namespace semno {

namespace {

constexpr std::string_view kMagic = "#semno";

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

const std::string* ArtifactHeader::find(std::string_view key) const {
  for (const auto& [k, v] : params) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string escape_value(std::string_view raw) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(raw.size());
  for (unsigned char c : raw) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '%' || c == '=') {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

std::string unescape_value(std::string_view escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    if (escaped[i] == '%' && i + 2 < escaped.size()) {
      const int hi = hex_digit(escaped[i + 1]);
      const int lo = hex_digit(escaped[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += escaped[i];
  }
  return out;
}

std::string escape_field(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_field(std::string_view escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    if (escaped[i] == '\\' && i + 1 < escaped.size()) {
      const char n = escaped[++i];
      switch (n) {
        case 't': out += '\t'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        default: out += n;
      }
    } else {
      out += escaped[i];
    }
  }
  return out;
}

std::vector<std::string_view> split_view(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(line.substr(start));
      return parts;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string format_header(const ArtifactHeader& header) {
  std::string line{kMagic};
  line += ' ';
  line += std::to_string(header.version);
  line += ' ';
  line += header.stage;
  line += ' ';
  line += header.lineage.empty() ? "-" : header.lineage;
  for (const auto& [k, v] : header.params) {
    line += ' ';
    line += escape_value(k);
    line += '=';
    line += escape_value(v);
  }
  return line;
}

ArtifactHeader parse_header(std::string_view line, std::string_view source) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto parts = split_view(line, ' ');
  if (parts.size() < 4 || parts[0] != kMagic) {
    throw ArtifactError(std::string(source) + ": missing '#semno' artifact header");
  }
  ArtifactHeader header;
  try {
    header.version = std::stoi(std::string(parts[1]));
  } catch (const std::exception&) {
    throw ArtifactError(std::string(source) + ": unreadable format version");
  }
  if (header.version != kFormatVersion) {
    throw ArtifactError(std::string(source) + ": format version " + std::string(parts[1]) +
                        ", expected " + std::to_string(kFormatVersion));
  }
  header.stage = std::string(parts[2]);
  header.lineage = parts[3] == "-" ? std::string() : std::string(parts[3]);
  for (std::size_t i = 4; i < parts.size(); ++i) {
    if (parts[i].empty()) continue;
    const std::size_t eq = parts[i].find('=');
    if (eq == std::string_view::npos) {
      throw ArtifactError(std::string(source) + ": malformed header field '" +
                          std::string(parts[i]) + "'");
    }
    header.params.emplace_back(unescape_value(parts[i].substr(0, eq)),
                               unescape_value(parts[i].substr(eq + 1)));
  }
  return header;
}

ArtifactHeader read_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArtifactError("cannot open artifact " + path.string());
  std::string line;
  std::getline(in, line);
  return parse_header(line, path.string());
}

void expect_stage(const ArtifactHeader& header, std::string_view stage,
                  const std::filesystem::path& path) {
  if (header.stage != stage) {
    throw ArtifactError(path.string() + ": expected a '" + std::string(stage) +
                        "' artifact, found '" + header.stage + "'");
  }
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeFailure("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw RuntimeFailure("short write to " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw RuntimeFailure("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                         ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("cannot open artifact " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace semno
