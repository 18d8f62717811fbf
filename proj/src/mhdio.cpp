#include "ctbrain/mhdio.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cctype>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace ctbrain {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

[[noreturn]] void fail(const std::string& source, int line, const std::string& key,
                       const std::string& what) {
  std::string msg = source;
  if (line > 0) msg += ":" + std::to_string(line);
  msg += ": ";
  if (!key.empty()) msg += key + ": ";
  throw MhdError(msg + what);
}

template <typename T>
T parse_number(const std::string& token, const std::string& source, int line,
               const std::string& key) {
  T value{};
  const char* first = token.data();
  const char* last = first + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    fail(source, line, key, "malformed numeric value '" + token + "'");
  }
  return value;
}

bool parse_bool(const std::string& token, const std::string& source, int line,
                const std::string& key) {
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "true" || lower == "1") return true;
  if (lower == "false" || lower == "0") return false;
  fail(source, line, key, "expected True or False, got '" + token + "'");
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::size_t element_size(ElementType t) { return t == ElementType::Short ? 2 : 1; }

std::vector<char> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MhdError(path.string() + ": cannot open");
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const char* bytes, std::size_t n) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw MhdError(path.string() + ": cannot open for writing");
  out.write(bytes, static_cast<std::streamsize>(n));
  if (!out) throw MhdError(path.string() + ": write failed");
}

std::vector<char> read_raw(const fs::path& header_path, const MetaHeader& h) {
  const fs::path raw = header_path.parent_path() / h.data_file;
  if (!fs::exists(raw)) throw MhdError(raw.string() + ": raw data file not found");
  std::vector<char> bytes = read_file(raw);
  const std::size_t expected = h.dims.voxels() * element_size(h.element_type);
  if (bytes.size() != expected) {
    throw MhdError(raw.string() + ": size mismatch, expected " + std::to_string(expected) +
                   " bytes, found " + std::to_string(bytes.size()));
  }
  return bytes;
}

void write_header_file(const fs::path& header_path, const MetaHeader& h) {
  const std::string text = format_header(h);
  write_file(header_path, text.data(), text.size());
}

}  // namespace

MetaHeader parse_header(const std::string& text, const std::string& source) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) fail(source, line_no, "", "expected 'Key = Value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) fail(source, line_no, "", "empty key");
    if (entries.count(key)) fail(source, line_no, key, "duplicate key");
    entries[key] = {value, line_no};
  }

  auto require = [&](const std::string& key) -> const Entry& {
    const auto it = entries.find(key);
    if (it == entries.end()) fail(source, 0, key, "missing required key");
    return it->second;
  };

  MetaHeader h;
  {
    const Entry& e = require("ObjectType");
    if (e.value != "Image") fail(source, e.line, "ObjectType", "unsupported object '" + e.value + "'");
  }
  {
    const Entry& e = require("NDims");
    if (parse_number<int>(e.value, source, e.line, "NDims") != 3) {
      fail(source, e.line, "NDims", "only 3-dimensional images are supported");
    }
  }
  {
    const Entry& e = require("DimSize");
    const auto toks = split_ws(e.value);
    if (toks.size() != 3) fail(source, e.line, "DimSize", "expected 3 values");
    std::array<std::size_t, 3> d{};
    for (std::size_t i = 0; i < 3; ++i) {
      d[i] = parse_number<std::size_t>(toks[i], source, e.line, "DimSize");
      if (d[i] == 0) fail(source, e.line, "DimSize", "dimensions must be >= 1");
    }
    h.dims = {d[0], d[1], d[2]};
  }
  {
    const Entry& e = require("ElementSpacing");
    const auto toks = split_ws(e.value);
    if (toks.size() != 3) fail(source, e.line, "ElementSpacing", "expected 3 values");
    std::array<double, 3> s{};
    for (std::size_t i = 0; i < 3; ++i) {
      s[i] = parse_number<double>(toks[i], source, e.line, "ElementSpacing");
      if (!(s[i] > 0.0)) fail(source, e.line, "ElementSpacing", "spacing must be > 0");
    }
    h.spacing = {s[0], s[1], s[2]};
  }
  {
    const Entry& e = require("ElementType");
    if (e.value == "MET_SHORT") {
      h.element_type = ElementType::Short;
    } else if (e.value == "MET_UCHAR") {
      h.element_type = ElementType::UChar;
    } else {
      fail(source, e.line, "ElementType", "unsupported element type '" + e.value + "'");
    }
  }
  {
    const Entry& e = require("ElementDataFile");
    const fs::path p(e.value);
    if (e.value.empty() || e.value == "LOCAL" || e.value == "LIST") {
      fail(source, e.line, "ElementDataFile", "only a separate raw data file is supported");
    }
    if (p.is_absolute() || p.has_root_name() || p.has_root_directory()) {
      fail(source, e.line, "ElementDataFile", "data file must be a relative path");
    }
    for (const auto& part : p) {
      if (part == "..") fail(source, e.line, "ElementDataFile", "directory traversal not allowed");
    }
    h.data_file = e.value;
  }
  if (const auto it = entries.find("BinaryDataByteOrderMSB"); it != entries.end()) {
    h.byte_order_msb = parse_bool(it->second.value, source, it->second.line, it->first);
  }
  if (const auto it = entries.find("BinaryData"); it != entries.end()) {
    if (!parse_bool(it->second.value, source, it->second.line, it->first)) {
      fail(source, it->second.line, it->first, "ASCII data is not supported");
    }
  }

  static const char* const known[] = {"ObjectType",  "NDims",          "DimSize",
                                      "ElementSpacing", "ElementType", "ElementDataFile",
                                      "BinaryDataByteOrderMSB", "BinaryData"};
  for (const auto& [key, entry] : entries) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      h.ignored_keys.push_back(key);
      std::clog << "warning: " << source << ":" << entry.line << ": ignoring key " << key << "\n";
    }
  }
  return h;
}

MetaHeader read_header(const fs::path& header_path) {
  if (!fs::exists(header_path)) throw MhdError(header_path.string() + ": input not found");
  const std::vector<char> bytes = read_file(header_path);
  return parse_header(std::string(bytes.begin(), bytes.end()), header_path.string());
}

std::string format_header(const MetaHeader& h) {
  std::string out;
  out += "ObjectType = Image\n";
  out += "NDims = 3\n";
  out += "BinaryData = True\n";
  out += std::string("BinaryDataByteOrderMSB = ") + (h.byte_order_msb ? "True" : "False") + "\n";
  out += "DimSize = " + std::to_string(h.dims.nx) + " " + std::to_string(h.dims.ny) + " " +
         std::to_string(h.dims.nz) + "\n";
  out += "ElementSpacing = " + format_double(h.spacing.sx) + " " + format_double(h.spacing.sy) +
         " " + format_double(h.spacing.sz) + "\n";
  out += std::string("ElementType = ") +
         (h.element_type == ElementType::Short ? "MET_SHORT" : "MET_UCHAR") + "\n";
  out += "ElementDataFile = " + h.data_file + "\n";
  return out;
}

fs::path raw_path_for(const fs::path& header_path) {
  fs::path raw = header_path;
  raw.replace_extension(".raw");
  return raw;
}

HUVolume read_volume(const fs::path& header_path) {
  const MetaHeader h = read_header(header_path);
  if (h.element_type != ElementType::Short) {
    throw MhdError(header_path.string() + ": ElementType: volumes must be MET_SHORT");
  }
  const std::vector<char> bytes = read_raw(header_path, h);
  std::vector<std::int16_t> data(h.dims.voxels());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto b0 = static_cast<std::uint8_t>(bytes[2 * i]);
    const auto b1 = static_cast<std::uint8_t>(bytes[2 * i + 1]);
    const std::uint16_t u = h.byte_order_msb ? static_cast<std::uint16_t>((b0 << 8) | b1)
                                             : static_cast<std::uint16_t>((b1 << 8) | b0);
    data[i] = std::bit_cast<std::int16_t>(u);
  }
  return HUVolume(h.dims, h.spacing, std::move(data));
}

void write_volume(const HUVolume& vol, const fs::path& header_path) {
  MetaHeader h;
  h.dims = vol.dims();
  h.spacing = vol.spacing();
  h.element_type = ElementType::Short;
  h.data_file = raw_path_for(header_path).filename().string();

  std::vector<char> bytes(vol.size() * 2);
  for (std::size_t i = 0; i < vol.size(); ++i) {
    const auto u = std::bit_cast<std::uint16_t>(vol[i]);
    bytes[2 * i] = static_cast<char>(u & 0xFF);
    bytes[2 * i + 1] = static_cast<char>(u >> 8);
  }
  write_file(raw_path_for(header_path), bytes.data(), bytes.size());
  write_header_file(header_path, h);
}

BinaryMask read_mask(const fs::path& header_path) {
  const MetaHeader h = read_header(header_path);
  if (h.element_type != ElementType::UChar) {
    throw MhdError(header_path.string() + ": ElementType: masks must be MET_UCHAR");
  }
  const std::vector<char> bytes = read_raw(header_path, h);
  std::vector<std::uint8_t> data(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const auto b = static_cast<std::uint8_t>(bytes[i]);
    if (b > 1) {
      throw MhdError(header_path.string() + ": invalid mask value " + std::to_string(b) +
                     " at voxel " + std::to_string(i));
    }
    data[i] = b;
  }
  return BinaryMask(h.dims, h.spacing, std::move(data));
}

void write_mask(const BinaryMask& mask, const fs::path& header_path, std::uint8_t on_value) {
  MetaHeader h;
  h.dims = mask.dims();
  h.spacing = mask.spacing();
  h.element_type = ElementType::UChar;
  h.data_file = raw_path_for(header_path).filename().string();

  std::vector<char> bytes(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    bytes[i] = static_cast<char>(mask[i] ? on_value : 0);
  }
  write_file(raw_path_for(header_path), bytes.data(), bytes.size());
  write_header_file(header_path, h);
}

}  // namespace ctbrain
