/*
 * MetaImage (.mhd header + .raw data) reader and writer.
 *
 * Volumes are MET_SHORT, masks MET_UCHAR with values restricted to {0,1}.
 * Output is always little-endian; input honours BinaryDataByteOrderMSB.
 */

#ifndef CTBRAIN_MHDIO_HPP
#define CTBRAIN_MHDIO_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctbrain/voxelgrid.hpp"

namespace ctbrain {

class MhdError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class ElementType { Short, UChar };

struct MetaHeader {
  Dims dims;
  Spacing spacing;
  ElementType element_type = ElementType::Short;
  bool byte_order_msb = false;
  std::string data_file;
  /// Keys that were present but not honoured.
  std::vector<std::string> ignored_keys;
};

MetaHeader parse_header(const std::string& text, const std::string& source = "<header>");
MetaHeader read_header(const std::filesystem::path& header_path);
std::string format_header(const MetaHeader& header);

HUVolume read_volume(const std::filesystem::path& header_path);
void write_volume(const HUVolume& vol, const std::filesystem::path& header_path);

BinaryMask read_mask(const std::filesystem::path& header_path);

/// Writes set voxels as `on_value` (1 unless an overlay value is wanted).
void write_mask(const BinaryMask& mask, const std::filesystem::path& header_path,
                std::uint8_t on_value = 1);

/// Raw file written next to a header: same stem, ".raw" extension.
std::filesystem::path raw_path_for(const std::filesystem::path& header_path);

}  // namespace ctbrain

#endif
