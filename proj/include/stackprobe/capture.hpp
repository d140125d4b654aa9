/*****************************************************************************
*  Copyright 2026 the stackprobe authors
*
*  Licensed under the Apache License, Version 2.0 (the "License");
*  you may not use this file except in compliance with the License.
*  You may obtain a copy of the License at
*
* http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
* *****************************************************************************/

// Stream-capture file format (bit-exact):
//   magic "SPC1", then frames of
//     1 byte  direction (0 = client to server, 1 = server to client)
//     4 bytes payload length, big endian
//     N bytes payload
// Frames appear in the order the proxy tap observed the bytes.

#ifndef STACKPROBE_CAPTURE_HPP
#define STACKPROBE_CAPTURE_HPP

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace stackprobe::capture {

inline constexpr char kMagic[4] = {'S', 'P', 'C', '1'};

enum class Direction : std::uint8_t {
  client_to_server = 0,
  server_to_client = 1,
};

struct Frame {
  Direction direction = Direction::client_to_server;
  std::string payload;
};

/// Appends frames to a capture file. One writer per file.
class CaptureWriter {
 public:
  /// Creates/truncates the file and writes the magic.
  /// Throws CaptureOpenError.
  explicit CaptureWriter(const std::string& path);

  void append(Direction direction, std::string_view payload);
  void flush();

 private:
  std::ofstream out_;
  std::string path_;
};

/// Reads frames back. Invalid direction bytes are skipped one byte at a
/// time; a truncated trailing frame ends the stream. Both bump warnings().
class CaptureReader {
 public:
  /// Throws CaptureOpenError when the file is missing or the magic is wrong.
  explicit CaptureReader(const std::string& path);

  std::optional<Frame> next();
  std::size_t warnings() const { return warnings_; }

 private:
  std::ifstream in_;
  std::size_t warnings_ = 0;
};

/// Convenience: all frames of a file (plus the reader's warning count).
std::vector<Frame> read_all(const std::string& path,
                            std::size_t* warnings = nullptr);

}  // namespace stackprobe::capture

#endif  // STACKPROBE_CAPTURE_HPP
