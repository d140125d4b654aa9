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

#include "stackprobe/capture.hpp"

#include "stackprobe/errors.hpp"

namespace stackprobe::capture {

CaptureWriter::CaptureWriter(const std::string& path) : path_(path) {
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw CaptureOpenError("cannot create capture file " + path);
  out_.write(kMagic, sizeof(kMagic));
  if (!out_) throw CaptureOpenError("cannot write capture header to " + path);
}

void CaptureWriter::append(Direction direction, std::string_view payload) {
  char head[5];
  head[0] = static_cast<char>(direction);
  std::uint32_t len = static_cast<std::uint32_t>(payload.size());
  head[1] = static_cast<char>((len >> 24) & 0xFF);
  head[2] = static_cast<char>((len >> 16) & 0xFF);
  head[3] = static_cast<char>((len >> 8) & 0xFF);
  head[4] = static_cast<char>(len & 0xFF);
  out_.write(head, sizeof(head));
  out_.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out_) throw CaptureOpenError("capture write failed for " + path_);
}

void CaptureWriter::flush() { out_.flush(); }

CaptureReader::CaptureReader(const std::string& path) {
  in_.open(path, std::ios::binary);
  if (!in_) throw CaptureOpenError("cannot open capture file " + path);
  char magic[4] = {};
  in_.read(magic, sizeof(magic));
  if (in_.gcount() != sizeof(magic) ||
      !std::equal(magic, magic + 4, kMagic)) {
    throw CaptureOpenError("not a capture file: " + path);
  }
}

std::optional<Frame> CaptureReader::next() {
  while (true) {
    int dir_byte = in_.get();
    if (dir_byte == EOF) return std::nullopt;
    if (dir_byte != 0 && dir_byte != 1) {
      ++warnings_;  // desynchronized: skip a byte and try again
      continue;
    }
    char len_bytes[4];
    in_.read(len_bytes, sizeof(len_bytes));
    if (in_.gcount() != sizeof(len_bytes)) {
      ++warnings_;
      return std::nullopt;
    }
    std::uint32_t len = 0;
    for (char b : len_bytes) {
      len = (len << 8) | static_cast<std::uint8_t>(b);
    }
    Frame frame;
    frame.direction = static_cast<Direction>(dir_byte);
    frame.payload.resize(len);
    in_.read(frame.payload.data(), static_cast<std::streamsize>(len));
    if (static_cast<std::uint32_t>(in_.gcount()) != len) {
      ++warnings_;
      return std::nullopt;
    }
    return frame;
  }
}

std::vector<Frame> read_all(const std::string& path, std::size_t* warnings) {
  CaptureReader reader(path);
  std::vector<Frame> frames;
  while (auto frame = reader.next()) {
    frames.push_back(std::move(*frame));
  }
  if (warnings) *warnings = reader.warnings();
  return frames;
}

}  // namespace stackprobe::capture
