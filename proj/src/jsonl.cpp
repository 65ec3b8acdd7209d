// Copyright 2026 The AgentSim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "agentsim/jsonl.hpp"

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "agentsim/error.hpp"

namespace agentsim::io {

namespace fs = std::filesystem;

bool is_gzip_path(const fs::path& path) { return path.extension() == ".gz"; }

struct LineWriter::Impl {
  fs::path path;
  gzFile gz = nullptr;
  std::ofstream plain;
};

LineWriter::LineWriter(const fs::path& path, bool append) : impl_(std::make_unique<Impl>()) {
  impl_->path = path;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  if (is_gzip_path(path)) {
    impl_->gz = gzopen(path.c_str(), "wb");
    if (impl_->gz == nullptr) {
      throw Error(ErrorCode::kIOError, "cannot open " + path.string() + " for writing");
    }
  } else {
    impl_->plain.open(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
    if (!impl_->plain) {
      throw Error(ErrorCode::kIOError, "cannot open " + path.string() + " for writing");
    }
  }
}

LineWriter::~LineWriter() {
  try {
    close();
  } catch (...) {
  }
}

void LineWriter::write_line(std::string_view line) {
  if (impl_->gz != nullptr) {
    const auto size = static_cast<unsigned>(line.size());
    if ((size > 0 && gzwrite(impl_->gz, line.data(), size) != static_cast<int>(size)) ||
        gzputc(impl_->gz, '\n') == -1) {
      throw Error(ErrorCode::kIOError, "write failed on " + impl_->path.string());
    }
    return;
  }
  if (!impl_->plain.is_open()) {
    throw Error(ErrorCode::kIOError, "write after close on " + impl_->path.string());
  }
  impl_->plain.write(line.data(), static_cast<std::streamsize>(line.size()));
  impl_->plain.put('\n');
  if (!impl_->plain) {
    throw Error(ErrorCode::kIOError, "write failed on " + impl_->path.string());
  }
}

void LineWriter::flush() {
  if (impl_->gz != nullptr) {
    gzflush(impl_->gz, Z_SYNC_FLUSH);
  } else if (impl_->plain.is_open()) {
    impl_->plain.flush();
  }
}

void LineWriter::close() {
  if (impl_->gz != nullptr) {
    const int rc = gzclose(impl_->gz);
    impl_->gz = nullptr;
    if (rc != Z_OK) {
      throw Error(ErrorCode::kIOError, "close failed on " + impl_->path.string());
    }
  } else if (impl_->plain.is_open()) {
    impl_->plain.close();
  }
}

std::string read_file(const fs::path& path) {
  if (is_gzip_path(path)) {
    gzFile gz = gzopen(path.c_str(), "rb");
    if (gz == nullptr) throw Error(ErrorCode::kIOError, "cannot read " + path.string());
    std::string out;
    char buffer[1 << 16];
    int n = 0;
    while ((n = gzread(gz, buffer, sizeof(buffer))) > 0) {
      out.append(buffer, static_cast<std::size_t>(n));
    }
    int errnum = Z_OK;
    gzerror(gz, &errnum);
    gzclose(gz);
    if (n < 0 || (errnum != Z_OK && errnum != Z_STREAM_END)) {
      throw Error(ErrorCode::kCorruptData, "corrupt gzip stream in " + path.string());
    }
    return out;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIOError, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void for_each_line(const fs::path& path,
                   const std::function<void(std::string_view, std::size_t)>& fn) {
  const std::string content = read_file(path);
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start <= content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    ++line_no;
    std::string_view line(content.data() + start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) fn(line, line_no);
    start = end + 1;
  }
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> lines;
  for_each_line(path, [&](std::string_view line, std::size_t) { lines.emplace_back(line); });
  return lines;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIOError, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIOError, "cannot rename onto " + path.string() + ": " + ec.message());
}

}  // namespace agentsim::io
